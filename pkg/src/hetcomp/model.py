"""Configuration types for K-tier CoMP zero-forcing simulations.

Tier indices are 0-based throughout (tier 0 is the first entry of
``NetworkConfig.tiers``, the macro tier in the default setup).
"""
from __future__ import annotations

import hashlib
import json
import math
from dataclasses import asdict, dataclass
from enum import Enum
from typing import Any, Optional


class Policy(str, Enum):
    CROSS_TIER = "CrossTier"
    INTRA_TIER = "IntraTier"


class RateKind(str, Enum):
    FIXED_TARGET = "FixedTarget"
    SHANNON_GAP = "ShannonGap"


def db_to_linear(db: float) -> float:
    return 10.0 ** (db / 10.0)


@dataclass(frozen=True)
class TierConfig:
    """One BS tier. ``power`` in watts, ``density`` in BSs per m^2."""

    power: float
    antennas: int
    pathloss: float
    density: float
    feedback_bits: int = 0


@dataclass(frozen=True)
class NetworkConfig:
    tiers: tuple[TierConfig, ...]
    num_coordinated: int = 0
    coordination_policy: Policy = Policy.CROSS_TIER
    condition_serving_tier: Optional[int] = None
    truncation_points_per_tier: int = 200
    tail_compensation: bool = True

    def __post_init__(self):
        # accept lists from callers / JSON
        object.__setattr__(self, "tiers", tuple(self.tiers))
        object.__setattr__(self, "coordination_policy", Policy(self.coordination_policy))

    @property
    def num_tiers(self) -> int:
        return len(self.tiers)

    def replace(self, **changes) -> "NetworkConfig":
        d = {f: getattr(self, f) for f in self.__dataclass_fields__}
        d.update(changes)
        return NetworkConfig(**d)

    def serving_candidates(self) -> list[int]:
        if self.condition_serving_tier is not None:
            return [self.condition_serving_tier]
        return list(range(self.num_tiers))


@dataclass(frozen=True)
class RateMapping:
    kind: RateKind
    target_sir: float = 1.0
    target_rate: float = 1.0
    shannon_gap: float = 1.0

    def __post_init__(self):
        object.__setattr__(self, "kind", RateKind(self.kind))
        if self.target_sir <= 0:
            raise ValueError("target_sir must be positive")
        if self.shannon_gap < 1:
            raise ValueError("shannon_gap must be >= 1")

    @classmethod
    def coverage(cls, target_sir_db: float = 3.0, target_rate: float = 1.0) -> "RateMapping":
        return cls(RateKind.FIXED_TARGET, target_sir=db_to_linear(target_sir_db), target_rate=target_rate)

    @classmethod
    def shannon(cls, gap_db: float = 3.0) -> "RateMapping":
        return cls(RateKind.SHANNON_GAP, shannon_gap=db_to_linear(gap_db))


def reference_tiers(feedback_bits: Optional[list[int]] = None) -> tuple[TierConfig, ...]:
    """Macro / pico / femto parameters; feedback defaults to B = 3(N - 1)."""
    powers = (40.0, 2.0, 0.2)
    densities = (1e-6, 1e-5, 1e-4)
    pathloss = (4.0, 3.5, 3.0)
    antennas = (8, 4, 2)
    if feedback_bits is None:
        feedback_bits = [3 * (n - 1) for n in antennas]
    return tuple(
        TierConfig(p, n, a, lam, b)
        for p, n, a, lam, b in zip(powers, antennas, pathloss, densities, feedback_bits)
    )


def reference_network(num_coordinated: int = 1, **kwargs) -> NetworkConfig:
    kwargs.setdefault("condition_serving_tier", 0)
    return NetworkConfig(tiers=reference_tiers(), num_coordinated=num_coordinated, **kwargs)


def validate(config: NetworkConfig) -> list[str]:
    """Return every violated invariant of ``config`` (empty when valid)."""
    problems: list[str] = []
    if len(config.tiers) == 0:
        problems.append("at least one tier is required")
    for k, t in enumerate(config.tiers):
        if not t.power > 0:
            problems.append(f"tier {k}: power must be positive")
        if not t.density > 0:
            problems.append(f"tier {k}: density must be positive")
        if int(t.antennas) != t.antennas or t.antennas < 1:
            problems.append(f"tier {k}: antennas must be an integer >= 1")
        if not t.pathloss > 2:
            problems.append(f"tier {k}: pathloss must exceed 2")
        if int(t.feedback_bits) != t.feedback_bits or t.feedback_bits < 0:
            problems.append(f"tier {k}: feedback_bits must be a non-negative integer")

    L = config.num_coordinated
    if int(L) != L or L < 0:
        problems.append("num_coordinated must be a non-negative integer")
        return problems

    k_star = config.condition_serving_tier
    if k_star is not None and not 0 <= k_star < len(config.tiers):
        problems.append(f"condition_serving_tier {k_star} is not a valid tier index")
        return problems

    for k in config.serving_candidates():
        if k < len(config.tiers) and L >= config.tiers[k].antennas:
            problems.append(
                f"num_coordinated must be < serving antennas (tier {k} has {config.tiers[k].antennas})"
            )

    if L > 0:
        if config.coordination_policy is Policy.CROSS_TIER:
            member_tiers = range(len(config.tiers))
        else:
            member_tiers = config.serving_candidates()
        for k in member_tiers:
            if k < len(config.tiers) and config.tiers[k].antennas < 2:
                problems.append(f"tier {k}: zero-forcing requires >= 2 antennas for coordinated BSs")

    n = config.truncation_points_per_tier
    if int(n) != n or n < 1:
        problems.append("truncation_points_per_tier must be a positive integer")
    elif n < L + 1:
        problems.append("truncation_points_per_tier must be >= num_coordinated + 1")
    return problems


def check(config: NetworkConfig) -> NetworkConfig:
    problems = validate(config)
    if problems:
        raise ConfigError(problems)
    return config


class ConfigError(ValueError):
    def __init__(self, problems: list[str]):
        self.problems = list(problems)
        super().__init__("; ".join(self.problems))


# --- serialization -----------------------------------------------------------

def network_to_dict(config: NetworkConfig) -> dict[str, Any]:
    return {
        "tiers": [asdict(t) for t in config.tiers],
        "num_coordinated": config.num_coordinated,
        "coordination_policy": config.coordination_policy.value,
        "condition_serving_tier": config.condition_serving_tier,
        "truncation_points_per_tier": config.truncation_points_per_tier,
        "tail_compensation": config.tail_compensation,
    }


def network_from_dict(d: dict[str, Any]) -> NetworkConfig:
    tiers = tuple(
        TierConfig(
            power=float(t["power"]),
            antennas=int(t["antennas"]),
            pathloss=float(t["pathloss"]),
            density=float(t["density"]),
            feedback_bits=int(t.get("feedback_bits", 0)),
        )
        for t in d["tiers"]
    )
    return NetworkConfig(
        tiers=tiers,
        num_coordinated=int(d.get("num_coordinated", 0)),
        coordination_policy=Policy(d.get("coordination_policy", "CrossTier")),
        condition_serving_tier=d.get("condition_serving_tier"),
        truncation_points_per_tier=int(d.get("truncation_points_per_tier", 200)),
        tail_compensation=bool(d.get("tail_compensation", True)),
    )


def digest(obj: Any) -> str:
    """Content hash of a JSON-serializable object (canonical key order)."""
    blob = json.dumps(obj, sort_keys=True, separators=(",", ":"), default=_json_default)
    return hashlib.sha256(blob.encode()).hexdigest()[:16]


def _json_default(o):
    if isinstance(o, Enum):
        return o.value
    if isinstance(o, float) and math.isinf(o):
        return "inf"
    raise TypeError(f"not serializable: {type(o)}")
