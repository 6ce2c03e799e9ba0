"""Distance-only sampling of K independent planar PPPs around the origin.

Squared distances of a planar PPP of intensity lam, sorted, form a 1-D PPP
of rate pi*lam, so they are cumulative sums of Exp(pi*lam) increments.
Planar coordinates are never materialized.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Optional, Sequence

import numpy as np

from .model import TierConfig


@dataclass(frozen=True)
class SpatialRealization:
    """Squared BS distances, possibly for a batch of independent trials.

    ``sq_dist`` has shape ``(..., K, n)``, ascending along the last axis.
    ``tail_mean`` has shape ``(..., K)``: expected interference beyond the
    last sampled point of each tier, per watt of transmit power and with
    unit-mean fading (zero when tail compensation is off).
    """

    sq_dist: np.ndarray
    tail_mean: np.ndarray

    @property
    def per_tier(self) -> list[np.ndarray]:
        return [self.sq_dist[..., k, :] for k in range(self.sq_dist.shape[-2])]

    @property
    def num_tiers(self) -> int:
        return self.sq_dist.shape[-2]

    @property
    def points_per_tier(self) -> int:
        return self.sq_dist.shape[-1]

    @property
    def batch_shape(self) -> tuple[int, ...]:
        return self.sq_dist.shape[:-2]

    def __getitem__(self, idx) -> "SpatialRealization":
        """Select trials from a batched realization."""
        return SpatialRealization(self.sq_dist[idx], self.tail_mean[idx])


def sample_tier_distances(density: float, count: int, rng: np.random.Generator) -> np.ndarray:
    """Ascending squared distances of the ``count`` nearest points of a planar PPP."""
    increments = rng.standard_exponential(count)
    return np.cumsum(increments) / (np.pi * density)


def equivalent_intensity(tiers: Sequence[TierConfig], serving_tier: int) -> float:
    """Intensity of the superposed, power-rescaled process seen by tier ``serving_tier``."""
    p_star = tiers[serving_tier].power
    return float(sum(t.density * (t.power / p_star) ** (2.0 / t.pathloss) for t in tiers))


def tail_mean_interference(density, pathloss, radius):
    """Mean of sum |x|^-alpha over PPP points beyond ``radius`` (Campbell)."""
    radius = np.asarray(radius, dtype=float)
    return 2.0 * np.pi * density * radius ** (2.0 - pathloss) / (pathloss - 2.0)


def _tail(tiers, sq_last, tail_compensation):
    if not tail_compensation:
        return np.zeros_like(sq_last)
    out = np.empty_like(sq_last)
    for k, t in enumerate(tiers):
        out[..., k] = tail_mean_interference(t.density, t.pathloss, np.sqrt(sq_last[..., k]))
    return out


def sample_realization(
    tiers: Sequence[TierConfig],
    count: int,
    rng: np.random.Generator,
    tail_compensation: bool = True,
) -> SpatialRealization:
    """A single realization (``sq_dist`` shape ``(K, count)``)."""
    sq = np.stack([sample_tier_distances(t.density, count, rng) for t in tiers])
    return SpatialRealization(sq, _tail(tiers, sq[:, -1], tail_compensation))


def nearest_average_power(tiers: Sequence[TierConfig], sq_first: np.ndarray) -> np.ndarray:
    """P_k |X_1k|^-alpha_k for the nearest point of each tier; ``sq_first`` is (..., K)."""
    powers = np.array([t.power for t in tiers])
    half_alpha = np.array([t.pathloss for t in tiers]) / 2.0
    return powers * sq_first ** (-half_alpha)


def sample_batch(
    tiers: Sequence[TierConfig],
    count: int,
    trials: int,
    rng: np.random.Generator,
    tail_compensation: bool = True,
    serving_tier: Optional[int] = None,
    max_rounds: int = 10_000,
) -> SpatialRealization:
    """Sample ``trials`` independent realizations, shape ``(trials, K, count)``.

    With ``serving_tier`` set, trials are kept only when that tier provides
    the strongest nearest-point average power. The decision depends on the
    nearest points alone, so the remaining ``count - 1`` points of each tier
    are drawn only for accepted trials; given the nearest point they are an
    independent continuation of the 1-D process, so this is exact rejection.
    """
    K = len(tiers)
    rates = np.pi * np.array([t.density for t in tiers])
    if serving_tier is None:
        first = rng.standard_exponential((trials, K)) / rates
    else:
        kept: list[np.ndarray] = []
        have = 0
        for _ in range(max_rounds):
            need = trials - have
            if need <= 0:
                break
            cand = rng.standard_exponential((max(4 * need, 1024), K)) / rates
            power = nearest_average_power(tiers, cand)
            ok = np.argmax(power, axis=1) == serving_tier
            kept.append(cand[ok])
            have += int(ok.sum())
        else:
            raise RuntimeError(f"rejection sampling for serving tier {serving_tier} did not converge")
        first = np.concatenate(kept)[:trials]

    sq = np.empty((trials, K, count))
    sq[:, :, 0] = first
    if count > 1:
        steps = rng.standard_exponential((trials, K, count - 1)) / rates[None, :, None]
        sq[:, :, 1:] = first[:, :, None] + np.cumsum(steps, axis=2)
    return SpatialRealization(sq, _tail(tiers, sq[..., -1], tail_compensation))
