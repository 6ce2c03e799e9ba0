"""Coherence-block and overhead-delay laws, cooperation time fractions.

Delay D = fixed_offset + sum of independent exponential stages (a tandem of
exponential backhaul servers). Block length T ~ Gamma(M, 1/(M eta)), or
deterministic 1/eta.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from enum import Enum
from functools import lru_cache
from typing import Optional, Sequence

import numpy as np
from scipy import integrate, linalg, stats


@dataclass(frozen=True)
class CoherenceModel:
    """Block length law. ``shape=None`` means deterministic blocks of ``mean_block`` seconds."""

    mean_block: float
    shape: Optional[int] = None

    def __post_init__(self):
        if not self.mean_block > 0:
            raise ValueError("mean_block must be positive")
        if self.shape is not None and self.shape < 1:
            raise ValueError("shape must be a positive integer or None")

    @property
    def deterministic(self) -> bool:
        return self.shape is None

    @property
    def rate(self) -> float:
        return 1.0 / self.mean_block

    def sf(self, t):
        """P(T > t)."""
        t = np.asarray(t, dtype=float)
        if self.deterministic:
            return (t < self.mean_block).astype(float)
        return stats.gamma.sf(t, self.shape, scale=self.mean_block / self.shape)


@dataclass(frozen=True)
class DelayModel:
    stage_rates: tuple[float, ...] = ()
    fixed_offset: float = 0.0

    def __post_init__(self):
        object.__setattr__(self, "stage_rates", tuple(float(r) for r in self.stage_rates))
        if any(not r > 0 for r in self.stage_rates):
            raise ValueError("stage rates must be positive")
        if self.fixed_offset < 0:
            raise ValueError("fixed_offset must be >= 0")

    @classmethod
    def erlang(cls, mean: float, stages: int = 4, fixed_offset: float = 0.0) -> "DelayModel":
        """Equal-rate stages scaled so that E[D] = ``mean``; ``mean == fixed_offset`` gives no stages."""
        spread = mean - fixed_offset
        if spread < 0:
            raise ValueError("mean must be >= fixed_offset")
        if spread == 0:
            return cls((), fixed_offset)
        return cls((stages / spread,) * stages, fixed_offset)

    @property
    def mean(self) -> float:
        return self.fixed_offset + sum(1.0 / r for r in self.stage_rates)

    @property
    def is_zero(self) -> bool:
        return not self.stage_rates and self.fixed_offset == 0

    def cdf(self, t):
        """P(D <= t)."""
        t = np.asarray(t, dtype=float)
        x = t - self.fixed_offset
        if not self.stage_rates:
            return (x >= 0).astype(float)
        rates = self.stage_rates
        if len(set(rates)) == 1:
            out = stats.gamma.cdf(np.maximum(x, 0), len(rates), scale=1.0 / rates[0])
        else:
            out = np.vectorize(lambda y: 1.0 - _phase_survival(rates, y))(np.maximum(x, 0))
        return np.where(x >= 0, out, 0.0)

    def pdf(self, t):
        """Density of the absolutely continuous part (requires at least one stage)."""
        t = np.asarray(t, dtype=float)
        x = t - self.fixed_offset
        rates = self.stage_rates
        if len(set(rates)) == 1:
            out = stats.gamma.pdf(np.maximum(x, 0), len(rates), scale=1.0 / rates[0])
        else:
            out = np.vectorize(lambda y: _phase_density(rates, y))(np.maximum(x, 0))
        return np.where(x >= 0, out, 0.0)


def _sub_generator(rates: Sequence[float]) -> np.ndarray:
    J = len(rates)
    S = np.diag(-np.asarray(rates, dtype=float))
    S[np.arange(J - 1), np.arange(1, J)] = rates[:-1]
    return S


def _phase_survival(rates, x) -> float:
    start = np.zeros(len(rates))
    start[0] = 1.0
    return float(start @ linalg.expm(_sub_generator(rates) * x) @ np.ones(len(rates)))


def _phase_density(rates, x) -> float:
    start = np.zeros(len(rates))
    start[0] = 1.0
    exit_rates = np.zeros(len(rates))
    exit_rates[-1] = rates[-1]
    return float(start @ linalg.expm(_sub_generator(rates) * x) @ exit_rates)


def sample_coherence(model: CoherenceModel, rng: np.random.Generator, size=None):
    if model.deterministic:
        return np.full(size, model.mean_block) if size is not None else model.mean_block
    return rng.gamma(model.shape, model.mean_block / model.shape, size=size)


def sample_delay(model: DelayModel, rng: np.random.Generator, size=None):
    out = np.full(size if size is not None else (), model.fixed_offset, dtype=float)
    for r in model.stage_rates:
        out = out + rng.exponential(1.0 / r, size=size)
    return out if size is not None else float(out)


# --- joint probability and time fractions -----------------------------------

_QUAD = dict(epsabs=1e-13, epsrel=1e-11, limit=400)


def _quad(f, a, b, points=None) -> float:
    if b <= a:
        return 0.0
    pts = [p for p in (points or []) if a < p < b] or None
    if math.isinf(b):
        return integrate.quad(f, a, b, **_QUAD)[0]
    return integrate.quad(f, a, b, points=pts, **_QUAD)[0]


def _delay_upper(delay: DelayModel) -> float:
    """A point beyond which the delay survival is negligible (< 1e-16)."""
    if not delay.stage_rates:
        return delay.fixed_offset
    tail = delay.mean - delay.fixed_offset
    return delay.fixed_offset + tail * 60.0 + 60.0 / min(delay.stage_rates)


def _delay_points(delay: DelayModel) -> list[float]:
    spread = delay.mean - delay.fixed_offset
    return [delay.fixed_offset + f * spread for f in (0.25, 0.5, 1.0, 2.0, 4.0, 8.0, 16.0)]


def joint_prob(coherence: CoherenceModel, delay: DelayModel, s: float) -> float:
    """p(T, s) = P(D <= T, D <= s) for independent T and D.

    Deterministic T reduces to F_D(min(s, T)). Random T is integrated
    against the delay law: int_0^s f_D(u) P(T >= u) du (plus the atom of D
    when it has no exponential stage).
    """
    if s < 0:
        raise ValueError("s must be >= 0")
    if coherence.deterministic:
        return float(delay.cdf(min(s, coherence.mean_block)))
    c = delay.fixed_offset
    if not delay.stage_rates:
        return float(c <= s) * float(coherence.sf(c))
    hi = min(s, _delay_upper(delay))
    return _quad(lambda u: float(delay.pdf(u) * coherence.sf(u)), c, hi, _delay_points(delay))


def truncated_delay_mean(coherence: CoherenceModel, delay: DelayModel) -> float:
    """E[D 1{D <= T}], which equals int_0^inf {p(T, inf) - p(T, s)} ds."""
    c = delay.fixed_offset
    if not delay.stage_rates:
        return c * float(coherence.sf(c)) if not coherence.deterministic else c * float(c <= coherence.mean_block)
    if coherence.deterministic:
        T = coherence.mean_block
        if T <= c:
            return 0.0
        # E[D 1{D<=T}] = T F(T) - int_0^T F(s) ds
        return T * float(delay.cdf(T)) - _quad(lambda u: float(delay.cdf(u)), c, T, _delay_points(delay))
    hi = _delay_upper(delay)
    return _quad(lambda u: u * float(delay.pdf(u) * coherence.sf(u)), c, hi, _delay_points(delay))


def time_fraction_closed_form(coherence: CoherenceModel, delay: DelayModel) -> float:
    """tau = p(T, inf) - eta * E[D 1{D <= T}], clamped to [0, 1]."""
    if delay.is_zero:
        return 1.0
    p_inf = joint_prob(coherence, delay, math.inf)
    tau = p_inf - coherence.rate * truncated_delay_mean(coherence, delay)
    return min(1.0, max(0.0, tau))


def time_fraction_renewal(
    coherence: CoherenceModel,
    delay: DelayModel,
    rng: np.random.Generator,
    blocks: int = 1_000_000,
) -> float:
    """Renewal-reward oracle: sum (T - D)^+ / sum T over simulated blocks."""
    if blocks < 10_000:
        raise ValueError("blocks must be >= 1e4")
    T = np.asarray(sample_coherence(coherence, rng, size=blocks), dtype=float)
    D = np.asarray(sample_delay(delay, rng, size=blocks), dtype=float)
    return float(np.maximum(T - D, 0.0).sum() / T.sum())


class Estimator(str, Enum):
    CLOSED_FORM = "ClosedForm"
    RENEWAL = "RenewalOracle"


@dataclass(frozen=True)
class OverheadModel:
    coherence: CoherenceModel
    delay: DelayModel


@dataclass(frozen=True)
class TimeFractions:
    """Cooperation time fraction for coordinated BSs of each tier."""

    per_tier: tuple[float, ...]
    estimator: Estimator = Estimator.CLOSED_FORM

    def __post_init__(self):
        object.__setattr__(self, "per_tier", tuple(float(t) for t in self.per_tier))
        if any(not 0.0 <= t <= 1.0 for t in self.per_tier):
            raise ValueError("time fractions must lie in [0, 1]")

    @classmethod
    def uniform(cls, tau: float, num_tiers: int, estimator=Estimator.CLOSED_FORM) -> "TimeFractions":
        return cls((tau,) * num_tiers, estimator)


@lru_cache(maxsize=256)
def _cached_closed_form(coherence: CoherenceModel, delay: DelayModel) -> float:
    return time_fraction_closed_form(coherence, delay)


def time_fractions(overhead, num_tiers: int) -> TimeFractions:
    """Closed-form fractions for one overhead model shared by all tiers, or one model per tier."""
    if isinstance(overhead, TimeFractions):
        return overhead
    models = [overhead] * num_tiers if isinstance(overhead, OverheadModel) else list(overhead)
    if len(models) != num_tiers:
        raise ValueError("need one overhead model per tier")
    return TimeFractions(tuple(_cached_closed_form(m.coherence, m.delay) for m in models))


def subset_probability(fractions: Sequence[float], subset) -> float:
    """p_B for one subset; ``fractions`` are the members' taus, ``subset`` a bit mask or bool list."""
    tau = np.asarray(fractions, dtype=float)
    L = tau.size
    if np.ndim(subset) == 0:
        subset = (int(subset) >> np.arange(L)) & 1
    subset = np.asarray(subset, dtype=bool)
    return float(np.prod(np.where(subset, tau, 1.0 - tau)))


def subset_probabilities(member_tau: np.ndarray) -> np.ndarray:
    """p_B for every subset mask, shape ``(..., 2**L)`` from taus of shape ``(..., L)``."""
    member_tau = np.asarray(member_tau, dtype=float)
    L = member_tau.shape[-1]
    probs = np.ones(member_tau.shape[:-1] + (1,))
    # mask b = b_low + 2^j * bit_j: append member j as the next most significant bit
    for j in range(L):
        t = member_tau[..., j : j + 1]
        probs = np.concatenate([probs * (1.0 - t), probs * t], axis=-1)
    return probs
