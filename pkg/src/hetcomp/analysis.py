"""Closed-form SIR CDF bounds and distance identities for PPP networks.

Series of the form sum_i rho_i Gamma(i) / Gamma(i + a) are summed exactly:
explicit terms cover the coordinated BSs and the rho = 1 remainder uses

    sum_{i > n} Gamma(i) / Gamma(i + a) = Gamma(n + 1) / ((a - 1) Gamma(n + a)),   a > 1,

which telescopes from Gamma(i)/Gamma(i+a-1) - Gamma(i+1)/Gamma(i+a) = (a-1) Gamma(i)/Gamma(i+a).
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Mapping, Optional, Sequence

from scipy import special

from .geometry import equivalent_intensity
from .model import TierConfig


class DomainFault(ArithmeticError):
    """The closed form has no real value at the requested parameters."""

    def __init__(self, reason: str):
        self.reason = reason
        super().__init__(reason)


def distance_ratio_moment(i: int, nu: float) -> float:
    """E[(Y_1 / Y_i)^nu] for the points of a homogeneous 1-D PPP: Gamma(1+nu)(i-1)!/Gamma(i+nu)."""
    if i < 1 or nu <= 0:
        raise ValueError("need i >= 1 and nu > 0")
    return math.exp(special.gammaln(1 + nu) + special.gammaln(i) - special.gammaln(i + nu))


def expected_mth_distance(m: int, density: float) -> float:
    """E|X_m| of the m-th nearest point of a planar PPP of intensity ``density``."""
    if m < 1 or density <= 0:
        raise ValueError("need m >= 1 and density > 0")
    return (density * math.pi) ** -0.5 * math.exp(special.gammaln(m + 0.5) - special.gammaln(m))


def dominance_constant(l: int, pathloss: float, rho_min: float) -> float:
    return 3.0 ** (-pathloss) * rho_min + (2 * l + 3) ** (-pathloss) * (1.0 - rho_min)


def gamma_ratio_tail(n: int, a: float) -> float:
    """sum_{i > n} Gamma(i)/Gamma(i + a) for a > 1, n >= 0."""
    if a <= 1:
        raise ValueError("series diverges for a <= 1")
    if n == 0:
        return 1.0 / ((a - 1.0) * math.gamma(a))
    return math.exp(special.gammaln(n + 1) - special.gammaln(n + a)) / (a - 1.0)


@dataclass(frozen=True)
class SeriesValue:
    value: float
    explicit_terms: int
    tail: float          # closed-form remainder included in ``value``
    tail_error: float    # truncation error left in ``value`` (rounding only)


def rho_weighted_series(rho: Mapping[int, float], a: float, start: int, n_terms: Optional[int] = None) -> SeriesValue:
    """sum_{i >= start} rho_i Gamma(i)/Gamma(i + a), rho_i = 1 when not in ``rho``.

    ``n_terms`` explicit terms are summed (at least enough to cover every
    index in ``rho``), the remainder is added in closed form.
    """
    last_needed = max([start - 1] + [i for i in rho if i >= start])
    if n_terms is None:
        n_terms = last_needed - start + 1
    last = max(last_needed, start - 1 + n_terms)
    total = 0.0
    for i in range(last, start - 1, -1):  # small terms first
        total += rho.get(i, 1.0) * math.exp(special.gammaln(i) - special.gammaln(i + a))
    tail = gamma_ratio_tail(last, a)
    return SeriesValue(total + tail, last - start + 1, tail, abs(tail) * 1e-15)


@dataclass(frozen=True)
class BoundQuery:
    """Inputs of the SIR CDF bounds.

    ``rho`` maps 1-based within-tier rank i (serving BS is i = 1) to the
    cancellation factor; for K-tier bounds it maps (tier, rank) pairs.
    Missing entries mean rho = 1. ``rho_min`` and ``subset_size`` describe
    the cooperating set B; for an empty B use rho_min = 1.
    """

    threshold: float
    antennas: int
    num_coordinated: int
    pathloss: float = 4.0
    subset_size: int = 0
    rho_min: float = 1.0
    rho: Mapping = field(default_factory=dict)

    def __post_init__(self):
        if not self.threshold > 0:
            raise ValueError("threshold must be positive")
        if not 0 < self.rho_min <= 1:
            raise ValueError("rho_min must lie in (0, 1]")


def _markov_prefactor(q: BoundQuery) -> float:
    dof = q.antennas - q.num_coordinated - 1
    if dof < 1:
        raise ValueError("the upper bound needs N - L - 1 >= 1")
    return q.threshold / dof


def ub_cdf_1tier(query: BoundQuery, n_terms: Optional[int] = None) -> float:
    """Markov upper bound on P(SIR <= beta) in a 1-tier network.

    ``n_terms`` only moves the split between explicit and closed-form terms.
    """
    a = query.pathloss / 2.0
    series = rho_weighted_series(dict(query.rho), a, start=2, n_terms=n_terms)
    return min(1.0, _markov_prefactor(query) * math.gamma(1 + a) * series.value)


def _gamma_domain(z: float) -> float:
    if z <= 0 and float(z).is_integer():
        raise DomainFault(f"Gamma({z:g}) is a pole")
    return math.gamma(z)


def _lower_bound(prefactor: float, alpha_exp: float, antennas_minus_l: float, g: float, beta: float, c: float) -> float:
    bracket = antennas_minus_l * g / (beta * c)
    if not bracket > 0:
        raise DomainFault(f"bracket {bracket:.6g} is not positive; real power (-2/alpha) undefined")
    value = 1.0 - math.exp(-prefactor * math.gamma(1 + 2.0 / alpha_exp) * bracket ** (-2.0 / alpha_exp))
    return min(1.0, max(0.0, value))


def lb_cdf_1tier(query: BoundQuery) -> float:
    """Lower bound on P(SIR <= beta), evaluated as written; raises ``DomainFault`` off its real domain."""
    alpha = query.pathloss
    g = _gamma_domain(1.0 - alpha / 2.0)
    c = dominance_constant(query.subset_size, alpha, query.rho_min)
    return _lower_bound(1.0, alpha, query.antennas - query.num_coordinated, g, query.threshold, c)


def ub_cdf_ktier(
    query: BoundQuery,
    tiers: Sequence[TierConfig],
    serving_tier: int,
    n_terms: Optional[int] = None,
) -> float:
    """K-tier Markov upper bound; cross-tier terms use the ratio of distance moments as written."""
    star = tiers[serving_tier]
    a_star = star.pathloss / 2.0
    rho = dict(query.rho)
    own = {i: r for (k, i), r in rho.items() if k == serving_tier}
    total = math.gamma(1 + a_star) * rho_weighted_series(own, a_star, 2, n_terms).value
    for k, t in enumerate(tiers):
        if k == serving_tier:
            continue
        a_k = t.pathloss / 2.0
        scale = (
            (t.power / star.power)
            * (star.density * math.pi) ** (-a_star)
            * math.gamma(1 + a_star)
            / (t.density * math.pi) ** (-a_k)
        )
        cross = {i: r for (kk, i), r in rho.items() if kk == k}
        total += scale * rho_weighted_series(cross, a_k, 1, n_terms).value
    q = BoundQuery(query.threshold, star.antennas, query.num_coordinated, star.pathloss)
    return min(1.0, _markov_prefactor(q) * total)


def lb_cdf_ktier(query: BoundQuery, tiers: Sequence[TierConfig], serving_tier: int) -> float:
    """K-tier lower bound as written, with the same domain guard as the 1-tier form."""
    star = tiers[serving_tier]
    alpha_max = max(t.pathloss for t in tiers)
    lam_hat = equivalent_intensity(tiers, serving_tier)
    g = _gamma_domain(1.0 - star.pathloss / 2.0)
    c = dominance_constant(query.subset_size, alpha_max, query.rho_min)
    prefactor = (math.pi * lam_hat) ** (1.0 - star.pathloss / alpha_max)
    return _lower_bound(prefactor, alpha_max, star.antennas - query.num_coordinated, g, query.threshold, c)
