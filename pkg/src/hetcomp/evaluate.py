"""Long-term throughput / coverage estimation and the sweep experiments.

Randomness: the trial range is split into fixed-size chunks; chunk c uses
``SeedSequence(seed).spawn(n_chunks)[c]``, itself split into a geometry and
a fading stream. Results therefore depend on (seed, trials, config) only,
and every run with the same tiers and seed sees the same BS layouts and
fading draws whatever coordination settings are evaluated (common random numbers).
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from enum import Enum
from typing import Optional, Sequence, Union

import numpy as np

from . import overhead as oh
from .analysis import dominance_constant
from .association import select_coordination_set, select_serving
from .channel import draw_gains, interference_removed_m, interference_terms, subset_sirs, tier_rho
from .geometry import sample_batch
from .model import NetworkConfig, Policy, RateKind, RateMapping, check, digest, network_to_dict

CHUNK = 4096
DEFAULT_TRIALS = 100_000
DEFAULT_COHERENCE = oh.CoherenceModel(0.080)
DEFAULT_STAGES = 4


class Metric(str, Enum):
    COVERAGE = "Coverage"
    THROUGHPUT = "Throughput"


def metric_of(mapping: RateMapping) -> Metric:
    return Metric.COVERAGE if mapping.kind is RateKind.FIXED_TARGET else Metric.THROUGHPUT


@dataclass(frozen=True)
class EvalResult:
    metric: Metric
    mean: float
    std_error: float
    trials: int
    seed: int
    config_digest: str


# --- rate mappings -------------------------------------------------------------

def rate_coverage(gamma, mapping: RateMapping):
    return np.where(np.asarray(gamma) >= mapping.target_sir, mapping.target_rate, 0.0)


def rate_shannon(gamma, mapping: RateMapping):
    return np.log2(1.0 + np.asarray(gamma) / mapping.shannon_gap)


def rate(gamma, mapping: RateMapping):
    """Metric value per SIR. Coverage is normalized by the target rate, i.e. an indicator."""
    if mapping.kind is RateKind.FIXED_TARGET:
        return rate_coverage(gamma, mapping) / mapping.target_rate
    return rate_shannon(gamma, mapping)


# --- trial engine ------------------------------------------------------------------

@dataclass(frozen=True)
class TrialLog:
    """Per-trial SIR of every cooperation subset (``sirs``: trials x 2**L)."""

    network: NetworkConfig
    seed: int
    sirs: np.ndarray
    serving_tier: np.ndarray
    member_tier: np.ndarray

    @property
    def trials(self) -> int:
        return self.sirs.shape[0]


def run_trials(
    net: NetworkConfig,
    trials: int,
    seed: int = 0,
    serving_dims: Optional[int] = None,
) -> TrialLog:
    """Simulate ``trials`` independent user drops.

    ``serving_dims`` overrides the number of complex dimensions of the
    serving gain (default N_k* - L).
    """
    check(net)
    if trials < 1:
        raise ValueError("trials must be >= 1")
    n_chunks = math.ceil(trials / CHUNK)
    children = np.random.SeedSequence(seed).spawn(n_chunks)
    sirs, serving, members = [], [], []
    for c, child in enumerate(children):
        size = min(CHUNK, trials - c * CHUNK)
        geo_ss, fade_ss = child.spawn(2)
        real = sample_batch(
            net.tiers,
            net.truncation_points_per_tier,
            size,
            np.random.default_rng(geo_ss),
            net.tail_compensation,
            net.condition_serving_tier,
        )
        k_star, _ = select_serving(real, net.tiers)
        coord = select_coordination_set(real, net.tiers, net.num_coordinated, net.coordination_policy, k_star)
        gains = draw_gains(real, coord, net.tiers, np.random.default_rng(fade_ss), serving_dims)
        sirs.append(subset_sirs(real, net.tiers, coord, gains))
        serving.append(k_star)
        members.append(coord.member_tier)
    return TrialLog(net, seed, np.concatenate(sirs), np.concatenate(serving), np.concatenate(members))


def trial_values(log: TrialLog, fractions: oh.TimeFractions, mapping: RateMapping) -> np.ndarray:
    """Per-trial sum_B p_B R(gamma_B)."""
    tau = np.asarray(fractions.per_tier)[log.member_tier]
    weights = oh.subset_probabilities(tau)
    return (weights * rate(log.sirs, mapping)).sum(axis=-1)


def _summarize(values: np.ndarray, mapping, seed, config_digest) -> EvalResult:
    n = values.size
    se = float(values.std(ddof=1) / math.sqrt(n)) if n > 1 else 0.0
    return EvalResult(metric_of(mapping), float(values.mean()), se, n, seed, config_digest)


def _digest(net: NetworkConfig, fractions, mapping, extra=None) -> str:
    payload = {
        "network": network_to_dict(net),
        "tau": list(fractions.per_tier) if fractions is not None else None,
        "mapping": vars(mapping),
    }
    if extra:
        payload.update(extra)
    return digest(payload)


Overhead = Union[oh.OverheadModel, Sequence[oh.OverheadModel], oh.TimeFractions]


def long_term_throughput(
    net: NetworkConfig,
    overhead: Overhead,
    mapping: RateMapping,
    trials: int = DEFAULT_TRIALS,
    seed: int = 0,
    log: Optional[TrialLog] = None,
) -> EvalResult:
    """Monte Carlo estimate of E[sum_B p_B R(gamma_B)]."""
    fractions = oh.time_fractions(overhead, net.num_tiers)
    if log is None:
        log = run_trials(net, trials, seed)
    values = trial_values(log, fractions, mapping)
    return _summarize(values, mapping, log.seed, _digest(net, fractions, mapping))


def ideal_throughput(
    net: NetworkConfig,
    mapping: RateMapping,
    trials: int = DEFAULT_TRIALS,
    seed: int = 0,
    log: Optional[TrialLog] = None,
) -> EvalResult:
    """Delay-free overhead: every coordinated BS always cooperates."""
    if log is None:
        log = run_trials(net, trials, seed)
    values = rate(log.sirs[:, -1], mapping)
    ones = oh.TimeFractions.uniform(1.0, net.num_tiers)
    return _summarize(values, mapping, log.seed, _digest(net, ones, mapping))


# --- experiments -------------------------------------------------------------------

def erlang_overhead(mean_delay: float, coherence: oh.CoherenceModel = DEFAULT_COHERENCE,
                    stages: int = DEFAULT_STAGES) -> oh.OverheadModel:
    return oh.OverheadModel(coherence, oh.DelayModel.erlang(mean_delay, stages))


@dataclass(frozen=True)
class SweepRow:
    x: float                       # mean delay (s) or L
    result: EvalResult
    baseline: Optional[EvalResult]  # no-CoMP (L = 0) network on the same seed
    tau: float


def delay_sweep(
    net: NetworkConfig,
    mappings: Sequence[RateMapping],
    delay_means: Sequence[float],
    trials: int = DEFAULT_TRIALS,
    seed: int = 0,
    coherence: oh.CoherenceModel = DEFAULT_COHERENCE,
    stages: int = DEFAULT_STAGES,
) -> dict[Metric, list[SweepRow]]:
    """Metric vs. mean overhead delay for the configured L, with the L = 0 baseline."""
    log = run_trials(net, trials, seed)
    base_net = net.replace(num_coordinated=0)
    base_log = run_trials(base_net, trials, seed)
    out: dict[Metric, list[SweepRow]] = {}
    for mapping in mappings:
        baseline = long_term_throughput(base_net, oh.TimeFractions.uniform(1.0, net.num_tiers), mapping, log=base_log)
        rows = []
        for d in delay_means:
            fractions = oh.time_fractions(erlang_overhead(d, coherence, stages), net.num_tiers)
            res = long_term_throughput(net, fractions, mapping, log=log)
            rows.append(SweepRow(float(d), res, baseline, fractions.per_tier[0]))
        out[metric_of(mapping)] = rows
    return out


def l_sweep(
    net: NetworkConfig,
    mappings: Sequence[RateMapping],
    l_values: Sequence[int],
    trials: int = DEFAULT_TRIALS,
    seed: int = 0,
    overhead: Optional[Overhead] = None,
) -> dict[Metric, list[SweepRow]]:
    """Metric vs. number of coordinated cells; overhead defaults to Erlang delay with mean 20 ms."""
    if overhead is None:
        overhead = erlang_overhead(0.020)
    fractions = oh.time_fractions(overhead, net.num_tiers)
    logs = {L: run_trials(net.replace(num_coordinated=L), trials, seed) for L in l_values}
    out: dict[Metric, list[SweepRow]] = {}
    for mapping in mappings:
        rows = []
        for L in l_values:
            sub = net.replace(num_coordinated=L)
            rows.append(SweepRow(float(L), long_term_throughput(sub, fractions, mapping, log=logs[L]), None,
                                 fractions.per_tier[0]))
        out[metric_of(mapping)] = rows
    return out


@dataclass(frozen=True)
class LossRow:
    x: float
    cross: EvalResult
    intra: EvalResult
    loss: float       # (cross - intra) / cross
    loss_se: float    # delta-method standard error from paired trials


def _paired_loss(vc: np.ndarray, vi: np.ndarray) -> tuple[float, float]:
    mc, mi = vc.mean(), vi.mean()
    if mc == 0:
        return 0.0, 0.0
    if np.array_equal(vc, vi):
        return 0.0, 0.0
    n = vc.size
    cov = np.cov(np.vstack([vi, vc]), ddof=1)
    grad = np.array([-1.0 / mc, mi / mc**2])
    return float(1.0 - mi / mc), float(math.sqrt(max(grad @ cov @ grad, 0.0) / n))


def intratier_loss(
    net: NetworkConfig,
    mappings: Sequence[RateMapping],
    axis: str,
    values: Sequence[float],
    trials: int = DEFAULT_TRIALS,
    seed: int = 0,
    coherence: oh.CoherenceModel = DEFAULT_COHERENCE,
    stages: int = DEFAULT_STAGES,
    fixed_delay: float = 0.020,
) -> dict[Metric, list[LossRow]]:
    """Cross-tier vs intra-tier coordination on shared seeds.

    ``axis`` is ``"delay"`` (values are mean delays, L from ``net``) or ``"L"``
    (values are L, mean delay ``fixed_delay``).
    """
    if axis not in ("delay", "L"):
        raise ValueError("axis must be 'delay' or 'L'")
    cases = []
    if axis == "delay":
        cross = run_trials(net.replace(coordination_policy=Policy.CROSS_TIER), trials, seed)
        intra = run_trials(net.replace(coordination_policy=Policy.INTRA_TIER), trials, seed)
        for d in values:
            cases.append((float(d), cross, intra, oh.time_fractions(erlang_overhead(d, coherence, stages), net.num_tiers)))
    else:
        fr = oh.time_fractions(erlang_overhead(fixed_delay, coherence, stages), net.num_tiers)
        for L in values:
            sub = net.replace(num_coordinated=int(L))
            cases.append((float(L), run_trials(sub.replace(coordination_policy=Policy.CROSS_TIER), trials, seed),
                          run_trials(sub.replace(coordination_policy=Policy.INTRA_TIER), trials, seed), fr))
    out: dict[Metric, list[LossRow]] = {}
    for mapping in mappings:
        rows = []
        for x, lc, li, fr in cases:
            vc, vi = trial_values(lc, fr, mapping), trial_values(li, fr, mapping)
            loss, se = _paired_loss(vc, vi)
            rows.append(LossRow(x, _summarize(vc, mapping, seed, _digest(lc.network, fr, mapping)),
                                _summarize(vi, mapping, seed, _digest(li.network, fr, mapping)), loss, se))
        out[metric_of(mapping)] = rows
    return out


@dataclass(frozen=True)
class DominanceSamples:
    i_b: np.ndarray          # normalized interference, full cooperation of the L members
    i_0: np.ndarray          # normalized interference with every BS on, serving one included
    c: float                 # dominance constant for (L, alpha, rho)
    signal_median: float     # median of S_1 |X_1|^-alpha


def dominance_samples(net: NetworkConfig, trials: int, seed: int = 0) -> DominanceSamples:
    """Paired draws of I_B and I_(0) in a 1-tier network (power-normalized)."""
    check(net)
    if net.num_tiers != 1:
        raise ValueError("dominance samples need a 1-tier network")
    tier = net.tiers[0]
    rng_geo, rng_fade = (np.random.default_rng(s) for s in np.random.SeedSequence(seed).spawn(2))
    real = sample_batch(net.tiers, net.truncation_points_per_tier, trials, rng_geo, net.tail_compensation)
    coord = select_coordination_set(real, net.tiers, net.num_coordinated, net.coordination_policy,
                                    np.zeros(trials, dtype=np.int64))
    gains = draw_gains(real, coord, net.tiers, rng_fade)
    signal, rest, members = interference_terms(real, net.tiers, coord, gains)
    rho = float(tier_rho(net.tiers)[0]) if net.num_coordinated else 1.0
    i_b = (rest + rho * members.sum(axis=-1)) / tier.power
    i_0 = interference_removed_m(real, net.tiers, gains, 0)
    c = dominance_constant(net.num_coordinated, tier.pathloss, rho)
    return DominanceSamples(i_b, i_0, c, float(np.median(signal / tier.power)))
