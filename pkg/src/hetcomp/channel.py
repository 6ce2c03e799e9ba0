"""Effective fading gains, interference-cancellation factors and SIR.

Gains follow the unit-mean-per-complex-dimension convention: a chi^2 with
2d degrees of freedom is represented as a sum of d unit-mean exponentials,
so E[S_i] = 1 for interferers and E[1/S_1] = 1/(N - L - 1) for the server.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Optional, Sequence

import numpy as np

from .association import CoordinationSet, average_power
from .geometry import SpatialRealization
from .model import TierConfig


@dataclass(frozen=True)
class GainDraw:
    """``serving_gain`` has the batch shape; ``interferer_gains`` is ``(..., K, n)``.

    The interferer slot at the serving BS position (tier k*, rank 0) holds an
    unused unit exponential, which ``interference_removed_m`` uses for I_(0).
    """

    serving_gain: np.ndarray
    interferer_gains: np.ndarray


def rho_factor(in_cooperation, bits, antennas):
    """Residual interference fraction of a BS: 2^(-B/(N-1)) while cooperating, else 1."""
    in_cooperation = np.asarray(in_cooperation, dtype=bool)
    antennas = np.asarray(antennas)
    bits = np.asarray(bits, dtype=float)
    if np.any(in_cooperation & (antennas < 2)):
        raise ValueError("zero-forcing requires >= 2 antennas")
    with np.errstate(divide="ignore", invalid="ignore"):
        coop = np.exp2(-bits / np.maximum(antennas - 1, 1))
    out = np.where(in_cooperation, coop, 1.0)
    return out if out.ndim else float(out)


def tier_rho(tiers: Sequence[TierConfig]) -> np.ndarray:
    """Cooperation-phase rho for each tier (1.0 for single-antenna tiers, which never cooperate)."""
    return np.array([rho_factor(t.antennas >= 2, t.feedback_bits, t.antennas) for t in tiers])


def draw_gains(
    realization: SpatialRealization,
    coordset: CoordinationSet,
    tiers: Sequence[TierConfig],
    rng: np.random.Generator,
    serving_dims: Optional[np.ndarray] = None,
) -> GainDraw:
    """Draw serving and interferer gains.

    The server gets ``max_k N_k`` exponentials per trial, of which the first
    ``N_k* - L`` are summed. The number of draws therefore does not depend on
    L, so runs with different L on the same stream share their randomness.
    ``serving_dims`` overrides ``N_k* - L`` (per trial or scalar).
    """
    batch = realization.batch_shape
    antennas = np.array([t.antennas for t in tiers])
    n_max = int(antennas.max())
    if serving_dims is None:
        serving_dims = antennas[coordset.serving_tier] - coordset.size
    serving_dims = np.broadcast_to(np.asarray(serving_dims), batch)
    if np.any(serving_dims < 1) or np.any(serving_dims > n_max):
        raise ValueError("serving gain needs between 1 and max antennas complex dimensions")
    exps = rng.standard_exponential((n_max,) + batch)
    row = np.arange(n_max).reshape((n_max,) + (1,) * len(batch))
    serving_gain = np.where(row < serving_dims, exps, 0.0).sum(axis=0)
    interferer_gains = rng.standard_exponential(batch + (realization.num_tiers, realization.points_per_tier))
    return GainDraw(serving_gain, interferer_gains)


def _flat_member_index(coordset: CoordinationSet, n: int) -> np.ndarray:
    return coordset.member_tier * n + coordset.member_rank


def interference_terms(realization, tiers, coordset, gains):
    """Split the SIR into its parts, all in watts.

    Returns ``(signal, rest, members)``: received signal power, interference
    from every non-serving non-member BS plus the tail term, and the
    uncancelled contribution of each coordinated BS (shape ``(..., L)``).
    """
    K, n = realization.num_tiers, realization.points_per_tier
    batch = realization.batch_shape
    contrib = average_power(tiers, realization.sq_dist) * gains.interferer_gains
    flat = contrib.reshape(batch + (K * n,))
    k_star = np.asarray(coordset.serving_tier)
    serving_flat = (k_star * n)[..., None]

    p = np.array([t.power for t in tiers])
    half_alpha = np.array([t.pathloss for t in tiers]) / 2.0
    sq_star = np.take_along_axis(realization.sq_dist[..., :, 0], k_star[..., None], axis=-1)[..., 0]
    signal = p[k_star] * gains.serving_gain * sq_star ** (-half_alpha[k_star])

    member_idx = _flat_member_index(coordset, n)
    excluded = np.zeros(batch + (K * n,), dtype=bool)
    np.put_along_axis(excluded, serving_flat, True, axis=-1)
    if coordset.size:
        np.put_along_axis(excluded, member_idx, True, axis=-1)
    rest = np.where(excluded, 0.0, flat).sum(axis=-1)
    rest = rest + (realization.tail_mean * p).sum(axis=-1)
    members = np.take_along_axis(flat, member_idx, axis=-1)
    return signal, rest, members


def subset_bits(L: int) -> np.ndarray:
    """``(L, 2**L)`` 0/1 matrix; column b lists which members are in subset mask b."""
    masks = np.arange(2**L)
    return ((masks[None, :] >> np.arange(L)[:, None]) & 1).astype(float)


def subset_sirs(
    realization: SpatialRealization,
    tiers: Sequence[TierConfig],
    coordset: CoordinationSet,
    gains: GainDraw,
) -> np.ndarray:
    """SIR for every cooperation subset at once, shape ``(..., 2**L)``.

    Column ``b`` is the subset whose bit j is set iff member j is in the
    cooperation phase (member order as in ``coordset``).
    """
    signal, rest, members = interference_terms(realization, tiers, coordset, gains)
    L = coordset.size
    rho = tier_rho(tiers)[coordset.member_tier]  # (..., L)
    bits = subset_bits(L)
    den = rest[..., None] + members.sum(axis=-1, keepdims=True) - (members * (1.0 - rho)) @ bits
    return signal[..., None] / den


def compute_sir(realization, tiers, coordset, subset, gains):
    """SIR when the members flagged by ``subset`` are cooperating.

    ``subset`` is an integer bit mask or a boolean array of shape ``(..., L)``.
    """
    signal, rest, members = interference_terms(realization, tiers, coordset, gains)
    L = coordset.size
    if np.ndim(subset) == 0 and not isinstance(subset, (bool, np.bool_)):
        subset = ((int(subset) >> np.arange(L)) & 1).astype(bool)
    subset = np.asarray(subset, dtype=bool)
    rho = rho_factor(subset, np.array([t.feedback_bits for t in tiers])[coordset.member_tier],
                     np.array([t.antennas for t in tiers])[coordset.member_tier])
    return signal / (rest + (members * rho).sum(axis=-1))


def interference_removed_m(realization, tiers, gains, m: int):
    """Normalized 1-tier interference with the nearest ``m`` BSs switched off (incl. tail)."""
    if realization.num_tiers != 1:
        raise ValueError("interference_removed_m is defined for 1-tier realizations")
    alpha = tiers[0].pathloss
    contrib = gains.interferer_gains[..., 0, m:] * realization.sq_dist[..., 0, m:] ** (-alpha / 2.0)
    return contrib.sum(axis=-1) + realization.tail_mean[..., 0]
