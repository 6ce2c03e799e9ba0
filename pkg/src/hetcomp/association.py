"""Serving-cell selection and coordination-set construction."""
from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .geometry import SpatialRealization, nearest_average_power
from .model import Policy, TierConfig


class InsufficientCandidates(RuntimeError):
    """Not enough sampled BSs to fill the coordination set."""


@dataclass(frozen=True)
class CoordinationSet:
    """Serving BS (tier, rank 0) and the L coordinated BSs.

    ``member_tier`` and ``member_rank`` have shape ``(..., L)`` and are sorted
    by descending average received power. Ranks are 0-based within a tier.
    """

    serving_tier: np.ndarray
    member_tier: np.ndarray
    member_rank: np.ndarray
    policy: Policy

    @property
    def size(self) -> int:
        return self.member_tier.shape[-1]

    @property
    def members(self) -> list[tuple[int, int]]:
        """Member list of a single (unbatched) coordination set."""
        return [(int(k), int(i)) for k, i in zip(self.member_tier, self.member_rank)]


def average_power(tiers: Sequence[TierConfig], sq_dist: np.ndarray) -> np.ndarray:
    """P_k |X_ik|^-alpha_k for every sampled point, same shape as ``sq_dist``."""
    powers = np.array([t.power for t in tiers])[:, None]
    half_alpha = np.array([t.pathloss for t in tiers])[:, None] / 2.0
    return powers * sq_dist ** (-half_alpha)


def select_serving(realization: SpatialRealization, tiers: Sequence[TierConfig]):
    """Return ``(k_star, power)``: the strongest nearest-point tier and its average power.

    ``np.argmax`` returns the first maximum, so exact ties go to the lowest tier index.
    """
    power = nearest_average_power(tiers, realization.sq_dist[..., 0])
    k_star = np.argmax(power, axis=-1)
    return k_star, np.take_along_axis(power, k_star[..., None], axis=-1)[..., 0]


def select_coordination_set(
    realization: SpatialRealization,
    tiers: Sequence[TierConfig],
    L: int,
    policy: Policy = Policy.CROSS_TIER,
    serving=None,
) -> CoordinationSet:
    """Pick the L strongest interferers admitted by ``policy``.

    Within a tier average power decreases with rank, so the top L overall
    are among the first L + 1 points of every tier; only those are ranked.
    """
    policy = Policy(policy)
    if serving is None:
        serving, _ = select_serving(realization, tiers)
    serving = np.asarray(serving)
    batch = realization.batch_shape
    K, n = realization.num_tiers, realization.points_per_tier
    if L == 0:
        empty = np.zeros(batch + (0,), dtype=np.int64)
        return CoordinationSet(serving, empty, empty.copy(), policy)

    depth = min(L + 1, n)
    power = average_power(tiers, realization.sq_dist[..., :depth])  # (..., K, depth)
    tier_idx = np.arange(K)[:, None]
    rank_idx = np.arange(depth)[None, :]
    s = serving[..., None, None]
    excluded = (tier_idx == s) & (rank_idx == 0)
    if policy is Policy.INTRA_TIER:
        excluded = excluded | (tier_idx != s)
    power = np.where(excluded, -np.inf, power)

    flat = power.reshape(batch + (K * depth,))
    # stable sort on -power: ties resolved by (tier, rank) order of the flat index
    order = np.argsort(-flat, axis=-1, kind="stable")[..., :L]
    chosen = np.take_along_axis(flat, order, axis=-1)
    if order.shape[-1] < L or not np.all(np.isfinite(chosen)):
        raise InsufficientCandidates(
            "insufficient sampled points for the coordination set; raise truncation_points_per_tier"
        )
    return CoordinationSet(serving, order // depth, order % depth, policy)
