"""Eligibility features, composite weight and the contact-count cooperation test."""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .errors import DegenerateInputError
from .model import Bundle, NodeId, NodeProfile, World, check_coeffs


@dataclass(frozen=True)
class FeatureVector:
    energy_ratio: float
    buffer_ratio: float
    ttl_ratio: float
    node_degree_norm: float
    closeness: float

    def as_tuple(self) -> tuple[float, float, float, float, float]:
        return (self.energy_ratio, self.buffer_ratio, self.ttl_ratio,
                self.node_degree_norm, self.closeness)


@dataclass(frozen=True)
class Degree:
    count: int
    normalized: float


@dataclass(frozen=True)
class RelativeDistance:
    meters: float
    closeness: float
    isolated: bool = False


def energy_ratio(profile: NodeProfile) -> float:
    if profile.energy_max <= 0:
        raise DegenerateInputError(f"node {profile.id}: energy_max is zero")
    return profile.energy_now / profile.energy_max


def buffer_ratio(profile: NodeProfile) -> float:
    if profile.buffer_max <= 0:
        raise DegenerateInputError(f"node {profile.id}: buffer_max is zero")
    return profile.buffer_now / profile.buffer_max


def ttl_ratio(bundle: Bundle) -> float:
    if bundle.ttl_total <= 0:
        raise DegenerateInputError(f"bundle {bundle.bundle_id}: ttl_total is zero")
    return bundle.ttl_remaining / bundle.ttl_total


def carried_ttl_ratio(bundles: Sequence[Bundle]) -> float:
    """Per-node TTL feature: mean over carried bundles, 1.0 for an empty buffer."""
    if not bundles:
        return 1.0
    return sum(ttl_ratio(b) for b in bundles) / len(bundles)


def _neighbors(node: NodeId, xy: np.ndarray, t_range: float) -> np.ndarray:
    d = np.hypot(*(xy - xy[node]).T)
    mask = d < t_range
    mask[node] = False
    return np.flatnonzero(mask)


def node_degree(node: NodeId, world: World) -> Degree:
    world.profile(node)
    xy = world.positions()
    count = len(_neighbors(node, xy, world.config.t_range))
    norm = count / (world.n - 1) if world.n > 1 else 0.0
    return Degree(count, norm)


def relative_distance(node: NodeId, world: World) -> RelativeDistance:
    """Distance from the node to the centroid of itself plus its in-range neighbors.

    Closeness maps that distance onto [0, 1] against the area diagonal; with
    ``rd_centrality`` off the mapping is inverted (peripheral nodes score high).
    """
    world.profile(node)
    xy = world.positions()
    nbrs = _neighbors(node, xy, world.config.t_range)
    if len(nbrs) == 0:
        return RelativeDistance(0.0, 0.0, isolated=True)
    group = np.concatenate(([node], nbrs))
    omega = xy[group].mean(axis=0)
    rd = float(math.hypot(*(xy[node] - omega)))
    return RelativeDistance(rd, closeness_from_rd(rd, world.config.diagonal, world.config.rd_centrality))


def closeness_from_rd(rd: float, diagonal: float, centrality: bool = True) -> float:
    if diagonal <= 0:
        return 1.0 if centrality else 0.0
    c = min(1.0, max(0.0, 1.0 - rd / diagonal))
    return c if centrality else 1.0 - c


def features(node: NodeId, world: World) -> FeatureVector:
    p = world.profile(node)
    return FeatureVector(
        energy_ratio(p),
        buffer_ratio(p),
        carried_ttl_ratio(world.carried[node]),
        node_degree(node, world).normalized,
        relative_distance(node, world).closeness,
    )


def composite_weight(f: FeatureVector, coeffs: Sequence[float]) -> float:
    wt = check_coeffs(coeffs)
    return sum(x * c for x, c in zip(f.as_tuple(), wt))


def cooperation_threshold(n: int) -> int:
    if n < 1:
        raise DegenerateInputError("community size must be at least 1")
    return math.ceil(n / 3)


def cooperation(profile: NodeProfile, n: int) -> tuple[int, bool]:
    """Contact count and whether it clears the ceil(n/3) bar (strictly)."""
    k = cooperation_threshold(n)
    cp = profile.contacts
    return cp, cp > k
