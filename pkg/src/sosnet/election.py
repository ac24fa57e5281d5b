"""One election round: nomination, deterministic voting, and head selection."""
from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Mapping, Sequence

from .errors import QuorumError
from .model import NodeId, Role, World
from .weighting import composite_weight, cooperation, features


@dataclass(frozen=True)
class Candidate:
    id: NodeId
    weight: float
    cooperation: int


def _rank_key(c: Candidate):
    return (-c.weight, -c.cooperation, c.id)


@dataclass
class ElectionRecord:
    round: int
    candidates: list[Candidate]
    tally: dict[NodeId, int]
    heads: tuple[NodeId, NodeId, NodeId]
    voters: tuple[NodeId, ...] = ()
    time: float = 0.0

    def candidate(self, node: NodeId) -> Candidate:
        for c in self.candidates:
            if c.id == node:
                return c
        raise KeyError(f"node {node} was not a candidate in round {self.round}")

    def votes(self, node: NodeId) -> int:
        return self.tally.get(node, 0)


def rank_candidates(candidates: Iterable[Candidate]) -> list[Candidate]:
    """Order by weight; cooperation then lower id break ties."""
    return sorted(candidates, key=_rank_key)


def select_nominees(candidates: Iterable[Candidate], q: int) -> list[Candidate]:
    if q < 3:
        raise ValueError("nominee pool must hold at least 3 candidates")
    pool = rank_candidates(candidates)
    if len(pool) < 3:
        raise QuorumError(f"need at least 3 eligible nodes, have {len(pool)}")
    return pool[:q]


def candidates_from_world(world: World) -> list[Candidate]:
    out = []
    for node in world.eligible():
        w = composite_weight(features(node, world), world.coeffs)
        cp, _ = cooperation(world.profiles[node], world.n)
        out.append(Candidate(node, w, cp))
    return out


def nominate(world: World, q: int) -> list[Candidate]:
    return select_nominees(candidates_from_world(world), q)


def tally_votes(nominees: Sequence[Candidate], voters: Iterable[NodeId]) -> dict[NodeId, int]:
    """Each voter backs the best-ranked nominee, so the rule is deterministic."""
    tally = {c.id: 0 for c in nominees}
    voters = list(voters)
    if nominees and voters:
        best = min(nominees, key=_rank_key)
        tally[best.id] = len(voters)
    return tally


def eligible_voters(world: World, nominees: Sequence[Candidate]) -> list[NodeId]:
    taken = {c.id for c in nominees}
    return [n for n in world.eligible() if n not in taken]


def cast_votes(world: World, nominees: Sequence[Candidate]) -> dict[NodeId, int]:
    return tally_votes(nominees, eligible_voters(world, nominees))


def elect(tally: Mapping[NodeId, int], nominees: Sequence[Candidate]) -> tuple[NodeId, NodeId, NodeId]:
    if len(nominees) < 3:
        raise QuorumError(f"need at least 3 nominees, have {len(nominees)}")
    ranked = sorted(nominees, key=lambda c: (-tally.get(c.id, 0),) + _rank_key(c))
    return ranked[0].id, ranked[1].id, ranked[2].id


def hold_election(world: World, round_no: int) -> ElectionRecord:
    """Run nominate, vote and elect against ``world`` and install the new heads."""
    pool = candidates_from_world(world)
    nominees = select_nominees(pool, world.config.nominee_count)
    voters = eligible_voters(world, nominees)
    tally = tally_votes(nominees, voters)
    heads = elect(tally, nominees)

    for p in world.profiles:
        if p.role is not Role.GATEWAY:
            p.role = Role.MEMBER
    for node, role in zip(heads, (Role.COMMUNITY_HEAD, Role.MONITORING_HEAD, Role.INCENTIVE_HEAD)):
        world.profiles[node].role = role

    record = ElectionRecord(round_no, nominees, tally, heads, tuple(voters), world.time)
    world.records.append(record)
    return record
