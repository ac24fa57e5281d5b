"""Reputation accounting, the punishment ladder, and RTable gossip between communities."""
from __future__ import annotations

import enum
import logging
from dataclasses import dataclass, field
from typing import Iterable, Mapping, Sequence

from .errors import LedgerError
from .model import NodeId, NodeProfile, PunishmentState, Standing

log = logging.getLogger(__name__)


class Reason(enum.Enum):
    ELECTION_HEAD = "ElectionHead"
    ELECTION_PARTICIPATION = "ElectionParticipation"
    RELAY_PAYMENT = "RelayPayment"
    MONITOR_PAYMENT = "MonitorPayment"
    WARNING = "Warning"
    NEGATIVE_PAYMENT = "NegativePayment"
    EXPULSION = "Expulsion"
    REJOIN_SETTLEMENT = "RejoinSettlement"


@dataclass(frozen=True)
class LedgerEvent:
    time: float
    node: NodeId
    delta: float
    reason: Reason


@dataclass(frozen=True)
class RTableEntry:
    reputation: float
    round: int
    community: int = 0


@dataclass
class RTable:
    entries: dict[NodeId, RTableEntry] = field(default_factory=dict)

    def lookup(self, node: NodeId) -> RTableEntry:
        """Reputation as known here; unseen nodes are treated as newcomers with zero reputation."""
        return self.entries.get(node, RTableEntry(0.0, 0))

    def copy(self) -> RTable:
        return RTable(dict(self.entries))


def gateway_sync(local: RTable, remote: RTable) -> RTable:
    """Merge two tables, keeping the fresher entry per node; equal rounds keep the local one."""
    merged = dict(local.entries)
    for node, theirs in remote.entries.items():
        ours = merged.get(node)
        if ours is None or theirs.round > ours.round:
            merged[node] = theirs
    return RTable(merged)


def replay(events: Iterable[LedgerEvent], nodes: Iterable[NodeId] = ()) -> dict[NodeId, float]:
    reps = {n: 0.0 for n in nodes}
    for ev in events:
        reps[ev.node] = reps.get(ev.node, 0.0) + ev.delta
    return reps


class ReputationLedger:
    """Single writer for a community's reputations.

    Writes go to the node profiles, the community RTable, and an append-only
    event log that :func:`replay` folds back into the same numbers.
    """

    def __init__(self, profiles: Sequence[NodeProfile], p_f: float = 1.0, community: int = 0):
        self.profiles = {p.id: p for p in profiles}
        self.p_f = p_f
        self.community = community
        self.round = 0
        self.events: list[LedgerEvent] = []
        self.table = RTable({p.id: RTableEntry(p.reputation, 0, community) for p in profiles})

    def _profile(self, node: NodeId) -> NodeProfile:
        try:
            return self.profiles[node]
        except KeyError:
            raise LedgerError(f"unknown node {node}") from None

    def reputation(self, node: NodeId) -> float:
        return self._profile(node).reputation

    def _write(self, p: NodeProfile, delta: float, reason: Reason, time: float) -> float:
        p.reputation = p.reputation + delta
        self.events.append(LedgerEvent(time, p.id, delta, reason))
        self.table.entries[p.id] = RTableEntry(p.reputation, self.round, self.community)
        return p.reputation

    def apply_delta(self, node: NodeId, delta: float, reason: Reason, time: float = 0.0) -> float:
        p = self._profile(node)
        if p.expelled and reason is not Reason.REJOIN_SETTLEMENT:
            raise LedgerError(f"node {node} is expelled; {reason.value} rejected")
        return self._write(p, delta, reason, time)

    def punish(self, node: NodeId, time: float = 0.0) -> Standing:
        """Move one rung down the ladder: warn, then charge, then charge and expel."""
        p = self._profile(node)
        ps = p.punishment
        if ps.state is Standing.EXPELLED:
            log.info("node %d already expelled; punishment ignored", node)
            return ps.state
        ps.offense_count += 1
        if ps.state is Standing.CLEAN:
            self._write(p, 0.0, Reason.WARNING, time)
            ps.state = Standing.WARNED
        elif ps.state is Standing.WARNED:
            self._write(p, -self.p_f, Reason.NEGATIVE_PAYMENT, time)
            ps.debt += self.p_f
            ps.state = Standing.NEGATIVE_PAID
        else:
            self._write(p, -self.p_f, Reason.EXPULSION, time)
            ps.debt += self.p_f
            ps.state = Standing.EXPELLED
        return ps.state

    def rejoin(self, node: NodeId, payment: float, time: float = 0.0) -> PunishmentState:
        p = self._profile(node)
        ps = p.punishment
        if ps.state is not Standing.EXPELLED:
            raise LedgerError(f"node {node} is not expelled")
        if payment < ps.debt:
            raise LedgerError(f"node {node} owes {ps.debt}, offered {payment}")
        self._write(p, payment, Reason.REJOIN_SETTLEMENT, time)
        ps.debt = 0.0
        ps.state = Standing.WARNED
        return ps

    def replay(self) -> dict[NodeId, float]:
        return replay(self.events, self.profiles)

    def snapshot(self) -> Mapping[NodeId, float]:
        return {n: p.reputation for n, p in self.profiles.items()}
