"""Watchdog layer: monitor selection, digest-checked observations, trust reports, payouts."""
from __future__ import annotations

import enum
import logging
from dataclasses import dataclass
from typing import Collection, Iterable, Mapping, Sequence

from .errors import DegenerateEvidenceError, SosError
from .fusion import Verdict, cif_combine, classify, importance_factors
from .ledger import LedgerEvent, Reason, ReputationLedger
from .model import Bundle, FusionVariant, NodeId, World

log = logging.getLogger(__name__)

ASSISTANTS = 3


class Observed(enum.Enum):
    FORWARDED_MATCH = "ForwardedMatch"
    FORWARDED_MISMATCH = "ForwardedMismatch"
    NOT_FORWARDED = "NotForwarded"


@dataclass(frozen=True)
class MonitorSet:
    head: NodeId
    assistants: tuple[NodeId, ...]
    window: tuple[float, float]

    @property
    def members(self) -> tuple[NodeId, ...]:
        return (self.head,) + self.assistants

    @property
    def degraded(self) -> bool:
        return len(self.assistants) < ASSISTANTS

    def covers(self, t: float) -> bool:
        start, end = self.window
        return start <= t <= end


@dataclass(frozen=True)
class ForwardObservation:
    monitor: NodeId
    relay: NodeId
    bundle_id: int
    expected_digest: int
    observed: Observed
    time: float


@dataclass(frozen=True)
class TrustReport:
    monitor: NodeId
    subject: NodeId
    verdict: Verdict
    window_id: int


def pick_assistants(ids: Sequence[NodeId], cursor: int, excluded: Collection[NodeId],
                    k: int = ASSISTANTS) -> tuple[list[NodeId], int]:
    """Walk ``ids`` (sorted) from ``cursor`` with wrap-around, taking the next ``k`` not excluded.

    Returns the picks and the cursor position just past the last one.
    """
    n = len(ids)
    picks: list[NodeId] = []
    if n == 0:
        return picks, cursor
    start = next((i for i, v in enumerate(ids) if v >= cursor), 0)
    pos = start
    for _ in range(n):
        node = ids[pos]
        pos = (pos + 1) % n
        if node in excluded:
            continue
        picks.append(node)
        if len(picks) == k:
            break
    new_cursor = ids[pos] if picks else cursor
    return picks, new_cursor


def select_monitors(world: World, relay: NodeId, window: tuple[float, float]) -> MonitorSet:
    """MH plus three round-robin assistants; the cursor on ``world`` advances.

    If the relay is itself the MH, the CH stands in as head monitor.
    """
    heads = world.heads()
    if heads is None:
        raise SosError("no election has been held yet")
    ch, mh, ih = heads
    head = mh if relay != mh else ch
    excluded = {relay, ch, mh, ih}
    excluded.update(p.id for p in world.profiles if p.expelled or p.depleted)
    ids = list(range(world.n))
    picks, world.monitor_cursor = pick_assistants(ids, world.monitor_cursor, excluded)
    ms = MonitorSet(head, tuple(picks), window)
    if ms.degraded:
        log.info("relay %d: degraded monitor set %s", relay, ms.members)
    return ms


def observe_forward(monitors: MonitorSet, monitor: NodeId, relay: NodeId, bundle: Bundle,
                    forwarded_digest: int | None, time: float) -> ForwardObservation:
    """Classify what ``monitor`` saw: the digest the relay put on air, or nothing at all."""
    if monitor not in monitors.members:
        raise SosError(f"node {monitor} does not monitor relay {relay}")
    if not monitors.covers(time):
        raise SosError(f"observation at t={time} outside window {monitors.window}")
    if forwarded_digest is None:
        outcome = Observed.NOT_FORWARDED
    elif forwarded_digest == bundle.digest:
        outcome = Observed.FORWARDED_MATCH
    else:
        outcome = Observed.FORWARDED_MISMATCH
    return ForwardObservation(monitor, relay, bundle.bundle_id, bundle.digest, outcome, time)


def verdict_from_counts(matches: int, mismatches: int, missing: int) -> Verdict | None:
    total = matches + mismatches + missing
    if total == 0:
        return None
    if mismatches == 0 and 2 * matches >= total:
        return Verdict.COOPERATIVE
    return Verdict.SELFISH


def window_verdict(observations: Iterable[ForwardObservation]) -> Verdict | None:
    """Cooperative iff at least half were clean forwards and none was tampered; None means abstain."""
    counts = {o: 0 for o in Observed}
    for ob in observations:
        counts[ob.observed] += 1
    return verdict_from_counts(counts[Observed.FORWARDED_MATCH],
                               counts[Observed.FORWARDED_MISMATCH],
                               counts[Observed.NOT_FORWARDED])


def fuse_reports(reports: Sequence[TrustReport], monitor_reputations: Mapping[NodeId, float],
                 variant: FusionVariant = FusionVariant.WORKED_EXAMPLE,
                 epsilon: float = 1e-6) -> Verdict:
    if len(reports) < 2:
        raise DegenerateEvidenceError(f"{len(reports)} report(s); fusion needs two")
    # negative balances carry no weight as evidence
    reps = [max(0.0, monitor_reputations.get(r.monitor, 0.0)) for r in reports]
    ifs = importance_factors(reps, epsilon)
    fused = cif_combine([(r.verdict, f) for r, f in zip(reports, ifs)], variant)
    return classify(fused.bpa)


def fuse_and_pay_relay(relay: NodeId, reports: Sequence[TrustReport],
                       monitor_reputations: Mapping[NodeId, float], ledger: ReputationLedger,
                       variant: FusionVariant = FusionVariant.WORKED_EXAMPLE,
                       time: float = 0.0, epsilon: float = 1e-6) -> tuple[Verdict, list[LedgerEvent]]:
    """Fuse the monitors' reports on ``relay`` and settle the relay's account.

    Cooperative earns +p_f; Selfish steps the punishment ladder.
    """
    verdict = fuse_reports(reports, monitor_reputations, variant, epsilon)
    return verdict, settle_verdict(relay, verdict, ledger, time)


def settle_verdict(relay: NodeId, verdict: Verdict, ledger: ReputationLedger,
                   time: float = 0.0) -> list[LedgerEvent]:
    """Apply a fused verdict to the relay's account; expelled relays are left alone."""
    mark = len(ledger.events)
    if ledger.profiles[relay].expelled:
        return []
    if verdict is Verdict.COOPERATIVE:
        ledger.apply_delta(relay, ledger.p_f, Reason.RELAY_PAYMENT, time)
    else:
        ledger.punish(relay, time)
    return ledger.events[mark:]


def pay_monitors(reports: Iterable[TrustReport], fused: Verdict, p_f: float) -> list[tuple[NodeId, float]]:
    return [(r.monitor, p_f if r.verdict is fused else -p_f) for r in reports]
