"""Deterministic discrete-event simulation of one scenario under one strategy.

Mobility is stepped on a fixed tick. Bundles hop greedily toward their
destination through in-range contacts, each hop taking one airtime. Under SOS
an election runs every period and the watchdog layer closes a monitoring
window every window length, paying or punishing relays.
"""
from __future__ import annotations

import enum
import heapq
import logging
from dataclasses import dataclass, field

import numpy as np

from ..election import hold_election
from ..errors import DegenerateEvidenceError, DegenerateInputError, QuorumError
from ..fusion import Verdict
from ..ledger import LedgerEvent, Reason, ReputationLedger, replay
from ..model import (COOPERATIVE, STREAM_MOBILITY, STREAM_REHAB, STREAM_TRAFFIC, Bundle,
                     ScenarioConfig, Standing, World, bundle_digest, new_scenario, stream)
from ..monitoring import TrustReport, fuse_and_pay_relay, pay_monitors, select_monitors, verdict_from_counts
from ..payments import participation_payment, settle_heads
from .energy import airtime, energy_account
from .forwarding import CaisCredit, Decision, DropReason, Strategy, forward_decision
from .metrics import MetricsRow, RunLog, metrics
from .mobility import RandomWaypoint, adjacency, distance_matrix

log = logging.getLogger(__name__)

_EPS_T = 1e-9


class EventKind(enum.IntEnum):
    """Event kinds; the integer value is the tie-break rank at equal timestamps."""

    MOVE = 0
    CONTACT = 1
    GENERATE_BUNDLE = 2
    FORWARD_ATTEMPT = 3
    WINDOW_CLOSE = 4
    ELECTION_TICK = 5
    METRICS_SAMPLE = 6


@dataclass
class RunResult:
    row: MetricsRow
    log: RunLog
    in_flight: int
    ledger_events: list[LedgerEvent]
    reputations: dict[int, float]
    trace: list[tuple] = field(default_factory=list)

    @property
    def conserved(self) -> bool:
        return self.log.generated == self.log.delivered + self.log.dropped + self.in_flight

    @property
    def replay_matches(self) -> bool:
        folded = replay(self.ledger_events, self.reputations)
        return all(folded[n] == r for n, r in self.reputations.items())


class Simulation:
    def __init__(self, config: ScenarioConfig, strategy: Strategy, trace: bool = False):
        self.cfg = config.validate()
        self.strategy = strategy
        self.world: World = new_scenario(config)
        self.n = self.world.n
        self.profiles = self.world.profiles
        self.tracing = trace
        self.trace: list[tuple] = []

        self.mobility = RandomWaypoint(self.world.positions(), config.area,
                                       (config.speed_min, config.speed_max),
                                       config.pause_time, stream(config.seed, STREAM_MOBILITY))
        self.traffic_rng = stream(config.seed, STREAM_TRAFFIC)
        self.rehab_rng = stream(config.seed, STREAM_REHAB)
        self.ledger = ReputationLedger(self.profiles, config.p_f)

        self.dist = distance_matrix(self.mobility.xy)
        self.adj = np.zeros((self.n, self.n), dtype=bool)
        self.usable = np.ones(self.n, dtype=bool)
        self.contact_ticks = np.zeros((self.n, self.n), dtype=np.int64)

        w, h = config.area
        communities = [int(p.position[0] >= w / 2) + 2 * int(p.position[1] >= h / 2) for p in self.profiles]
        self.credit = CaisCredit(self.n, communities) if strategy is Strategy.CAIS_LIKE else None

        self.wire_size = config.packet_size + config.header_size
        self.hop_time = airtime(self.wire_size, config.bitrate_kbps)
        self.run_log = RunLog()
        self.in_transit = 0
        self.bundle_seq = 0
        self.round = 0

        self.window_id = 0
        self.window_start = 0.0
        self.window_counts: dict[int, list[int]] = {}
        self.rep_snapshot = self.ledger.snapshot()

        self._heap: list[tuple] = []
        self._seq = 0

    # -- scheduling ---------------------------------------------------------

    def _push(self, t: float, kind: EventKind, node: int = -1, payload=None) -> None:
        self._seq += 1
        heapq.heappush(self._heap, (t, int(kind), node, self._seq, payload))

    def _emit(self, t: float, kind: str, node: int, detail: str = "") -> None:
        if self.tracing:
            self.trace.append((t, kind, node, detail))

    @property
    def sos(self) -> bool:
        return self.strategy is Strategy.SOS

    def run(self) -> RunResult:
        cfg = self.cfg
        self._push(0.0, EventKind.MOVE)
        if cfg.cbr_rate > 0:
            self._push(0.0, EventKind.GENERATE_BUNDLE)
        if self.sos:
            self._push(0.0, EventKind.ELECTION_TICK)
            if cfg.window <= cfg.sim_duration + _EPS_T:
                self._push(cfg.window, EventKind.WINDOW_CLOSE)

        handlers = {
            EventKind.MOVE: self._on_move,
            EventKind.GENERATE_BUNDLE: self._on_generate,
            EventKind.FORWARD_ATTEMPT: self._on_arrival,
            EventKind.WINDOW_CLOSE: self._on_window_close,
            EventKind.ELECTION_TICK: self._on_election,
        }
        end = cfg.sim_duration + _EPS_T
        while self._heap and self._heap[0][0] <= end:
            t, kind, node, _, payload = heapq.heappop(self._heap)
            self.world.time = t
            handlers[EventKind(kind)](t, node, payload)

        self._sync_positions()
        in_flight = self.in_transit + sum(len(c) for c in self.world.carried)
        row = metrics(self.strategy.value, cfg.selfish_fraction, cfg.pause_time, cfg.seed,
                      self.run_log, cfg.sim_duration, cfg.energy_init,
                      [p.energy_now for p in self.profiles])
        return RunResult(row, self.run_log, in_flight, list(self.ledger.events),
                         {p.id: p.reputation for p in self.profiles}, self.trace)

    # -- mobility and the periodic forwarding sweep ---------------------------

    def _sync_positions(self) -> None:
        for p, (x, y) in zip(self.profiles, self.mobility.xy.tolist()):
            p.position = (x, y)

    def _on_move(self, t: float, node: int, payload) -> None:
        cfg = self.cfg
        if t > 0:
            self.mobility.step(cfg.mobility_dt)
        self.dist = distance_matrix(self.mobility.xy)
        adj = adjacency(self.dist, cfg.t_range)
        onsets = (adj & ~self.adj).sum(axis=1)
        if onsets.any():
            for i in np.flatnonzero(onsets).tolist():
                self.profiles[i].contacts += int(onsets[i])
        self.adj = adj
        if self.strategy is Strategy.SSAR_LIKE:
            self.contact_ticks += adj

        self._purge_expired(t)
        self._sweep(t)
        nxt = t + cfg.mobility_dt
        if nxt < cfg.sim_duration - _EPS_T:
            self._push(nxt, EventKind.MOVE)

    def _purge_expired(self, t: float) -> None:
        for holder, bundles in enumerate(self.world.carried):
            if not bundles:
                continue
            keep = []
            for b in bundles:
                if t >= b.expires_at:
                    self._drop(holder, b, DropReason.TTL_EXPIRED, t, release=True)
                else:
                    keep.append(b)
            self.world.carried[holder] = keep

    def _sweep(self, t: float) -> None:
        pending = [(h, b) for h, bundles in enumerate(self.world.carried) for b in bundles]
        if not pending:
            return
        holders = np.fromiter((h for h, _ in pending), dtype=np.intp, count=len(pending))
        dests = np.fromiter((b.destination for _, b in pending), dtype=np.intp, count=len(pending))
        cand = self.adj[holders] & self.usable[None, :]
        scores = np.where(cand, self.dist[dests], np.inf)
        best = scores.argmin(axis=1)
        best_d = scores[np.arange(len(pending)), best]
        ok = best_d < self.dist[holders, dests]
        for i in np.flatnonzero(ok).tolist():
            h, b = pending[i]
            self._try_forward(h, b, int(best[i]), t)

    def _next_hop(self, u: int, dest: int) -> int | None:
        cand = self.adj[u] & self.usable
        if not cand.any():
            return None
        scores = np.where(cand, self.dist[dest], np.inf)
        v = int(scores.argmin())
        return v if scores[v] < self.dist[u, dest] else None

    # -- bundles --------------------------------------------------------------

    def _on_generate(self, t: float, node: int, payload) -> None:
        cfg = self.cfg
        rng = self.traffic_rng
        src = int(rng.integers(self.n))
        dst = int(rng.integers(self.n - 1)) if self.n > 1 else src
        if dst >= src and self.n > 1:
            dst += 1
        b = Bundle.create(self.bundle_seq, src, dst, t, cfg.bundle_ttl, cfg.packet_size)
        self.bundle_seq += 1
        self.run_log.generated += 1
        self._emit(t, "GenerateBundle", src, f"bundle={b.bundle_id} dst={dst}")
        p = self.profiles[src]
        if src == dst:
            self._deliver(b, t)
        elif p.buffer_now < b.size:
            self._drop(src, b, DropReason.BUFFER_FULL, t, release=False)
        else:
            p.buffer_now -= b.size
            self.world.carried[src].append(b)
            v = self._next_hop(src, dst)
            if v is not None:
                self._try_forward(src, b, v, t)
        nxt = (self.bundle_seq) / cfg.cbr_rate
        if nxt < cfg.sim_duration - _EPS_T:
            self._push(nxt, EventKind.GENERATE_BUNDLE)

    def _on_arrival(self, t: float, node: int, payload) -> None:
        b: Bundle = payload
        self.in_transit -= 1
        b.hop_log.append((node, t))
        if node == b.destination:
            self._deliver(b, t)
            return
        p = self.profiles[node]
        if t >= b.expires_at:
            p.buffer_now += b.size
            self._drop(node, b, DropReason.TTL_EXPIRED, t, release=False)
            return
        self.world.carried[node].append(b)
        v = self._next_hop(node, b.destination)
        if v is not None:
            self._try_forward(node, b, v, t)

    def _deliver(self, b: Bundle, t: float) -> None:
        lg = self.run_log
        lg.delivered += 1
        lg.delivered_bytes += b.size
        lg.delays.append(t - b.created_at)
        self._emit(t, "Deliver", b.destination, f"bundle={b.bundle_id}")

    def _drop(self, holder: int, b: Bundle, reason: DropReason, t: float, release: bool) -> None:
        if release:
            self.profiles[holder].buffer_now += b.size
        self.run_log.drop(reason.value)
        self._emit(t, "Drop", holder, f"bundle={b.bundle_id} reason={reason.value}")

    def _observe(self, relay: int, forwarded: int | None, b: Bundle) -> None:
        counts = self.window_counts.setdefault(relay, [0, 0, 0])
        if forwarded is None:
            counts[2] += 1
        elif forwarded == b.digest:
            counts[0] += 1
        else:
            counts[1] += 1

    def _try_forward(self, u: int, b: Bundle, v: int, t: float) -> None:
        relay = self.profiles[u]
        if relay.depleted or (self.sos and relay.expelled):
            return
        nxt = self.profiles[v]
        to_dest = v == b.destination
        if not to_dest and nxt.buffer_now < b.size:
            return
        tie = 0.0
        if self.strategy is Strategy.SSAR_LIKE:
            row = self.contact_ticks[u]
            top = row.max()
            tie = float(row[v] / top) if top > 0 else 0.0
        decision, reason = forward_decision(relay, b, v, self.strategy, t, tie=tie,
                                            next_profile=nxt, credit=self.credit)
        watched = self.sos and self.world.records and reason is not DropReason.TTL_EXPIRED
        carried = self.world.carried[u]
        carried.remove(b)
        relay.buffer_now += b.size
        if decision is Decision.DROP:
            if watched:
                self._observe(u, None, b)
            self._drop(u, b, reason, t, release=False)
            return
        if watched:
            self._observe(u, bundle_digest(b), b)
        if self.credit is not None and self.credit.solvent(b.source):
            self.credit.settle(b.source, u, v)
        if not to_dest:
            nxt.buffer_now -= b.size
        energy_account(relay, nxt, self.wire_size, self.cfg.bitrate_kbps,
                       self.cfg.tx_power, self.cfg.rx_power)
        if relay.depleted or nxt.depleted:
            self._refresh_usable()
        self.in_transit += 1
        self._emit(t, "Forward", u, f"bundle={b.bundle_id} to={v}")
        self._push(t + self.hop_time, EventKind.FORWARD_ATTEMPT, v, b)

    def _refresh_usable(self) -> None:
        self.usable = np.array([not p.depleted and not (self.sos and p.expelled)
                                for p in self.profiles], dtype=bool)

    # -- SOS control plane ------------------------------------------------------

    def _on_election(self, t: float, node: int, payload) -> None:
        cfg = self.cfg
        self._sync_positions()
        for bundles in self.world.carried:
            for b in bundles:
                b.age_to(t)
        try:
            record = hold_election(self.world, self.round)
        except QuorumError as exc:
            log.info("t=%g: election skipped (%s)", t, exc)
            record = None
        if record is not None:
            self.ledger.round = self.round
            self._emit(t, "Election", record.heads[0],
                       "heads=" + "/".join(map(str, record.heads)))
            try:
                breakdowns = settle_heads(record, cfg.f_b)
            except DegenerateInputError as exc:
                log.info("t=%g: head payments skipped (%s)", t, exc)
                breakdowns = []
            for bd in breakdowns:
                if not self.profiles[bd.node].expelled:
                    self._credit(bd.node, bd.r_p, Reason.ELECTION_HEAD, t)
            expelled = {p.id for p in self.profiles if p.expelled}
            for voter, amount in participation_payment(record, cfg.f_b, expelled):
                self._credit(voter, amount, Reason.ELECTION_PARTICIPATION, t)
        if t == self.window_start:
            # an election opening the window counts toward that window's reputations
            self.rep_snapshot = self.ledger.snapshot()
        self.round += 1
        nxt = self.round * cfg.election_period
        if nxt < cfg.sim_duration - _EPS_T:
            self._push(nxt, EventKind.ELECTION_TICK)

    def _credit(self, node: int, delta: float, reason: Reason, t: float) -> None:
        self.ledger.apply_delta(node, delta, reason, t)
        self._emit(t, "Ledger", node, f"reason={reason.value} delta={delta:.6g}")

    def _on_window_close(self, t: float, node: int, payload) -> None:
        cfg = self.cfg
        window = (self.window_start, t)
        changed = False
        if self.world.records:
            for relay in sorted(self.window_counts):
                changed |= self._judge(relay, self.window_counts[relay], window, t)
        if changed:
            self._refresh_usable()
        self.window_counts = {}
        self.window_id += 1
        self.window_start = t
        self.rep_snapshot = self.ledger.snapshot()
        nxt = (self.window_id + 1) * cfg.window
        if nxt <= cfg.sim_duration + _EPS_T:
            self._push(nxt, EventKind.WINDOW_CLOSE)

    def _judge(self, relay: int, counts: list[int], window: tuple[float, float], t: float) -> bool:
        """Close one relay's window. Returns True if the relay was expelled."""
        cfg = self.cfg
        p = self.profiles[relay]
        if p.expelled:
            return False
        verdict = verdict_from_counts(*counts)
        if verdict is None:
            return False
        monitors = select_monitors(self.world, relay, window)
        reports = [TrustReport(m, relay, verdict, self.window_id) for m in monitors.members
                   if not self.profiles[m].expelled]
        for r in reports:
            self._emit(t, "TrustReport", r.monitor, f"subject={relay} verdict={r.verdict.value}")
        try:
            fused, _ = fuse_and_pay_relay(relay, reports, self.rep_snapshot, self.ledger,
                                          cfg.fusion_variant, t, cfg.if_epsilon)
        except DegenerateEvidenceError as exc:
            log.info("t=%g: relay %d not judged (%s)", t, relay, exc)
            return False
        self._emit(t, "Fused", relay, f"verdict={fused.value} standing={p.punishment.state.name}")
        for monitor, delta in pay_monitors(reports, fused, cfg.p_f):
            if not self.profiles[monitor].expelled:
                self._credit(monitor, delta, Reason.MONITOR_PAYMENT, t)
        if p.expelled:
            return True
        if fused is Verdict.SELFISH and p.behavior.selfish and p.punishment.state in (
                Standing.WARNED, Standing.NEGATIVE_PAID):
            if self.rehab_rng.random() < cfg.rehab_p:
                p.behavior = COOPERATIVE
                self._emit(t, "Rehabilitated", relay)
        return False


def run(config: ScenarioConfig, strategy: Strategy, trace: bool = False) -> RunResult:
    return Simulation(config, strategy, trace).run()
