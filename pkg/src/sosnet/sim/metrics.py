"""Per-run delivery, delay, throughput and energy figures."""
from __future__ import annotations

import logging
from dataclasses import dataclass, field

log = logging.getLogger(__name__)

CSV_HEADER = ("strategy", "selfish_pct", "pause_time_s", "seed",
              "pdr", "throughput_kbps", "avg_delay_ms", "avg_energy_j")


@dataclass(frozen=True)
class MetricsRow:
    strategy: str
    selfish_pct: float
    pause_time_s: float
    seed: int
    pdr: float
    throughput_kbps: float
    avg_delay_ms: float
    avg_energy_j: float

    def sort_key(self):
        return (self.strategy, self.selfish_pct, self.pause_time_s, self.seed)

    def csv_fields(self) -> list[str]:
        return [self.strategy, fmt(self.selfish_pct), fmt(self.pause_time_s), str(self.seed),
                fmt(self.pdr), fmt(self.throughput_kbps), fmt(self.avg_delay_ms), fmt(self.avg_energy_j)]


def fmt(x: float) -> str:
    """Six significant digits; keeps CSV output byte-stable."""
    s = f"{x:.6g}"
    return "0" if s == "-0" else s


@dataclass
class RunLog:
    generated: int = 0
    delivered: int = 0
    dropped: int = 0
    delivered_bytes: int = 0
    delays: list[float] = field(default_factory=list)
    drop_reasons: dict[str, int] = field(default_factory=dict)

    def drop(self, reason: str) -> None:
        self.dropped += 1
        self.drop_reasons[reason] = self.drop_reasons.get(reason, 0) + 1


def metrics(strategy: str, selfish_fraction: float, pause_time: float, seed: int,
            run: RunLog, sim_duration: float, energy_init: float,
            energy_now: list[float]) -> MetricsRow:
    if run.generated == 0:
        log.warning("no bundles generated; pdr reported as 0")
        pdr = 0.0
    else:
        pdr = run.delivered / run.generated
    delay_ms = 1000.0 * sum(run.delays) / len(run.delays) if run.delays else 0.0
    throughput = run.delivered_bytes * 8.0 / sim_duration / 1000.0 if sim_duration > 0 else 0.0
    spent = [energy_init - e for e in energy_now]
    avg_energy = sum(spent) / len(spent) if spent else 0.0
    return MetricsRow(strategy, round(selfish_fraction * 100.0, 9), pause_time, seed,
                      pdr, throughput, delay_ms, avg_energy)
