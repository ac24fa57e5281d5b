"""Batch execution of a SweepSpec and CSV/summary output."""
from __future__ import annotations

import csv
import io
import os
import statistics
from collections import defaultdict
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field

from .config import SweepSpec
from .model import ScenarioConfig
from .sim.engine import run
from .sim.forwarding import Strategy
from .sim.metrics import CSV_HEADER, MetricsRow, fmt

METRIC_FIELDS = ("pdr", "throughput_kbps", "avg_delay_ms", "avg_energy_j")
MEANS_HEADER = ("strategy", "selfish_pct", "pause_time_s", "runs") + tuple(f"mean_{m}" for m in METRIC_FIELDS)


class RunFailure(RuntimeError):
    def __init__(self, cell: tuple, cause: BaseException):
        strategy, fraction, pause, seed = cell
        super().__init__(f"run failed at strategy={strategy.value} selfish_fraction={fraction} "
                         f"pause_time={pause} seed={seed}: {cause!r}")
        self.cell = cell


@dataclass
class SweepResult:
    rows: list[MetricsRow]
    issues: dict[tuple, list[str]] = field(default_factory=dict)

    def csv_text(self) -> str:
        return rows_to_csv(self.rows)

    def means(self) -> list[tuple]:
        return cell_means(self.rows)


def sanity_issues(result, energy_init: float) -> list[str]:
    """Per-run checks: metric ranges, bundle conservation and ledger replay."""
    r = result.row
    issues = []
    if not 0.0 <= r.pdr <= 1.0:
        issues.append(f"pdr {r.pdr} outside [0, 1]")
    if not 0.0 <= r.avg_energy_j <= energy_init:
        issues.append(f"avg_energy_j {r.avg_energy_j} outside [0, {energy_init}]")
    if r.avg_delay_ms < 0:
        issues.append(f"negative delay {r.avg_delay_ms}")
    if not result.conserved:
        lg = result.log
        issues.append(f"conservation: generated {lg.generated} != delivered {lg.delivered} "
                      f"+ dropped {lg.dropped} + in flight {result.in_flight}")
    if not result.replay_matches:
        issues.append("ledger replay differs from final reputations")
    return issues


def _one(job: tuple[ScenarioConfig, Strategy, bool]) -> tuple[MetricsRow, list[str]]:
    config, strategy, check = job
    result = run(config, strategy)
    return result.row, sanity_issues(result, config.energy_init) if check else []


def run_cells(spec: SweepSpec, parallelism: int = 1,
              check: bool = False) -> tuple[list[MetricsRow], dict[tuple, list[str]]]:
    """Rows sorted by (strategy, selfish_pct, pause, seed), plus sanity issues keyed by cell."""
    cells = spec.cells()
    jobs = [(spec.scenario(f, p, seed), s, check) for s, f, p, seed in cells]
    outputs: list[tuple[MetricsRow, list[str]]] = []
    if parallelism <= 1:
        for cell, job in zip(cells, jobs):
            try:
                outputs.append(_one(job))
            except Exception as exc:
                raise RunFailure(cell, exc) from exc
    else:
        with ProcessPoolExecutor(max_workers=parallelism) as pool:
            futures = [pool.submit(_one, job) for job in jobs]
            for cell, fut in zip(cells, futures):
                try:
                    outputs.append(fut.result())
                except Exception as exc:
                    for f in futures:
                        f.cancel()
                    raise RunFailure(cell, exc) from exc
    issues = {cell: out[1] for cell, out in zip(cells, outputs) if out[1]}
    rows = sorted((out[0] for out in outputs), key=MetricsRow.sort_key)
    return rows, issues


def run_sweep(spec: SweepSpec, parallelism: int = 1, out: str | os.PathLike | None = None,
              means_out: str | os.PathLike | None = None, check: bool = False) -> SweepResult:
    """Run every cell of ``spec``; rows come back in sorted order whatever the pool did."""
    result = SweepResult(*run_cells(spec.validate(), parallelism, check))
    if out is not None:
        write_text(out, result.csv_text())
    if means_out is not None:
        write_text(means_out, means_to_csv(result.means()))
    return result


def write_text(path: str | os.PathLike, text: str) -> None:
    with open(path, "w", encoding="utf-8", newline="") as fh:
        fh.write(text)


def rows_to_csv(rows: list[MetricsRow]) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(CSV_HEADER)
    for r in rows:
        w.writerow(r.csv_fields())
    return buf.getvalue()


def cell_means(rows: list[MetricsRow]) -> list[tuple]:
    """Per (strategy, selfish_pct, pause) means across seeds, sorted."""
    groups: dict[tuple, list[MetricsRow]] = defaultdict(list)
    for r in rows:
        groups[(r.strategy, r.selfish_pct, r.pause_time_s)].append(r)
    out = []
    for key in sorted(groups):
        rs = groups[key]
        out.append(key + (len(rs),) + tuple(statistics.fmean(getattr(r, m) for r in rs)
                                            for m in METRIC_FIELDS))
    return out


def fraction_means(rows: list[MetricsRow], strategy: str, metric: str = "pdr") -> dict[float, float]:
    """Mean of ``metric`` per selfish percentage for one strategy, pooled over pauses and seeds."""
    groups: dict[float, list[float]] = defaultdict(list)
    for r in rows:
        if r.strategy == strategy:
            groups[r.selfish_pct].append(getattr(r, metric))
    return {k: statistics.fmean(v) for k, v in sorted(groups.items())}


def means_to_csv(means: list[tuple]) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(MEANS_HEADER)
    for strategy, pct, pause, n, *vals in means:
        w.writerow([strategy, fmt(pct), fmt(pause), n] + [fmt(v) for v in vals])
    return buf.getvalue()


def summary_table(rows: list[MetricsRow]) -> str:
    """Plain-text table of mean metrics per strategy and selfish percentage."""
    groups: dict[tuple, list[MetricsRow]] = defaultdict(list)
    for r in rows:
        groups[(r.strategy, r.selfish_pct)].append(r)
    head = f"{'strategy':<12} {'selfish%':>8} {'runs':>5} {'pdr':>8} {'tput_kbps':>10} {'delay_ms':>10} {'energy_j':>9}"
    lines = [head, "-" * len(head)]
    for (strategy, pct), rs in sorted(groups.items()):
        m = [statistics.fmean(getattr(r, f) for r in rs) for f in METRIC_FIELDS]
        lines.append(f"{strategy:<12} {pct:>8g} {len(rs):>5} {m[0]:>8.4f} {m[1]:>10.4f} {m[2]:>10.2f} {m[3]:>9.4f}")
    return "\n".join(lines)
