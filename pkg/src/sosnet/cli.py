"""Command-line front end: ``sosnet run``, ``sosnet sweep`` and ``sosnet fuse``."""
from __future__ import annotations

import argparse
import csv
import dataclasses
import io
import logging
import sys
import time

from .config import VARIANT_NAMES, parse_config, parse_strategy
from .errors import ConfigError, SosError
from .fusion import Verdict, cif_combine, classify, importance_factors
from .sim.engine import run
from .sim.metrics import fmt
from .sweep import RunFailure, rows_to_csv, run_sweep, summary_table, write_text

TRACE_HEADER = ("time", "kind", "node", "detail")


def _parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", help="key = value config file")
    common.add_argument("--seed", type=int, help="override the scenario seed (sweep: run only this seed)")
    common.add_argument("--variant", choices=sorted(VARIANT_NAMES), help="CIF exponent variant")
    common.add_argument("--set", dest="sets", action="append", default=[], metavar="KEY=VALUE",
                        help="override any config key; repeatable")
    common.add_argument("-v", "--verbose", action="store_true")

    p = argparse.ArgumentParser(prog="sosnet", description=__doc__)
    sub = p.add_subparsers(dest="command", required=True)

    r = sub.add_parser("run", parents=[common], help="simulate one scenario")
    r.add_argument("--strategy", default="SOS", help="SOS, SsarLike, CaisLike or NoIncentive")
    r.add_argument("--out", help="metrics CSV path (default: stdout)")
    r.add_argument("--trace", help="write the event trace CSV here")

    s = sub.add_parser("sweep", parents=[common], help="run the full strategy x fraction x pause x seed grid")
    s.add_argument("--out", default="sweep.csv", help="metrics CSV path (default: %(default)s)")
    s.add_argument("--means", help="plot-ready per-cell means CSV")
    s.add_argument("--parallel", type=int, default=1, metavar="N", help="worker processes")
    s.add_argument("--quiet", action="store_true", help="skip the summary table")
    s.add_argument("--check", action="store_true",
                   help="verify metric ranges, conservation and ledger replay on every run")

    f = sub.add_parser("fuse", help="fuse a monitor report file")
    f.add_argument("reports", help="CSV with a verdict column and an importance or reputation column")
    f.add_argument("--variant", choices=sorted(VARIANT_NAMES), default="worked")
    f.add_argument("--epsilon", type=float, default=1e-6)
    return p


def _overrides(args) -> dict:
    out: dict = {}
    for item in args.sets:
        key, sep, value = item.partition("=")
        if not sep:
            raise ConfigError(key or "--set", "expected KEY=VALUE", "command line")
        out[key.strip()] = value.strip()
    if args.variant:
        out["fusion_variant"] = args.variant
    return out


def cmd_run(args) -> int:
    overrides = _overrides(args)
    if args.seed is not None:
        overrides["seed"] = str(args.seed)
    spec = parse_config(args.config, overrides)
    strategy = parse_strategy(args.strategy)
    result = run(spec.base, strategy, trace=bool(args.trace))
    text = rows_to_csv([result.row])
    if args.out:
        write_text(args.out, text)
    else:
        sys.stdout.write(text)
    if args.trace:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(TRACE_HEADER)
        for t, kind, node, detail in result.trace:
            w.writerow([fmt(t), kind, node, detail])
        write_text(args.trace, buf.getvalue())
    lg = result.log
    print(f"generated={lg.generated} delivered={lg.delivered} dropped={lg.dropped} "
          f"in_flight={result.in_flight} drops={dict(sorted(lg.drop_reasons.items()))}", file=sys.stderr)
    return 0


def cmd_sweep(args) -> int:
    spec = parse_config(args.config, _overrides(args))
    if args.seed is not None:
        spec = dataclasses.replace(spec, seeds=(args.seed,))
    t0 = time.perf_counter()
    result = run_sweep(spec, max(1, args.parallel), args.out, args.means, check=args.check)
    elapsed = time.perf_counter() - t0
    if not args.quiet:
        print(summary_table(result.rows))
    print(f"{len(result.rows)} runs in {elapsed:.1f} s -> {args.out}", file=sys.stderr)
    for (strategy, fraction, pause, seed), problems in sorted(result.issues.items(), key=str):
        for msg in problems:
            print(f"check failed: {strategy.value} f={fraction} pause={pause} seed={seed}: {msg}",
                  file=sys.stderr)
    return 1 if result.issues else 0


def _verdict(text: str) -> Verdict:
    t = text.strip().lower()
    if t in ("c", "cooperative", "coop"):
        return Verdict.COOPERATIVE
    if t in ("s", "selfish"):
        return Verdict.SELFISH
    raise ValueError(f"unknown verdict {text!r}")


def read_reports(path: str, epsilon: float = 1e-6) -> list[tuple[Verdict, float]]:
    """Rows of (verdict, importance). Reputation columns are turned into importance factors."""
    with open(path, newline="", encoding="utf-8") as fh:
        rows = list(csv.DictReader(fh))
    if not rows:
        raise ConfigError("reports", "no report rows", path)
    cols = {c.strip().lower(): c for c in rows[0]}
    if "verdict" not in cols:
        raise ConfigError("verdict", "missing column", path)
    verdicts = []
    for i, row in enumerate(rows, 2):
        try:
            verdicts.append(_verdict(row[cols["verdict"]]))
        except ValueError as exc:
            raise ConfigError("verdict", str(exc), f"{path}:{i}") from None
    if "importance" in cols:
        ifs = [float(row[cols["importance"]]) for row in rows]
    elif "reputation" in cols:
        ifs = importance_factors([float(row[cols["reputation"]]) for row in rows], epsilon)
    else:
        raise ConfigError("importance", "need an importance or reputation column", path)
    return list(zip(verdicts, ifs))


def cmd_fuse(args) -> int:
    reports = read_reports(args.reports, args.epsilon)
    res = cif_combine(reports, VARIANT_NAMES[args.variant])
    for v, f in reports:
        print(f"report {v.value:<11} importance={f:.6g}")
    print(f"raw cooperative={res.raw_cooperative:.6g} selfish={res.raw_selfish:.6g}")
    print(f"fused cooperative={res.bpa.cooperative:.6g} selfish={res.bpa.selfish:.6g}")
    print(f"verdict {classify(res.bpa).value}")
    return 0


def main(argv: list[str] | None = None) -> int:
    args = _parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if getattr(args, "verbose", False) else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    handler = {"run": cmd_run, "sweep": cmd_sweep, "fuse": cmd_fuse}[args.command]
    try:
        return handler(args)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return 2
    except RunFailure as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except (SosError, ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
