"""``amlgraph`` command line.

Subcommands: generate, validate, stats, bench, check-determinism.  Set
``AMLGRAPH_LOG_LEVEL`` (e.g. ``DEBUG``) for more output.
"""

from __future__ import annotations

import argparse
import dataclasses
import json
import logging
import os
import sys
from pathlib import Path

from .errors import AmlGraphError

log = logging.getLogger("amlgraph")


def _formats(values):
    if not values:
        return None
    out = []
    for v in values:
        for f in v.split(","):
            f = f.strip().lower()
            if f not in ("csv", "json"):
                raise argparse.ArgumentTypeError(f"unknown format {f!r}; expected csv or json")
            out.append(f)
    return tuple(dict.fromkeys(out))


def _load(args):
    from .config import load_graph_config, load_pattern_config

    g = load_graph_config(args.graph_config)
    p = load_pattern_config(args.patterns_config)
    if getattr(args, "strict", False):
        p = dataclasses.replace(p, strict=True)
    return g, p


def cmd_generate(args):
    from .assemble import run

    g, p = _load(args)
    _, manifest = run(g, p, args.out, seed=args.seed, threads=args.threads, formats=_formats(args.format))
    s = manifest.stats
    print(f"seed            {manifest.seed}")
    print(f"nodes           {s['nodes']}")
    print(f"edges           {s['edges']} ({s['transaction_edges']} transactions, {s['fraud_edges']} fraud)")
    print(f"illicit ratio   {s['achieved_illicit_ratio']:.6f} (target {s['target_illicit_ratio']})")
    print(f"instances       {sum(s['instances'].values())}")
    for w in s["warnings"]:
        print(f"warning         {w}")
    print(f"written to      {args.out}")
    return 0


def cmd_validate(args):
    from .validate import validate_export

    report = validate_export(args.dir)
    print(report.to_text())
    return 0 if report.passed else 1


def cmd_stats(args):
    from .validate import stats_for_export

    stats = stats_for_export(args.dir)
    manifest = Path(args.dir) / "manifest.json"
    if manifest.exists():
        recorded = json.loads(manifest.read_text(encoding="utf-8"))["stats"]["achieved_illicit_ratio"]
        stats["manifest_illicit_ratio"] = recorded
    print(json.dumps(stats, indent=2))
    return 0


def cmd_bench(args):
    from .bench import run_bench

    def progress(row):
        print(f"{row.individuals:>6d} individuals  {row.elements:>9d} elements  {row.wall_seconds:7.2f} s  "
              f"{row.peak_memory_bytes / 2**20:8.1f} MiB  {row.throughput / 1000:7.1f} kElem/s", flush=True)

    report = run_bench(args.scales, repeats=args.repeats, months=args.months, ratio=args.ratio, seed=args.seed,
                       threads=args.threads, out_dir=args.out, progress=progress)
    print(f"alpha {report.alpha:.3f}  R^2 {report.r_squared:.3f}")
    return 0


def cmd_check_determinism(args):
    from .validate import check_determinism

    g, p = _load(args)
    res = check_determinism(g, p, seed=args.seed, threads=tuple(args.threads))
    for name in res.hashes_a:
        mark = "same" if name not in res.differing else "DIFF"
        print(f"{mark}  {name}  {res.hashes_a[name][:16]}  {res.hashes_b[name][:16]}")
    print("identical" if res.identical else "differs")
    return 0 if res.identical else 1


def build_parser():
    ap = argparse.ArgumentParser(prog="amlgraph", description="Synthetic AML transaction graph generator.")
    sub = ap.add_subparsers(dest="command", required=True)

    def configs(p):
        p.add_argument("--graph-config", required=True, help="graph YAML file")
        p.add_argument("--patterns-config", required=True, help="patterns YAML file")
        p.add_argument("--seed", type=int, default=None, help="override the master seed")

    g = sub.add_parser("generate", help="generate and export a dataset")
    configs(g)
    g.add_argument("--out", required=True, help="output directory")
    g.add_argument("--format", action="append", help="csv and/or json (repeatable or comma separated)")
    g.add_argument("--strict", action="store_true", help="fail if any pattern instance cannot be placed")
    g.add_argument("--threads", type=int, default=1)
    g.set_defaults(func=cmd_generate)

    v = sub.add_parser("validate", help="check every pattern instance of an export")
    v.add_argument("dir", help="export directory")
    v.set_defaults(func=cmd_validate)

    s = sub.add_parser("stats", help="print dataset statistics of an export")
    s.add_argument("dir", help="export directory")
    s.set_defaults(func=cmd_stats)

    b = sub.add_parser("bench", help="scalability benchmark")
    b.add_argument("--scales", type=int, nargs="+", default=[1000, 2000, 3500, 5000, 8000])
    b.add_argument("--repeats", type=int, default=1)
    b.add_argument("--months", type=int, default=12)
    b.add_argument("--ratio", type=float, default=0.001)
    b.add_argument("--seed", type=int, default=0)
    b.add_argument("--threads", type=int, default=1)
    b.add_argument("--out", default="bench_out")
    b.set_defaults(func=cmd_bench)

    d = sub.add_parser("check-determinism", help="generate twice and compare file hashes")
    configs(d)
    d.add_argument("--threads", type=int, nargs=2, default=[1, 4], metavar=("A", "B"))
    d.set_defaults(func=cmd_check_determinism)
    return ap


def main(argv=None):
    level = os.environ.get("AMLGRAPH_LOG_LEVEL", "WARNING").upper()
    logging.basicConfig(level=getattr(logging, level, logging.WARNING), format="%(levelname)s %(name)s: %(message)s")
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except argparse.ArgumentTypeError as e:
        parser.error(str(e))
    except AmlGraphError as e:
        print(f"error: {type(e).__name__}: {e}", file=sys.stderr)
        return 1


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
