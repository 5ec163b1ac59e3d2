"""Scalability harness: wall time and peak memory against graph size.

Each scale runs in a fresh interpreter so peak RSS is per run.  The report
keeps every raw row, so the fitted exponent can be recomputed from it.
"""

from __future__ import annotations

import csv
import json
import os
import subprocess
import sys
import tempfile
import time
from dataclasses import asdict, dataclass, field
from pathlib import Path

import numpy as np

from .config import TYPOLOGIES

DEFAULT_SCALES = (1000, 2000, 3500, 5000, 8000)
PATTERNS_AT_8K = 90


@dataclass
class BenchRow:
    individuals: int
    repeat: int
    nodes: int
    edges: int
    transaction_edges: int
    elements: int
    wall_seconds: float
    peak_memory_bytes: int
    memory_source: str

    @property
    def throughput(self):
        return self.elements / self.wall_seconds if self.wall_seconds > 0 else 0.0


@dataclass
class BenchReport:
    rows: list
    alpha: float
    intercept: float
    r_squared: float
    settings: dict = field(default_factory=dict)

    def to_dict(self):
        return {
            "alpha": self.alpha,
            "intercept": self.intercept,
            "r_squared": self.r_squared,
            "settings": self.settings,
            "rows": [{**asdict(r), "throughput_kelements_per_s": r.throughput / 1000} for r in self.rows],
        }


def instance_counts(individuals, per_8k=PATTERNS_AT_8K):
    """Pattern instances scaled with population, spread evenly over typologies."""
    total = max(len(TYPOLOGIES), int(round(per_8k * individuals / 8000)))
    base, extra = divmod(total, len(TYPOLOGIES))
    return {t: base + (1 if i < extra else 0) for i, t in enumerate(TYPOLOGIES)}


def fit_power_law(n, t):
    """Least-squares fit of ``log t = a * log n + b``; returns ``(a, b, r2)``."""
    x = np.log(np.asarray(n, dtype=np.float64))
    y = np.log(np.asarray(t, dtype=np.float64))
    a, b = np.polyfit(x, y, 1)
    pred = a * x + b
    ss_res = float(np.sum((y - pred) ** 2))
    ss_tot = float(np.sum((y - y.mean()) ** 2))
    r2 = 1.0 - ss_res / ss_tot if ss_tot > 0 else 1.0
    return float(a), float(b), r2


def bench_configs(individuals, months=12, ratio=0.001, seed=0):
    graph = {
        "master_seed": seed,
        "individual_count": individuals,
        "simulation_start": "2025-01-01",
        "simulation_end": _month_end(2025, months),
        "target_illicit_ratio": ratio,
    }
    patterns = {t: {"instance_count": k} for t, k in instance_counts(individuals).items()}
    return graph, patterns


def _month_end(year, months):
    import calendar

    y, m = year + (months - 1) // 12, (months - 1) % 12 + 1
    return f"{y:04d}-{m:02d}-{calendar.monthrange(y, m)[1]:02d}"


def _peak_memory():
    try:
        import resource

        kb = resource.getrusage(resource.RUSAGE_SELF).ru_maxrss
        # Linux reports KiB, macOS bytes
        return (kb if sys.platform == "darwin" else kb * 1024), "ru_maxrss"
    except (ImportError, AttributeError):  # pragma: no cover - non-POSIX
        import tracemalloc

        return tracemalloc.get_traced_memory()[1], "tracemalloc"


def run_single(graph_raw, pattern_raw, out_dir=None, threads=1):
    """Generate and export one configuration; returns a measurement dict."""
    import tracemalloc

    from .assemble import run
    from .config import graph_config_from_dict, pattern_config_from_dict

    if not _has_resource():
        tracemalloc.start()
    g = graph_config_from_dict(graph_raw)
    p = pattern_config_from_dict(pattern_raw)
    with tempfile.TemporaryDirectory() as tmp:
        t0 = time.perf_counter()
        ds, manifest = run(g, p, out_dir or tmp, threads=threads, formats=("csv",))
        wall = time.perf_counter() - t0
    peak, source = _peak_memory()
    s = manifest.stats
    return {
        "nodes": s["nodes"], "edges": s["edges"], "transaction_edges": s["transaction_edges"],
        "elements": s["nodes"] + s["edges"], "wall_seconds": wall,
        "peak_memory_bytes": int(peak), "memory_source": source,
    }


def _has_resource():
    try:
        import resource  # noqa: F401

        return True
    except ImportError:  # pragma: no cover
        return False


def _run_subprocess(graph_raw, pattern_raw, threads):
    payload = json.dumps({"graph": graph_raw, "patterns": pattern_raw, "threads": threads})
    proc = subprocess.run(
        [sys.executable, "-m", "amlgraph.bench", "--worker"], input=payload, capture_output=True, text=True,
        check=False, env=os.environ.copy(),
    )
    if proc.returncode != 0:
        raise RuntimeError(f"bench worker failed:\n{proc.stderr}")
    return json.loads(proc.stdout.strip().splitlines()[-1])


def run_bench(scales=DEFAULT_SCALES, repeats=1, months=12, ratio=0.001, seed=0, threads=1,
              isolate=True, out_dir=None, progress=None):
    """Measure every scale ``repeats`` times and fit the scaling exponent."""
    if len(scales) < 2:
        raise ValueError("need at least two scales to fit an exponent")
    rows = []
    for n in scales:
        for r in range(repeats):
            g, p = bench_configs(n, months, ratio, seed + r)
            m = _run_subprocess(g, p, threads) if isolate else run_single(g, p, threads=threads)
            row = BenchRow(individuals=n, repeat=r, **m)
            rows.append(row)
            if progress:
                progress(row)
    a, b, r2 = fit_power_law([r.elements for r in rows], [r.wall_seconds for r in rows])
    report = BenchReport(rows, a, b, r2, {"scales": list(scales), "repeats": repeats, "months": months,
                                          "ratio": ratio, "seed": seed, "threads": threads})
    if out_dir is not None:
        write_report(report, out_dir)
    return report


def write_report(report, out_dir):
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    (out / "bench.json").write_text(json.dumps(report.to_dict(), indent=2) + "\n", encoding="utf-8")
    fields = ["individuals", "repeat", "nodes", "edges", "transaction_edges", "elements", "wall_seconds",
              "peak_memory_bytes", "memory_source", "throughput_kelements_per_s"]
    with open(out / "bench.csv", "w", newline="", encoding="utf-8") as fh:
        w = csv.DictWriter(fh, fieldnames=fields)
        w.writeheader()
        for r in report.rows:
            w.writerow({**asdict(r), "throughput_kelements_per_s": r.throughput / 1000})


def refit(rows):
    """Recompute ``(alpha, intercept, r2)`` from raw report rows."""
    return fit_power_law([r["elements"] for r in rows], [r["wall_seconds"] for r in rows])


def _worker():
    args = json.loads(sys.stdin.read())
    result = run_single(args["graph"], args["patterns"], threads=args.get("threads", 1))
    sys.stdout.write(json.dumps(result) + "\n")


if __name__ == "__main__":  # pragma: no cover - exercised through subprocesses
    if "--worker" in sys.argv:
        _worker()
    else:
        print("usage: python -m amlgraph.bench --worker < payload.json", file=sys.stderr)
        sys.exit(2)


__all__ = ["BenchReport", "BenchRow", "DEFAULT_SCALES", "bench_configs", "fit_power_law", "instance_counts",
           "refit", "run_bench", "write_report"]
