"""Run records for compressor invocations, and the scaling experiment behind ``treeslp report``."""
from __future__ import annotations

import csv
import json
import logging
import math
import time
from dataclasses import asdict, dataclass, fields
from pathlib import Path

from .bisection import tree_bisection
from .bushrink import bu_shrink, combined, default_k
from .corpus import GenSpec, generate
from .grammar import Tslp, grammar_depth, is_cnf, tslp_depth
from .trees import Tree

log = logging.getLogger(__name__)

ALGOS = ("treebisection", "bushrink", "combined")


@dataclass
class RunReport:
    n: int
    sigma: int
    max_rank: int
    algo: str
    k_used: int
    size: int
    depth: int
    max_nt_rank: int
    time_ms: float
    ratio: float

    def to_json(self) -> str:
        return json.dumps(asdict(self), sort_keys=False)


def compress(t: Tree, algo: str, k: int | None = None) -> tuple[Tslp, RunReport]:
    """Compress ``t`` with ``algo`` and measure the result.

    ``k_used`` is the merge bound of the first shrinking pass, and 0 for
    plain bisection, which has no such parameter.
    """
    if algo not in ALGOS:
        raise ValueError(f"unknown algorithm {algo!r}")
    if k is not None and k < 1:
        raise ValueError("k must be at least 1")
    ranks = t.ranks
    sigma, r = len(ranks), t.max_rank
    started = time.perf_counter()
    if algo == "treebisection":
        g = tree_bisection(t)
        k_used = 0
    else:
        k_used = default_k(t.size, sigma, r) if k is None else k
        g = bu_shrink(t, k_used) if algo == "bushrink" else combined(t, k=k_used)
    elapsed = (time.perf_counter() - started) * 1000.0
    depth = tslp_depth(g) if is_cnf(g) else grammar_depth(g)
    n = t.size
    report = RunReport(n=n, sigma=sigma, max_rank=r, algo=algo, k_used=k_used,
                       size=g.size, depth=depth, max_nt_rank=g.max_rank,
                       time_ms=round(elapsed, 3),
                       ratio=g.size * math.log2(max(2, n)) / n)
    return g, report


def scaling_rows(sizes, algos=("treebisection", "combined"), sigma: int = 1,
                 seed: int = 0, family: str = "random-binary") -> list[RunReport]:
    """One report per (size, algorithm) on freshly generated trees."""
    rows = []
    for n in sizes:
        t = generate(GenSpec(family, n, sigma, seed))
        for algo in algos:
            _, rep = compress(t, algo)
            log.info("n=%d %s size=%d depth=%d ratio=%.3f", rep.n, algo, rep.size,
                     rep.depth, rep.ratio)
            rows.append(rep)
    return rows


def write_csv(rows, path):
    names = [f.name for f in fields(RunReport)]
    with open(path, "w", newline="") as fh:
        w = csv.DictWriter(fh, fieldnames=names)
        w.writeheader()
        for row in rows:
            w.writerow(asdict(row))


def write_jsonl(rows, path):
    with open(path, "w") as fh:
        for row in rows:
            fh.write(row.to_json() + "\n")


def run_report(out_dir, sizes, algos=("treebisection", "combined"), sigma: int = 1,
               seed: int = 0, plots: bool = True) -> list[Path]:
    """Scaling experiment; writes CSV, JSON lines and (optionally) PNG figures."""
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    rows = scaling_rows(sizes, algos, sigma, seed)
    written = [out / "scaling.csv", out / "scaling.jsonl"]
    write_csv(rows, written[0])
    write_jsonl(rows, written[1])
    if plots:
        from .plotting import plot_depth, plot_ratio
        written.append(plot_ratio(rows, out / "ratio.png"))
        written.append(plot_depth(rows, out / "depth.png"))
    return written
