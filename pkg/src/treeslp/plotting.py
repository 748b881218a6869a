"""Scaling figures.  Uses the Agg canvas directly, so no display is ever needed."""
from __future__ import annotations

import math
from collections import defaultdict
from pathlib import Path

from matplotlib.backends.backend_agg import FigureCanvasAgg
from matplotlib.figure import Figure

MARKERS = {"treebisection": "o", "bushrink": "s", "combined": "^"}


def _series(rows, key):
    out = defaultdict(list)
    for row in sorted(rows, key=lambda r: r.n):
        out[row.algo].append((row.n, key(row)))
    return out


def _figure():
    fig = Figure(figsize=(5.0, 3.6), dpi=120, layout="constrained")
    FigureCanvasAgg(fig)
    ax = fig.add_subplot()
    ax.grid(True, alpha=0.3, linewidth=0.6)
    for side in ("top", "right"):
        ax.spines[side].set_visible(False)
    return fig, ax


def plot_ratio(rows, path) -> Path:
    """size * log2(n) / n against n."""
    fig, ax = _figure()
    for algo, pts in _series(rows, lambda r: r.ratio).items():
        xs, ys = zip(*pts)
        ax.plot(xs, ys, marker=MARKERS.get(algo, "."), label=algo)
    ax.set_xscale("log", base=2)
    ax.set_xlabel("input size n")
    ax.set_ylabel(r"$|G|\,\log_2 n \,/\, n$")
    ax.legend(frameon=False)
    fig.savefig(path)
    return Path(path)


def plot_depth(rows, path) -> Path:
    """Grammar depth against log2(n)."""
    fig, ax = _figure()
    for algo, pts in _series(rows, lambda r: r.depth).items():
        xs = [math.log2(max(2, n)) for n, _ in pts]
        ax.plot(xs, [d for _, d in pts], marker=MARKERS.get(algo, "."), label=algo)
    ax.set_xlabel(r"$\log_2 n$")
    ax.set_ylabel("depth")
    ax.legend(frameon=False)
    fig.savefig(path)
    return Path(path)
