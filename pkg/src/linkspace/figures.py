"""Figure rendering for the command-line reports.

Two plots are produced: the fiber schedule of a four-bar chamber drawn as a
colored strip over the diagonal-angle arc, and a bar chart of Betti numbers
for a homology report.  Rendering goes through the Agg backend so both
functions work headless and only ever write files.
"""

from __future__ import annotations

import math
from pathlib import Path

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt

from .chains import FIBER_SPLIT, QuadReport
from .cw import HomologyReport

_SPLIT_COLOR = "#f2c57c"
_CIRCLE_COLOR = "#86b3d1"
_MARKER_COLOR = "#333333"


def save_quad_schedule(report: QuadReport, path: str | Path) -> Path:
    """Render the fiber schedule of a chamber report as a PNG strip."""
    path = Path(path)
    fig, ax = plt.subplots(figsize=(7.0, 2.6))
    deg = math.degrees
    for entry in report.fiber_schedule:
        if entry.lo == entry.hi:
            continue
        color = _SPLIT_COLOR if entry.fiber == FIBER_SPLIT else _CIRCLE_COLOR
        ax.axvspan(deg(entry.lo), deg(entry.hi), color=color, label=entry.fiber)
    for entry in report.fiber_schedule:
        if entry.lo != entry.hi:
            continue
        x = deg(entry.lo)
        ax.axvline(x, color=_MARKER_COLOR, linewidth=1.2)
        ax.annotate(
            f"({entry.at})\n{entry.fiber}",
            xy=(x, 1.0),
            xycoords=("data", "axes fraction"),
            xytext=(0, 6),
            textcoords="offset points",
            ha="center",
            fontsize=8,
        )
    pad = 0.02 * (deg(report.alpha_max) - deg(report.alpha_min)) + 1.0
    ax.set_xlim(deg(report.alpha_min) - pad, deg(report.alpha_max) + pad)
    ax.set_ylim(0.0, 1.0)
    ax.set_yticks([])
    ax.set_xlabel("diagonal angle (degrees)")
    sides = ", ".join(f"{v:g}" for v in report.lengths)
    ax.set_title(f"lengths ({sides}), case {report.arc_case}", fontsize=10)
    handles, labels = ax.get_legend_handles_labels()
    unique = dict(zip(labels, handles))
    ax.legend(unique.values(), unique.keys(), loc="center left", fontsize=8)
    fig.tight_layout()
    fig.savefig(path, dpi=150)
    plt.close(fig)
    return path


def save_homology_chart(report: HomologyReport, path: str | Path) -> Path:
    """Render Betti numbers with torsion annotations as a PNG bar chart."""
    path = Path(path)
    fig, ax = plt.subplots(figsize=(5.0, 3.2))
    degrees = list(range(len(report.betti)))
    ax.bar(degrees, report.betti, color=_CIRCLE_COLOR, edgecolor=_MARKER_COLOR)
    for k, b in enumerate(report.betti):
        note = str(b)
        if report.torsion[k]:
            note += " + " + " + ".join(f"Z/{d}" for d in report.torsion[k])
        ax.annotate(
            note,
            xy=(k, b),
            xytext=(0, 3),
            textcoords="offset points",
            ha="center",
            fontsize=9,
        )
    ax.set_xticks(degrees)
    ax.set_xlabel("degree")
    ax.set_ylabel("free rank")
    ax.set_ylim(0, max(report.betti) + 2)
    ax.set_title(f"homology ranks (Euler number {report.euler})", fontsize=10)
    fig.tight_layout()
    fig.savefig(path, dpi=150)
    plt.close(fig)
    return path
