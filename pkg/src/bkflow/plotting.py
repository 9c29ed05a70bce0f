"""Figures for the report directory.

Uses the object-oriented Figure/Agg API so nothing depends on pyplot state,
and strips PNG metadata so identical inputs give identical files.
"""

from __future__ import annotations

from pathlib import Path
from typing import Sequence

import matplotlib

matplotlib.use("Agg")

from matplotlib import rcParams  # noqa: E402
from matplotlib.backends.backend_agg import FigureCanvasAgg  # noqa: E402
from matplotlib.figure import Figure  # noqa: E402

from bkflow.aggregate import BkfRow, FieldBkfRow, top_bottom_fields  # noqa: E402
from bkflow.flows import FlowMatrix  # noqa: E402
from bkflow.specialization import UNDEFINED, SpecializationTable  # noqa: E402

STYLE = {
    "font.size": 9,
    "axes.titlesize": 10,
    "axes.labelsize": 9,
    "xtick.labelsize": 8,
    "ytick.labelsize": 8,
    "axes.spines.top": False,
    "axes.spines.right": False,
    "savefig.dpi": 120,
    "svg.hashsalt": "bkflow",
}

SURPLUS = "#2b7bba"
DEFICIT = "#c8553d"


def _figure(width: float, height: float) -> Figure:
    rcParams.update(STYLE)
    fig = Figure(figsize=(width, height))
    FigureCanvasAgg(fig)
    return fig


def _save(fig: Figure, path: Path) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    fig.tight_layout()
    fig.savefig(path, format="png", metadata={"Software": None})
    return path


def plot_bkf(rows: Sequence[BkfRow], path: Path) -> Path:
    fig = _figure(5, 3)
    ax = fig.add_subplot()
    names = [r.country for r in rows]
    values = [r.balance for r in rows]
    ax.bar(names, values, color=[SURPLUS if v >= 0 else DEFICIT for v in values])
    ax.axhline(0, color="black", linewidth=0.8)
    ax.set_ylabel("BKF (generated - earned gains)")
    ax.set_title("Balance of knowledge flows")
    return _save(fig, path)


def plot_flow_matrix(matrix: FlowMatrix, path: Path) -> Path:
    n = len(matrix.countries)
    fig = _figure(1.2 * n + 2, 1.0 * n + 1.5)
    ax = fig.add_subplot()
    shares = []
    for g in matrix.countries:
        row = []
        for e in matrix.countries:
            s = matrix.row_share(g, e)
            row.append(float(s) if s is not None else 0.0)
        shares.append(row)
    im = ax.imshow(shares, cmap="Blues", vmin=0, vmax=1)
    ax.set_xticks(range(n), matrix.countries)
    ax.set_yticks(range(n), matrix.countries)
    ax.set_xlabel("earning country")
    ax.set_ylabel("generating country")
    for i, g in enumerate(matrix.countries):
        for j, e in enumerate(matrix.countries):
            ax.text(j, i, f"{matrix.cells[i][j]:,}", ha="center", va="center", fontsize=7,
                    color="white" if shares[i][j] > 0.5 else "black")
    fig.colorbar(im, ax=ax, label="share of generator row")
    ax.set_title("Gains by generator and earner")
    return _save(fig, path)


def plot_field_extremes(rows: Sequence[FieldBkfRow], country: str, path: Path, n: int = 10) -> Path:
    lowest, highest = top_bottom_fields(rows, n)
    picked = lowest + [r for r in reversed(highest) if r not in lowest]
    picked.sort(key=lambda r: (r.balance, r.sc_code))
    fig = _figure(5.5, 0.25 * len(picked) + 1.2)
    ax = fig.add_subplot()
    ax.barh([r.sc_code for r in picked], [r.balance for r in picked],
            color=[SURPLUS if r.balance >= 0 else DEFICIT for r in picked])
    ax.axvline(0, color="black", linewidth=0.8)
    ax.set_xlabel("BKF")
    ax.set_title(f"{country}: subject categories with lowest and highest BKF")
    return _save(fig, path)


def plot_specialization(table: SpecializationTable, path: Path) -> Path:
    grid = []
    for k in table.countries:
        grid.append([float("nan") if table.value(k, j) is UNDEFINED else table.value(k, j) for j in table.sc_codes])
    fig = _figure(max(4.0, 0.22 * len(table.sc_codes) + 2), 0.5 * len(table.countries) + 1.5)
    ax = fig.add_subplot()
    im = ax.imshow(grid, cmap="RdBu", vmin=-100, vmax=100, aspect="auto")
    ax.set_yticks(range(len(table.countries)), table.countries)
    ax.set_xticks(range(len(table.sc_codes)), table.sc_codes, rotation=90)
    fig.colorbar(im, ax=ax, label=table.label)
    ax.set_title(f"{table.label} by country and subject category")
    return _save(fig, path)
