"""Grid scans: evaluate the point report over a rectangular grid, emit CSV."""

from __future__ import annotations

import csv
import itertools
from dataclasses import dataclass
from pathlib import Path
from typing import Optional

import numpy as np

from .geometry import GeometryError
from .obstruction import identity_report
from .structures import StructureFile

__all__ = ["GridAxis", "GridSpec", "ScanSummary", "run_scan"]


@dataclass(frozen=True)
class GridAxis:
    lo: float
    hi: float
    count: int

    def __post_init__(self):
        if self.count < 1:
            raise ValueError("grid axis count must be >= 1")
        if self.lo > self.hi:
            raise ValueError("grid axis needs lo <= hi")

    def values(self) -> np.ndarray:
        return np.linspace(self.lo, self.hi, self.count)


@dataclass(frozen=True)
class GridSpec:
    """Per-axis ranges; enumeration is row major (last axis fastest)."""

    axes: tuple[GridAxis, ...]

    @classmethod
    def parse(cls, text: str) -> "GridSpec":
        axes = []
        for part in text.split(","):
            pieces = part.split(":")
            if len(pieces) != 3:
                raise ValueError(f"bad grid axis {part!r}, expected lo:hi:count")
            axes.append(GridAxis(float(pieces[0]), float(pieces[1]), int(pieces[2])))
        return cls(tuple(axes))

    def total(self) -> int:
        out = 1
        for ax in self.axes:
            out *= ax.count
        return out

    def points(self):
        return itertools.product(*(ax.values() for ax in self.axes))


@dataclass(frozen=True)
class ScanSummary:
    rows: int
    flagged: int
    max_abs_obstruction: Optional[float]
    argmax_point: Optional[tuple[float, ...]]
    out_path: str

    def render_text(self) -> str:
        g17 = lambda x: format(x, ".17g")
        lines = [f"scan: {self.rows} points, {self.flagged} flagged"]
        if self.max_abs_obstruction is None:
            lines.append("max |obstruction|: n/a (no successful rows)")
        else:
            lines.append(
                "max |obstruction| = "
                + g17(self.max_abs_obstruction)
                + " at ("
                + ", ".join(g17(v) for v in self.argmax_point)
                + ")"
            )
        lines.append(f"csv: {self.out_path}")
        return "\n".join(lines) + "\n"


def run_scan(
    structure: StructureFile,
    grid: GridSpec,
    out_path,
    tol_alg: float = 1e-9,
    tol_identity: float = 1e-9,
) -> ScanSummary:
    """Scan the grid, writing one CSV row per point in enumeration order.

    A failing point (singular frame, non-SPD metric, expression domain
    error) is flagged in the status column and the scan continues.
    """
    chart = structure.chart
    if len(grid.axes) != chart.n:
        raise ValueError(f"grid has {len(grid.axes)} axes, chart has {chart.n}")
    numeric_cols = (
        "n_max_abs",
        "obstruction",
        "contraction",
        "identity_residual_contraction",
    )
    g17 = lambda x: format(x, ".17g")
    rows = 0
    flagged = 0
    best: Optional[float] = None
    best_point: Optional[tuple[float, ...]] = None
    out_path = Path(out_path)
    with out_path.open("w", encoding="utf-8", newline="") as handle:
        writer = csv.writer(handle, lineterminator="\n")
        writer.writerow(list(chart.var_names) + list(numeric_cols) + ["status"])
        for point in grid.points():
            rows += 1
            coords = [g17(v) for v in point]
            try:
                rep = identity_report(
                    structure.j_field,
                    structure.metric,
                    chart,
                    point,
                    tol_alg=tol_alg,
                    tol_identity=tol_identity,
                )
            except (GeometryError, ValueError) as exc:
                flagged += 1
                writer.writerow(coords + ["nan"] * len(numeric_cols) + [f"error: {exc}"])
                continue
            writer.writerow(
                coords
                + [
                    g17(rep.n_max_abs),
                    g17(rep.obstruction),
                    g17(rep.contraction),
                    g17(rep.identity_residual_contraction),
                ]
                + [rep.verdict]
            )
            if best is None or abs(rep.obstruction) > best:
                best = abs(rep.obstruction)
                best_point = tuple(float(v) for v in point)
    return ScanSummary(rows, flagged, best, best_point, str(out_path))
