"""Raw-score to MOS-LQO mappings and mapping-curve emission.

Both mappings are logistic functions of the internal raw score.  Constants
are transcribed from ITU-T P.862.1 (narrowband) and ITU-T P.862.2 (wideband);
outputs lie strictly inside (0.999, 4.999).
"""

from __future__ import annotations

import math

import numpy as np

from .core import constants as c

NB_KIND = "nb-P.862.1"
WB_KIND = "wb-P.862.2"

#: Default emission grid: 1001 points across the clamped raw-score range.
DEFAULT_GRID_POINTS = 1001
DEFAULT_GRID_RANGE = (-0.5, 4.5)


def map_nb_lqo(raw: float) -> float:
    """P.862.1 narrowband mapping: 0.999 + 4 / (1 + exp(-1.4945 raw + 4.6607))."""
    return c.MAP_FLOOR + c.MAP_SPAN / (1.0 + math.exp(-c.NB_MAP_SLOPE * raw + c.NB_MAP_OFFSET))


def map_wb_lqo(raw_internal: float) -> float:
    """P.862.2 wideband mapping: 0.999 + 4 / (1 + exp(-1.3669 x + 3.8224))."""
    return c.MAP_FLOOR + c.MAP_SPAN / (1.0 + math.exp(-c.WB_MAP_SLOPE * raw_internal + c.WB_MAP_OFFSET))


def invert_nb_lqo(mos: float) -> float:
    """Inverse of the narrowband mapping (exact on the open output range)."""
    return (c.NB_MAP_OFFSET - math.log(c.MAP_SPAN / (mos - c.MAP_FLOOR) - 1.0)) / c.NB_MAP_SLOPE


def default_grid() -> np.ndarray:
    lo, hi = DEFAULT_GRID_RANGE
    return np.linspace(lo, hi, DEFAULT_GRID_POINTS)


def mapping_curve(kind: str, grid=None) -> list[tuple[float, float, float]]:
    """Rows of (raw, mos, diff = mos - raw) over the grid, for plotting."""
    if kind == NB_KIND:
        mapper = map_nb_lqo
    elif kind == WB_KIND:
        mapper = map_wb_lqo
    else:
        raise ValueError(f"unknown mapping kind {kind!r}; use {NB_KIND!r} or {WB_KIND!r}")
    points = default_grid() if grid is None else np.asarray(grid, dtype=np.float64)
    if points.size == 0:
        raise ValueError("mapping grid must be nonempty")
    if not np.all(np.isfinite(points)):
        raise ValueError("mapping grid must be finite")
    rows = []
    for raw in points:
        mos = mapper(float(raw))
        rows.append((float(raw), mos, mos - float(raw)))
    return rows


def curve_csv(kind: str, grid=None) -> str:
    """The mapping curve as CSV text with header ``raw,mos,diff``."""
    lines = ["raw,mos,diff"]
    for raw, mos, diff in mapping_curve(kind, grid):
        lines.append(f"{raw!r},{mos!r},{diff!r}")
    return "\n".join(lines) + "\n"
