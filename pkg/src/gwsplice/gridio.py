"""Grid CSV files for cylinder maps.

Format::

    # d n_s n_t s_min s_max asympt_kind c_1 ... c_d
    v_1,...,v_d        (one row per node, s-major: s index outer, t inner)

asympt_kind is ``none`` (rows are the values), ``single`` (rows are the
remainder about the constant c) or ``antipodal`` (rows are the remainder
about (1 - 2 beta_a) c on a C_a truncation, whose centre R/2 is the grid
midpoint).  Values are written with repr so a round trip is exact.
"""

from __future__ import annotations

import io
from pathlib import Path

import numpy as np

from .cylinders import CylinderMap, Grid
from .splice import Cutoff

KINDS = ("none", "single", "antipodal")


class GridFileError(ValueError):
    pass


def asympt_kind(u: CylinderMap) -> str:
    if u.const is None:
        return "none"
    return "single" if u.profile is None else "antipodal"


def format_grid(u: CylinderMap) -> str:
    g = u.grid
    kind = asympt_kind(u)
    head = [str(u.dim), str(g.n_s), str(g.n_t), repr(float(g.s_min)), repr(float(g.s_max)), kind]
    if kind != "none":
        head += [repr(float(c)) for c in u.const]
    out = io.StringIO()
    out.write("# " + " ".join(head) + "\n")
    for row in u.remainder.reshape(-1, u.dim):
        out.write(",".join(repr(float(x)) for x in row) + "\n")
    return out.getvalue()


def antipodal_profile(grid: Grid) -> np.ndarray:
    center = 0.5 * (grid.s_min + grid.s_max)
    return 1.0 - 2.0 * Cutoff()(grid.s - center)


def parse_grid(text: str) -> CylinderMap:
    lines = [ln for ln in text.splitlines() if ln.strip()]
    if not lines or not lines[0].startswith("#"):
        raise GridFileError("missing '#' header line")
    head = lines[0][1:].split()
    if len(head) < 6:
        raise GridFileError("header needs d n_s n_t s_min s_max asympt_kind")
    try:
        d, n_s, n_t = int(head[0]), int(head[1]), int(head[2])
        s_min, s_max = float(head[3]), float(head[4])
    except ValueError as exc:
        raise GridFileError(f"bad header: {lines[0]!r}") from exc
    kind = head[5]
    if kind not in KINDS:
        raise GridFileError(f"unknown asymptotic kind {kind!r}")
    consts = [float(x) for x in head[6:]]
    if kind == "none" and consts:
        raise GridFileError("kind 'none' takes no constants")
    if kind != "none" and len(consts) != d:
        raise GridFileError(f"expected {d} constants, got {len(consts)}")
    body = lines[1:]
    if len(body) != n_s * n_t:
        raise GridFileError(f"expected {n_s * n_t} rows, got {len(body)}")
    rows = np.array([[float(x) for x in ln.split(",")] for ln in body])
    if rows.shape[1] != d:
        raise GridFileError(f"rows must have {d} values")
    grid = Grid(s_min, s_max, n_s, n_t)
    rem = rows.reshape(n_s, n_t, d)
    if kind == "none":
        return CylinderMap(grid, rem)
    c = np.array(consts)
    if kind == "single":
        return CylinderMap(grid, rem, c)
    return CylinderMap(grid, rem, c, antipodal_profile(grid))


def write_grid(path: str | Path, u: CylinderMap) -> Path:
    path = Path(path)
    path.write_text(format_grid(u))
    return path


def read_grid(path: str | Path) -> CylinderMap:
    return parse_grid(Path(path).read_text())
