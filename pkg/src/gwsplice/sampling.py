"""Seeded samplers for pairs, neck maps and gluing parameters on exact grids."""

from __future__ import annotations

import math

import numpy as np

from .cylinders import CylinderMap, Grid, MapPair, NeckMap
from .profiles import EXP, GluingParameter

DEFAULT_MARGIN = 4.0


def snap_length(R: float, ds: float) -> float:
    """Smallest multiple of 2 ds that is >= R, so R and R/2 are grid nodes."""
    step = 2.0 * ds
    return step * math.ceil(R / step - 1e-9)


def exact_parameter(R: float, ds: float, n_t: int, twist_index: int = 0, kind=EXP) -> GluingParameter:
    """Gluing parameter with node-aligned neck length and twist (exactness tier)."""
    return GluingParameter.from_length(kind, snap_length(R, ds), (twist_index % n_t) / n_t)


def pair_grids(S: float, ds: float, n_t: int) -> tuple[Grid, Grid]:
    gp = Grid.from_spacing(0.0, S, ds, n_t)
    gm = Grid.from_spacing(-S, 0.0, ds, n_t)
    return gp, gm


def pair_length(R: float, ds: float, margin: float = DEFAULT_MARGIN) -> float:
    return ds * math.ceil((R + margin) / ds - 1e-9)


def _trig(rng, t, n_modes, dim):
    """Random real trigonometric polynomial of degree < n_modes, shape (n_t, dim)."""
    out = np.zeros((t.size, dim))
    for k in range(n_modes):
        a = rng.normal(size=dim)
        b = rng.normal(size=dim) if k else np.zeros(dim)
        out += np.cos(2 * np.pi * k * t)[:, None] * a + np.sin(2 * np.pi * k * t)[:, None] * b
    return out / max(1, n_modes)


def _bump_field(rng, g: Grid, dim: int, n_bumps: int, n_modes: int):
    s = g.s
    out = np.zeros((g.n_s, g.n_t, dim))
    span = g.s_max - g.s_min
    for _ in range(n_bumps):
        width = rng.uniform(0.5, 1.5)
        lo, hi = g.s_min + 0.1 * span, g.s_max - 0.1 * span
        center = rng.uniform(lo, hi)
        env = np.exp(-0.5 * ((s - center) / width) ** 2)
        out += env[:, None, None] * _trig(rng, g.t, n_modes, dim)[None]
    decay = np.exp(-rng.uniform(0.3, 1.5) * np.abs(s))
    out += decay[:, None, None] * _trig(rng, g.t, n_modes, dim)[None]
    return out


def _decay_field(rng, g: Grid, dim: int, n_modes: int, rate_lo: float, rate_hi: float):
    s = np.abs(g.s)
    out = np.zeros((g.n_s, g.n_t, dim))
    for k in range(n_modes):
        lam = rng.uniform(rate_lo, rate_hi)
        amp = _trig(rng, g.t, k + 1, dim) if k else rng.normal(size=(1, dim))
        poly = 1.0 + rng.normal() * s / (1.0 + s)
        out += (np.exp(-lam * s) * poly)[:, None, None] * amp[None]
    return out


def _neck_field(rng, g: Grid, dim: int, n_modes: int, center: float):
    """Gaussian bumps within 1 of ``center``, so the data sits where the neck is glued."""
    out = np.zeros((g.n_s, g.n_t, dim))
    for _ in range(2):
        s0 = rng.uniform(center - 1.0, center + 1.0)
        width = rng.uniform(0.5, 1.0)
        env = np.exp(-0.5 * ((g.s - s0) / width) ** 2)
        out += env[:, None, None] * _trig(rng, g.t, n_modes, dim)[None]
    return out


def random_pair(rng: np.random.Generator, S: float, ds: float, n_t: int, dim: int = 2,
                space: str = "E", kind: str = "bumps", n_modes: int | None = None,
                rate: tuple[float, float] = (7.0, 9.0), const_scale: float = 1.0,
                neck_length: float | None = None) -> MapPair:
    """Random pair on [0, S] and [-S, 0].

    kind "bumps": Gaussian bumps spread over the whole grids plus a slow
    decay, so that the neck sees O(1) data.  kind "decay": remainders decaying
    like exp(-lambda |s|) with lambda drawn from ``rate`` (choose lambda > delta
    for weighted norms).  kind "neck": bumps near s = +-neck_length/2, the
    region the gluing mixes, at every neck length alike.
    """
    gp, gm = pair_grids(S, ds, n_t)
    n_modes = n_modes if n_modes is not None else max(1, min(4, n_t // 2 - 1))
    if kind == "bumps":
        rp = _bump_field(rng, gp, dim, 3, n_modes)
        rm = _bump_field(rng, gm, dim, 3, n_modes)
    elif kind == "decay":
        rp = _decay_field(rng, gp, dim, n_modes, *rate)
        rm = _decay_field(rng, gm, dim, n_modes, *rate)
    elif kind == "neck":
        if neck_length is None:
            raise ValueError("neck samples need neck_length")
        rp = _neck_field(rng, gp, dim, n_modes, 0.5 * neck_length)
        rm = _neck_field(rng, gm, dim, n_modes, -0.5 * neck_length)
    else:
        raise ValueError(f"unknown sample kind {kind!r}")
    if space == "E":
        c = const_scale * rng.normal(size=dim)
        return MapPair(CylinderMap(gp, rp, c), CylinderMap(gm, rm, c), "E")
    return MapPair(CylinderMap(gp, rp), CylinderMap(gm, rm), "F")


def constant_pair(S: float, ds: float, n_t: int, c) -> MapPair:
    c = np.asarray(c, dtype=float)
    gp, gm = pair_grids(S, ds, n_t)
    zp = np.zeros((gp.n_s, n_t, c.size))
    return MapPair(CylinderMap(gp, zp, c), CylinderMap(gm, zp.copy(), c), "E")


def random_neck_data(rng: np.random.Generator, ctx, S: float, ds: float, n_t: int, dim: int = 2,
                     hat: bool = False):
    """Random (v, w) on Z_a and the C_a truncation; w carries antipodal constants unless hat."""
    gv = ctx.neck_grid(ds, n_t)
    gw = ctx.cyl_grid(S, ds, n_t)
    n_modes = max(1, min(4, n_t // 2 - 1))
    v_rem = _bump_field(rng, gv, dim, 2, n_modes)
    w_rem = _bump_field(rng, gw, dim, 3, n_modes)
    # w's remainder must vanish at both truncation ends, like a decaying map
    taper = np.exp(-np.maximum(0.0, np.abs(gw.s - 0.5 * ctx.length) - 0.5 * ctx.length) ** 2)
    w_rem = w_rem * taper[:, None, None]
    if hat:
        v = NeckMap(CylinderMap(gv, v_rem), ctx.length, ctx.twist, "Z")
        w = NeckMap(CylinderMap(gw, w_rem), ctx.length, ctx.twist, "C")
        return v, w
    kappa = rng.normal(size=dim)
    p_inf = rng.normal(size=dim)
    profile = 1.0 - 2.0 * ctx.beta(gw.s)
    v = NeckMap(CylinderMap(gv, v_rem, kappa), ctx.length, ctx.twist, "Z")
    w = NeckMap(CylinderMap(gw, w_rem, p_inf, profile), ctx.length, ctx.twist, "C")
    return v, w


def antipodal_sample(rng: np.random.Generator, grid: Grid, profile: np.ndarray, dim: int = 2,
                     center: float | None = None, n_modes: int = 3, width: float = 1.5) -> CylinderMap:
    """profile * c + Gaussian-enveloped trigonometric remainder near ``center``.

    Bump centres lie within 2 of ``center`` (default: grid midpoint), so the
    remainder is negligible at the truncation ends.
    """
    center = 0.5 * (grid.s_min + grid.s_max) if center is None else center
    c = rng.normal(size=dim)
    s = grid.s[:, None, None]
    r = np.zeros((grid.n_s, grid.n_t, dim))
    for k in range(n_modes):
        s0 = rng.uniform(center - 2.0, center + 2.0)
        env = np.exp(-((s - s0) / width) ** 2)
        amp_c, amp_s = rng.normal(size=dim), rng.normal(size=dim)
        tt = 2 * np.pi * k * grid.t[None, :, None]
        r += env * (np.cos(tt) * amp_c + np.sin(tt) * amp_s)
    return CylinderMap(grid, r, c, np.asarray(profile, dtype=float))
