"""Cut-off, gluing/anti-gluing on necks, total ungluing and splicing projections.

A pair h = (h+, h-) lives on [0, S]xS^1 and [-S, 0]xS^1.  For a gluing
parameter a with neck length R and twist theta the pair is glued into

    plus_glue   on Z_a = [0, R]xS^1                    (finite neck)
    minus_glue  on the truncation [R - S, S]xS^1 of C_a  (infinite cylinder)

both written in the [s, t] chart, where h-(s - R, t - theta) is the
second half of the pair seen from the first chart.  All formulas are
applied to remainders; asymptotic constants are tracked separately.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .cylinders import (
    CylinderMap,
    Grid,
    GridError,
    MapPair,
    NeckMap,
    circle_mean,
    d_t,
    map_ds,
    pair_norm_E,
    sample_s,
    shift_t,
    weighted_norm_array,
)
from .profiles import EXP, GluingParameter, ScScale

_MAX_MODULUS = 0.5


class SpliceError(ValueError):
    pass


@dataclass(frozen=True)
class Cutoff:
    """beta(s) = psi(1 - s) / (psi(1 - s) + psi(1 + s)), psi(x) = exp(-1/x) for x > 0.

    Rewritten as (1 - tanh(s / (1 - s^2))) / 2 on (-1, 1), which is
    symmetric to roundoff and never divides small numbers.
    """

    def __call__(self, s) -> np.ndarray:
        s = np.asarray(s, dtype=float)
        out = np.where(s <= -1.0, 1.0, 0.0)
        inner = np.abs(s) < 1.0
        x = s[inner] / (1.0 - s[inner] ** 2)
        out[inner] = 0.5 * (1.0 - np.tanh(x))
        return out

    def derivative(self, s) -> np.ndarray:
        s = np.asarray(s, dtype=float)
        out = np.zeros_like(s)
        inner = np.abs(s) < 1.0
        si = s[inner]
        x = np.abs(si) / (1.0 - si ** 2)
        e = np.exp(-2.0 * x)
        sech2 = 4.0 * e / (1.0 + e) ** 2
        out[inner] = -0.5 * sech2 * (1.0 + si ** 2) / (1.0 - si ** 2) ** 2
        return out


@dataclass(frozen=True)
class SpliceContext:
    a: GluingParameter
    cutoff: Cutoff = field(default_factory=Cutoff)
    kind: str = EXP

    def __post_init__(self):
        if self.a.modulus > _MAX_MODULUS:
            raise SpliceError(f"|a| = {self.a.modulus} exceeds 1/2")
        if not self.a.is_zero and self.length < 2.0:
            raise SpliceError("neck length below 2: the cut-off transition does not fit")

    @property
    def is_zero(self) -> bool:
        return self.a.is_zero

    @property
    def length(self) -> float:
        return self.a.length(self.kind)

    @property
    def twist(self) -> float:
        return self.a.twist

    def beta(self, s) -> np.ndarray:
        return self.cutoff(np.asarray(s) - 0.5 * self.length)

    def beta_prime(self, s) -> np.ndarray:
        return self.cutoff.derivative(np.asarray(s) - 0.5 * self.length)

    def gamma(self, s) -> np.ndarray:
        b = self.beta(s)
        return b * b + (1.0 - b) ** 2

    def neck_grid(self, ds: float, n_t: int) -> Grid:
        return _span_grid(0.0, self.length, ds, n_t)

    def cyl_grid(self, S: float, ds: float, n_t: int) -> Grid:
        if S <= self.length:
            raise SpliceError(f"pair length S={S} must exceed the neck length R={self.length}")
        return _span_grid(self.length - S, S, ds, n_t)


def _span_grid(lo: float, hi: float, ds: float, n_t: int) -> Grid:
    steps = (hi - lo) / ds
    n = int(round(steps))
    if abs(steps - n) > 1e-9 * max(1.0, steps):
        n = int(math.ceil(steps))
    return Grid(lo, hi, n + 1, n_t)


def _bcast(x: np.ndarray) -> np.ndarray:
    return x[:, None, None]


def _require_nonzero(ctx: SpliceContext, what: str):
    if ctx.is_zero:
        raise SpliceError(f"{what} needs a non-zero gluing parameter")


def _pair_dims(h: MapPair):
    g = h.plus.grid
    return g.s_max, g.ds, g.n_t


def _on_chart(ctx: SpliceContext, h: MapPair, s_nodes: np.ndarray, part="remainder"):
    """(h+(s, t), h-(s - R, t - theta)) on s_nodes; outside the pair grids the remainder is 0."""
    if part == "remainder":
        ap, am = h.plus.remainder, h.minus.remainder
    else:
        ap, am = h.plus.values, h.minus.values
    plus = sample_s(h.plus.grid, ap, s_nodes)
    minus = sample_s(h.minus.grid, shift_t(am, ctx.twist), s_nodes - ctx.length)
    return plus, minus


def _to_minus_chart(ctx: SpliceContext, grid: Grid, arr: np.ndarray, s_prime: np.ndarray) -> np.ndarray:
    """X(s' + R, t' + theta) on the s'-nodes for X sampled on ``grid`` in the [s, t] chart."""
    return sample_s(grid, shift_t(arr, -ctx.twist), s_prime + ctx.length)


def _average(ctx: SpliceContext, h: MapPair) -> np.ndarray:
    """Remainder part of av_a = ([h+]_R + [h-]_R) / 2."""
    half = 0.5 * ctx.length
    return 0.5 * (circle_mean(h.plus, half, "remainder") + circle_mean(h.minus, -half, "remainder"))


def average(ctx: SpliceContext, h: MapPair) -> np.ndarray:
    """av_a(h+, h-) including the asymptotic constant."""
    _require_nonzero(ctx, "the average")
    return h.const + _average(ctx, h)


# --- gluing ---------------------------------------------------------------

def plus_glue(ctx: SpliceContext, h: MapPair):
    """beta_a h+(s, t) + (1 - beta_a) h-(s - R, t - theta) on Z_a; a = 0 returns h."""
    if ctx.is_zero:
        return h
    _, ds, n_t = _pair_dims(h)
    g = ctx.neck_grid(ds, n_t)
    b = _bcast(ctx.beta(g.s))
    rp, rm = _on_chart(ctx, h, g.s)
    rem = b * rp + (1.0 - b) * rm
    const = h.const if h.space == "E" else None
    return NeckMap(CylinderMap(g, rem, const), ctx.length, ctx.twist, "Z")


def hat_plus_glue(ctx: SpliceContext, xi: MapPair):
    return plus_glue(ctx, xi)


def _hat_minus_rem(ctx, h, g):
    b = _bcast(ctx.beta(g.s))
    rp, rm = _on_chart(ctx, h, g.s)
    return -(1.0 - b) * rp + b * rm


def minus_glue(ctx: SpliceContext, h: MapPair):
    """-(1 - beta_a)(h+ - av) + beta_a (h- shifted - av) on the C_a truncation.

    The result has antipodal constants +-p_inf with p_inf = av - c; it is
    stored as (1 - 2 beta_a) p_inf plus a remainder.  a = 0 returns None (the zero map).
    """
    if ctx.is_zero:
        return None
    S, ds, n_t = _pair_dims(h)
    g = ctx.cyl_grid(S, ds, n_t)
    rem = _hat_minus_rem(ctx, h, g)
    p_inf = _average(ctx, h)
    profile = 1.0 - 2.0 * ctx.beta(g.s)
    return NeckMap(CylinderMap(g, rem, p_inf, profile), ctx.length, ctx.twist, "C")


def hat_minus_glue(ctx: SpliceContext, xi: MapPair):
    """-(1 - beta_a) xi+ + beta_a xi- shifted, from the full values; a = 0 gives None."""
    if ctx.is_zero:
        return None
    S, ds, n_t = _pair_dims(xi)
    g = ctx.cyl_grid(S, ds, n_t)
    b = _bcast(ctx.beta(g.s))
    vp, vm = _on_chart(ctx, xi, g.s, part="values")
    if xi.space == "E" and np.any(xi.const != 0):
        # beyond the grids the full values tend to the common constant
        inside_p = (g.s >= xi.plus.grid.s_min) & (g.s <= xi.plus.grid.s_max)
        inside_m = (g.s - ctx.length >= xi.minus.grid.s_min) & (g.s - ctx.length <= xi.minus.grid.s_max)
        vp[~inside_p] = xi.const
        vm[~inside_m] = xi.const
    vals = -(1.0 - b) * vp + b * vm
    return NeckMap(CylinderMap(g, vals), ctx.length, ctx.twist, "C")


def total_glue(ctx: SpliceContext, h: MapPair):
    return plus_glue(ctx, h), minus_glue(ctx, h)


def hat_total_glue(ctx: SpliceContext, xi: MapPair):
    return hat_plus_glue(ctx, xi), hat_minus_glue(ctx, xi)


# --- ungluing -------------------------------------------------------------

def _pair_grids(ctx: SpliceContext, v: NeckMap, w: NeckMap | None, plus_grid: Grid | None):
    if plus_grid is None:
        if w is None:
            raise SpliceError("pass plus_grid when w is omitted")
        gw = w.grid
        plus_grid = _span_grid(0.0, gw.s_max, gw.ds, gw.n_t)
    minus_grid = Grid(-plus_grid.s_max, 0.0, plus_grid.n_s, plus_grid.n_t)
    return plus_grid, minus_grid


def _check_neck_pair(ctx, v, w):
    if v.domain != "Z":
        raise SpliceError("v must live on Z_a")
    if abs(v.length - ctx.length) > 1e-9 * max(1.0, ctx.length) or abs(v.twist - ctx.twist) > 1e-12:
        raise SpliceError("v belongs to a different gluing parameter")
    if w is not None:
        if w.domain != "C":
            raise SpliceError("w must live on C_a")
        if abs(w.length - ctx.length) > 1e-9 * max(1.0, ctx.length) or abs(w.twist - ctx.twist) > 1e-12:
            raise SpliceError("w belongs to a different gluing parameter")
        if w.grid.s_max < ctx.length:
            raise SpliceError("w must cover [0, R]")


def _split_w(w: NeckMap | None, dim: int):
    if w is None:
        return None, np.zeros(dim)
    return w.cyl.remainder, w.cyl.const_or_zero()


def _unglue_core(ctx, v, w, plus_grid, hat: bool):
    """Solve the 2x2 system node by node in closed form.

    Full version:  w_hat = w + (2 beta_a - 1)[v],
        h+ = (beta_a v - (1 - beta_a) w_hat) / gamma_a,
        h- = ((1 - beta_a) v + beta_a w_hat) / gamma_a,
    carried out on remainders about c = [v] - p_inf.
    """
    gp, gm = _pair_grids(ctx, v, w, plus_grid)
    gv = v.grid
    dim = v.cyl.dim
    rem_w, p_inf = _split_w(w, dim)
    if hat:
        base = v.cyl.values
        wv = None if w is None else w.cyl.values
        const = None
    else:
        kappa = v.cyl.const_or_zero()
        mean_r = circle_mean(v.cyl, 0.5 * ctx.length, part="remainder")
        base = v.cyl.remainder - mean_r + p_inf
        wv = rem_w
        const = kappa + mean_r - p_inf

    def solve(s_chart: np.ndarray, v_here: np.ndarray, w_here: np.ndarray):
        b = _bcast(ctx.beta(s_chart))
        gam = b * b + (1.0 - b) ** 2
        plus = (b * v_here - (1.0 - b) * w_here) / gam
        minus = ((1.0 - b) * v_here + b * w_here) / gam
        return plus, minus

    # plus half: chart coordinates are the grid nodes themselves
    vp = sample_s(gv, base, gp.s)
    wp = np.zeros_like(vp) if wv is None else sample_s(w.grid, wv, gp.s)
    r_plus, _ = solve(gp.s, vp, wp)
    # minus half: s = s' + R, t = t' + theta
    s_chart = gm.s + ctx.length
    vm = _to_minus_chart(ctx, gv, base, gm.s)
    wm = np.zeros_like(vm) if wv is None else _to_minus_chart(ctx, w.grid, wv, gm.s)
    _, r_minus = solve(s_chart, vm, wm)
    if hat:
        return MapPair(CylinderMap(gp, r_plus), CylinderMap(gm, r_minus), "F")
    return MapPair(CylinderMap(gp, r_plus, const), CylinderMap(gm, r_minus, const), "E")


def total_unglue(ctx: SpliceContext, v, w: NeckMap | None, plus_grid: Grid | None = None) -> MapPair:
    """Inverse of (plus_glue, minus_glue).

    The asymptotic constant of the result is -w(+inf) + [v]_a.  At a = 0
    the glued data is the pair itself and w must vanish.
    """
    if ctx.is_zero:
        if w is not None:
            raise SpliceError("ungluing at a = 0 is defined only for w = 0")
        if not isinstance(v, MapPair):
            raise SpliceError("at a = 0 the glued data is a pair")
        return v
    _check_neck_pair(ctx, v, w)
    return _unglue_core(ctx, v, w, plus_grid, hat=False)


def hat_total_unglue(ctx: SpliceContext, v, w: NeckMap | None, plus_grid: Grid | None = None) -> MapPair:
    """Inverse of (hat_plus_glue, hat_minus_glue); output in F."""
    if ctx.is_zero:
        if w is not None:
            raise SpliceError("ungluing at a = 0 is defined only for w = 0")
        if not isinstance(v, MapPair):
            raise SpliceError("at a = 0 the glued data is a pair")
        return v
    _check_neck_pair(ctx, v, w)
    return _unglue_core(ctx, v, w, plus_grid, hat=True)


# --- splicing projections -------------------------------------------------

def project(ctx: SpliceContext, h: MapPair) -> MapPair:
    """pi_a: projection onto ker(minus_glue) along ker(plus_glue), closed form.

    eta+ = (1 - beta/gamma) av + (beta^2/gamma) h+ + (beta(1 - beta)/gamma) h-(s - R, t - theta)
    and the mirror formula for eta- in the [s', t'] chart.  The asymptotic
    constant of the result is av_a(h).
    """
    if ctx.is_zero:
        return h
    if h.space != "E":
        raise SpliceError("project acts on E-pairs; use hat_project for F")
    gp, gm = h.plus.grid, h.minus.grid
    av = _average(ctx, h)
    # plus half
    b = _bcast(ctx.beta(gp.s))
    gam = b * b + (1.0 - b) ** 2
    rp, rm = _on_chart(ctx, h, gp.s)
    eta_p = (1.0 - b / gam) * av + (b * b / gam) * rp + (b * (1.0 - b) / gam) * rm - av
    # minus half, written with B(s') = beta_a(s' + R) so that 1 - B = beta(-s' - R/2)
    B = _bcast(ctx.beta(gm.s + ctx.length))
    gam = B * B + (1.0 - B) ** 2
    rp_m = _to_minus_chart(ctx, gp, h.plus.remainder, gm.s)
    eta_m = (1.0 - (1.0 - B) / gam) * av + ((1.0 - B) * B / gam) * rp_m \
        + ((1.0 - B) ** 2 / gam) * h.minus.remainder - av
    const = h.const + av
    return MapPair(CylinderMap(gp, eta_p, const), CylinderMap(gm, eta_m, const), "E")


def hat_project(ctx: SpliceContext, xi: MapPair) -> MapPair:
    """hat-pi_a: eta+ = (beta^2/gamma) xi+ + (beta(1 - beta)/gamma) xi- shifted, and its mirror."""
    if ctx.is_zero:
        return xi
    if xi.space != "F":
        raise SpliceError("hat_project acts on F-pairs")
    gp, gm = xi.plus.grid, xi.minus.grid
    b = _bcast(ctx.beta(gp.s))
    gam = b * b + (1.0 - b) ** 2
    xp, xm = _on_chart(ctx, xi, gp.s)
    eta_p = (b * b / gam) * xp + (b * (1.0 - b) / gam) * xm
    B = _bcast(ctx.beta(gm.s + ctx.length))
    gam = B * B + (1.0 - B) ** 2
    xp_m = _to_minus_chart(ctx, gp, xi.plus.remainder, gm.s)
    eta_m = ((1.0 - B) * B / gam) * xp_m + ((1.0 - B) ** 2 / gam) * xi.minus.remainder
    return MapPair(CylinderMap(gp, eta_p), CylinderMap(gm, eta_m), "F")


def project_via_unglue(ctx: SpliceContext, h: MapPair) -> MapPair:
    """pi_a computed as total_unglue(plus_glue(h), 0)."""
    if ctx.is_zero:
        return h
    return total_unglue(ctx, plus_glue(ctx, h), None, plus_grid=h.plus.grid)


def hat_project_via_unglue(ctx: SpliceContext, xi: MapPair) -> MapPair:
    if ctx.is_zero:
        return xi
    return hat_total_unglue(ctx, hat_plus_glue(ctx, xi), None, plus_grid=xi.plus.grid)


def anti_glue_norm(ctx: SpliceContext, h: MapPair, m: int = 0, scale: ScScale | None = None) -> float:
    """|p_inf| plus the delta_m-weighted norm of the remainder of minus_glue(h) about R/2."""
    if ctx.is_zero:
        return 0.0
    scale = scale or ScScale()
    w = minus_glue(ctx, h)
    p_inf = w.cyl.const_or_zero()
    nr = weighted_norm_array(w.cyl.remainder, w.grid, scale.f_order(m), scale.delta(m), 0.5 * ctx.length)
    return math.sqrt(float(p_inf @ p_inf) + nr ** 2)


def in_splicing_core(ctx: SpliceContext, h: MapPair, tol: float = 1e-9, scale: ScScale | None = None) -> bool:
    """True iff minus_glue(h) vanishes relative to the E_0 size of h."""
    if ctx.is_zero:
        return True
    scale = scale or ScScale()
    ref = max(1.0, pair_norm_E(h, 0, scale)) if h.space == "E" else 1.0
    return anti_glue_norm(ctx, h, 0, scale) <= tol * ref


# --- transfer operators ---------------------------------------------------

def _pair_ds(h: MapPair):
    return map_ds(h.plus), map_ds(h.minus)


def _pair_dt(h: MapPair):
    return d_t(h.plus.remainder), d_t(h.minus.remainder)


def _f_pair(gp, gm, p, m) -> MapPair:
    return MapPair(CylinderMap(gp, p), CylinderMap(gm, m), "F")


def _shift_pair(ctx, h: MapPair, arr_p, arr_m, s_nodes):
    plus = sample_s(h.plus.grid, arr_p, s_nodes)
    minus = sample_s(h.minus.grid, shift_t(arr_m, ctx.twist), s_nodes - ctx.length)
    return plus, minus


def neck_ds_plus(ctx: SpliceContext, eta: MapPair) -> NeckMap:
    """d/ds of plus_glue(eta) by the product rule:
    hat_plus_glue(d_s eta) + beta_a' (eta+ - eta- shifted)."""
    g = ctx.neck_grid(eta.plus.grid.ds, eta.plus.grid.n_t)
    dp, dm = _pair_ds(eta)
    b = _bcast(ctx.beta(g.s))
    bp = _bcast(ctx.beta_prime(g.s))
    sp, sm = _shift_pair(ctx, eta, dp, dm, g.s)
    rp, rm = _on_chart(ctx, eta, g.s)
    vals = b * sp + (1.0 - b) * sm + bp * (rp - rm)
    return NeckMap(CylinderMap(g, vals), ctx.length, ctx.twist, "Z")


def neck_ds_minus(ctx: SpliceContext, eta: MapPair) -> NeckMap:
    """d/ds of minus_glue(eta):
    hat_minus_glue(d_s eta) + beta_a' ((eta+ - av) + (eta- shifted - av))."""
    S, ds, n_t = _pair_dims(eta)
    g = ctx.cyl_grid(S, ds, n_t)
    dp, dm = _pair_ds(eta)
    b = _bcast(ctx.beta(g.s))
    bp = _bcast(ctx.beta_prime(g.s))
    sp, sm = _shift_pair(ctx, eta, dp, dm, g.s)
    rp, rm = _on_chart(ctx, eta, g.s)
    av = _average(ctx, eta)
    vals = -(1.0 - b) * sp + b * sm + bp * ((rp - av) + (rm - av))
    return NeckMap(CylinderMap(g, vals), ctx.length, ctx.twist, "C")


def neck_dt_plus(ctx: SpliceContext, eta: MapPair) -> NeckMap:
    v = plus_glue(ctx, eta)
    return NeckMap(CylinderMap(v.grid, d_t(v.cyl.remainder)), ctx.length, ctx.twist, "Z")


def neck_dt_minus(ctx: SpliceContext, eta: MapPair) -> NeckMap:
    w = minus_glue(ctx, eta)
    return NeckMap(CylinderMap(w.grid, d_t(w.cyl.remainder)), ctx.length, ctx.twist, "C")


def transfer_ds(ctx: SpliceContext, eta: MapPair) -> MapPair:
    """D^a_s: the F-pair xi with hat_plus_glue(xi) = d_s plus_glue(eta), hat_minus_glue(xi) = 0."""
    if ctx.is_zero:
        dp, dm = _pair_ds(eta)
        return _f_pair(eta.plus.grid, eta.minus.grid, dp, dm)
    return hat_total_unglue(ctx, neck_ds_plus(ctx, eta), None, plus_grid=eta.plus.grid)


def transfer_dt(ctx: SpliceContext, eta: MapPair) -> MapPair:
    """D^a_t: the F-pair xi with hat_plus_glue(xi) = d_t plus_glue(eta), hat_minus_glue(xi) = 0."""
    if ctx.is_zero:
        dp, dm = _pair_dt(eta)
        return _f_pair(eta.plus.grid, eta.minus.grid, dp, dm)
    return hat_total_unglue(ctx, neck_dt_plus(ctx, eta), None, plus_grid=eta.plus.grid)


def _zero_neck(ctx, eta, like: NeckMap | None = None) -> NeckMap:
    g = ctx.neck_grid(eta.plus.grid.ds, eta.plus.grid.n_t)
    return NeckMap(CylinderMap(g, np.zeros((g.n_s, g.n_t, eta.dim))), ctx.length, ctx.twist, "Z")


def transfer_cs(ctx: SpliceContext, eta: MapPair) -> MapPair:
    """C^a_s: hat_plus_glue(xi) = 0, hat_minus_glue(xi) = d_s minus_glue(eta); 0 at a = 0."""
    if ctx.is_zero:
        return _zero_pair(eta)
    return hat_total_unglue(ctx, _zero_neck(ctx, eta), neck_ds_minus(ctx, eta), plus_grid=eta.plus.grid)


def transfer_ct(ctx: SpliceContext, eta: MapPair) -> MapPair:
    """C^a_t: hat_plus_glue(xi) = 0, hat_minus_glue(xi) = d_t minus_glue(eta); 0 at a = 0."""
    if ctx.is_zero:
        return _zero_pair(eta)
    return hat_total_unglue(ctx, _zero_neck(ctx, eta), neck_dt_minus(ctx, eta), plus_grid=eta.plus.grid)


def _zero_pair(eta: MapPair) -> MapPair:
    z = np.zeros_like(eta.plus.remainder)
    return _f_pair(eta.plus.grid, eta.minus.grid, z, np.zeros_like(eta.minus.remainder))


def transfer_closed_form(ctx: SpliceContext, eta: MapPair, which: str) -> MapPair:
    """Expanded formulas for the transfer operators (second route, a != 0).

    D_s: xi+ = (beta^2/gamma) d eta+ + (beta(1-beta)/gamma) d eta-~ + (beta beta'/gamma)(eta+ - eta-~)
    D_t: same without the beta' term, with d = d_t
    C_s: xi+ = ((beta-1)^2/gamma) d eta+ + (beta(beta-1)/gamma) d eta-~
               + ((beta-1) beta'/gamma)((eta+ - av) + (eta-~ - av))
    C_t: same without the beta' term
    where eta-~ = eta-(s - R, t - theta); xi- follows from the mirrored rows.
    """
    _require_nonzero(ctx, "the closed-form transfer")
    if which not in ("ds", "dt", "cs", "ct"):
        raise ValueError(f"unknown transfer operator {which!r}")
    gp, gm = eta.plus.grid, eta.minus.grid
    if which[1] == "s":
        dp, dm = _pair_ds(eta)
    else:
        dp, dm = _pair_dt(eta)
    av = _average(ctx, eta)

    def rows(s_chart, d_plus, d_minus, r_plus, r_minus):
        b = _bcast(ctx.beta(s_chart))
        bp = _bcast(ctx.beta_prime(s_chart)) if which[1] == "s" else 0.0
        gam = b * b + (1.0 - b) ** 2
        if which[0] == "d":
            jump = bp * (r_plus - r_minus)
            xp = (b * b / gam) * d_plus + (b * (1 - b) / gam) * d_minus + (b / gam) * jump
            xm = (b * (1 - b) / gam) * d_plus + ((1 - b) ** 2 / gam) * d_minus + ((1 - b) / gam) * jump
        else:
            jump = bp * ((r_plus - av) + (r_minus - av))
            xp = ((b - 1) ** 2 / gam) * d_plus + (b * (b - 1) / gam) * d_minus + ((b - 1) / gam) * jump
            xm = (b * (b - 1) / gam) * d_plus + (b * b / gam) * d_minus + (b / gam) * jump
        return xp, xm

    # plus half in the [s, t] chart
    sp, sm = _shift_pair(ctx, eta, dp, dm, gp.s)
    rp, rm = _on_chart(ctx, eta, gp.s)
    if which[0] == "d":
        # plus_glue only lives on [0, R]; beyond it the glued data is absent
        outside = gp.s > ctx.length
        for arr in (sp, sm, rp, rm):
            arr[outside] = 0.0
    xi_p, _ = rows(gp.s, sp, sm, rp, rm)
    # minus half in the [s', t'] chart: sample the plus data at (s' + R, t' + theta)
    s_chart = gm.s + ctx.length
    dp_m = _to_minus_chart(ctx, gp, dp, gm.s)
    rp_m = _to_minus_chart(ctx, gp, eta.plus.remainder, gm.s)
    dm_m, rm_m = dm.copy(), eta.minus.remainder.copy()
    if which[0] == "d":
        outside = s_chart < 0.0
        for arr in (dp_m, rp_m, dm_m, rm_m):
            arr[outside] = 0.0
    _, xi_m = rows(s_chart, dp_m, dm_m, rp_m, rm_m)
    return _f_pair(gp, gm, xi_p, xi_m)
