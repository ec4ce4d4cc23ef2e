"""Grid-sampled maps on half-cylinders, finite necks and infinite cylinders.

The circle S^1 = R/Z has circumference 1 and is sampled at t_j = j/n_t.
The s-direction is sampled uniformly.  A map is stored as

    values(s, t) = profile(s) * const + remainder(s, t)

where ``const`` is the asymptotic constant (None for plain maps) and
``profile`` is 1 on half-cylinders and 1 - 2 beta_a on the infinite
cylinder C_a (antipodal constants).  Keeping the constant apart from the
remainder keeps exponentially weighted norms free of cancellation error.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from functools import lru_cache

import numpy as np
from scipy.interpolate import CubicSpline

from .profiles import GluingParameter

_SNAP = 1e-9


class GridError(ValueError):
    pass


@dataclass(frozen=True)
class Grid:
    s_min: float
    s_max: float
    n_s: int
    n_t: int

    def __post_init__(self):
        if self.n_s < 4 or self.n_t < 4:
            raise GridError("grids need at least 4 nodes in each direction")
        if not self.s_min < self.s_max:
            raise GridError("s_min must be below s_max")

    @classmethod
    def from_spacing(cls, s_min: float, s_max: float, ds: float, n_t: int) -> "Grid":
        steps = (s_max - s_min) / ds
        n = int(round(steps))
        if abs(steps - n) > _SNAP * max(1.0, steps):
            raise GridError(f"[{s_min}, {s_max}] is not a multiple of ds={ds}")
        return cls(float(s_min), float(s_max), n + 1, n_t)

    @property
    def ds(self) -> float:
        return (self.s_max - self.s_min) / (self.n_s - 1)

    @property
    def s(self) -> np.ndarray:
        return self.s_min + self.ds * np.arange(self.n_s)

    @property
    def t(self) -> np.ndarray:
        return np.arange(self.n_t) / self.n_t

    def quad_weights(self) -> np.ndarray:
        """Trapezoid weights in s (the t-measure 1/n_t is applied separately)."""
        w = np.full(self.n_s, self.ds)
        w[0] = w[-1] = 0.5 * self.ds
        return w


@dataclass(frozen=True, eq=False)
class CylinderMap:
    grid: Grid
    remainder: np.ndarray
    const: np.ndarray | None = None
    profile: np.ndarray | None = None

    def __post_init__(self):
        r = np.asarray(self.remainder, dtype=float)
        if r.ndim == 2:
            r = r[:, :, None]
        if r.shape[:2] != (self.grid.n_s, self.grid.n_t):
            raise GridError(f"values of shape {r.shape} do not match the grid")
        if not np.all(np.isfinite(r)):
            raise GridError("map values must be finite")
        object.__setattr__(self, "remainder", r)
        if self.const is not None:
            c = np.asarray(self.const, dtype=float).reshape(-1)
            if c.shape != (r.shape[2],):
                raise GridError("asymptotic constant has the wrong dimension")
            object.__setattr__(self, "const", c)
        if self.profile is not None:
            p = np.asarray(self.profile, dtype=float).reshape(-1)
            if p.shape != (self.grid.n_s,):
                raise GridError("profile must have one entry per s-node")
            object.__setattr__(self, "profile", p)

    @classmethod
    def from_values(cls, grid: Grid, values, const=None) -> "CylinderMap":
        values = np.asarray(values, dtype=float)
        if values.ndim == 2:
            values = values[:, :, None]
        if const is None:
            return cls(grid, values)
        const = np.asarray(const, dtype=float).reshape(-1)
        return cls(grid, values - const, const)

    @property
    def dim(self) -> int:
        return self.remainder.shape[2]

    @property
    def antipodal(self) -> bool:
        return self.profile is not None

    def const_or_zero(self) -> np.ndarray:
        return np.zeros(self.dim) if self.const is None else self.const

    def profile_or_ones(self) -> np.ndarray:
        return np.ones(self.grid.n_s) if self.profile is None else self.profile

    @property
    def values(self) -> np.ndarray:
        if self.const is None:
            return self.remainder
        return self.remainder + self.profile_or_ones()[:, None, None] * self.const

    def with_remainder(self, remainder) -> "CylinderMap":
        return CylinderMap(self.grid, remainder, self.const, self.profile)


@dataclass(frozen=True, eq=False)
class MapPair:
    """(u+, u-) on [0, S]xS^1 and [-S, 0]xS^1.

    space "E": common asymptotic constant; space "F": zero constant.
    """

    plus: CylinderMap
    minus: CylinderMap
    space: str = "E"

    def __post_init__(self):
        if self.space not in ("E", "F"):
            raise ValueError("space must be 'E' or 'F'")
        if self.plus.grid.s_min != 0.0 or self.minus.grid.s_max != 0.0:
            raise GridError("pair grids must be [0, S] and [-S, 0]")
        cp, cm = self.plus.const_or_zero(), self.minus.const_or_zero()
        if self.space == "E" and not np.array_equal(cp, cm):
            raise GridError("E-pairs need matching asymptotic constants")
        if self.space == "F" and (np.any(cp != 0) or np.any(cm != 0)):
            raise GridError("F-pairs have zero asymptotic constants")

    @property
    def const(self) -> np.ndarray:
        return self.plus.const_or_zero()

    @property
    def dim(self) -> int:
        return self.plus.dim


@dataclass(frozen=True, eq=False)
class NeckMap:
    """A map on the neck Z_a ("Z", s in [0, R]) or on a truncation of C_a ("C").

    Coordinates are the [s, t] chart; the [s', t']' chart is s = s' + R,
    t = t' + twist.
    """

    cyl: CylinderMap
    length: float
    twist: float
    domain: str = "Z"

    def __post_init__(self):
        if self.domain not in ("Z", "C"):
            raise ValueError("domain must be 'Z' or 'C'")

    @property
    def grid(self) -> Grid:
        return self.cyl.grid

    @property
    def values(self) -> np.ndarray:
        return self.cyl.values


# --- derivatives ----------------------------------------------------------

def _stencil(offsets: np.ndarray, order: int) -> np.ndarray:
    """Weights w with sum w_m f(x + offsets_m h) ~ h^order f^(order)(x)."""
    n = offsets.size
    A = np.array([offsets ** p / math.factorial(p) for p in range(n)], dtype=float)
    rhs = np.zeros(n)
    rhs[order] = 1.0
    return np.linalg.solve(A, rhs)


@lru_cache(maxsize=256)
def _fd_rows(n: int, order: int) -> tuple[np.ndarray, np.ndarray]:
    """Index and weight tables for a second-order order-th derivative on n nodes.

    Interior rows use the symmetric stencil; rows too close to an end use a
    one-sided stencil of order + 2 points.
    """
    central = order + 1 if order % 2 == 0 else order + 2
    side = order + 2
    if n < side:
        raise GridError(f"{n} nodes cannot carry a derivative of order {order}")
    half = (central - 1) // 2
    idx = np.zeros((n, side), dtype=int)
    wts = np.zeros((n, side))
    for i in range(n):
        if half <= i <= n - 1 - half:
            start, width = i - half, central
        else:
            start, width = (0 if i < half else n - side), side
        offs = np.arange(start, start + width) - i
        idx[i, :width] = np.arange(start, start + width)
        idx[i, width:] = start
        wts[i, :width] = _stencil(offs.astype(float), order)
    return idx, wts


def d_s(arr: np.ndarray, ds: float, order: int = 1) -> np.ndarray:
    """Second-order finite differences along axis 0 (one-sided near the ends).

    Each order uses its own stencil, so higher derivatives stay second-order
    accurate up to the boundary.
    """
    if order == 0:
        return arr
    arr = np.asarray(arr)
    idx, wts = _fd_rows(arr.shape[0], order)
    return np.einsum("im,im...->i...", wts, arr[idx]) / ds ** order


def d_t(arr: np.ndarray, order: int = 1) -> np.ndarray:
    """Spectral derivative along the periodic axis 1 (circumference 1).

    The Nyquist coefficient is dropped so real data stays real.
    """
    if order == 0:
        return arr
    n_t = arr.shape[1]
    coef = np.fft.rfft(arr, axis=1)
    k = np.arange(coef.shape[1])
    mult = (2j * np.pi * k) ** order
    if n_t % 2 == 0:
        mult[-1] = 0.0
    shape = [1] * arr.ndim
    shape[1] = -1
    return np.fft.irfft(coef * mult.reshape(shape), n=n_t, axis=1)


def map_ds(u: CylinderMap, order: int = 1) -> np.ndarray:
    """s-derivative of the full map, constant part handled through the profile."""
    out = d_s(u.remainder, u.grid.ds, order)
    if u.const is not None and u.profile is not None:
        out = out + d_s(u.profile, u.grid.ds, order)[:, None, None] * u.const
    return out


def map_dt(u: CylinderMap, order: int = 1) -> np.ndarray:
    return d_t(u.remainder, order)


def derivative_stack(arr: np.ndarray, ds: float, k: int):
    """Yield D^alpha arr = d_s^i d_t^j arr for all i + j <= k."""
    for i in range(k + 1):
        Ds = d_s(arr, ds, i)
        for j in range(k - i + 1):
            yield d_t(Ds, j)


# --- shifted sampling -----------------------------------------------------

def _is_integer(x: float) -> bool:
    return abs(x - round(x)) <= _SNAP * max(1.0, abs(x))


def shift_t(arr: np.ndarray, shift: float) -> np.ndarray:
    """Return arr(t - shift) on the same t-nodes (exact roll or trig interpolation)."""
    n_t = arr.shape[1]
    k = shift * n_t
    if _is_integer(k):
        return np.roll(arr, int(round(k)) % n_t, axis=1)
    coef = np.fft.rfft(arr, axis=1)
    freqs = np.arange(coef.shape[1])
    phase = np.exp(-2j * np.pi * freqs * shift)
    if n_t % 2 == 0:
        # keep the Nyquist term real: use its cosine part only
        phase[-1] = np.cos(np.pi * n_t * shift)
    shape = [1] * arr.ndim
    shape[1] = -1
    return np.fft.irfft(coef * phase.reshape(shape), n=n_t, axis=1)


def sample_s(grid: Grid, arr: np.ndarray, s_query: np.ndarray, fill: float | np.ndarray = 0.0) -> np.ndarray:
    """Values of ``arr`` (on ``grid``) at s_query; outside the grid ``fill`` is used.

    Node-aligned queries are index lookups; others use a not-a-knot cubic
    spline, which is linear in the data.
    """
    s_query = np.asarray(s_query, dtype=float)
    pos = (s_query - grid.s_min) / grid.ds
    out = np.empty((s_query.size,) + arr.shape[1:])
    out[...] = fill
    inside = (pos >= -_SNAP) & (pos <= grid.n_s - 1 + _SNAP)
    if not np.any(inside):
        return out
    p_in = pos[inside]
    rounded = np.rint(p_in)
    if np.all(np.abs(p_in - rounded) <= _SNAP * np.maximum(1.0, np.abs(p_in))):
        out[inside] = arr[rounded.astype(int)]
        return out
    spline = CubicSpline(grid.s, arr, axis=0)
    out[inside] = spline(np.clip(s_query[inside], grid.s_min, grid.s_max))
    return out


def shifted_values(u: CylinderMap, s_target: np.ndarray, s_shift: float, t_shift: float,
                   part: str = "remainder") -> np.ndarray:
    """Sample ``u`` at (s - s_shift, t - t_shift) for s in s_target and grid t.

    ``part`` selects the remainder array or the full values.  Outside the
    grid the remainder is taken to be 0 (full values: the constant).
    """
    if part == "remainder":
        arr, fill = u.remainder, 0.0
    else:
        arr, fill = u.values, u.const_or_zero()
    arr = shift_t(arr, t_shift) if t_shift else arr
    return sample_s(u.grid, arr, np.asarray(s_target) - s_shift, fill)


def circle_mean(u: CylinderMap, s0: float, part: str = "values") -> np.ndarray:
    """Integral over the circle {s0} x S^1 (rectangle rule, spectrally exact)."""
    g = u.grid
    if s0 < g.s_min - _SNAP or s0 > g.s_max + _SNAP:
        raise GridError(f"s0={s0} outside the grid [{g.s_min}, {g.s_max}]")
    arr = u.remainder if part == "remainder" else u.values
    row = sample_s(g, arr, np.array([s0]))[0]
    return row.mean(axis=0)


def evaluate(u: CylinderMap | NeckMap, s: float, t: float) -> np.ndarray:
    """Value at an arbitrary point: trigonometric in t, cubic spline in s."""
    cyl = u.cyl if isinstance(u, NeckMap) else u
    g = cyl.grid
    if s < g.s_min - _SNAP or s > g.s_max + _SNAP:
        raise GridError(f"s={s} outside the grid [{g.s_min}, {g.s_max}]")
    col = sample_s(g, cyl.values, np.array([s]))[0]
    n_t = g.n_t
    pos = (t % 1.0) * n_t
    if _is_integer(pos):
        return col[int(round(pos)) % n_t].copy()
    coef = np.fft.rfft(col, axis=0) / n_t
    k = np.arange(coef.shape[0])
    w = np.where((k == 0) | ((n_t % 2 == 0) & (k == n_t // 2)), 1.0, 2.0)
    basis = np.exp(2j * np.pi * k * t)
    if n_t % 2 == 0:
        basis[-1] = np.cos(2 * np.pi * (n_t // 2) * t)
    return np.real((w * basis) @ coef)


@dataclass(frozen=True)
class PointLift:
    plus: tuple[float, float]
    minus: tuple[float, float]
    interior: bool


def lift_point(a: GluingParameter, s: float, t: float, margin: float, kind="exp") -> PointLift:
    """Both chart representations of the neck point [s, t].

    ``interior`` flags points of the sub-cylinder Z_a(-margin), s in [h, R - h].
    """
    if a.is_zero:
        raise GridError("lifting needs a non-zero gluing parameter")
    R = a.length(kind)
    if s < -_SNAP or s > R + _SNAP:
        raise GridError(f"s={s} outside [0, R={R}]")
    t = t % 1.0
    tm = (t - a.twist) % 1.0
    if tm >= 1.0:
        tm = 0.0
    return PointLift((s, t), (s - R, tm), margin <= s <= R - margin)


# --- weighted norms -------------------------------------------------------

def weighted_norm_array(arr: np.ndarray, grid: Grid, k: int, delta: float, center: float = 0.0,
                        log_prefactor: float = 0.0) -> float:
    """sqrt(sum_{|alpha|<=k} int |D^alpha arr|^2 exp(2 delta |s - center| + log_prefactor))."""
    if k < 0:
        raise GridError("order must be non-negative")
    if k > min(grid.n_s - 3, 4):
        raise GridError(f"derivative order {k} too large for the grid")
    expo = 2.0 * delta * np.abs(grid.s - center) + log_prefactor
    top = float(expo.max())
    # factor out the largest exponent so huge weights stay representable
    w = grid.quad_weights() * np.exp(expo - top) / grid.n_t
    total = 0.0
    for D in derivative_stack(arr, grid.ds, k):
        total += float(np.einsum("i,ijk->", w, D * D))
    if total == 0.0:
        return 0.0
    log_norm = 0.5 * (math.log(total) + top)
    return math.exp(log_norm) if log_norm < 709.0 else math.inf


def weighted_norm(u: CylinderMap, k: int, delta: float, center: float = 0.0) -> float:
    """Weighted Sobolev norm of the remainder of ``u``."""
    return weighted_norm_array(u.remainder, u.grid, k, delta, center)


def pair_norm_E(h: MapPair, m: int, scale) -> float:
    """(|c|^2 + ||r+||^2 + ||r-||^2)^(1/2) at order 3 + m and weight delta_m."""
    k, d = scale.e_order(m), scale.delta(m)
    c = h.const
    return math.sqrt(float(c @ c) + weighted_norm(h.plus, k, d) ** 2 + weighted_norm(h.minus, k, d) ** 2)


def pair_norm_F(h: MapPair, m: int, scale) -> float:
    k, d = scale.f_order(m), scale.delta(m)
    return math.sqrt(weighted_norm(h.plus, k, d) ** 2 + weighted_norm(h.minus, k, d) ** 2)


def neck_norm_G(q: NeckMap, p: NeckMap, m: int, scale, hat: bool = False) -> float:
    """G^a_m (hat=False) or hat-G^a_m (hat=True) norm of (q, p).

    q lives on Z_a, p on the C_a truncation; the e^{delta R} factor is
    folded into the weights to stay in floating range.
    """
    if q.domain != "Z" or p.domain != "C":
        raise GridError("expected q on Z_a and p on C_a")
    if abs(q.length - p.length) > 1e-12 * max(1.0, q.length) or abs(q.twist - p.twist) > 1e-12:
        raise GridError("q and p belong to different gluing parameters")
    R = q.length
    k, d = scale.f_order(m), scale.delta(m)
    half = 0.5 * R
    if hat:
        nq = weighted_norm_array(q.cyl.values, q.grid, k, -d, half, d * R)
        np_ = weighted_norm_array(p.cyl.values, p.grid, k, d, half, d * R)
        return math.sqrt(nq ** 2 + np_ ** 2)
    # remainder form: q = c + r_q, [q]_a = c + [r_q], p_inf = const of p
    rq = q.cyl.remainder
    mean_r = circle_mean(q.cyl, half, part="remainder")
    p_inf = p.cyl.const_or_zero()
    shifted = rq - mean_r + p_inf
    diff = q.cyl.const_or_zero() + mean_r - p_inf
    nq = weighted_norm_array(shifted, q.grid, k, -d, half, d * R)
    np_ = weighted_norm_array(p.cyl.remainder, p.grid, k, d, half, d * R)
    return math.sqrt(float(diff @ diff) + nq ** 2 + np_ ** 2)
