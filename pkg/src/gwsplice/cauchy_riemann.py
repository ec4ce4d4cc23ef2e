"""Discretized Cauchy-Riemann operators on cylinders and the filled section.

Conventions: targets are R^{2n} with coordinates (x_1, y_1, ..., x_n, y_n)
and the standard structure J0 (x, y) -> (-y, x) on each pair.  The
linear operator is dbar0 = d_s + J0 d_t; the nonlinear one is
(1/2)(d_s u + J(u) d_t u).
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable

import numpy as np
import scipy.linalg as sla
from scipy.interpolate import RectBivariateSpline

from .cylinders import (
    CylinderMap,
    Grid,
    MapPair,
    NeckMap,
    d_s,
    d_t,
    map_ds,
    pair_norm_E,
)
from .profiles import GluingParameter, ScScale
from .sampling import random_pair
from .splice import (
    Cutoff,
    SpliceContext,
    hat_total_unglue,
    minus_glue,
    plus_glue,
)


class CRError(ValueError):
    pass


def standard_j(two_n: int) -> np.ndarray:
    if two_n < 2 or two_n % 2:
        raise CRError("target dimension must be even and >= 2")
    return np.kron(np.eye(two_n // 2), np.array([[0.0, -1.0], [1.0, 0.0]]))


@dataclass(frozen=True, eq=False)
class ComplexStructureField:
    """p -> J(p) on R^{2n}; ``fn`` maps points (..., 2n) to matrices (..., 2n, 2n)."""

    two_n: int
    fn: Callable[[np.ndarray], np.ndarray] | None = None
    matrix: np.ndarray | None = None

    @classmethod
    def constant(cls, J0: np.ndarray) -> "ComplexStructureField":
        J0 = np.asarray(J0, dtype=float)
        return cls(J0.shape[0], None, J0)

    @classmethod
    def standard(cls, two_n: int = 2) -> "ComplexStructureField":
        return cls.constant(standard_j(two_n))

    @classmethod
    def conjugated(cls, two_n: int, eps: float = 0.2, seed: int = 0) -> "ComplexStructureField":
        """J(p) = A(p) J0 A(p)^{-1} with A(p) = I + eps tanh(<k, p>) M, M a fixed unit matrix."""
        rng = np.random.default_rng(seed)
        M = rng.normal(size=(two_n, two_n))
        M /= np.linalg.norm(M, 2)
        kvec = rng.normal(size=two_n)
        J0 = standard_j(two_n)

        def fn(p):
            p = np.asarray(p, dtype=float)
            phase = np.tanh(p @ kvec)[..., None, None]
            A = np.eye(two_n) + eps * phase * M
            return A @ J0 @ np.linalg.inv(A)

        return cls(two_n, fn, None)

    @property
    def is_constant(self) -> bool:
        return self.matrix is not None

    def __call__(self, p) -> np.ndarray:
        p = np.asarray(p, dtype=float)
        if self.is_constant:
            return np.broadcast_to(self.matrix, p.shape[:-1] + (self.two_n, self.two_n))
        return self.fn(p)

    def at(self, q) -> np.ndarray:
        return np.array(self(np.asarray(q, dtype=float)))

    def defect(self, points) -> float:
        """max ||J(p)^2 + I|| over sample points."""
        J = self(points)
        return float(np.abs(J @ J + np.eye(self.two_n)).max())


# --- operators ------------------------------------------------------------

def _as_cyl(u):
    return u.cyl if isinstance(u, NeckMap) else u


def _rewrap(u, cyl: CylinderMap):
    if isinstance(u, NeckMap):
        return NeckMap(cyl, u.length, u.twist, u.domain)
    return cyl


def dbar0(u, J0) -> NeckMap | CylinderMap:
    """d_s u + J0 d_t u at every node (finite differences in s, spectral in t)."""
    J0 = J0.matrix if isinstance(J0, ComplexStructureField) else np.asarray(J0, dtype=float)
    cyl = _as_cyl(u)
    vals = map_ds(cyl) + d_t(cyl.remainder) @ J0.T
    return _rewrap(u, CylinderMap(cyl.grid, vals))


def cr_pointwise(values: np.ndarray, du_s: np.ndarray, du_t: np.ndarray, J: ComplexStructureField) -> np.ndarray:
    """(1/2)(u_s + J(u) u_t) from given values and partial derivatives."""
    Jm = J(values)
    return 0.5 * (du_s + np.einsum("...ij,...j->...i", Jm, du_t))


def cr_apply(u, J: ComplexStructureField) -> NeckMap | CylinderMap:
    """(1/2)(d_s u + J(u) d_t u) at every node."""
    cyl = _as_cyl(u)
    out = cr_pointwise(cyl.values, map_ds(cyl), d_t(cyl.remainder), J)
    return _rewrap(u, CylinderMap(cyl.grid, out))


def pair_add(u: MapPair, h: MapPair) -> MapPair:
    if u.plus.grid != h.plus.grid or u.minus.grid != h.minus.grid:
        raise CRError("pairs live on different grids")
    space = "E" if "E" in (u.space, h.space) else "F"
    c = u.const + h.const
    cc = c if space == "E" else None
    return MapPair(CylinderMap(u.plus.grid, u.plus.remainder + h.plus.remainder, cc),
                   CylinderMap(u.minus.grid, u.minus.remainder + h.minus.remainder, cc), space)


def filled_section(ctx: SpliceContext, u: MapPair, h: MapPair, J: ComplexStructureField) -> MapPair:
    """Solve hat_plus_glue(xi) = (1/2)[d_s + J d_t](plus_glue(u + h)),
    hat_minus_glue(xi) = dbar0(minus_glue(h)) with J0 = J(q), q the base constant.

    At a = 0 the section is (1/2)[d_s + J d_t](u +- h +-) on each half.
    """
    if u.space != "E" or h.space != "E":
        raise CRError("base and section must be E-pairs")
    uh = pair_add(u, h)
    if ctx.is_zero:
        p = cr_apply(uh.plus, J)
        m = cr_apply(uh.minus, J)
        return MapPair(CylinderMap(uh.plus.grid, p.values), CylinderMap(uh.minus.grid, m.values), "F")
    v = cr_apply(plus_glue(ctx, uh), J)
    w = dbar0(minus_glue(ctx, h), J.at(u.const))
    return hat_total_unglue(ctx, v, w, plus_grid=u.plus.grid)


# --- linear solves on C_a and the Z_a* kernel ------------------------------
#
# Per t-Fourier mode k.  Modes k >= 1 use the nodal s-differences of d_s.
# Mode 0 uses the box scheme (x_{i+1} - x_i) / ds = f_{i+1/2} on cell
# midpoints: centered differences annihilate the odd-even vector (-1)^i
# away from the two end rows, and under the decaying weight that shows up
# as a spurious near-kernel.  The box scheme's only null vectors are the
# constants.  (Box rows for k >= 1 would be A-stable but not L-stable and
# leave the stiff modes nearly neutral at practical spacings.)


def fd_ds_matrix(n: int, ds: float) -> np.ndarray:
    """Matrix of the nodal s-derivative used by d_s."""
    return d_s(np.eye(n), ds)


def _box_matrices(n: int, ds: float):
    D = (np.eye(n, k=1) - np.eye(n))[:-1] / ds
    Avg = 0.5 * (np.eye(n, k=1) + np.eye(n))[:-1]
    return D, Avg


def _mode_operator(n: int, ds: float, k: int, J0: np.ndarray) -> np.ndarray:
    """Discrete d_s + 2 pi i k J0 on node-major vectors x[i * d + c].

    Mode 0 has n - 1 box rows on the cell midpoints, other modes n nodal rows.
    """
    d = J0.shape[0]
    if k == 0:
        D, _ = _box_matrices(n, ds)
        return np.kron(D, np.eye(d)).astype(complex)
    return np.kron(fd_ds_matrix(n, ds), np.eye(d)) + 2j * np.pi * k * np.kron(np.eye(n), J0)


def check_resolved(ds: float, delta: float) -> None:
    """The slowest discrete decay rate of the k >= 1 modes, asinh(2 pi ds) / ds, must exceed delta.

    Centered differences turn the decay rate 2 pi k into asinh(2 pi k ds) / ds;
    below delta the weighted discrete operator is no longer Fredholm.
    """
    if not 0 < delta < 2 * math.pi:
        raise CRError("delta must lie in (0, 2 pi)")
    rate = math.asinh(2 * math.pi * ds) / ds
    if rate <= delta:
        raise CRError(f"grid too coarse for delta={delta:g}: discrete decay rate {rate:.3f} (refine ds)")


def _row_weights(s: np.ndarray, k: int, delta: float, center: float) -> np.ndarray:
    """Quadrature weights times e^{2 delta|s - center|} on the rows of mode k."""
    ds = s[1] - s[0]
    if k == 0:
        mid = 0.5 * (s[1:] + s[:-1])
        return np.exp(2.0 * delta * np.abs(mid - center)) * ds
    return np.exp(2.0 * delta * np.abs(s - center)) * _trap(s.size, ds)


def _mode_rhs(coef: np.ndarray, k: int) -> np.ndarray:
    """Right-hand side samples on the rows of mode k from nodal coefficients (n, d)."""
    return 0.5 * (coef[1:] + coef[:-1]) if k == 0 else coef


def _far_field_basis(n: int, k: int, J0: np.ndarray, mode0: str) -> np.ndarray:
    """Columns spanning the admissible node vectors.

    For k >= 1 the component that grows towards an end (like e^{2 pi k |s|})
    is removed at that end.  For k = 0, ``mode0`` is "free" (constants
    allowed) or "dirichlet" (remainder vanishes at both ends).
    """
    d = J0.shape[0]
    if k == 0:
        if mode0 == "free":
            return np.eye(n * d)
        Z = np.zeros((n * d, (n - 2) * d))
        Z[d:(n - 1) * d, :] = np.eye((n - 2) * d)
        return Z
    # J0 e = i e: d_s x = 2 pi k x grows to the right, so drop it at the right end
    P_i = 0.5 * (np.eye(d) - 1j * J0)
    P_mi = 0.5 * (np.eye(d) + 1j * J0)
    blocks = [sla.orth(P_i)] + [np.eye(d, dtype=complex)] * (n - 2) + [sla.orth(P_mi)]
    total = sum(b.shape[1] for b in blocks)
    Z = np.zeros((n * d, total), dtype=complex)
    col = 0
    for i, b in enumerate(blocks):
        Z[i * d:(i + 1) * d, col:col + b.shape[1]] = b
        col += b.shape[1]
    return Z


def _trap(n: int, ds: float) -> np.ndarray:
    w = np.full(n, ds)
    w[0] = w[-1] = 0.5 * ds
    return w


@dataclass(frozen=True)
class CRProblem:
    """Linear dbar0 on the C_a truncation [-margin, R + margin] with antipodal constants."""

    length: float
    delta: float = math.pi
    two_n: int = 2
    n_s: int = 64
    n_t: int = 32
    margin: float = 4.0
    kind: str = "linear"
    constraint: str = "antipodal"

    def __post_init__(self):
        if self.constraint != "antipodal" or self.kind != "linear":
            raise CRError("only the linear antipodal problem is implemented")
        if self.length < 2.0:
            raise CRError("neck length below 2")
        if self.two_n % 2:
            raise CRError("target dimension must be even")

    @property
    def grid(self) -> Grid:
        return Grid(-self.margin, self.length + self.margin, self.n_s, self.n_t)

    @property
    def J0(self) -> np.ndarray:
        return standard_j(self.two_n)

    def beta(self, s):
        return Cutoff()(np.asarray(s) - 0.5 * self.length)

    def profile(self, s) -> np.ndarray:
        return 1.0 - 2.0 * self.beta(s)


@dataclass
class CRSolveResult:
    solution: CylinderMap
    const: np.ndarray
    residual: float
    cond: float
    sigma_min: float


def linear_cr_solve(problem: CRProblem, rhs) -> CRSolveResult:
    """Weighted least-squares solve of dbar0 u = rhs with u = (1 - 2 beta_a) c + r.

    Per t-Fourier mode, the rows are the interior stencils of dbar0 (no
    boundary data is imposed), scaled by e^{delta|s - R/2|}; the remainder
    unknowns are scaled by the inverse weight and c enters mode 0.  The
    minimum-norm solution in these weighted coordinates picks the decaying
    remainder and with it the asymptotic constant.

    ``cond`` and ``sigma_min`` are taken over the modes 0 < k < n_t / 2, whose
    decay rates compete with delta.  Mode 0 (and the Nyquist mode) carry the
    odd-even adjoint null vector of centered differences, with a singular
    value of order e^{-delta (R/2 + margin)} unrelated to delta -> 2 pi.
    """
    g = problem.grid
    f = np.asarray(rhs.values if hasattr(rhs, "values") else rhs, dtype=float)
    if f.ndim == 2:
        f = f[:, :, None]
    if f.shape != (g.n_s, g.n_t, problem.two_n):
        raise CRError(f"rhs of shape {f.shape} does not match the problem grid")
    check_resolved(g.ds, problem.delta)
    n, d, J0 = g.n_s, problem.two_n, problem.J0
    center = 0.5 * problem.length
    wt = np.exp(problem.delta * np.abs(g.s - center))
    row_w = np.kron(wt[1:-1] * math.sqrt(g.ds), np.ones(d))
    scale = np.kron(1.0 / wt, np.ones(d))
    coef = np.fft.rfft(f, axis=1) / g.n_t
    prof = problem.profile(g.s)
    Dp = fd_ds_matrix(n, g.ds) @ prof
    interior = slice(d, (n - 1) * d)
    r_coef = np.zeros((n, coef.shape[1], d), dtype=complex)
    c = np.zeros(d)
    res2, sig_min, sig_max = 0.0, math.inf, 0.0
    n_modes = coef.shape[1]
    for k in range(n_modes):
        nyquist = g.n_t % 2 == 0 and k == n_modes - 1
        kk = 0 if nyquist else k
        M = np.kron(fd_ds_matrix(n, g.ds), np.eye(d)) + 2j * np.pi * kk * np.kron(np.eye(n), J0)
        M = M[interior]
        sc = scale
        if k == 0:
            M = np.hstack([M, np.kron(Dp[1:-1, None], np.eye(d))])
            sc = np.concatenate([scale, np.ones(d)])
        Mw = (row_w[:, None] * M) * sc[None, :]
        b = (row_w * coef[1:-1, k, :].reshape(-1)).astype(complex)
        if kk:
            sv = np.linalg.svd(Mw, compute_uv=False)
            sig_min, sig_max = min(sig_min, sv[-1]), max(sig_max, sv[0])
        sol = np.linalg.lstsq(Mw, b, rcond=None)[0] if np.any(b) else np.zeros(Mw.shape[1], complex)
        res2 += float(np.sum(np.abs(Mw @ sol - b) ** 2)) * (1 if k == 0 or nyquist else 2)
        sol = sol * sc
        if k == 0:
            c = sol[-d:].real
            sol = sol[:-d]
        r_coef[:, k, :] = sol.reshape(n, d)
    r = np.fft.irfft(r_coef * g.n_t, n=g.n_t, axis=1)
    u = CylinderMap(g, r, c, prof)
    return CRSolveResult(u, c, math.sqrt(res2), sig_max / sig_min if sig_min > 0 else math.inf, sig_min)


@dataclass
class KernelReport:
    singular_values: np.ndarray
    near_zero: int
    sigma_max: float
    mean_zero_min: float
    threshold: float


def kernel_diagnostic(length: float, delta: float, two_n: int = 2, ds: float = 0.5,
                      n_t: int = 16, margin: float = 4.0, rel_tol: float = 1e-6,
                      max_nodes: int = 64 * 32) -> KernelReport:
    """Singular values of dbar0 on a truncation [-margin, R + margin] of Z_a*.

    Norms carry the weight e^{-delta|s - R/2|}: weighted H^1 on the domain
    and weighted L^2 on the target.  The Nyquist mode is left out (the
    spectral t-derivative does not resolve it).  Complex modes k >= 1 count
    twice.  Also reports the smallest singular value on [u]_a = 0.
    """
    check_resolved(ds, delta)
    n = int(round((length + 2 * margin) / ds)) + 1
    if n * n_t > max_nodes:
        raise CRError(f"grid of {n}x{n_t} nodes exceeds the SVD budget {max_nodes}")
    s = -margin + ds * np.arange(n)
    center = 0.5 * length
    mid = int(round((center + margin) / ds))
    if abs(s[mid] - center) > 1e-9:
        raise CRError("R/2 must be a grid node")
    J0 = standard_j(two_n)
    d = two_n
    node_wt = np.exp(-2.0 * delta * np.abs(s - center)) * _trap(n, ds)
    cell = 0.5 * (s[1:] + s[:-1])
    cell_wt = np.exp(-2.0 * delta * np.abs(cell - center)) * ds
    D, _ = _box_matrices(n, ds)
    values, mean_zero = [], math.inf
    for k in range((n_t - 1) // 2 + 1):
        A = _mode_operator(n, ds, k, J0)
        Z = _far_field_basis(n, k, J0, "free")
        gram = np.diag(node_wt * (1.0 + (2 * np.pi * k) ** 2)) + D.T @ np.diag(cell_wt) @ D
        dom = np.kron(gram, np.eye(d))
        out_half = np.kron(np.sqrt(_row_weights(s, k, -delta, center)), np.ones(d))
        sv = _weighted_svals(out_half[:, None] * A, Z, dom)
        values.extend(list(sv) * (1 if k == 0 else 2))
        if k == 0:
            keep = np.ones(n * d, dtype=bool)
            keep[mid * d:(mid + 1) * d] = False
            sv0 = _weighted_svals(out_half[:, None] * A, Z[:, keep], dom)
            mean_zero = min(mean_zero, sv0[-1])
        else:
            mean_zero = min(mean_zero, sv[-1])
    values = np.sort(np.array(values))[::-1]
    thr = rel_tol * values[0]
    return KernelReport(values, int(np.sum(values < thr)), float(values[0]), float(mean_zero), float(thr))


def _weighted_svals(A, Z, dom):
    """Singular values of A restricted to range(Z), domain norm from the Gram matrix dom."""
    Lz = np.linalg.cholesky(Z.conj().T @ dom @ Z)
    T = A @ Z
    X = sla.solve_triangular(Lz, T.conj().T, lower=True).conj().T
    sv = np.linalg.svd(X, compute_uv=False)
    # a wide block has X.shape[1] - X.shape[0] exact null directions
    return np.concatenate([sv, np.zeros(max(0, X.shape[1] - X.shape[0]))])


# --- index ----------------------------------------------------------------

def fredholm_index(two_n: int, g: int, k: int, c1: int) -> int:
    """2 c1 + (2n - 6)(1 - g) + 2k, checked against 2n(1 - g) + 2 c1 + 6g - 6 + 2k."""
    if two_n < 2 or two_n % 2:
        raise CRError("dim Q must be even and >= 2")
    if g < 0 or k < 0:
        raise CRError("genus and marked count are non-negative")
    first = 2 * c1 + (two_n - 6) * (1 - g) + 2 * k
    second = two_n * (1 - g) + 2 * c1 + 6 * g - 6 + 2 * k
    assert first == second
    return first


# --- contraction modulus --------------------------------------------------

def _pair_to_vec(h: MapPair) -> np.ndarray:
    parts = [h.plus.remainder.ravel(), h.minus.remainder.ravel()]
    if h.space == "E":
        parts.insert(0, h.const)
    return np.concatenate(parts)


def _vec_to_pair(x: np.ndarray, like: MapPair, space: str) -> MapPair:
    d = like.dim
    gp, gm = like.plus.grid, like.minus.grid
    npl = gp.n_s * gp.n_t * d
    off = 0
    c = None
    if space == "E":
        c, off = x[:d], d
    rp = x[off:off + npl].reshape(gp.n_s, gp.n_t, d)
    rm = x[off + npl:off + 2 * npl].reshape(gm.n_s, gm.n_t, d)
    return MapPair(CylinderMap(gp, rp, c), CylinderMap(gm, rm, c), space)


def _vec_weights(u: MapPair, delta: float, space: str) -> np.ndarray:
    """Diagonal weights sqrt(ds) e^{delta|s|} matching the layout of _pair_to_vec."""
    parts = []
    for cyl in (u.plus, u.minus):
        g = cyl.grid
        w = np.sqrt(g.ds) * np.exp(delta * np.abs(g.s))
        parts.append(np.repeat(w, g.n_t * u.dim))
    if space == "E":
        parts.insert(0, np.ones(u.dim))
    return np.concatenate(parts)


def linearization_matrix(ctx: SpliceContext, u: MapPair, J: ComplexStructureField) -> np.ndarray:
    """Dense matrix of w -> D_w filled_section(a, w) at w = 0 (J frozen at the base constant)."""
    J_frozen = ComplexStructureField.constant(J.at(u.const))
    zero = _vec_to_pair(np.zeros(_pair_to_vec(u).size), u, "E")
    base = _pair_to_vec(filled_section(ctx, u, zero, J_frozen))
    n_in = _pair_to_vec(u).size
    cols = []
    for j in range(n_in):
        e = np.zeros(n_in)
        e[j] = 1.0
        cols.append(_pair_to_vec(filled_section(ctx, u, _vec_to_pair(e, u, "E"), J_frozen)) - base)
    return np.array(cols).T


@dataclass
class ContractionReport:
    radius: float
    modulus: float
    pairs_used: int
    kernel_dim: int


def contraction_modulus(ctx: SpliceContext, u: MapPair, J: ComplexStructureField,
                        radii=(0.1, 0.05, 0.025), n_pairs: int = 6, m: int = 0,
                        scale: ScScale | None = None, seed: int = 0,
                        rel_tol: float = 1e-8) -> list[ContractionReport]:
    """Estimate the Lipschitz modulus of B(a, w) = w - L^+ f(a, w) on |w| <= radius.

    L is the linearization of the filled section at w = 0 for this a; its
    numerical kernel (singular values below rel_tol * max) is split off and
    w ranges over the complement, along seeded decaying sample directions
    (rates just above delta_m) reused at every radius.  Pairs with w = w'
    are skipped.  Use a base u with vanishing filled section (a constant
    pair in the flat-chart model); otherwise f(a, 0) != 0 and round-off in
    L^+ f dominates at small radii.
    """
    scale = scale or ScScale()
    L = linearization_matrix(ctx, u, J)
    # split and invert in weighted coordinates so that the complement is taken
    # in (a diagonal model of) the level-m inner products
    w_in = _vec_weights(u, scale.delta(m), "E")
    w_out = _vec_weights(u, scale.delta(m), "F")
    Lw = (w_out[:, None] * L) / w_in[None, :]
    U, sv, Vt = np.linalg.svd(Lw, full_matrices=False)
    if not np.all(np.isfinite(sv)):
        raise CRError("linearization SVD failed")
    keep = sv > rel_tol * sv[0]
    V = Vt[keep].T
    kernel_dim = int(L.shape[1] - np.sum(keep))
    rng = np.random.default_rng(seed)
    gp = u.plus.grid
    lam = scale.delta(m) + 1.0
    dirs = []
    for _ in range(2 * n_pairs):
        # decaying samples keep the weighted norm from being dominated by the far ends
        sample = random_pair(rng, gp.s_max, gp.ds, gp.n_t, u.dim, "E", kind="decay", rate=(lam, lam + 2.0))
        x = (V @ (V.T @ (w_in * _pair_to_vec(sample)))) / w_in
        dirs.append(x / pair_norm_E(_vec_to_pair(x, u, "E"), m, scale))

    def L_pinv(f):
        return (V @ ((U[:, keep].T @ (w_out * f)) / sv[keep])) / w_in

    def B(x):
        w = _vec_to_pair(x, u, "E")
        return x - L_pinv(_pair_to_vec(filled_section(ctx, u, w, J)))

    reports = []
    for rho in radii:
        best, used = 0.0, 0
        for i in range(n_pairs):
            x, y = rho * dirs[2 * i], 0.5 * rho * dirs[2 * i + 1]
            diff = x - y
            den = pair_norm_E(_vec_to_pair(diff, u, "E"), m, scale)
            if den == 0.0:
                continue
            num = pair_norm_E(_vec_to_pair(B(x) - B(y), u, "E"), m, scale)
            best = max(best, num / den)
            used += 1
        reports.append(ContractionReport(rho, best, used, kernel_dim))
    return reports


# --- transversal constraint -----------------------------------------------

@dataclass(frozen=True, eq=False)
class DiskMap:
    """Map of the unit disk into R^{2n}, sampled on a square grid over [-1, 1]^2."""

    x: np.ndarray
    y: np.ndarray
    values: np.ndarray

    def __post_init__(self):
        if self.values.shape[:2] != (self.x.size, self.y.size):
            raise CRError("disk samples do not match the grid")
        splines = [RectBivariateSpline(self.x, self.y, self.values[:, :, c], kx=3, ky=3)
                   for c in range(self.values.shape[2])]
        object.__setattr__(self, "_splines", splines)

    @classmethod
    def from_function(cls, f, n: int = 41) -> "DiskMap":
        x = np.linspace(-1.0, 1.0, n)
        X, Y = np.meshgrid(x, x, indexing="ij")
        vals = np.asarray(f(X, Y), dtype=float)
        return cls(x, x.copy(), np.moveaxis(vals, 0, -1))

    @property
    def dim(self) -> int:
        return self.values.shape[2]

    def __call__(self, z) -> np.ndarray:
        return np.array([sp(z[0], z[1], grid=False) for sp in self._splines])

    def jacobian(self, z) -> np.ndarray:
        return np.array([[sp(z[0], z[1], dx=1, grid=False), sp(z[0], z[1], dy=1, grid=False)]
                         for sp in self._splines])


def complement_projector(H_basis: np.ndarray, two_n: int) -> np.ndarray:
    """Orthonormal rows spanning the orthogonal complement of span(H_basis columns)."""
    H = np.asarray(H_basis, dtype=float).reshape(two_n, -1)
    Q = sla.null_space(H.T).T if H.size else np.eye(two_n)
    return Q


def transversal_constraint(v: DiskMap, H_basis: np.ndarray, tol: float = 1e-10, max_iter: int = 50) -> np.ndarray:
    """The unique z in B_1/2 with v(z) in H, by Newton iteration from z = 0."""
    Q = complement_projector(H_basis, v.dim)
    if Q.shape[0] != 2:
        raise CRError("H must have codimension 2")
    z = np.zeros(2)
    for _ in range(max_iter):
        F = Q @ v(z)
        if np.linalg.norm(F) <= tol:
            if np.linalg.norm(z) >= 0.5:
                raise CRError("transversality lost")
            return z
        Jm = Q @ v.jacobian(z)
        try:
            step = np.linalg.solve(Jm, F)
        except np.linalg.LinAlgError as exc:
            raise CRError("transversality lost") from exc
        z = z - step
        if np.linalg.norm(z) > 1.0:
            break
    raise CRError("transversality lost")
