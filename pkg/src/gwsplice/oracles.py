"""Independent reference implementations used to cross-check the fast routes.

Everything here works on full value arrays with integer index arithmetic
(node-aligned neck length and twist) and shares no code with the splice
and norm routines it checks.  The cut-off is evaluated from its defining
quotient psi(1 - s) / (psi(1 - s) + psi(1 + s)).
"""

from __future__ import annotations

import math

import numpy as np


def psi(x):
    x = np.asarray(x, dtype=float)
    out = np.zeros_like(x)
    pos = x > 0
    out[pos] = np.exp(-1.0 / x[pos])
    return out


def beta_quotient(s):
    s = np.asarray(s, dtype=float)
    num = psi(1.0 - s)
    return num / (num + psi(1.0 + s))


def _index(x: float, ds: float) -> int:
    k = round(x / ds)
    if abs(k * ds - x) > 1e-9 * max(1.0, abs(x)):
        raise ValueError(f"{x} is not a multiple of {ds}")
    return int(k)


class ExactLayout:
    """Index bookkeeping for a pair on [0, N ds] and [-N ds, 0] glued with R = K ds."""

    def __init__(self, S: float, R: float, twist: float, ds: float, n_t: int):
        self.N = _index(S, ds)
        self.K = _index(R, ds)
        if self.K % 2:
            raise ValueError("R/2 must be a node")
        k = twist * n_t
        if abs(k - round(k)) > 1e-9:
            raise ValueError("twist is not node aligned")
        self.k = int(round(k)) % n_t
        # x[shift] == np.roll(x, k, axis=0); x[unshift] undoes it
        self.shift = (np.arange(n_t) - self.k) % n_t
        self.unshift = (np.arange(n_t) + self.k) % n_t
        self.ds, self.n_t, self.R = ds, n_t, R
        self._beta: dict[int, float] = {}

    def beta_at(self, idx_s) -> float:
        i = int(idx_s)
        if i not in self._beta:
            self._beta[i] = float(beta_quotient(i * self.ds - 0.5 * self.R))
        return self._beta[i]

    def plus_at(self, hp: np.ndarray, idx_s: int, fill) -> np.ndarray:
        """h+ at s = idx_s ds (full values, fill beyond the grid)."""
        if 0 <= idx_s <= self.N:
            return hp[idx_s]
        return np.broadcast_to(fill, hp[0].shape)

    def minus_shift_at(self, hm: np.ndarray, idx_s: int, fill) -> np.ndarray:
        """h-(s - R, t - theta) at s = idx_s ds."""
        j = idx_s - self.K + self.N
        if 0 <= j <= self.N:
            return hm[j][self.shift]
        return np.broadcast_to(fill, hm[0].shape)


def glue_oracle(hp, hm, c, lay: ExactLayout):
    """Full values of plus_glue on [0, R] and minus_glue on [R - S, S] by direct loops."""
    v = []
    for i in range(lay.K + 1):
        b = lay.beta_at(i)
        v.append(b * lay.plus_at(hp, i, c) + (1 - b) * lay.minus_shift_at(hm, i, c))
    half = lay.K // 2
    av = 0.5 * (hp[half].mean(axis=0) + hm[lay.N - half].mean(axis=0))
    w = []
    for i in range(lay.K - lay.N, lay.N + 1):
        b = lay.beta_at(i)
        w.append(-(1 - b) * (lay.plus_at(hp, i, c) - av) + b * (lay.minus_shift_at(hm, i, c) - av))
    return np.array(v), np.array(w), av


def hat_glue_oracle(xp, xm, lay: ExactLayout):
    zero = np.zeros(xp.shape[-1])
    v = []
    for i in range(lay.K + 1):
        b = lay.beta_at(i)
        v.append(b * lay.plus_at(xp, i, zero) + (1 - b) * lay.minus_shift_at(xm, i, zero))
    w = []
    for i in range(lay.K - lay.N, lay.N + 1):
        b = lay.beta_at(i)
        w.append(-(1 - b) * lay.plus_at(xp, i, zero) + b * lay.minus_shift_at(xm, i, zero))
    return np.array(v), np.array(w)


def unglue_oracle(v, w, lay: ExactLayout, hat: bool = False):
    """Solve [[beta, 1 - beta], [-(1 - beta), beta]] (x, y) = (v, w_hat) node by node.

    v is given on [0, R] (K + 1 nodes), w on [R - S, S]; returns full values
    of (h+ on [0, S], h- on [-S, 0]).
    """
    n_t, d = v.shape[1], v.shape[2]
    if hat:
        w_hat_of = lambda i, b: w[i - (lay.K - lay.N)]
    else:
        mean_v = v[lay.K // 2].mean(axis=0)
        w_hat_of = lambda i, b: w[i - (lay.K - lay.N)] + (2 * b - 1) * mean_v

    def solve_at(i):
        b = lay.beta_at(i)
        vi = v[i] if 0 <= i <= lay.K else np.zeros((n_t, d))
        wi = w_hat_of(i, b)
        # Cramer's rule; det = b^2 + (1 - b)^2 >= 1/2
        det = b * b + (1 - b) * (1 - b)
        return (b * vi - (1 - b) * wi) / det, ((1 - b) * vi + b * wi) / det

    hp = [None] * (lay.N + 1)
    hm = [None] * (lay.N + 1)
    for i in range(lay.K - lay.N, lay.N + 1):
        x, y = solve_at(i)
        if 0 <= i <= lay.N:
            hp[i] = x
        j = i - lay.K + lay.N  # s' = s - R
        if 0 <= j <= lay.N:
            hm[j] = y[lay.unshift]  # back to t' = t - theta
    return np.array(hp), np.array(hm)


def filled_section_oracle(up, um, hp, hm, cu, ch, lay: ExactLayout, J):
    """Direct assembly of both filled-section equations from full values.

    up/um and hp/hm are full values of the base u and the section h on the
    pair grids, cu/ch their asymptotic constants, J a callable on points
    (..., 2n) returning matrices.  Returns full values of xi+ and xi-.
    """
    v, _, _ = glue_oracle(up + hp, um + hm, cu + ch, lay)
    _, w, _ = glue_oracle(hp, hm, ch, lay)
    Dt = dft_derivative_matrix(lay.n_t)

    def derivs(x):
        xs = np.einsum("ab,btd->atd", fd_matrix(x.shape[0], lay.ds), x)
        xt = np.einsum("ab,sbd->sad", Dt, x)
        return xs, xt

    vs, vt = derivs(v)
    rhs1 = np.empty_like(v)
    for i in range(v.shape[0]):
        for j in range(v.shape[1]):
            rhs1[i, j] = 0.5 * (vs[i, j] + J(v[i, j]) @ vt[i, j])
    J0 = np.asarray(J(np.asarray(cu, dtype=float)))
    ws, wt = derivs(w)
    rhs2 = ws + wt @ J0.T
    return unglue_oracle(rhs1, rhs2, lay, hat=True)


def constraint_grid_oracle(v, Q, levels: int = 10, n: int = 41):
    """argmin |Q v(z)| over the disk of radius 1/2 by nested grid zooming.

    ``v`` must accept a (2, N) array of points and return (dim, N) values.
    """
    center, half = np.zeros(2), 0.5
    for _ in range(levels):
        xs = center[0] + np.linspace(-half, half, n)
        ys = center[1] + np.linspace(-half, half, n)
        X, Y = np.meshgrid(xs, ys, indexing="ij")
        X, Y = X.ravel(), Y.ravel()
        vals = np.asarray(v(np.array([X, Y])))  # (dim, N)
        res = np.linalg.norm(np.asarray(Q) @ vals, axis=0)
        res[X ** 2 + Y ** 2 >= 0.25] = np.inf
        i = int(np.argmin(res))
        center = np.array([X[i], Y[i]])
        half *= 4.0 / (n - 1)
    return center


# --- norms ----------------------------------------------------------------

def fd_matrix(n: int, ds: float, order: int = 1) -> np.ndarray:
    """Second-order order-th derivative matrix from differentiated Lagrange polynomials.

    Symmetric windows in the interior, one-sided windows of order + 2 points
    near the ends.
    """
    central = order + 1 if order % 2 == 0 else order + 2
    side = order + 2
    half = (central - 1) // 2
    D = np.zeros((n, n))
    for i in range(n):
        if half <= i <= n - 1 - half:
            cols = np.arange(i - half, i + half + 1)
        elif i < half:
            cols = np.arange(side)
        else:
            cols = np.arange(n - side, n)
        x = (cols - i).astype(float)
        for m, col in enumerate(cols):
            e = np.zeros(x.size)
            e[m] = 1.0
            lag = np.polynomial.Polynomial.fit(x, e, x.size - 1, domain=[-1, 1], window=[-1, 1])
            D[i, col] = lag.deriv(order)(0.0)
    return D / ds ** order


def dft_derivative_matrix(n: int) -> np.ndarray:
    """Real matrix of the spectral t-derivative on n nodes of R/Z (Nyquist mode dropped)."""
    t = np.arange(n) / n
    D = np.zeros((n, n))
    for k in range(1, (n - 1) // 2 + 1):
        # sum over nodes of basis derivatives: d/dt of the k-th interpolant
        for j in range(n):
            D[:, j] += (2.0 / n) * (-2 * np.pi * k) * np.sin(2 * np.pi * k * (t - t[j]))
    return D


def weighted_norm_oracle(values: np.ndarray, s: np.ndarray, k: int, delta: float, center: float,
                         log_prefactor: float = 0.0) -> float:
    n_s, n_t = values.shape[0], values.shape[1]
    ds = s[1] - s[0]
    Dt = dft_derivative_matrix(n_t)
    expo = 2 * delta * np.abs(s - center) + log_prefactor
    top = expo.max()
    total = 0.0
    for i in range(k + 1):
        for j in range(k + 1 - i):
            D = np.einsum("ab,btd->atd", fd_matrix(n_s, ds, i), values) if i else values
            for _ in range(j):
                D = np.einsum("ab,sbd->sad", Dt, D)
            sq = (D ** 2).sum(axis=(1, 2)) / n_t
            trap = 0.0
            for a in range(n_s):
                wgt = 0.5 if a in (0, n_s - 1) else 1.0
                trap += wgt * ds * math.exp(expo[a] - top) * sq[a]
            total += trap
    return math.sqrt(total * math.exp(top)) if total > 0 else 0.0


def neck_norm_oracle(q_rem, q_const, s_q, p_rem, s_p, p_inf, R, k, delta, hat=False):
    """G (hat=False) or hat-G norm of (q, p).

    q = q_const + q_rem on Z_a, p = (1 - 2 beta_a) p_inf + p_rem on C_a.  For
    hat=True the arrays are full values and the constants are ignored.  The
    G form uses |[q]_a - p_inf|^2 + |q - [q]_a + p_inf|^2 + |p - p_inf profile|^2
    with q - [q]_a computed from the remainder to avoid cancellation.
    """
    if hat:
        nq = weighted_norm_oracle(q_rem, s_q, k, -delta, R / 2, delta * R)
        np_ = weighted_norm_oracle(p_rem, s_p, k, delta, R / 2, delta * R)
        return math.sqrt(nq ** 2 + np_ ** 2)
    mid = int(np.argmin(np.abs(s_q - R / 2)))
    mean_r = q_rem[mid].mean(axis=0)
    diff = np.asarray(q_const) + mean_r - np.asarray(p_inf)
    nq = weighted_norm_oracle(q_rem - mean_r + p_inf, s_q, k, -delta, R / 2, delta * R)
    np_ = weighted_norm_oracle(p_rem, s_p, k, delta, R / 2, delta * R)
    return math.sqrt(float(diff @ diff) + nq ** 2 + np_ ** 2)


def index_forms(two_n: int, g: int, k: int, c1: int) -> tuple[int, int]:
    n = two_n // 2
    return 2 * c1 + (2 * n - 6) * (1 - g) + 2 * k, 2 * n * (1 - g) + 2 * c1 + 6 * g - 6 + 2 * k


def exp_weight_integral(lam: float, delta: float) -> float:
    """int_0^inf exp(-2 lam s) exp(2 delta s) ds for lam > delta."""
    return 1.0 / (2.0 * (lam - delta))
