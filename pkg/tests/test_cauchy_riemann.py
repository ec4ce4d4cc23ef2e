import math

import numpy as np
import pytest
import sympy as sp

from gwsplice import oracles
from gwsplice.acceptance import perturbed_embedding
from gwsplice.cauchy_riemann import (
    ComplexStructureField,
    CRError,
    CRProblem,
    DiskMap,
    complement_projector,
    contraction_modulus,
    cr_apply,
    cr_pointwise,
    dbar0,
    filled_section,
    fredholm_index,
    kernel_diagnostic,
    linear_cr_solve,
    standard_j,
    transversal_constraint,
)
from gwsplice.cylinders import CylinderMap, Grid, MapPair
from gwsplice.profiles import GluingParameter
from gwsplice.sampling import antipodal_sample, constant_pair, exact_parameter, pair_grids, pair_length, random_pair
from gwsplice.splice import SpliceContext, hat_minus_glue, project

J0 = standard_j(2)


def _map(grid, f):
    S, T = np.meshgrid(grid.s, grid.t, indexing="ij")
    return CylinderMap(grid, np.stack(f(S, T), axis=-1))


def test_complex_structure_defect(rng):
    pts = rng.normal(size=(200, 4))
    assert ComplexStructureField.standard(4).defect(pts) <= 1e-10
    assert ComplexStructureField.conjugated(4, 0.3, seed=2).defect(pts) <= 1e-10
    with pytest.raises(CRError):
        standard_j(3)


def test_dbar0_examples():
    g = Grid(-1.0, 0.0, 401, 32)
    const = CylinderMap(g, np.zeros((g.n_s, 32, 2)), [1.0, 2.0])
    assert np.abs(dbar0(const, J0).values).max() == 0.0
    holo = _map(g, lambda s, t: (np.exp(2 * np.pi * s) * np.cos(2 * np.pi * t),
                                 np.exp(2 * np.pi * s) * np.sin(2 * np.pi * t)))
    assert np.abs(dbar0(holo, J0).values).max() <= 1e-3
    lin = _map(g, lambda s, t: (s, 0 * s))
    assert np.abs(dbar0(lin, J0).values - [1.0, 0.0]).max() <= 1e-12


def test_cr_pointwise_linear_example():
    # u = (s, -t) is not periodic in t, so the example is checked on its exact derivatives
    vals = np.zeros((3, 4, 2))
    du_s = np.broadcast_to([1.0, 0.0], vals.shape)
    du_t = np.broadcast_to([0.0, -1.0], vals.shape)
    out = cr_pointwise(vals, du_s, du_t, ComplexStructureField.standard(2))
    assert np.abs(out - [1.0, 0.0]).max() == 0.0


def test_cr_apply_constant_j_on_holomorphic_map():
    g = Grid(-1.0, 0.0, 401, 32)
    holo = _map(g, lambda s, t: (np.exp(2 * np.pi * s) * np.cos(2 * np.pi * t),
                                 np.exp(2 * np.pi * s) * np.sin(2 * np.pi * t)))
    assert np.abs(cr_apply(holo, ComplexStructureField.standard(2)).values).max() <= 1e-3


def _scaled_field(eps=0.3):
    """J(p) = A J0 A^{-1} with A = diag(1 + eps rho(p), 1), rho = sin(x) cos(y)."""

    def fn(p):
        lam = 1.0 + eps * np.sin(p[..., 0]) * np.cos(p[..., 1])
        out = np.zeros(p.shape[:-1] + (2, 2))
        out[..., 0, 1] = -lam
        out[..., 1, 0] = 1.0 / lam
        return out

    return ComplexStructureField(2, fn)


def _sympy_reference(grid, eps=0.3):
    s, t = sp.symbols("s t", real=True)
    u = sp.Matrix([sp.exp(-s) * sp.cos(2 * sp.pi * t) + s / 3, sp.sin(2 * sp.pi * t) * sp.exp(-s / 2)])
    lam = 1 + eps * sp.sin(u[0]) * sp.cos(u[1])
    J = sp.Matrix([[0, -lam], [1 / lam, 0]])
    expr = (u.diff(s) + J * u.diff(t)) / 2
    f_u = sp.lambdify((s, t), list(u), "numpy")
    f_cr = sp.lambdify((s, t), list(expr), "numpy")
    S, T = np.meshgrid(grid.s, grid.t, indexing="ij")
    vals = np.stack([np.broadcast_to(x, S.shape) for x in f_u(S, T)], axis=-1)
    ref = np.stack([np.broadcast_to(x, S.shape) for x in f_cr(S, T)], axis=-1)
    return CylinderMap(grid, vals), ref


def test_cr_apply_matches_symbolic_oracle():
    g = Grid(0.0, 2.0, 161, 32)
    u, ref = _sympy_reference(g)
    assert np.abs(cr_apply(u, _scaled_field()).values - ref).max() <= 1e-3


def test_cr_apply_converges_quadratically_in_ds():
    errs = []
    for n in (41, 81, 161):
        g = Grid(0.0, 2.0, n, 32)
        u, ref = _sympy_reference(g)
        errs.append(np.abs(cr_apply(u, _scaled_field()).values - ref).max())
    assert errs[0] / errs[1] >= 3.0 and errs[1] / errs[2] >= 3.0


def _holomorphic_pair(S, ds, n_t, c):
    gp, gm = pair_grids(S, ds, n_t)

    def half(g, sign):
        S_, T = np.meshgrid(g.s, g.t, indexing="ij")
        e = np.exp(-sign * 2 * np.pi * S_)
        return np.stack([e * np.cos(2 * np.pi * T), -sign * e * np.sin(2 * np.pi * T)], axis=-1)

    c = np.asarray(c, dtype=float)
    return MapPair(CylinderMap(gp, half(gp, 1), c), CylinderMap(gm, half(gm, -1), c), "E")


def test_filled_section_vanishes_on_holomorphic_data_at_zero():
    ctx = SpliceContext(GluingParameter.zero())
    u = constant_pair(3.0, 0.0025, 32, [0.1, 0.2])
    h = _holomorphic_pair(3.0, 0.0025, 32, [0.1, 0.2])
    xi = filled_section(ctx, u, h, ComplexStructureField.standard(2))
    assert max(np.abs(xi.plus.values).max(), np.abs(xi.minus.values).max()) <= 1e-3


def test_filled_section_core_and_assembly(rng):
    ds, n_t = 0.25, 16
    ctx = SpliceContext(exact_parameter(8.0, ds, n_t, 3))
    S = pair_length(ctx.length, ds)
    J = ComplexStructureField.conjugated(2, 0.3, seed=4)
    u = random_pair(rng, S, ds, n_t, 2, "E", const_scale=0.3)
    h0 = random_pair(rng, S, ds, n_t, 2, "E")
    h = MapPair(CylinderMap(h0.plus.grid, h0.plus.remainder, u.const),
                CylinderMap(h0.minus.grid, h0.minus.remainder, u.const), "E")
    xi = filled_section(ctx, u, h, J)
    lay = oracles.ExactLayout(S, ctx.length, ctx.twist, ds, n_t)
    xp, xm = oracles.filled_section_oracle(u.plus.values, u.minus.values, h.plus.values, h.minus.values,
                                           u.const, h.const, lay, J)
    assert np.abs(xi.plus.values - xp).max() <= 1e-10 and np.abs(xi.minus.values - xm).max() <= 1e-10
    xc = filled_section(ctx, u, project(ctx, h), J)
    assert np.abs(hat_minus_glue(ctx, xc).values).max() <= 1e-12 * max(1.0, np.abs(xc.plus.values).max())


def test_linear_solve_zero_and_manufactured(rng):
    prob = CRProblem(10.0, math.pi, 2, 64, 32)
    z = linear_cr_solve(prob, np.zeros((64, 32, 2)))
    assert np.abs(z.solution.values).max() == 0.0 and z.sigma_min > 0
    u = antipodal_sample(rng, prob.grid, prob.profile(prob.grid.s), 2, center=5.0)
    res = linear_cr_solve(prob, dbar0(u, prob.J0))
    assert np.abs(res.solution.values - u.values).max() <= 1e-3 * max(1.0, np.abs(u.values).max())
    assert np.abs(res.const - u.const).max() <= 1e-3


@pytest.mark.parametrize("delta", [math.pi / 2, math.pi, 1.5 * math.pi])
@pytest.mark.parametrize("R", [5.0, 10.0, 20.0])
def test_linear_solve_injective(delta, R):
    n_s = int(round((R + 8.0) / 0.25)) + 1
    prob = CRProblem(R, delta, 2, n_s, 16)
    z = linear_cr_solve(prob, np.zeros((n_s, 16, 2)))
    assert np.abs(z.solution.values).max() == 0.0
    assert z.sigma_min > 1e-6


def test_linear_solve_condition_degrades_towards_two_pi():
    n_s = int(round(13.0 / 0.05)) + 1
    sig = [linear_cr_solve(CRProblem(5.0, d, 2, n_s, 8), np.zeros((n_s, 8, 2))).sigma_min
           for d in (math.pi / 2, math.pi, 1.5 * math.pi, 1.9 * math.pi)]
    assert all(b < a for a, b in zip(sig, sig[1:]))


def test_linear_solve_errors():
    with pytest.raises(CRError):
        linear_cr_solve(CRProblem(5.0, 1.5 * math.pi, 2, 14, 8), np.zeros((14, 8, 2)))
    with pytest.raises(CRError):
        linear_cr_solve(CRProblem(5.0, math.pi, 2, 64, 32), np.zeros((64, 16, 2)))
    with pytest.raises(CRError):
        CRProblem(5.0, math.pi, 3)
    with pytest.raises(CRError):
        CRProblem(1.0)


@pytest.mark.parametrize("two_n", [2, 4])
@pytest.mark.parametrize("R,delta,ds", [(5.0, math.pi / 2, 0.5), (10.0, math.pi, 0.5), (5.0, 1.5 * math.pi, 0.25)])
def test_kernel_has_dimension_two_n(two_n, R, delta, ds):
    rep = kernel_diagnostic(R, delta, two_n, ds=ds, n_t=16)
    assert rep.near_zero == two_n
    gap = rep.singular_values[::-1][two_n]
    assert gap >= 1e3 * rep.threshold


def test_kernel_mean_zero_floor_is_stable():
    mins = [kernel_diagnostic(R, math.pi, 2, ds=0.5, n_t=16).mean_zero_min for R in (5.0, 10.0, 20.0)]
    assert max(mins) / min(mins) <= 1.2 and min(mins) > 0.1


def test_kernel_budget():
    with pytest.raises(CRError):
        kernel_diagnostic(40.0, math.pi, 2, ds=0.25, n_t=32)


@pytest.mark.parametrize("args,expected", [((6, 0, 3, 0), 6), ((4, 1, 1, 2), 6)])
def test_index_examples(args, expected):
    assert fredholm_index(*args) == expected


def test_index_forms_agree(rng):
    for _ in range(1000):
        two_n = 2 * int(rng.integers(1, 20))
        g, k, c1 = int(rng.integers(0, 30)), int(rng.integers(0, 30)), int(rng.integers(-50, 50))
        first, second = oracles.index_forms(two_n, g, k, c1)
        assert first == second == fredholm_index(two_n, g, k, c1)


def test_index_errors():
    with pytest.raises(CRError):
        fredholm_index(5, 0, 0, 0)
    with pytest.raises(CRError):
        fredholm_index(4, -1, 0, 0)


def test_contraction_constant_j_and_skipped_pairs():
    ctx = SpliceContext(GluingParameter.zero())
    u = constant_pair(pair_length(0.0, 0.5), 0.5, 8, [0.2, -0.1])
    reps = contraction_modulus(ctx, u, ComplexStructureField.standard(2), radii=(0.1, 0.0), n_pairs=2)
    assert reps[0].modulus <= 1e-8 and reps[0].pairs_used == 2
    assert reps[1].pairs_used == 0 and reps[1].modulus == 0.0


def test_contraction_non_increasing_for_conjugated_j():
    ctx = SpliceContext(GluingParameter.zero())
    u = constant_pair(pair_length(0.0, 0.5), 0.5, 8, [0.2, -0.1])
    reps = contraction_modulus(ctx, u, ComplexStructureField.conjugated(2, 0.3, seed=1), n_pairs=2)
    mods = [r.modulus for r in reps]
    assert all(b <= a for a, b in zip(mods, mods[1:]))


def _plane(shift=(0.0, 0.0)):
    return DiskMap.from_function(lambda X, Y: np.stack([X + shift[0], Y + shift[1], 0 * X, 0 * X]))


H_STD = np.eye(4)[:, 2:]


def test_transversal_examples():
    assert np.abs(transversal_constraint(_plane(), H_STD)).max() <= 1e-12
    z = transversal_constraint(_plane((0.1, 0.0)), H_STD)
    assert np.abs(z - [-0.1, 0.0]).max() <= 1e-10


def test_transversal_matches_grid_oracle(rng):
    for _ in range(5):
        v, H = perturbed_embedding(rng)
        z = transversal_constraint(v, H)
        zo = oracles.constraint_grid_oracle(v, complement_projector(H, v.dim))
        assert np.abs(z - zo).max() <= 1e-6


def test_transversality_lost():
    flat = DiskMap.from_function(lambda X, Y: np.stack([0 * X + 1.0, 0 * X, 0 * X, 0 * X]))
    with pytest.raises(CRError):
        transversal_constraint(flat, H_STD)
    with pytest.raises(CRError):
        transversal_constraint(_plane((0.8, 0.0)), H_STD)
    with pytest.raises(CRError):
        transversal_constraint(_plane(), np.eye(4)[:, 1:])
