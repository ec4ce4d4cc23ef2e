import math

import numpy as np
import pytest

from gwsplice.cylinders import (
    CylinderMap,
    Grid,
    GridError,
    MapPair,
    NeckMap,
    circle_mean,
    evaluate,
    lift_point,
    neck_norm_G,
    pair_norm_E,
    pair_norm_F,
    shift_t,
    weighted_norm,
    weighted_norm_array,
)
from gwsplice.oracles import exp_weight_integral, neck_norm_oracle, weighted_norm_oracle
from gwsplice.profiles import EXP, GluingParameter, ScScale
from gwsplice.sampling import constant_pair, exact_parameter, pair_grids, random_neck_data
from gwsplice.splice import SpliceContext


def _fn_map(grid, f, dim=1, const=None):
    S, T = np.meshgrid(grid.s, grid.t, indexing="ij")
    vals = np.repeat(f(S, T)[:, :, None], dim, axis=2)
    return CylinderMap(grid, vals, const)


def test_grid_invariants():
    with pytest.raises(GridError):
        Grid(0.0, 1.0, 3, 8)
    with pytest.raises(GridError):
        Grid(0.0, 1.0, 8, 3)
    with pytest.raises(GridError):
        Grid(1.0, 1.0, 8, 8)
    with pytest.raises(GridError):
        Grid.from_spacing(0.0, 1.0, 0.3, 8)
    g = Grid.from_spacing(-2.0, 0.0, 0.25, 8)
    assert g.n_s == 9 and g.ds == 0.25 and g.t[1] == 0.125


def test_map_invariants():
    g = Grid(0.0, 1.0, 5, 4)
    with pytest.raises(GridError):
        CylinderMap(g, np.zeros((4, 4, 1)))
    with pytest.raises(GridError):
        CylinderMap(g, np.full((5, 4, 1), np.nan))
    with pytest.raises(GridError):
        CylinderMap(g, np.zeros((5, 4, 2)), const=[1.0])


def test_pair_invariants():
    gp, gm = pair_grids(3.0, 0.5, 8)
    z = np.zeros((gp.n_s, 8, 2))
    with pytest.raises(GridError):
        MapPair(CylinderMap(gp, z, [1.0, 0.0]), CylinderMap(gm, z, [1.0, 1e-15]), "E")
    with pytest.raises(GridError):
        MapPair(CylinderMap(gp, z, [1.0, 0.0]), CylinderMap(gm, z, [1.0, 0.0]), "F")
    with pytest.raises(ValueError):
        MapPair(CylinderMap(gp, z), CylinderMap(gm, z), "X")


def test_weighted_norm_zero_map():
    g = Grid.from_spacing(0.0, 5.0, 0.25, 8)
    assert weighted_norm(CylinderMap(g, np.zeros((g.n_s, 8, 2))), 3, 1.0) == 0.0


def test_weighted_norm_decaying_exponential():
    g = Grid(0.0, 20.0, 256, 8)
    u = _fn_map(g, lambda s, t: np.exp(-s))
    assert abs(weighted_norm(u, 0, 0.5) - 1.0) <= 1e-3


def test_weighted_norm_ignores_constant():
    g = Grid.from_spacing(0.0, 5.0, 0.25, 8)
    u = CylinderMap(g, np.zeros((g.n_s, 8, 2)), const=[3.0, -1.0])
    assert weighted_norm(u, 2, 1.0) == 0.0


def test_weighted_norm_order_too_large():
    g = Grid(0.0, 1.0, 6, 8)
    u = CylinderMap(g, np.ones((6, 8, 1)))
    with pytest.raises(GridError):
        weighted_norm(u, 4, 0.5)
    with pytest.raises(GridError):
        weighted_norm(u, -1, 0.5)


def test_weighted_norm_matches_direct_summation(rng):
    g = Grid.from_spacing(-3.0, 4.0, 0.25, 8)
    vals = rng.normal(size=(g.n_s, 8, 2)) * np.exp(-np.abs(g.s))[:, None, None]
    for k, d, c in [(0, 0.5, 0.0), (2, 1.0, 0.5), (3, -0.7, 0.5)]:
        got = weighted_norm_array(vals, g, k, d, c)
        ref = weighted_norm_oracle(vals, g.s, k, d, c)
        assert got == pytest.approx(ref, rel=1e-10)


def test_pair_norm_E_constant_and_zero():
    sc = ScScale()
    h = constant_pair(4.0, 0.25, 8, [3.0, 4.0])
    assert pair_norm_E(h, 0, sc) == pytest.approx(5.0, rel=1e-15)
    assert pair_norm_E(constant_pair(4.0, 0.25, 8, [0.0, 0.0]), 1, sc) == 0.0


def test_pair_norm_E_decaying_exponential():
    # four s-derivatives of e^{-s} (orders 0..3), each contributing 1 / (2 (1 - delta))
    delta = 0.1
    sc = ScScale(deltas=(delta,))
    gp, gm = pair_grids(20.0, 20.0 / 1023, 8)
    plus = _fn_map(gp, lambda s, t: np.exp(-s))
    minus = CylinderMap(gm, np.zeros((gm.n_s, 8, 1)))
    h = MapPair(plus, minus, "F")
    ref = math.sqrt(4 * exp_weight_integral(1.0, delta))
    assert abs(pair_norm_F(h, 0, ScScale(deltas=(delta,), f_offset=3)) - ref) <= 1e-3
    hE = MapPair(CylinderMap(gp, plus.remainder, [0.0]), CylinderMap(gm, minus.remainder, [0.0]), "E")
    assert abs(pair_norm_E(hE, 0, sc) - ref) <= 1e-3


def _neck_case(rng, R=8.0, ds=0.25, n_t=8):
    a = exact_parameter(R, ds, n_t, 2)
    ctx = SpliceContext(a)
    return ctx, random_neck_data(rng, ctx, ctx.length + 4.0, ds, n_t)


def test_neck_norm_trivial_cases(rng):
    ctx, (q, p) = _neck_case(rng)
    sc = ScScale()
    zq = NeckMap(CylinderMap(q.grid, np.zeros_like(q.cyl.remainder)), q.length, q.twist, "Z")
    zp = NeckMap(CylinderMap(p.grid, np.zeros_like(p.cyl.remainder)), p.length, p.twist, "C")
    assert neck_norm_G(zq, zp, 0, sc) == 0.0
    assert neck_norm_G(zq, zp, 0, sc, hat=True) == 0.0
    kq = NeckMap(CylinderMap(q.grid, np.zeros_like(q.cyl.remainder), [1.0, -2.0]), q.length, q.twist, "Z")
    assert neck_norm_G(kq, zp, 0, sc) == pytest.approx(math.sqrt(5.0), rel=1e-15)


def test_neck_norm_matches_oracle(rng):
    sc = ScScale()
    for _ in range(3):
        ctx, (q, p) = _neck_case(rng)
        R = ctx.length
        for m in (0, 1):
            k, d = sc.f_order(m), sc.delta(m)
            got = neck_norm_G(q, p, m, sc)
            ref = neck_norm_oracle(q.cyl.remainder, q.cyl.const, q.grid.s, p.cyl.remainder, p.grid.s,
                                   p.cyl.const, R, k, d)
            assert got == pytest.approx(ref, rel=1e-10)
            got = neck_norm_G(q, p, m, sc, hat=True)
            ref = neck_norm_oracle(q.values, None, q.grid.s, p.values, p.grid.s, None, R, k, d, hat=True)
            assert got == pytest.approx(ref, rel=1e-10)


def test_neck_norm_rejects_mismatched_parameters(rng):
    ctx, (q, p) = _neck_case(rng)
    other = NeckMap(p.cyl, p.length, (p.twist + 0.125) % 1.0, "C")
    with pytest.raises(GridError):
        neck_norm_G(q, other, 0, ScScale())
    with pytest.raises(GridError):
        neck_norm_G(p, q, 0, ScScale())


def test_circle_mean_examples():
    g = Grid.from_spacing(0.0, 4.0, 0.5, 4)
    assert np.allclose(circle_mean(CylinderMap(g, np.zeros((g.n_s, 4, 2)), [2.0, 3.0]), 1.0), [2.0, 3.0])
    assert np.all(np.abs(circle_mean(_fn_map(g, lambda s, t: np.sin(2 * np.pi * t)), 2.5)) <= 1e-16)
    lin = _fn_map(Grid.from_spacing(0.0, 4.0, 0.5, 8), lambda s, t: s)
    assert circle_mean(lin, 1.5)[0] == pytest.approx(1.5, abs=1e-15)
    assert circle_mean(lin, 1.25)[0] == pytest.approx(1.25, abs=1e-12)
    with pytest.raises(GridError):
        circle_mean(lin, 4.5)


def test_evaluate_examples(rng):
    g = Grid.from_spacing(0.0, 4.0, 0.5, 16)
    vals = rng.normal(size=(g.n_s, 16, 2))
    u = CylinderMap(g, vals)
    assert np.array_equal(evaluate(u, 1.5, 3 / 16), vals[3, 3])
    assert np.array_equal(evaluate(u, 1.5, 1 + 3 / 16), vals[3, 3])
    c = CylinderMap(g, np.zeros((g.n_s, 16, 2)), [1.0, -1.0])
    assert np.allclose(evaluate(c, 2.3, 0.377), [1.0, -1.0], atol=1e-14)
    cosine = _fn_map(g, lambda s, t: np.cos(2 * np.pi * t))
    for t in (0.01, 0.377, 0.9):
        assert abs(evaluate(cosine, 0.7, t)[0] - math.cos(2 * math.pi * t)) <= 1e-12
    with pytest.raises(GridError):
        evaluate(u, -0.1, 0.0)


def test_shift_t_exact_and_interpolated():
    g = Grid.from_spacing(0.0, 1.0, 0.25, 16)
    u = _fn_map(g, lambda s, t: np.sin(2 * np.pi * t) + 0.5 * np.cos(6 * np.pi * t))
    for shift in (0.25, 0.1234):
        expect = _fn_map(g, lambda s, t: np.sin(2 * np.pi * (t - shift)) + 0.5 * np.cos(6 * np.pi * (t - shift)))
        assert np.allclose(shift_t(u.values, shift), expect.values, atol=1e-13)


def test_lift_point_examples():
    a = exact_parameter(6.0, 0.5, 4, 1)
    R = a.length(EXP)
    lp = lift_point(a, R, 0.3, 1.0)
    assert lp.plus == (R, 0.3) and lp.minus[0] == 0.0 and lp.minus[1] == pytest.approx(0.05)
    lp = lift_point(a, 0.0, 0.3, 1.0)
    assert lp.minus[0] == -R and not lp.interior
    lp = lift_point(a, R / 2, 0.0, 1.0)
    assert lp.plus == (R / 2, 0.0) and lp.minus == (-R / 2, 0.75) and lp.interior
    with pytest.raises(GridError):
        lift_point(a, R + 1.0, 0.0, 1.0)
    with pytest.raises(GridError):
        lift_point(GluingParameter.zero(), 0.0, 0.0, 1.0)


def _random_half(rng, g, dim=1, rate=1.5):
    s, t = g.s[:, None, None], g.t[None, :, None]
    out = np.zeros((g.n_s, g.n_t, dim))
    for k in range(3):
        amp = rng.normal(size=(2, dim))
        out += np.exp(-rng.uniform(rate, rate + 1) * s) * (amp[0] * np.cos(2 * np.pi * k * t)
                                                           + amp[1] * np.sin(2 * np.pi * k * t))
    return out


def test_norm_monotone_in_order_and_weight(rng):
    g = Grid.from_spacing(0.0, 10.0, 0.125, 8)
    for _ in range(20):
        arr = _random_half(rng, g)
        ks = [weighted_norm_array(arr, g, k, 0.5) for k in range(4)]
        ds_ = [weighted_norm_array(arr, g, 2, d) for d in (0.0, 0.3, 0.6, 1.0)]
        assert all(b >= a for a, b in zip(ks, ks[1:]))
        assert all(b >= a for a, b in zip(ds_, ds_[1:]))


def test_banach_algebra_ratio_bounded(rng):
    g = Grid.from_spacing(0.0, 8.0, 0.125, 8)
    m, k, delta, sigma = 3, 2, 1.0, 0.5
    ratios = []
    for _ in range(100):
        f, h = _random_half(rng, g), _random_half(rng, g)
        num = weighted_norm_array(f * h, g, k, delta)
        den = weighted_norm_array(f, g, m, delta) * weighted_norm_array(h, g, k, sigma)
        ratios.append(num / den)
    assert max(ratios) < 5.0


def test_banach_module_ratio_bounded(rng):
    ratios = []
    delta, k, m = 1.0, 2, 3
    for R in (4.0, 8.0, 12.0, 16.0):
        g = Grid.from_spacing(0.0, R, 0.125, 8)
        s = g.s[:, None, None]
        for _ in range(5):
            q = _random_half(rng, g, rate=0.0) * np.exp(rng.uniform(-1, 1) * (s - R / 2))
            p = _random_half(rng, g, rate=0.0) * np.exp(rng.uniform(-1, 1) * (s - R / 2))
            num = weighted_norm_array(q * p, g, k, -delta, R / 2)
            den = (math.exp(delta * R / 2) * weighted_norm_array(q, g, m, -delta, R / 2)
                   * weighted_norm_array(p, g, k, -delta, R / 2))
            ratios.append(num / den)
    assert max(ratios) < 5.0


def test_quadrature_converges_quadratically():
    errs = []
    for n in (101, 201, 401):
        g = Grid(0.0, 20.0, n, 8)
        u = _fn_map(g, lambda s, t: np.exp(-s))
        errs.append(abs(weighted_norm(u, 1, 0.5) - math.sqrt(2.0)))
    assert errs[0] / errs[1] >= 3.5 and errs[1] / errs[2] >= 3.5
