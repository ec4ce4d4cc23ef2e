import math
from functools import lru_cache

import pytest

from gwsplice.estimates import SweepSpec, envelopes, run_sweep, spread

# stand-ins for |a| = 2^-j: R_exp(2^-j) exceeds any grid for j >= 3
LENGTHS = (5.0, 10.0, 20.0, 40.0)


@lru_cache(maxsize=None)
def _sweep(kind, sample="decay", n_samples=20):
    return run_sweep(SweepSpec(lengths=LENGTHS, kind=kind, sample=sample, n_samples=n_samples), jobs=2)


def _level_spread(rows, m):
    ratios = [r.ratio for r in rows if r.level == m]
    return max(ratios) / min(ratios)


@pytest.mark.parametrize("kind", ["ds", "dt"])
@pytest.mark.parametrize("m", [
    0,
    pytest.param(1, marks=pytest.mark.xfail(
        strict=True,
        reason="measured spread 10.8-11.5: at R=5 the decaying samples still reach the neck "
               "(ratio up to 10.7), at R>=20 they do not (ratio ~1); converged in ds, see decisions ledger")),
])
def test_d_transfer_spread_below_ten(kind, m):
    assert _level_spread(_sweep(kind), m) <= 10.0


@pytest.mark.parametrize("kind", ["ds", "dt", "cs", "ct"])
def test_transfer_upper_envelope_bounded_and_not_growing(kind):
    for env in envelopes(_sweep(kind)):
        assert all(math.isfinite(u) for u in env.upper)
        assert max(env.upper) <= 20.0
        # largest ratio is at the shortest neck; no growth as R increases
        assert all(u <= 1.05 * env.upper[0] for u in env.upper)


@pytest.mark.parametrize("kind", ["cs", "ct"])
def test_c_transfer_uniform_on_neck_samples(kind):
    rows = _sweep(kind, "neck", 10)
    for m in (0, 1):
        assert _level_spread(rows, m) <= 10.0


@pytest.mark.parametrize("kind", ["cs", "ct"])
def test_c_transfer_has_no_lower_bound_on_decaying_samples(kind):
    # only an upper bound is a-uniform: decaying data never reaches long necks
    env = envelopes(_sweep(kind))[0]
    assert env.lower[-1] < 1e-3 * env.lower[0]


@pytest.mark.parametrize("kind", ["hat", "plain"])
def test_total_gluing_ratios_bounded(kind):
    rows = _sweep(kind, n_samples=8)
    assert spread(rows) <= 10.0
    for env in envelopes(rows):
        rising = all(b > a for a, b in zip(env.upper, env.upper[1:]))
        assert not rising


def test_sweep_is_independent_of_jobs():
    spec = SweepSpec(lengths=(5.0, 10.0), levels=(0,), n_samples=2, n_t=8, kind="dt")
    one = [(r.length, r.ratio) for r in run_sweep(spec, jobs=1)]
    two = [(r.length, r.ratio) for r in run_sweep(spec, jobs=2)]
    assert one == two


@pytest.mark.parametrize("kwargs", [
    dict(kind="nope"), dict(sample="nope"), dict(lengths=()), dict(deltas=(7.0,)), dict(n_samples=0),
])
def test_sweep_spec_validation(kwargs):
    with pytest.raises(ValueError):
        SweepSpec(**kwargs)


def test_spread_of_empty_sweep():
    with pytest.raises(ValueError):
        spread([])
