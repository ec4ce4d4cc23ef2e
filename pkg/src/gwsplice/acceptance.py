"""Acceptance suite: one function per criterion, each returning a CriterionResult.

``run_all(quick=False)`` runs everything; quick mode trims sample counts so
the whole suite stays well under a minute.  Thresholds live next to each
check and are reported with the measured value.
"""

from __future__ import annotations

import math
import time
from dataclasses import dataclass, field
from pathlib import Path

import mpmath
import numpy as np

from . import nodal_surface as ns
from . import oracles
from .cauchy_riemann import (
    ComplexStructureField,
    CRProblem,
    DiskMap,
    complement_projector,
    contraction_modulus,
    cr_apply,
    dbar0,
    filled_section,
    fredholm_index,
    kernel_diagnostic,
    linear_cr_solve,
    transversal_constraint,
)
from .cylinders import CylinderMap, MapPair
from .estimates import SweepSpec, envelopes, run_sweep, spread
from .profiles import EXP, LOG, GluingParameter, gluing_length, inverse_length, length_from_log_modulus, profile_convert
from .report import CheckRow, Report, Series, emit_plot_script, render_png, series_csv
from .sampling import (
    antipodal_sample,
    constant_pair,
    exact_parameter,
    pair_length,
    random_neck_data,
    random_pair,
    snap_length,
)
from .splice import (
    SpliceContext,
    hat_minus_glue,
    hat_plus_glue,
    hat_project,
    hat_total_glue,
    hat_total_unglue,
    minus_glue,
    plus_glue,
    project,
    total_glue,
    total_unglue,
)

# stand-ins for |a| = 2^-j when e^{2^j} - e is too long for any grid
SUBSTITUTE_LENGTHS = (8.0, 12.0, 16.0, 20.0, 28.0, 40.0)
MAX_GRID_LENGTH = 60.0


@dataclass
class CriterionResult:
    number: int
    title: str
    passed: bool
    seconds: float
    budget: float
    checks: list[CheckRow] = field(default_factory=list)
    notes: list[str] = field(default_factory=list)

    @property
    def within_budget(self) -> bool:
        return self.seconds <= self.budget

    def line(self) -> str:
        status = "PASS" if self.passed else "FAIL"
        worst = ", ".join(f"{c.name}={c.value:.3g} (<= {c.threshold:.3g})" if c.threshold else f"{c.name}={c.value:.3g}"
                          for c in self.checks[:4])
        more = f" +{len(self.checks) - 4} more" if len(self.checks) > 4 else ""
        return (f"{status} [{self.number}] {self.title}: {worst}{more}; "
                f"{self.seconds:.2f}s / {self.budget:.0f}s")


def _timed(number, title, budget, body):
    t0 = time.perf_counter()
    checks, notes = body()
    dt = time.perf_counter() - t0
    ok = all(c.passed for c in checks) and dt <= budget
    return CriterionResult(number, title, ok, dt, budget, checks, notes)


def _row(name, value, threshold, passed=None, note=""):
    value = float(value)
    if passed is None:
        passed = value <= threshold
    return CheckRow(name, value, float(threshold), bool(passed), note)


def _rel(a: np.ndarray, b: np.ndarray) -> float:
    """sup |a - b| relative to max(1, sup |b|)."""
    return float(np.abs(a - b).max() / max(1.0, np.abs(b).max()))


def a_ladder(j_values, ds: float):
    """(j, true R, R used) for |a| = 2^-j; infeasible lengths take substitutes in order."""
    out, subs = [], iter(SUBSTITUTE_LENGTHS)
    for j in j_values:
        R_true = gluing_length(EXP, 2.0 ** (-j))
        if R_true <= MAX_GRID_LENGTH:
            out.append((j, R_true, snap_length(R_true, ds)))
        else:
            out.append((j, R_true, next(subs)))
    return out


def _ladder_notes(ladder) -> list[str]:
    notes = []
    for j, R_true, R_used in ladder:
        if R_true > MAX_GRID_LENGTH:
            notes.append(f"|a|=2^-{j}: R={R_true:.4g} infeasible, substituted R={R_used:g}")
        else:
            notes.append(f"|a|=2^-{j}: R={R_true:.4g} snapped to {R_used:g}")
    return notes


# --- 1 ----------------------------------------------------------------------

def criterion_1(quick: bool = False) -> CriterionResult:
    n = 100 if quick else 500

    def body():
        rng = np.random.default_rng(1)
        genus_bad = idem_bad = unstable = order_bad = 0
        for _ in range(n):
            S = ns.random_connected_surface(rng, max_components=8)
            T = ns.stabilize(S)
            genus_bad += ns.arithmetic_genus(T) != ns.arithmetic_genus(S)
            idem_bad += ns.canonical_form(ns.stabilize(T)) != ns.canonical_form(T)
            unstable += not ns.is_stable(T)
            ref = ns.canonical_form(T)
            ids = [c.id for c in S.components]
            for _ in range(5):
                order = list(rng.permutation(ids))
                order_bad += ns.canonical_form(ns.stabilize(S, order)) != ref
        return [
            _row("genus changed", genus_bad, 0),
            _row("not idempotent", idem_bad, 0),
            _row("unstable output", unstable, 0),
            _row("order-dependent", order_bad, 0),
        ], [f"{n} random surfaces, 5 weeding orders each"]

    return _timed(1, "genus/stabilization suite", 5.0, body)


# --- 2 ----------------------------------------------------------------------

def criterion_2(quick: bool = False) -> CriterionResult:
    def body():
        worst = mpmath.mpf(0)
        for j in range(1, 21):
            r = mpmath.mpf(2) ** (-j)
            a = GluingParameter(mpmath.log(r), 0.25)
            lhs = length_from_log_modulus(LOG, profile_convert(a).log_modulus)
            rhs = length_from_log_modulus(EXP, a.log_modulus)
            worst = max(worst, abs(lhs - rhs) / abs(rhs))
        return [_row("max relative error", float(worst), 1e-10)], []

    return _timed(2, "profile conversion", 1.0, body)


# --- 3, 4, 5: splice identities in the exactness tier ---------------------

SPLICE_DS = 0.125
SPLICE_NT = 16


def _splice_cases(quick: bool):
    n_pairs = 10 if quick else 50
    ladder = a_ladder(range(1, 9), SPLICE_DS)
    return n_pairs, ladder


def _exact_ctx(R: float, twist_index: int):
    a = exact_parameter(R, SPLICE_DS, SPLICE_NT, twist_index, EXP)
    ctx = SpliceContext(a)
    return ctx, pair_length(ctx.length, SPLICE_DS)


def criterion_3(quick: bool = False) -> CriterionResult:
    n_pairs, ladder = _splice_cases(quick)

    def body():
        rng = np.random.default_rng(3)
        err = {"glue->unglue": 0.0, "unglue->glue": 0.0, "hat glue->unglue": 0.0, "hat unglue->glue": 0.0}
        for idx, (_, _, R) in enumerate(ladder):
            ctx, S = _exact_ctx(R, idx + 1)
            for _ in range(n_pairs):
                h = random_pair(rng, S, SPLICE_DS, SPLICE_NT, 2, "E")
                q, p = total_glue(ctx, h)
                back = total_unglue(ctx, q, p, plus_grid=h.plus.grid)
                err["glue->unglue"] = max(err["glue->unglue"], _rel(back.plus.values, h.plus.values),
                                          _rel(back.minus.values, h.minus.values))
                v, w = random_neck_data(rng, ctx, S, SPLICE_DS, SPLICE_NT, 2)
                q2, p2 = total_glue(ctx, total_unglue(ctx, v, w))
                err["unglue->glue"] = max(err["unglue->glue"], _rel(q2.values, v.values), _rel(p2.values, w.values))
                xi = random_pair(rng, S, SPLICE_DS, SPLICE_NT, 2, "F")
                qh, ph = hat_total_glue(ctx, xi)
                backh = hat_total_unglue(ctx, qh, ph, plus_grid=xi.plus.grid)
                err["hat glue->unglue"] = max(err["hat glue->unglue"], _rel(backh.plus.values, xi.plus.values),
                                              _rel(backh.minus.values, xi.minus.values))
                vh, wh = random_neck_data(rng, ctx, S, SPLICE_DS, SPLICE_NT, 2, hat=True)
                q3, p3 = hat_total_glue(ctx, hat_total_unglue(ctx, vh, wh))
                err["hat unglue->glue"] = max(err["hat unglue->glue"], _rel(q3.values, vh.values),
                                              _rel(p3.values, wh.values))
        return [_row(k, v, 1e-10) for k, v in err.items()], _ladder_notes(ladder)

    return _timed(3, "total-gluing round trips", 10.0, body)


def criterion_4(quick: bool = False) -> CriterionResult:
    n_pairs, ladder = _splice_cases(quick)

    def body():
        rng = np.random.default_rng(4)
        err = {"pi idempotence": 0.0, "hat-pi idempotence": 0.0, "range identity": 0.0,
               "kernel identity": 0.0, "hat range identity": 0.0, "hat kernel identity": 0.0}
        for idx, (_, _, R) in enumerate(ladder):
            ctx, S = _exact_ctx(R, idx + 1)
            for _ in range(n_pairs):
                h = random_pair(rng, S, SPLICE_DS, SPLICE_NT, 2, "E")
                ph = project(ctx, h)
                pph = project(ctx, ph)
                err["pi idempotence"] = max(err["pi idempotence"], _rel(pph.plus.values, ph.plus.values),
                                            _rel(pph.minus.values, ph.minus.values))
                err["range identity"] = max(err["range identity"],
                                            _rel(plus_glue(ctx, ph).values, plus_glue(ctx, h).values))
                scale_h = max(1.0, np.abs(h.plus.values).max(), np.abs(h.minus.values).max())
                err["kernel identity"] = max(err["kernel identity"],
                                             float(np.abs(minus_glue(ctx, ph).values).max()) / scale_h)
                xi = random_pair(rng, S, SPLICE_DS, SPLICE_NT, 2, "F")
                px = hat_project(ctx, xi)
                ppx = hat_project(ctx, px)
                err["hat-pi idempotence"] = max(err["hat-pi idempotence"], _rel(ppx.plus.values, px.plus.values),
                                                _rel(ppx.minus.values, px.minus.values))
                err["hat range identity"] = max(err["hat range identity"],
                                                _rel(hat_plus_glue(ctx, px).values, hat_plus_glue(ctx, xi).values))
                scale_x = max(1.0, np.abs(xi.plus.values).max(), np.abs(xi.minus.values).max())
                err["hat kernel identity"] = max(err["hat kernel identity"],
                                                 float(np.abs(hat_minus_glue(ctx, px).values).max()) / scale_x)
        return [_row(k, v, 1e-10) for k, v in err.items()], ["a-ladder as in [3]"]

    return _timed(4, "projection identities", 20.0, body)


def criterion_5(quick: bool = False) -> CriterionResult:
    n_pairs, ladder = _splice_cases(quick)

    def body():
        rng = np.random.default_rng(3)
        err = {"pi closed form vs 2x2 oracle": 0.0, "hat-pi closed form vs 2x2 oracle": 0.0}
        for idx, (_, _, R) in enumerate(ladder):
            ctx, S = _exact_ctx(R, idx + 1)
            lay = oracles.ExactLayout(S, ctx.length, ctx.twist, SPLICE_DS, SPLICE_NT)
            n_w = lay.N - (lay.K - lay.N) + 1
            for _ in range(n_pairs):
                h = random_pair(rng, S, SPLICE_DS, SPLICE_NT, 2, "E")
                v, _, _ = oracles.glue_oracle(h.plus.values, h.minus.values, h.const, lay)
                zero_w = np.zeros((n_w, SPLICE_NT, 2))
                op, om = oracles.unglue_oracle(v, zero_w, lay, hat=False)
                ph = project(ctx, h)
                err["pi closed form vs 2x2 oracle"] = max(err["pi closed form vs 2x2 oracle"],
                                                          _rel(ph.plus.values, op), _rel(ph.minus.values, om))
                xi = random_pair(rng, S, SPLICE_DS, SPLICE_NT, 2, "F")
                vh, _ = oracles.hat_glue_oracle(xi.plus.values, xi.minus.values, lay)
                xp, xm = oracles.unglue_oracle(vh, zero_w, lay, hat=True)
                px = hat_project(ctx, xi)
                err["hat-pi closed form vs 2x2 oracle"] = max(err["hat-pi closed form vs 2x2 oracle"],
                                                              _rel(px.plus.values, xp), _rel(px.minus.values, xm))
        return [_row(k, v, 1e-10) for k, v in err.items()], ["a-ladder and samples as in [3]"]

    return _timed(5, "closed-form projections vs oracle", 20.0, body)


# --- 6 ----------------------------------------------------------------------

def estimate_report(spec: SweepSpec, rows=None) -> Report:
    rows = run_sweep(spec) if rows is None else rows
    rep = Report("sweep-estimates", inputs=dict(spec.__dict__), xlabel="R", ylabel="ratio",
                 title=f"{spec.kind} gluing ratio envelope")
    for env in envelopes(rows):
        tag = f"m={env.level}, delta={env.delta:.4g}"
        rep.series.append(Series(f"lower {tag}", env.lengths, env.lower))
        rep.series.append(Series(f"upper {tag}", env.lengths, env.upper))
    return rep


def envelope_table(rows) -> list[tuple]:
    """(|a|, R, m, delta, ratio_lower, ratio_upper) per sweep cell."""
    out = []
    for env in envelopes(rows):
        for R, lo, hi in zip(env.lengths, env.lower, env.upper):
            out.append((inverse_length(EXP, R), R, env.level, env.delta, lo, hi))
    return out


def criterion_6(quick: bool = False, outdir: str | Path | None = None) -> CriterionResult:
    spec = SweepSpec(kind="hat", lengths=(5.0, 10.0, 20.0, 40.0), levels=(0, 1),
                     n_samples=4 if quick else 8, seed=0)

    def body():
        rows = run_sweep(spec)
        sp = spread(rows)
        lo = min(r.ratio for r in rows)
        hi = max(r.ratio for r in rows)
        notes = [f"ratios in [{lo:.4g}, {hi:.4g}] over R in {spec.lengths}, m in {spec.levels}",
                 "neck lengths chosen directly (|a| = inverse_length(R)) since R_exp(2^-j) is infeasible for j >= 3"]
        if outdir is not None:
            out = Path(outdir)
            out.mkdir(parents=True, exist_ok=True)
            rep = estimate_report(spec, rows)
            (out / "hat_gluing_ratios.csv").write_text(series_csv(rep))
            render_png(rep, out / "hat_gluing_ratios.png")
            (out / "hat_gluing_ratios_plot.py").write_text(emit_plot_script(rep))
            notes.append(f"report written to {out}")
        return [_row("max/min ratio spread", sp, 10.0)], notes

    return _timed(6, "hat-gluing norm equivalence", 60.0, body)


# --- 7 ----------------------------------------------------------------------

def criterion_7(quick: bool = False) -> CriterionResult:
    lengths = (5.0, 10.0, 20.0)

    def body():
        rng = np.random.default_rng(7)
        recover, zero_sol, zero_sig, kernel_off = 0.0, 0.0, math.inf, 0
        for R in lengths:
            for dim in (2, 4):
                prob = CRProblem(R, math.pi, dim, 64, 32)
                u = antipodal_sample(rng, prob.grid, prob.profile(prob.grid.s), dim, center=0.5 * R)
                res = linear_cr_solve(prob, dbar0(u, prob.J0).values)
                recover = max(recover, _rel(res.solution.values, u.values))
                z = linear_cr_solve(prob, np.zeros((64, 32, dim)))
                zero_sol = max(zero_sol, float(np.abs(z.solution.values).max()))
                zero_sig = min(zero_sig, z.sigma_min)
                rep = kernel_diagnostic(R, math.pi, dim, ds=0.5, n_t=16)
                kernel_off = max(kernel_off, abs(rep.near_zero - dim))
        return [
            _row("manufactured recovery", recover, 1e-3),
            _row("zero rhs solution", zero_sol, 1e-12),
            _row("injectivity sigma_min", zero_sig, 0.0, zero_sig > 0.0, "must be > 0"),
            _row("kernel count - 2n", kernel_off, 0),
        ], ["64x32 grids on [-4, R+4], delta = pi; kernel on ds = 0.5, n_t = 16"]

    return _timed(7, "linear Cauchy-Riemann", 120.0, body)


# --- 8 ----------------------------------------------------------------------

def criterion_8(quick: bool = False) -> CriterionResult:
    ds, n_t = 0.25, 16
    lengths = (6.0, 10.0) if quick else (6.0, 10.0, 14.0)

    def body():
        rng = np.random.default_rng(8)
        core, assembly, unfilled = 0.0, 0.0, 0.0
        fields = [ComplexStructureField.standard(2), ComplexStructureField.conjugated(2, 0.3, seed=5)]
        for i, R in enumerate(lengths):
            a = exact_parameter(R, ds, n_t, twist_index=i + 2)
            ctx = SpliceContext(a)
            S = pair_length(ctx.length, ds)
            lay = oracles.ExactLayout(S, ctx.length, ctx.twist, ds, n_t)
            for J in fields:
                u = random_pair(rng, S, ds, n_t, 2, "E", const_scale=0.3)
                h0 = random_pair(rng, S, ds, n_t, 2, "E")
                h = MapPair(CylinderMap(h0.plus.grid, h0.plus.remainder, u.const),
                            CylinderMap(h0.minus.grid, h0.minus.remainder, u.const), "E")
                xi = filled_section(ctx, u, h, J)
                xp, xm = oracles.filled_section_oracle(u.plus.values, u.minus.values, h.plus.values,
                                                       h.minus.values, u.const, h.const, lay, J)
                assembly = max(assembly, _rel(xi.plus.values, xp), _rel(xi.minus.values, xm))
                hc = project(ctx, h)
                xc = filled_section(ctx, u, hc, J)
                scale = max(1.0, np.abs(xc.plus.values).max())
                core = max(core, float(np.abs(hat_minus_glue(ctx, xc).values).max()) / scale)
                uh = MapPair(CylinderMap(u.plus.grid, u.plus.remainder + hc.plus.remainder, u.const + hc.const),
                             CylinderMap(u.minus.grid, u.minus.remainder + hc.minus.remainder, u.const + hc.const), "E")
                unfilled = max(unfilled, _rel(hat_plus_glue(ctx, xc).values, cr_apply(plus_glue(ctx, uh), J).values))
        return [
            _row("core consistency", core, 1e-12),
            _row("direct assembly", assembly, 1e-10),
            _row("filled = unfilled on core", unfilled, 1e-10),
        ], [f"exactness tier ds={ds}, n_t={n_t}, R in {lengths}, constant and conjugated J"]

    return _timed(8, "filled section", 20.0, body)


# --- 9 ----------------------------------------------------------------------

def criterion_9(quick: bool = False) -> CriterionResult:
    def body():
        bad = 0
        count = 0
        for two_n in range(2, 21, 2):
            for g in range(0, 11):
                for k in range(0, 11):
                    for c1 in range(-10, 11):
                        a, b = oracles.index_forms(two_n, g, k, c1)
                        bad += a != b or fredholm_index(two_n, g, k, c1) != a
                        count += 1
        spots = [((6, 0, 3, 0), 6), ((4, 1, 1, 2), 6)]
        spot_bad = sum(fredholm_index(*args) != want for args, want in spots)
        return [_row("form mismatches", bad, 0), _row("spot value mismatches", spot_bad, 0)], [f"{count} tuples"]

    return _timed(9, "index formula", 1.0, body)


# --- 10 ---------------------------------------------------------------------

CONTRACTION_RADII = (0.1, 0.05, 0.025)


def _non_increasing(values, slack=1e-6) -> bool:
    return all(b <= a * (1 + slack) + 1e-300 for a, b in zip(values, values[1:]))


def criterion_10(quick: bool = False) -> CriterionResult:
    ds, n_t = 0.5, 8

    def body():
        rows, notes = [], []
        R_true = gluing_length(EXP, 2.0 ** -4)
        cases = [("a=0", GluingParameter.zero()), ("|a|=2^-4 (R=8)", exact_parameter(8.0, ds, n_t))]
        notes.append(f"|a|=2^-4: R={R_true:.4g} infeasible, substituted R=8")
        for label, a in cases:
            ctx = SpliceContext(a)
            R = 0.0 if a.is_zero else ctx.length
            u = constant_pair(pair_length(R, ds), ds, n_t, [0.2, -0.1])
            for jname, J in (("conjugated J", ComplexStructureField.conjugated(2, 0.3, seed=1)),
                             ("constant J", ComplexStructureField.standard(2))):
                reps = contraction_modulus(ctx, u, J, radii=CONTRACTION_RADII, n_pairs=3 if quick else 6)
                mods = [r.modulus for r in reps]
                notes.append(f"{label}, {jname}: " + ", ".join(f"{m:.3g}" for m in mods))
                rows.append(_row(f"{label} {jname} non-increasing", mods[-1] / max(mods[0], 1e-300), 1.0 + 1e-6,
                                 _non_increasing(mods)))
        return rows, notes

    return _timed(10, "contraction diagnostic", 60.0, body)


# --- 11 ---------------------------------------------------------------------

def perturbed_embedding(rng: np.random.Generator, two_n: int = 4, eps: float = 0.05):
    """Random C^1-small perturbation of z -> (x, y, x y + sin x, cos y - 1, ...) and a tilted H."""
    off = rng.uniform(-0.15, 0.15, 2)
    A = rng.normal(size=(two_n, 3)) * eps

    def f(X, Y):
        base = [X, Y, X * Y + np.sin(X), np.cos(Y) - 1.0] + [0.0 * X] * (two_n - 4)
        base = np.stack(base[:two_n])
        pert = (A[:, 0, None, None] * np.sin(2 * X + Y) + A[:, 1, None, None] * X ** 2
                + A[:, 2, None, None] * np.cos(3 * Y))
        shift = np.zeros(two_n)
        shift[:2] = off
        return base + pert - shift[:, None, None]

    H = np.eye(two_n)[:, 2:] + 0.1 * rng.normal(size=(two_n, two_n - 2))
    return DiskMap.from_function(f), H


def criterion_11(quick: bool = False) -> CriterionResult:
    def body():
        rng = np.random.default_rng(11)
        worst = 0.0
        for _ in range(20):
            v, H = perturbed_embedding(rng)
            z = transversal_constraint(v, H)
            zo = oracles.constraint_grid_oracle(v, complement_projector(H, v.dim))
            worst = max(worst, float(np.abs(z - zo).max()))
        return [_row("Newton vs grid search", worst, 1e-6)], ["20 perturbed embeddings in R^4"]

    return _timed(11, "transversal constraint", 5.0, body)


CRITERIA = {
    1: criterion_1, 2: criterion_2, 3: criterion_3, 4: criterion_4, 5: criterion_5, 6: criterion_6,
    7: criterion_7, 8: criterion_8, 9: criterion_9, 10: criterion_10, 11: criterion_11,
}


def run_all(quick: bool = False, only=None, outdir=None, echo=None) -> list[CriterionResult]:
    results = []
    for number, fn in CRITERIA.items():
        if only and number not in only:
            continue
        res = fn(quick, outdir) if number == 6 else fn(quick)
        results.append(res)
        if echo is not None:
            echo(res.line())
            for note in res.notes:
                echo(f"    {note}")
    return results
