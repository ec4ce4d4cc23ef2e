"""Command-line interface: ``gwsplice <command> [<subcommand>] ...``.

Maps are exchanged as grid CSV files (see gridio), surfaces as JSON.
Reports are CSV with '#'-prefixed header lines.  Exit status: 0 when all
requested checks pass, 1 when a check fails, 2 for bad arguments or inputs.

GWSPLICE_RESOLUTION="ds,n_t" overrides the default sampling resolution.
"""

from __future__ import annotations

import argparse
import math
import os
import sys
from pathlib import Path

import numpy as np

from . import __version__
from . import nodal_surface as ns
from .acceptance import CRITERIA, perturbed_embedding, run_all
from .cauchy_riemann import (
    ComplexStructureField,
    CRProblem,
    complement_projector,
    contraction_modulus,
    cr_apply,
    dbar0,
    filled_section,
    fredholm_index,
    kernel_diagnostic,
    linear_cr_solve,
    standard_j,
    transversal_constraint,
)
from .cylinders import (
    CylinderMap,
    MapPair,
    NeckMap,
    circle_mean,
    evaluate,
    lift_point,
    neck_norm_G,
    pair_norm_E,
    pair_norm_F,
    weighted_norm,
)
from .estimates import KINDS as SWEEP_KINDS
from .estimates import TRANSFERS as TRANSFER_KINDS
from .estimates import SweepSpec, envelopes, run_sweep, spread
from .gridio import read_grid, write_grid
from .oracles import constraint_grid_oracle
from .profiles import (
    EXP,
    LOG,
    GluingParameter,
    ScScale,
    bilevel_valid,
    degeneration_index,
    gluing_length,
    inverse_length,
    length_from_log_modulus,
    profile_convert,
)
from .report import Report, Series, checks_csv, emit_plot_script, format_csv, render_png
from .sampling import antipodal_sample, constant_pair, exact_parameter, pair_length, random_pair
from .splice import (
    SpliceContext,
    anti_glue_norm,
    hat_project,
    hat_total_glue,
    hat_total_unglue,
    project,
    total_glue,
    total_unglue,
    transfer_closed_form,
)

RESOLUTION_ENV = "GWSPLICE_RESOLUTION"
DEFAULT_RESOLUTION = (0.25, 16)
MAX_SWEEP_LENGTH = 60.0


class UsageError(ValueError):
    pass


def default_resolution() -> tuple[float, int]:
    raw = os.environ.get(RESOLUTION_ENV)
    if not raw:
        return DEFAULT_RESOLUTION
    try:
        ds, n_t = raw.split(",")
        ds, n_t = float(ds), int(n_t)
    except ValueError as exc:
        raise UsageError(f"{RESOLUTION_ENV} must look like '0.25,16', got {raw!r}") from exc
    if ds <= 0 or n_t < 4:
        raise UsageError(f"{RESOLUTION_ENV}: need ds > 0 and n_t >= 4")
    return ds, n_t


def _emit(text: str, out: str | None):
    if out:
        Path(out).write_text(text)
    else:
        sys.stdout.write(text)


def _num(x) -> str:
    return f"{float(x):.15g}"


def _parse_modulus(text: str) -> float:
    text = text.strip()
    if text.startswith("2^"):
        return 2.0 ** float(text[2:])
    return float(text)


def _float_list(text: str) -> list[float]:
    return [float(x) for x in text.split(",") if x.strip()]


# --- surfaces -------------------------------------------------------------

def _load_surface(path: str) -> ns.NodedSurface:
    return ns.loads(Path(path).read_text())


def cmd_surface_genus(args) -> int:
    print(ns.arithmetic_genus(_load_surface(args.file)))
    return 0


def cmd_surface_info(args) -> int:
    S = _load_surface(args.file)
    connected = ns.is_connected(S)
    genus = ns.arithmetic_genus(S) if connected else ""
    rows = [(len(S.components), len(S.marked), len(S.nodes), int(connected), genus, int(ns.is_stable(S)))]
    sys.stdout.write(format_csv({"command": "surface info"},
                                ["components", "marked", "nodes", "connected", "genus", "stable"], rows))
    return 0


def cmd_surface_stabilize(args) -> int:
    order = args.order.split(",") if args.order else None
    _emit(ns.dumps(ns.stabilize(_load_surface(args.file), order)) + "\n", args.out)
    return 0


def cmd_surface_canonical(args) -> int:
    print(repr(ns.canonical_form(_load_surface(args.file))))
    return 0


def cmd_surface_forget(args) -> int:
    _emit(ns.dumps(ns.forget_marked_point(_load_surface(args.file), args.index)) + "\n", args.out)
    return 0


def cmd_surface_random(args) -> int:
    rng = np.random.default_rng(args.seed)
    _emit(ns.dumps(ns.random_connected_surface(rng, args.max_components)) + "\n", args.out)
    return 0


# --- profiles ---------------------------------------------------------------

def cmd_profile_length(args) -> int:
    print(_num(gluing_length(args.kind, _parse_modulus(args.r))))
    return 0


def cmd_profile_inverse(args) -> int:
    print(_num(inverse_length(args.kind, args.length)))
    return 0


def cmd_profile_convert(args) -> int:
    if args.modulus is not None:
        a = GluingParameter.from_polar(_parse_modulus(args.modulus), args.twist)
    else:
        a = GluingParameter.from_complex(complex(args.re, args.im))
    b = profile_convert(a)
    if a.is_zero:
        row = ("0", "0", "0", "0", "-inf", "0")
    else:
        # the converted modulus underflows quickly; its log is always representable
        row = (_num(a.modulus), _num(a.twist), _num(b.modulus), _num(b.twist),
               _num(b.log_modulus), _num(length_from_log_modulus(LOG, b.log_modulus)))
    sys.stdout.write(format_csv({"command": "profile convert"},
                                ["modulus", "twist", "modulus_converted", "twist_converted",
                                 "log_modulus_converted", "length"], [row]))
    return 0


def cmd_profile_degeneration(args) -> int:
    print(degeneration_index(_float_list(args.quadrant), _float_list(args.free or "")))
    return 0


def cmd_profile_bilevel(args) -> int:
    print(int(bilevel_valid(args.m, args.k)))
    return 0


# --- norms and splicing -----------------------------------------------------

def cmd_norm(args) -> int:
    """Single map (FILE), pair (--plus/--minus) or neck data (--q/--p with a gluing parameter)."""
    scale = ScScale()
    if args.file:
        value = weighted_norm(read_grid(args.file), args.k, args.delta, args.center)
    elif args.plus and args.minus:
        h = MapPair(read_grid(args.plus), read_grid(args.minus), args.space)
        value = (pair_norm_E if args.space == "E" else pair_norm_F)(h, args.m, scale)
    elif args.q and args.p:
        ctx = SpliceContext(_gluing_parameter(args), kind=args.profile)
        q = NeckMap(read_grid(args.q), ctx.length, ctx.twist, "Z")
        p = NeckMap(read_grid(args.p), ctx.length, ctx.twist, "C")
        value = neck_norm_G(q, p, args.m, scale, hat=args.hat)
    else:
        raise UsageError("give FILE, --plus/--minus, or --q/--p")
    print(_num(value))
    return 0


def cmd_cylinder_mean(args) -> int:
    print(",".join(_num(x) for x in circle_mean(read_grid(args.file), args.s0)))
    return 0


def cmd_cylinder_eval(args) -> int:
    print(",".join(_num(x) for x in evaluate(read_grid(args.file), args.s, args.t)))
    return 0


def cmd_cylinder_lift(args) -> int:
    lift = lift_point(_gluing_parameter(args), args.s, args.t, args.margin, args.profile)
    rows = [(_num(lift.plus[0]), _num(lift.plus[1]), _num(lift.minus[0]), _num(lift.minus[1]), int(lift.interior))]
    sys.stdout.write(format_csv({"command": "cylinder lift"}, ["s", "t", "s_prime", "t_prime", "interior"], rows))
    return 0


def _gluing_parameter(args) -> GluingParameter:
    if args.length is not None:
        return GluingParameter.from_length(args.profile, args.length, args.twist)
    if args.modulus is not None:
        return GluingParameter.from_polar(_parse_modulus(args.modulus), args.twist)
    raise UsageError("give --length or --modulus")


def _load_pair(args, hat: bool) -> MapPair:
    """Pair from --plus/--minus files, or a seeded sample with --sample."""
    if args.sample is not None:
        ctx = SpliceContext(_gluing_parameter(args), kind=args.profile)
        ds, n_t = default_resolution()
        S = pair_length(0.0 if ctx.is_zero else ctx.length, ds)
        rng = np.random.default_rng(args.sample)
        return random_pair(rng, S, ds, n_t, args.dim, "F" if hat else "E")
    if not (args.plus and args.minus):
        raise UsageError("give --plus and --minus files, or --sample SEED")
    plus, minus = read_grid(args.plus), read_grid(args.minus)
    return MapPair(plus, minus, "F" if hat else "E")


def _out_dir(args) -> Path:
    out = Path(args.out_dir)
    out.mkdir(parents=True, exist_ok=True)
    return out


def _add_parameter_args(p):
    p.add_argument("--length", type=float, help="neck length R")
    p.add_argument("--modulus", help="|a|, e.g. 0.3 or 2^-2")
    p.add_argument("--twist", type=float, default=0.0, help="theta in [0, 1)")
    p.add_argument("--profile", choices=[EXP, LOG], default=EXP)


def _add_pair_args(p):
    _add_parameter_args(p)
    p.add_argument("--plus", help="grid CSV on [0, S]")
    p.add_argument("--minus", help="grid CSV on [-S, 0]")
    p.add_argument("--sample", type=int, metavar="SEED", help="use a seeded random pair instead of files")
    p.add_argument("--dim", type=int, default=2)
    p.add_argument("--hat", action="store_true", help="zero-constant (F) versions")
    p.add_argument("--out-dir", default=".")


def cmd_glue(args) -> int:
    ctx = SpliceContext(_gluing_parameter(args), kind=args.profile)
    h = _load_pair(args, args.hat)
    v, w = (hat_total_glue if args.hat else total_glue)(ctx, h)
    out = _out_dir(args)
    if args.sample is not None:
        write_grid(out / "input_plus.csv", h.plus)
        write_grid(out / "input_minus.csv", h.minus)
    write_grid(out / "v.csv", v.cyl)
    write_grid(out / "w.csv", w.cyl)
    return 0


def cmd_unglue(args) -> int:
    ctx = SpliceContext(_gluing_parameter(args), kind=args.profile)
    v = NeckMap(read_grid(args.v), ctx.length, ctx.twist, "Z")
    w = NeckMap(read_grid(args.w), ctx.length, ctx.twist, "C")
    h = (hat_total_unglue if args.hat else total_unglue)(ctx, v, w)
    out = _out_dir(args)
    write_grid(out / "plus.csv", h.plus)
    write_grid(out / "minus.csv", h.minus)
    return 0


def cmd_project(args) -> int:
    ctx = SpliceContext(_gluing_parameter(args), kind=args.profile)
    h = _load_pair(args, args.hat)
    ph = (hat_project if args.hat else project)(ctx, h)
    out = _out_dir(args)
    write_grid(out / "plus.csv", ph.plus)
    write_grid(out / "minus.csv", ph.minus)
    return 0


def cmd_core_test(args) -> int:
    ctx = SpliceContext(_gluing_parameter(args), kind=args.profile)
    h = _load_pair(args, args.hat)
    if args.project:
        h = (hat_project if args.hat else project)(ctx, h)
    rep = Report("core-test", {"length": ctx.length, "twist": ctx.twist, "sample": args.sample})
    val = anti_glue_norm(ctx, h)
    rep.add("anti_glue_norm", val, args.tol, val <= args.tol)
    sys.stdout.write(checks_csv(rep))
    return 0 if rep.passed else 1


def cmd_transfer(args) -> int:
    ctx = SpliceContext(_gluing_parameter(args), kind=args.profile)
    h = _load_pair(args, False)
    xi = TRANSFER_KINDS[args.kind](ctx, h)
    out = _out_dir(args)
    write_grid(out / "plus.csv", xi.plus)
    write_grid(out / "minus.csv", xi.minus)
    if args.check and not ctx.is_zero:
        ref = transfer_closed_form(ctx, h, args.kind)
        err = max(float(np.abs(xi.plus.values - ref.plus.values).max()),
                  float(np.abs(xi.minus.values - ref.minus.values).max()))
        rep = Report("transfer", {"kind": args.kind, "length": ctx.length, "sample": args.sample})
        rep.add("closed_form_difference", err, args.tol, err <= args.tol)
        sys.stdout.write(checks_csv(rep))
        return 0 if rep.passed else 1
    return 0


# --- sweeps -----------------------------------------------------------------

def _sweep_lengths(args) -> tuple[float, ...]:
    if args.a_grid:
        out = []
        for tok in args.a_grid.split(","):
            r = _parse_modulus(tok)
            if not 0 < r <= 0.5:
                raise UsageError(f"modulus {r} outside (0, 1/2]")
            R = gluing_length(EXP, r)
            if R > MAX_SWEEP_LENGTH:
                raise UsageError(f"|a|={tok} gives R={R:.4g}, beyond any grid; use --lengths")
            out.append(R)
        return tuple(out)
    return tuple(_float_list(args.lengths))


def cmd_sweep_estimates(args) -> int:
    ds, n_t = (args.ds, args.n_t) if args.ds else default_resolution()
    spec = SweepSpec(lengths=_sweep_lengths(args), levels=tuple(args.m),
                     deltas=tuple(_float_list(args.delta)) if args.delta else None,
                     n_samples=args.samples, ds=ds, n_t=args.n_t or n_t, dim=args.dim,
                     kind=args.kind, seed=args.seed, sample=args.sample)
    rows = run_sweep(spec, jobs=args.jobs)
    inputs = {k: v for k, v in spec.__dict__.items()}
    rep = Report("sweep-estimates", inputs, xlabel="R", ylabel="ratio",
                 title=f"{spec.kind} estimate ratios")
    table = []
    for env in envelopes(rows):
        tag = f"m={env.level}, delta={env.delta:.4g}"
        rep.series.append(Series(f"lower {tag}", env.lengths, env.lower))
        rep.series.append(Series(f"upper {tag}", env.lengths, env.upper))
        for R, lo, hi in zip(env.lengths, env.lower, env.upper):
            table.append((inverse_length(EXP, R), R, env.level, env.delta, lo, hi))
    sp = spread(rows)
    header = {"command": "sweep-estimates", "inputs": rep.digest, "kind": spec.kind,
              "seed": spec.seed, "sample": spec.sample, "ds": spec.ds, "n_t": spec.n_t, "spread": repr(sp)}
    _emit(format_csv(header, ["modulus", "R", "m", "delta", "ratio_lower", "ratio_upper"], table), args.out)
    if args.png:
        render_png(rep, args.png)
    if args.plot_script:
        Path(args.plot_script).write_text(emit_plot_script(rep))
    if args.max_spread is not None:
        return 0 if sp <= args.max_spread else 1
    return 0


# --- Cauchy-Riemann ---------------------------------------------------------

def _structure(args, two_n: int) -> ComplexStructureField:
    if args.J == "standard":
        return ComplexStructureField.standard(two_n)
    return ComplexStructureField.conjugated(two_n, args.eps, seed=args.J_seed)


def _add_structure_args(p):
    p.add_argument("--J", choices=["standard", "conjugated"], default="standard")
    p.add_argument("--eps", type=float, default=0.3, help="strength of the conjugated J")
    p.add_argument("--J-seed", type=int, default=0)


def cmd_cr_apply(args) -> int:
    u = read_grid(args.file)
    write_grid(args.out, cr_apply(u, _structure(args, u.dim)))
    return 0


def cmd_cr_dbar0(args) -> int:
    u = read_grid(args.file)
    res = dbar0(u, standard_j(u.dim))
    write_grid(args.out, CylinderMap(res.grid, res.values))
    return 0


def cmd_cr_filled(args) -> int:
    ctx = SpliceContext(_gluing_parameter(args), kind=args.profile)
    h = _load_pair(args, False)
    g = h.plus.grid
    u = constant_pair(g.s_max, g.ds, g.n_t, _float_list(args.base))
    if u.dim != h.dim:
        raise UsageError("base constant and section have different dimensions")
    xi = filled_section(ctx, u, h, _structure(args, h.dim))
    out = _out_dir(args)
    write_grid(out / "plus.csv", xi.plus)
    write_grid(out / "minus.csv", xi.minus)
    return 0


def cmd_cr_solve(args) -> int:
    prob = CRProblem(args.length, args.delta, args.dim, args.n_s, args.n_t)
    rep = Report("cr solve", {"length": args.length, "delta": args.delta, "dim": args.dim,
                              "n_s": args.n_s, "n_t": args.n_t, "rhs": args.rhs, "seed": args.seed})
    if args.rhs:
        rhs = read_grid(args.rhs).values
        exact = None
    else:
        rng = np.random.default_rng(args.seed)
        g = prob.grid
        exact = antipodal_sample(rng, g, prob.profile(g.s), args.dim, center=0.5 * args.length)
        rhs = dbar0(exact, prob.J0).values
    res = linear_cr_solve(prob, rhs)
    rep.add("residual", res.residual, args.tol, res.residual <= args.tol * max(1.0, np.abs(rhs).max()))
    rep.add("sigma_min", res.sigma_min, 0.0, res.sigma_min > 0.0, "injectivity margin")
    if exact is not None:
        err = float(np.abs(res.solution.values - exact.values).max() / max(1.0, np.abs(exact.values).max()))
        rep.add("recovery", err, args.tol, err <= args.tol)
    sys.stdout.write(checks_csv(rep))
    if args.out:
        write_grid(args.out, res.solution)
    return 0 if rep.passed else 1


def cmd_cr_kernel(args) -> int:
    kr = kernel_diagnostic(args.length, args.delta, args.dim, args.ds, args.n_t, rel_tol=args.rel_tol)
    rep = Report("cr kernel", {"length": args.length, "delta": args.delta, "dim": args.dim,
                               "ds": args.ds, "n_t": args.n_t, "rel_tol": args.rel_tol})
    rep.add("near_zero", kr.near_zero, args.dim, kr.near_zero == args.dim, "expected 2n")
    rep.add("mean_zero_sigma_min", kr.mean_zero_min, kr.threshold, kr.mean_zero_min > kr.threshold)
    sys.stdout.write(checks_csv(rep))
    if args.svals:
        Path(args.svals).write_text(format_csv({"command": "cr kernel", "inputs": rep.digest},
                                               ["index", "sigma"], enumerate(map(float, kr.singular_values))))
    return 0 if rep.passed else 1


def cmd_cr_index(args) -> int:
    print(fredholm_index(args.dim, args.g, args.k, args.c1))
    return 0


def cmd_cr_contraction(args) -> int:
    ds, n_t = args.ds, args.n_t
    if args.length:
        a = exact_parameter(args.length, ds, n_t)
    else:
        a = GluingParameter.zero()
    ctx = SpliceContext(a)
    u = constant_pair(pair_length(0.0 if a.is_zero else ctx.length, ds), ds, n_t, _float_list(args.base))
    radii = tuple(_float_list(args.radii))
    reps = contraction_modulus(ctx, u, _structure(args, u.dim), radii=radii, n_pairs=args.pairs, seed=args.seed)
    mods = [r.modulus for r in reps]
    ok = all(b <= a_ * (1 + 1e-6) + 1e-300 for a_, b in zip(mods, mods[1:]))
    header = {"command": "cr contraction", "length": 0.0 if a.is_zero else ctx.length,
              "J": args.J, "seed": args.seed, "non_increasing": int(ok)}
    rows = [(r.radius, r.modulus, r.pairs_used, r.kernel_dim) for r in reps]
    sys.stdout.write(format_csv(header, ["radius", "modulus", "pairs", "kernel_dim"], rows))
    return 0 if ok else 1


def cmd_cr_constraint(args) -> int:
    rng = np.random.default_rng(args.seed)
    rows, ok = [], True
    for i in range(args.count):
        v, H = perturbed_embedding(rng, args.dim)
        z = transversal_constraint(v, H)
        row = [i, float(z[0]), float(z[1])]
        if args.check:
            zo = constraint_grid_oracle(v, complement_projector(H, v.dim))
            err = float(np.abs(z - zo).max())
            ok &= err <= args.tol
            row.append(err)
        rows.append(tuple(row))
    cols = ["sample", "z_x", "z_y"] + (["oracle_error"] if args.check else [])
    sys.stdout.write(format_csv({"command": "cr constraint", "seed": args.seed}, cols, rows))
    return 0 if ok else 1


# --- acceptance -------------------------------------------------------------

def cmd_verify(args) -> int:
    only = {int(x) for x in args.only.split(",")} if args.only else None
    if only and not only <= set(CRITERIA):
        raise UsageError(f"criteria are numbered {min(CRITERIA)}..{max(CRITERIA)}")
    results = run_all(args.quick, only, args.out_dir, echo=print)
    failed = [r.number for r in results if not r.passed]
    print(f"{len(results) - len(failed)}/{len(results)} criteria passed")
    return 1 if failed else 0


# --- parser -----------------------------------------------------------------

# (command, subcommand) -> handler; every library operation reachable from the CLI
COMMANDS = {
    ("surface", "info"): cmd_surface_info,
    ("surface", "genus"): cmd_surface_genus,
    ("surface", "stabilize"): cmd_surface_stabilize,
    ("surface", "canonical"): cmd_surface_canonical,
    ("surface", "forget"): cmd_surface_forget,
    ("surface", "random"): cmd_surface_random,
    ("profile", "length"): cmd_profile_length,
    ("profile", "inverse"): cmd_profile_inverse,
    ("profile", "convert"): cmd_profile_convert,
    ("profile", "degeneration"): cmd_profile_degeneration,
    ("profile", "bilevel"): cmd_profile_bilevel,
    ("norm", None): cmd_norm,
    ("cylinder", "mean"): cmd_cylinder_mean,
    ("cylinder", "eval"): cmd_cylinder_eval,
    ("cylinder", "lift"): cmd_cylinder_lift,
    ("glue", None): cmd_glue,
    ("unglue", None): cmd_unglue,
    ("project", None): cmd_project,
    ("core-test", None): cmd_core_test,
    ("transfer", None): cmd_transfer,
    ("sweep-estimates", None): cmd_sweep_estimates,
    ("cr", "apply"): cmd_cr_apply,
    ("cr", "dbar0"): cmd_cr_dbar0,
    ("cr", "filled"): cmd_cr_filled,
    ("cr", "solve"): cmd_cr_solve,
    ("cr", "kernel"): cmd_cr_kernel,
    ("cr", "index"): cmd_cr_index,
    ("cr", "contraction"): cmd_cr_contraction,
    ("cr", "constraint"): cmd_cr_constraint,
    ("verify", None): cmd_verify,
}

# library operation -> command that exercises it
OPERATIONS = {
    "nodal_surface.arithmetic_genus": ("surface", "genus"),
    "nodal_surface.is_connected": ("surface", "info"),
    "nodal_surface.is_stable": ("surface", "info"),
    "nodal_surface.stabilize": ("surface", "stabilize"),
    "nodal_surface.forget_marked_point": ("surface", "forget"),
    "nodal_surface.canonical_form": ("surface", "canonical"),
    "profiles.gluing_length": ("profile", "length"),
    "profiles.inverse_length": ("profile", "inverse"),
    "profiles.profile_convert": ("profile", "convert"),
    "profiles.degeneration_index": ("profile", "degeneration"),
    "profiles.bilevel_valid": ("profile", "bilevel"),
    "cylinders.weighted_norm": ("norm", None),
    "cylinders.pair_norm_E": ("norm", None),
    "cylinders.neck_norm_G": ("norm", None),
    "cylinders.circle_mean": ("cylinder", "mean"),
    "cylinders.evaluate": ("cylinder", "eval"),
    "cylinders.lift_point": ("cylinder", "lift"),
    "splice.total_glue": ("glue", None),
    "splice.hat_total_glue": ("glue", None),
    "splice.total_unglue": ("unglue", None),
    "splice.hat_total_unglue": ("unglue", None),
    "splice.project": ("project", None),
    "splice.hat_project": ("project", None),
    "splice.anti_glue_norm": ("core-test", None),
    "splice.transfer_ds": ("transfer", None),
    "splice.transfer_dt": ("transfer", None),
    "splice.transfer_cs": ("transfer", None),
    "splice.transfer_ct": ("transfer", None),
    "estimates.run_sweep": ("sweep-estimates", None),
    "report.emit_plot_script": ("sweep-estimates", None),
    "cauchy_riemann.cr_apply": ("cr", "apply"),
    "cauchy_riemann.dbar0": ("cr", "dbar0"),
    "cauchy_riemann.filled_section": ("cr", "filled"),
    "cauchy_riemann.linear_cr_solve": ("cr", "solve"),
    "cauchy_riemann.kernel_diagnostic": ("cr", "kernel"),
    "cauchy_riemann.fredholm_index": ("cr", "index"),
    "cauchy_riemann.contraction_modulus": ("cr", "contraction"),
    "cauchy_riemann.transversal_constraint": ("cr", "constraint"),
    "acceptance.run_all": ("verify", None),
}


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="gwsplice", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    # surface
    surf = sub.add_parser("surface", help="noded surfaces (JSON)").add_subparsers(dest="sub", required=True)
    p = surf.add_parser("info", help="counts, connectivity, genus and stability")
    p.add_argument("file")
    p = surf.add_parser("genus", help="arithmetic genus")
    p.add_argument("file")
    p = surf.add_parser("stabilize", help="weed unstable components")
    p.add_argument("file")
    p.add_argument("--order", help="comma-separated component ids to weed first")
    p.add_argument("--out")
    p = surf.add_parser("canonical", help="isomorphism-invariant encoding")
    p.add_argument("file")
    p = surf.add_parser("forget", help="forget a marked point, then stabilize")
    p.add_argument("file")
    p.add_argument("--index", type=int, required=True, help="0-based marked point")
    p.add_argument("--out")
    p = surf.add_parser("random", help="random connected surface")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--max-components", type=int, default=8)
    p.add_argument("--out")

    # profile
    prof = sub.add_parser("profile", help="gluing profiles").add_subparsers(dest="sub", required=True)
    p = prof.add_parser("length", help="R = phi(|a|)")
    p.add_argument("--r", "--modulus", dest="r", required=True, help="|a|, e.g. 0.5 or 2^-3")
    p.add_argument("--kind", choices=[EXP, LOG], default=EXP)
    p = prof.add_parser("inverse", help="|a| = phi^-1(R)")
    p.add_argument("--length", type=float, required=True)
    p.add_argument("--kind", choices=[EXP, LOG], default=EXP)
    p = prof.add_parser("convert", help="exponential -> logarithmic parameter")
    p.add_argument("--re", type=float, default=0.0)
    p.add_argument("--im", type=float, default=0.0)
    p.add_argument("--modulus", help="polar input instead of --re/--im")
    p.add_argument("--twist", type=float, default=0.0)
    p = prof.add_parser("degeneration", help="number of vanishing quadrant coordinates")
    p.add_argument("--quadrant", required=True, help="comma-separated, each >= 0")
    p.add_argument("--free", help="comma-separated free coordinates")
    p = prof.add_parser("bilevel", help="1 iff 0 <= k <= m + 1")
    p.add_argument("--m", type=int, required=True)
    p.add_argument("--k", type=int, required=True)

    p = sub.add_parser("norm", help="weighted Sobolev norms of grid CSV maps")
    p.add_argument("file", nargs="?", help="single map: norm of its remainder")
    p.add_argument("--k", type=int, default=3)
    p.add_argument("--delta", type=float, default=math.pi)
    p.add_argument("--center", type=float, default=0.0)
    p.add_argument("--plus", help="pair mode: map on [0, S]")
    p.add_argument("--minus", help="pair mode: map on [-S, 0]")
    p.add_argument("--space", choices=["E", "F"], default="E")
    p.add_argument("--q", help="neck mode: map on [0, R]")
    p.add_argument("--p", help="neck mode: map on [R - S, S]")
    p.add_argument("--hat", action="store_true", help="neck mode: hat-G norm")
    p.add_argument("--m", type=int, default=0, help="level (pair and neck modes)")
    _add_parameter_args(p)

    cyl = sub.add_parser("cylinder", help="evaluation on grid maps").add_subparsers(dest="sub", required=True)
    p = cyl.add_parser("mean", help="circle mean at s0")
    p.add_argument("file")
    p.add_argument("--s0", type=float, required=True)
    p = cyl.add_parser("eval", help="value at (s, t)")
    p.add_argument("file")
    p.add_argument("--s", type=float, required=True)
    p.add_argument("--t", type=float, required=True)
    p = cyl.add_parser("lift", help="both chart coordinates of a neck point")
    _add_parameter_args(p)
    p.add_argument("--s", type=float, required=True)
    p.add_argument("--t", type=float, required=True)
    p.add_argument("--margin", type=float, default=1.0)

    for name, helptext in (("glue", "total gluing (v, w) of a pair"),
                           ("project", "splicing projection of a pair"),
                           ("core-test", "anti-gluing norm / splicing-core membership")):
        p = sub.add_parser(name, help=helptext)
        _add_pair_args(p)
        if name == "core-test":
            p.add_argument("--tol", type=float, default=1e-9)
            p.add_argument("--project", action="store_true", help="project before testing")

    p = sub.add_parser("transfer", help="transfer operators D_s, D_t, C_s, C_t of a pair")
    _add_pair_args(p)
    p.add_argument("--kind", choices=sorted(TRANSFER_KINDS), default="ds")
    p.add_argument("--check", action="store_true", help="compare with the expanded closed form")
    p.add_argument("--tol", type=float, default=1e-10)

    p = sub.add_parser("unglue", help="recover a pair from (v, w)")
    _add_parameter_args(p)
    p.add_argument("--v", required=True, help="grid CSV on [0, R]")
    p.add_argument("--w", required=True, help="grid CSV on [R - S, S]")
    p.add_argument("--hat", action="store_true")
    p.add_argument("--out-dir", default=".")

    p = sub.add_parser("sweep-estimates", help="ratio envelopes for the gluing estimates")
    p.add_argument("--kind", choices=SWEEP_KINDS, default="hat")
    p.add_argument("--m", type=int, nargs="+", default=[0, 1], help="levels")
    p.add_argument("--a-grid", help="comma-separated moduli, e.g. 2^-1,2^-2 (R must fit a grid)")
    p.add_argument("--lengths", default="5,10,20,40", help="neck lengths when --a-grid is not given")
    p.add_argument("--delta", help="comma-separated weights (default: level weight)")
    p.add_argument("--samples", type=int, default=8)
    p.add_argument("--ds", type=float)
    p.add_argument("--n-t", type=int)
    p.add_argument("--dim", type=int, default=2)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--sample", choices=("decay", "neck"), default="decay",
                   help="decay: data decaying from the ends; neck: bumps where the neck is glued")
    p.add_argument("--out", help="CSV path (default stdout)")
    p.add_argument("--png")
    p.add_argument("--plot-script")
    p.add_argument("--max-spread", type=float, help="fail if max/min ratio exceeds this")
    p.add_argument("--jobs", type=int, default=1, help="worker processes for independent cells")

    # cr
    cr = sub.add_parser("cr", help="Cauchy-Riemann operators").add_subparsers(dest="sub", required=True)
    p = cr.add_parser("apply", help="nonlinear CR section of a grid map")
    p.add_argument("file")
    p.add_argument("--out", required=True)
    _add_structure_args(p)
    p = cr.add_parser("dbar0", help="d_s + J0 d_t of a grid map")
    p.add_argument("file")
    p.add_argument("--out", required=True)
    p = cr.add_parser("filled", help="filled section at a constant base map")
    _add_pair_args(p)
    p.add_argument("--base", default="0.2,-0.1", help="constant base map")
    _add_structure_args(p)
    p = cr.add_parser("solve", help="weighted solve of dbar0 u = f with antipodal constants")
    p.add_argument("--length", type=float, default=10.0)
    p.add_argument("--delta", type=float, default=math.pi)
    p.add_argument("--dim", type=int, default=2)
    p.add_argument("--n-s", type=int, default=64)
    p.add_argument("--n-t", type=int, default=32)
    p.add_argument("--rhs", help="grid CSV of f (default: manufactured from a seeded sample)")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--tol", type=float, default=1e-3)
    p.add_argument("--out")
    p = cr.add_parser("kernel", help="near-zero singular values of dbar0 on the weighted neck")
    p.add_argument("--length", type=float, default=10.0)
    p.add_argument("--delta", type=float, default=math.pi)
    p.add_argument("--dim", type=int, default=2)
    p.add_argument("--ds", type=float, default=0.5)
    p.add_argument("--n-t", type=int, default=16)
    p.add_argument("--rel-tol", type=float, default=1e-6)
    p.add_argument("--svals", help="write all singular values to this CSV")
    p = cr.add_parser("index", help="Fredholm index")
    p.add_argument("--dim", type=int, required=True)
    p.add_argument("--g", type=int, required=True)
    p.add_argument("--k", type=int, required=True)
    p.add_argument("--c1", type=int, required=True)
    p = cr.add_parser("contraction", help="Lipschitz modulus of the contraction germ")
    p.add_argument("--length", type=float, default=0.0, help="neck length (0: a = 0)")
    p.add_argument("--base", default="0.2,-0.1", help="constant base map")
    p.add_argument("--radii", default="0.1,0.05,0.025")
    p.add_argument("--pairs", type=int, default=6)
    p.add_argument("--ds", type=float, default=0.5)
    p.add_argument("--n-t", type=int, default=8)
    p.add_argument("--seed", type=int, default=0)
    _add_structure_args(p)
    p = cr.add_parser("constraint", help="transversal constraint z_v on random embeddings")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--count", type=int, default=1)
    p.add_argument("--dim", type=int, default=4)
    p.add_argument("--check", action="store_true", help="compare with the grid-search oracle")
    p.add_argument("--tol", type=float, default=1e-6)

    p = sub.add_parser("verify", help="run the acceptance suite")
    p.add_argument("--quick", action="store_true")
    p.add_argument("--only", help="comma-separated criterion numbers")
    p.add_argument("--out-dir", help="write report artifacts here")
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    handler = COMMANDS[(args.command, getattr(args, "sub", None))]
    try:
        return handler(args)
    except (UsageError, ValueError, OSError) as exc:
        # domain errors (SurfaceError, GridError, SpliceError, CRError, ...) are input errors
        print(f"gwsplice {args.command}: error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
