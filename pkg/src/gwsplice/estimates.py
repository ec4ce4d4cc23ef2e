"""Empirical ratio sweeps for the total-gluing norm estimates.

For each neck length R (snapped to the grid, twist node-aligned), level m
and weight delta, random pairs are drawn and the ratio

    hat:   |hat_total_glue(xi)|_{hat-G^a_m} / |xi|_{F_m}
    plain: |total_glue(h)|_{G^a_m} / |h|_{E_m}
    ds, dt, cs, ct: |T(eta)|_{F_m} / |eta|_{E_m} for the transfer operators

is recorded.  Uniform two-sided bounds show up as a bounded envelope over R.
"""

from __future__ import annotations

import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from .cylinders import neck_norm_G, pair_norm_E, pair_norm_F
from .profiles import EXP, ScScale, default_delta
from .sampling import exact_parameter, pair_length, random_pair
from .splice import (
    SpliceContext,
    hat_total_glue,
    total_glue,
    transfer_cs,
    transfer_ct,
    transfer_ds,
    transfer_dt,
)

TRANSFERS = {"ds": transfer_ds, "dt": transfer_dt, "cs": transfer_cs, "ct": transfer_ct}
KINDS = ("hat", "plain") + tuple(TRANSFERS)
# decay: remainders decaying from s = 0; neck: bumps near s = +-R/2
SAMPLES = ("decay", "neck")


@dataclass(frozen=True)
class SweepSpec:
    lengths: tuple[float, ...] = (5.0, 10.0, 20.0, 40.0)
    levels: tuple[int, ...] = (0, 1)
    deltas: tuple[float, ...] | None = None
    n_samples: int = 8
    ds: float = 0.25
    n_t: int = 16
    dim: int = 2
    kind: str = "hat"
    twist_index: int = 3
    seed: int = 0
    sample: str = "decay"

    def __post_init__(self):
        if self.kind not in KINDS:
            raise ValueError(f"unknown sweep kind {self.kind!r}")
        if self.sample not in SAMPLES:
            raise ValueError(f"unknown sample kind {self.sample!r}")
        if not self.lengths or not self.levels:
            raise ValueError("empty sweep")
        for d in self.deltas or ():
            if not 0 < d < 2 * math.pi:
                raise ValueError(f"delta {d} outside (0, 2 pi)")
        if self.n_samples < 1:
            raise ValueError("need at least one sample")

    def cells(self):
        """(R, m, delta) for every sweep cell; delta defaults to the level's weight."""
        for R in self.lengths:
            for m in self.levels:
                for d in self.deltas or (default_delta(m),):
                    yield R, m, d


@dataclass(frozen=True)
class SweepRow:
    length: float
    level: int
    delta: float
    sample: int
    numerator: float
    denominator: float

    @property
    def ratio(self) -> float:
        return self.numerator / self.denominator


def _level_scale(m: int, delta: float) -> ScScale:
    # only level m is read; pad lower levels below delta so the scale stays increasing
    lower = tuple(delta * (j + 1) / (m + 2) for j in range(m))
    return ScScale(deltas=lower + (delta,))


def sweep_cell(spec: SweepSpec, R: float, m: int, delta: float, rng: np.random.Generator) -> list[SweepRow]:
    a = exact_parameter(R, spec.ds, spec.n_t, spec.twist_index, EXP)
    ctx = SpliceContext(a)
    S = pair_length(ctx.length, spec.ds)
    scale = _level_scale(m, delta)
    rows = []
    for i in range(spec.n_samples):
        # decay just faster than the weight so the sample lies in the weighted space
        draw = dict(kind=spec.sample, rate=(delta + 0.5, delta + 3.0), neck_length=ctx.length)
        if spec.kind == "hat":
            xi = random_pair(rng, S, spec.ds, spec.n_t, spec.dim, "F", **draw)
            q, p = hat_total_glue(ctx, xi)
            num = neck_norm_G(q, p, m, scale, hat=True)
            den = pair_norm_F(xi, m, scale)
        elif spec.kind == "plain":
            h = random_pair(rng, S, spec.ds, spec.n_t, spec.dim, "E", **draw)
            q, p = total_glue(ctx, h)
            num = neck_norm_G(q, p, m, scale, hat=False)
            den = pair_norm_E(h, m, scale)
        else:
            eta = random_pair(rng, S, spec.ds, spec.n_t, spec.dim, "E", **draw)
            num = pair_norm_F(TRANSFERS[spec.kind](ctx, eta), m, scale)
            den = pair_norm_E(eta, m, scale)
        rows.append(SweepRow(ctx.length, m, delta, i, num, den))
    return rows


def _run_cell(args):
    spec, R, m, d, child = args
    return sweep_cell(spec, R, m, d, np.random.default_rng(child))


def run_sweep(spec: SweepSpec, jobs: int = 1) -> list[SweepRow]:
    """All cells in order, each with its own child generator of the seed.

    Results do not depend on ``jobs``: every cell owns its seed.
    """
    cells = list(spec.cells())
    children = np.random.SeedSequence(spec.seed).spawn(len(cells))
    tasks = [(spec, R, m, d, child) for (R, m, d), child in zip(cells, children)]
    if jobs > 1:
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            parts = list(pool.map(_run_cell, tasks))
    else:
        parts = [_run_cell(t) for t in tasks]
    return [row for part in parts for row in part]


@dataclass
class Envelope:
    level: int
    delta: float
    lengths: list[float] = field(default_factory=list)
    lower: list[float] = field(default_factory=list)
    upper: list[float] = field(default_factory=list)


def envelopes(rows: list[SweepRow]) -> list[Envelope]:
    """Per (level, delta) curve: min and max ratio at each R."""
    groups: dict[tuple[int, float], dict[float, list[float]]] = {}
    for r in rows:
        groups.setdefault((r.level, r.delta), {}).setdefault(r.length, []).append(r.ratio)
    out = []
    for (m, d), by_len in sorted(groups.items()):
        env = Envelope(m, d)
        for R in sorted(by_len):
            env.lengths.append(R)
            env.lower.append(min(by_len[R]))
            env.upper.append(max(by_len[R]))
        out.append(env)
    return out


def spread(rows: list[SweepRow]) -> float:
    """max ratio / min ratio over the whole sweep."""
    ratios = [r.ratio for r in rows]
    if not ratios:
        raise ValueError("empty sweep")
    return max(ratios) / min(ratios)
