"""Gluing profiles, gluing parameters and sc-scale bookkeeping.

A gluing profile turns the modulus of a gluing parameter into a neck
length.  Two profiles are supported:

    logarithmic   R = -(1/2pi) ln r
    exponential   R = exp(1/r) - e

The exponential profile overflows doubles already for r < 1/709, so the
modulus of a parameter is carried as its natural logarithm in mpmath
precision.  Float accessors are provided for the grid code.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass
from typing import Sequence

import mpmath

mpmath.mp.dps = 40

LOG = "log"
EXP = "exp"
_KINDS = (LOG, EXP)


@dataclass(frozen=True)
class GluingProfile:
    kind: str = EXP

    def __post_init__(self):
        if self.kind not in _KINDS:
            raise ValueError(f"unknown gluing profile {self.kind!r}")


def _check_kind(kind):
    if isinstance(kind, GluingProfile):
        return kind.kind
    if kind not in _KINDS:
        raise ValueError(f"unknown gluing profile {kind!r}")
    return kind


def length_mp(kind, r) -> mpmath.mpf:
    """Neck length for modulus ``r`` in (0, 1], as an mpmath number."""
    kind = _check_kind(kind)
    r = mpmath.mpf(r)
    if not (0 < r <= 1):
        raise ValueError(f"modulus {r} outside (0, 1]")
    if kind == LOG:
        return -mpmath.log(r) / (2 * mpmath.pi)
    return mpmath.exp(1 / r) - mpmath.e


def length_from_log_modulus(kind, log_r) -> mpmath.mpf:
    """Neck length given ln r; avoids forming r when it underflows."""
    kind = _check_kind(kind)
    log_r = mpmath.mpf(log_r)
    if log_r > 0:
        raise ValueError("log-modulus must be <= 0")
    if kind == LOG:
        return -log_r / (2 * mpmath.pi)
    return mpmath.exp(1 / mpmath.exp(log_r)) - mpmath.e


def gluing_length(kind, r: float) -> float:
    """Neck length R = phi(r) for 0 < r <= 1 (float; may be inf)."""
    val = length_mp(kind, r)
    try:
        return float(val)
    except OverflowError:
        return math.inf


def inverse_length(kind, R: float) -> float:
    """Modulus r with phi(r) = R, for R >= 0."""
    kind = _check_kind(kind)
    if R < 0:
        raise ValueError("neck length must be non-negative")
    R = mpmath.mpf(R)
    if kind == LOG:
        return float(mpmath.exp(-2 * mpmath.pi * R))
    return float(1 / mpmath.log(R + mpmath.e))


@dataclass(frozen=True)
class GluingParameter:
    """Complex gluing parameter a = |a| exp(-2 pi i twist).

    ``log_modulus`` is ln|a| (None encodes a = 0); ``twist`` lies in [0, 1).
    """

    log_modulus: mpmath.mpf | None
    twist: float = 0.0

    def __post_init__(self):
        if self.log_modulus is not None:
            lm = mpmath.mpf(self.log_modulus)
            if lm >= 0:
                raise ValueError("gluing parameters need |a| < 1")
            object.__setattr__(self, "log_modulus", lm)
        object.__setattr__(self, "twist", _normalize_twist(self.twist))

    @classmethod
    def zero(cls) -> "GluingParameter":
        return cls(None, 0.0)

    @classmethod
    def from_complex(cls, a: complex) -> "GluingParameter":
        a = complex(a)
        if a == 0:
            return cls.zero()
        twist = -cmath.phase(a) / (2 * math.pi)
        return cls(mpmath.log(abs(a)), twist)

    @classmethod
    def from_polar(cls, modulus: float, twist: float) -> "GluingParameter":
        if modulus == 0:
            return cls.zero()
        if modulus < 0:
            raise ValueError("modulus must be non-negative")
        return cls(mpmath.log(mpmath.mpf(modulus)), twist)

    @classmethod
    def from_length(cls, kind, R: float, twist: float = 0.0) -> "GluingParameter":
        kind = _check_kind(kind)
        R = mpmath.mpf(R)
        if kind == LOG:
            return cls(-2 * mpmath.pi * R, twist)
        return cls(-mpmath.log(mpmath.log(R + mpmath.e)), twist)

    @property
    def is_zero(self) -> bool:
        return self.log_modulus is None

    @property
    def modulus(self) -> float:
        if self.is_zero:
            return 0.0
        return float(mpmath.exp(self.log_modulus))

    @property
    def value(self) -> complex:
        return self.modulus * cmath.exp(-2j * math.pi * self.twist)

    def length(self, kind=EXP) -> float:
        if self.is_zero:
            return math.inf
        val = length_from_log_modulus(kind, self.log_modulus)
        try:
            return float(val)
        except OverflowError:
            return math.inf

    def length_mp(self, kind=EXP) -> mpmath.mpf:
        if self.is_zero:
            return mpmath.inf
        return length_from_log_modulus(kind, self.log_modulus)


def _normalize_twist(twist: float) -> float:
    twist = float(twist) % 1.0
    if twist >= 1.0:  # -tiny % 1.0 rounds to 1.0
        twist = 0.0
    return twist


def profile_convert(a: GluingParameter) -> GluingParameter:
    """Map an exponential-profile parameter to the logarithmic one with equal neck length.

    |a~| = exp(-2 pi (e^{1/|a|} - e)); the twist is kept and 0 maps to 0.
    """
    if a.is_zero:
        return GluingParameter.zero()
    r = mpmath.exp(a.log_modulus)
    log_new = -2 * mpmath.pi * (mpmath.exp(1 / r) - mpmath.e)
    return GluingParameter(log_new, a.twist)


def convert_modulus(r: float) -> float:
    """|a~| for a given exponential-profile modulus r in (0, 1] (float, may underflow)."""
    if r == 0:
        return 0.0
    return float(mpmath.exp(-2 * mpmath.pi * length_mp(EXP, r)))


def degeneration_index(quadrant: Sequence[float], free: Sequence[float] = ()) -> int:
    """Number of vanishing quadrant coordinates; the free part is ignored."""
    count = 0
    for x in quadrant:
        if x < 0:
            raise ValueError(f"negative quadrant coordinate {x}")
        if x == 0:
            count += 1
    return count


def bilevel_valid(m: int, k: int) -> bool:
    if m < 0 or k < 0:
        raise ValueError("levels are non-negative")
    return k <= m + 1


@dataclass(frozen=True)
class BiLevel:
    m: int
    k: int

    def __post_init__(self):
        if not bilevel_valid(self.m, self.k):
            raise ValueError(f"bi-level ({self.m}, {self.k}) violates k <= m + 1")


def default_delta(m: int) -> float:
    return 2 * math.pi - math.pi * 2.0 ** (-m)


@dataclass(frozen=True)
class ScScale:
    """Strictly increasing weights delta_m in (0, 2 pi).

    With ``deltas=None`` the closed form 2 pi - pi 2^-m is used for every
    level.  E-type spaces sit at Sobolev order m + e_offset, F-type at
    m + f_offset.
    """

    deltas: tuple[float, ...] | None = None
    e_offset: int = 3
    f_offset: int = 2

    def __post_init__(self):
        if self.deltas is not None:
            ds = tuple(float(d) for d in self.deltas)
            object.__setattr__(self, "deltas", ds)
            for d in ds:
                if not (0 < d < 2 * math.pi):
                    raise ValueError(f"weight {d} outside (0, 2pi)")
            if any(b <= a for a, b in zip(ds, ds[1:])):
                raise ValueError("weights must be strictly increasing")

    def delta(self, m: int) -> float:
        if m < 0:
            raise ValueError("level must be non-negative")
        if self.deltas is None:
            return default_delta(m)
        if m >= len(self.deltas):
            raise ValueError(f"scale has no level {m}")
        return self.deltas[m]

    def e_order(self, m: int) -> int:
        return m + self.e_offset

    def f_order(self, m: int) -> int:
        return m + self.f_offset
