"""Kobayashi distance and metric on the model domains.

Distances use the doubled normalisation k_disc(0, r) = log((1+r)/(1-r)) by
default; ``use_convention("arctanh")`` halves every distance and metric value.

All distances are evaluated as ``2 asinh(sqrt(t))`` where
``t = rho^2 / (1 - rho^2)`` is assembled from sums of squares, so neither
nearby points nor points close to the boundary suffer cancellation.
"""

from __future__ import annotations

import contextlib
import contextvars
import math
from dataclasses import dataclass
from typing import Sequence

from . import _numeric as nm
from .errors import DomainError

KINDS = ("disc", "ball", "polydisc", "siegel", "slitplane")

_FACTORS = {"doubled": 1.0, "arctanh": 0.5}
_convention: contextvars.ContextVar[str] = contextvars.ContextVar(
    "orbitlab_convention", default="doubled"
)


def convention() -> str:
    return _convention.get()


def convention_factor() -> float:
    return _FACTORS[_convention.get()]


@contextlib.contextmanager
def use_convention(name: str):
    """Temporarily switch the distance normalisation ("doubled" or "arctanh")."""
    if name not in _FACTORS:
        raise ValueError(f"unknown convention {name!r}; expected one of {sorted(_FACTORS)}")
    token = _convention.set(name)
    try:
        yield
    finally:
        _convention.reset(token)


@dataclass(frozen=True)
class Domain:
    """One of the supported hyperbolic domains in C^q."""

    kind: str
    q: int = 1

    def __post_init__(self):
        if self.kind not in KINDS:
            raise ValueError(f"unknown domain kind {self.kind!r}")
        if not isinstance(self.q, int) or self.q < 1:
            raise ValueError("dimension q must be a positive integer")
        if self.kind in ("disc", "slitplane") and self.q != 1:
            raise ValueError(f"{self.kind} has dimension 1")

    def __str__(self) -> str:
        return f"{self.kind} {self.q}"

    @classmethod
    def disc(cls) -> Domain:
        return cls("disc", 1)

    @classmethod
    def ball(cls, q: int) -> Domain:
        return cls("ball", q)

    @classmethod
    def polydisc(cls, q: int) -> Domain:
        return cls("polydisc", q)

    @classmethod
    def siegel(cls, q: int) -> Domain:
        return cls("siegel", q)

    @classmethod
    def slitplane(cls) -> Domain:
        return cls("slitplane", 1)


class _Infinity:
    """The point at infinity of the Siegel model (image of e_1 in the ball)."""

    _instance = None

    def __new__(cls):
        if cls._instance is None:
            cls._instance = super().__new__(cls)
        return cls._instance

    def __repr__(self) -> str:
        return "INFINITY"


INFINITY = _Infinity()


def as_point(p) -> tuple:
    if isinstance(p, (tuple, list)):
        return tuple(p)
    if hasattr(p, "__len__") and not isinstance(p, str):
        return tuple(p)
    return (p,)


def _check_dim(d: Domain, p: Sequence) -> None:
    if len(p) != d.q:
        raise DomainError(f"point has {len(p)} coordinates, {d} needs {d.q}")


def _abs2(c):
    return c.real * c.real + c.imag * c.imag


def _norm2(v: Sequence):
    return nm.fsum(t for c in v for t in (c.real * c.real, c.imag * c.imag))


def _one_minus_norm2(v: Sequence):
    return nm.fsum([1.0] + [-t for c in v for t in (c.real * c.real, c.imag * c.imag)])


def _inner(u: Sequence, v: Sequence):
    """Hermitian product <u, v> = sum u_j conj(v_j)."""
    return sum((a * b.conjugate() for a, b in zip(u, v)), 0j)


def siegel_slack(p: Sequence):
    """Defining function Im z_1 - ||w||^2 of the Siegel half-space."""
    z = p[0]
    return nm.fsum([z.imag] + [-t for c in p[1:] for t in (c.real * c.real, c.imag * c.imag)])


def slack(d: Domain, p: Sequence):
    """Absolute slack of the domain inequality (positive inside)."""
    p = as_point(p)
    _check_dim(d, p)
    if d.kind in ("disc", "ball"):
        return _one_minus_norm2(p)
    if d.kind == "polydisc":
        return min(_one_minus_norm2((c,)) for c in p)
    if d.kind == "siegel":
        return siegel_slack(p)
    z = p[0]
    if z.real > 0:
        return abs(z)
    return abs(z.imag)


def relative_slack(d: Domain, p: Sequence):
    """Slack normalised by the magnitude of the terms it was computed from.

    This is what decides numerical domain exit: a value near machine
    resolution means the point is indistinguishable from the boundary.
    """
    p = as_point(p)
    s = slack(d, p)
    if d.kind == "siegel":
        scale = abs(p[0].imag) + _norm2(p[1:])
        return s / scale if scale else s
    if d.kind == "slitplane":
        z = p[0]
        if z.real > 0:
            return 1.0
        a = abs(z)
        return s / a if a else 0.0
    return s


def contains(d: Domain, p, margin: float = 0.0) -> bool:
    """True iff ``p`` satisfies the domain inequality with slack >= margin.

    The inequality itself is strict, so a point on the boundary is rejected
    even with ``margin=0``.
    """
    if margin < 0:
        raise ValueError("margin must be nonnegative")
    p = as_point(p)
    _check_dim(d, p)
    if not nm.finite(p):
        return False
    with nm.guard(p):
        s = slack(d, p)
        return bool(s > 0 and s >= margin)


def _require(d: Domain, *points) -> None:
    for p in points:
        if not contains(d, p):
            raise DomainError(f"point {p!r} is outside {d}")


# --- Cayley transform and ball automorphisms ---------------------------------


def cayley_transform(direction: str, p) -> tuple:
    """Psi(z, w) = (i(1+z)/(1-z), w/(1-z)) and its inverse.

    ``direction`` is "to_siegel" (ball -> Siegel) or "to_ball".
    """
    p = as_point(p)
    with nm.guard(p):
        if direction == "to_siegel":
            z = p[0]
            den = 1 - z
            if den == 0:
                raise DomainError("Cayley transform has a pole at z = 1")
            return (1j * (1 + z) / den,) + tuple(w / den for w in p[1:])
        if direction == "to_ball":
            z = p[0]
            den = z + 1j
            if den == 0:
                raise DomainError("inverse Cayley transform has a pole at z = -i")
            return ((z - 1j) / den,) + tuple(2j * w / den for w in p[1:])
    raise ValueError("direction must be 'to_siegel' or 'to_ball'")


def ball_automorphism(a, z) -> tuple:
    """The involutive Moebius map phi_a of the ball with phi_a(a) = 0.

    phi_a(z) = (a - P_a z - s_a Q_a z) / (1 - <z, a>), s_a = sqrt(1 - |a|^2).
    """
    a, z = as_point(a), as_point(z)
    if len(a) != len(z):
        raise DomainError("dimension mismatch")
    d = Domain.ball(len(a))
    _require(d, a, z)
    with nm.guard(a, z):
        aa = _norm2(a)
        za = _inner(z, a)
        den = 1 - za
        if aa < 1e-200:
            # s_a = 1 to within 1e-200, so phi_a(z) = (a - z)/(1 - <z, a>)
            return tuple((ac - zc) / den for ac, zc in zip(a, z))
        sa = nm.rsqrt(_one_minus_norm2(a))
        proj = tuple(za / aa * c for c in a)
        return tuple((ac - pc - sa * (zc - pc)) / den for ac, pc, zc in zip(a, proj, z))


# --- Distances ----------------------------------------------------------------


def _ball_ratio(x: Sequence, y: Sequence):
    """rho^2 / (1 - rho^2) for the ball, rho = ||phi_x(y)||."""
    d = [b - a for a, b in zip(x, y)]
    xx = _norm2(x)
    if xx < 1e-200:
        # the perpendicular correction is O(|x|^2) relative
        num = _norm2(d)
    else:
        dx = _inner(d, x)
        par = _abs2(dx) / xx
        perp = [dc - dx / xx * xc for dc, xc in zip(d, x)]
        num = par + _one_minus_norm2(x) * _norm2(perp)
    return num / (_one_minus_norm2(x) * _one_minus_norm2(y))


def _siegel_ratio(x: Sequence, y: Sequence):
    """rho^2 / (1 - rho^2) on the Siegel half-space.

    Obtained by moving x to (i, 0) with a Heisenberg translation and a
    dilation; only differences of coordinates and the two slacks appear.
    """
    r1 = siegel_slack(x)
    r2 = siegel_slack(y)
    dz = y[0] - x[0]
    dw = [b - a for a, b in zip(x[1:], y[1:])]
    t = dz - 2j * _inner(dw, x[1:]) if dw else dz
    num = _abs2(t) + 4 * r1 * _norm2(dw)
    return num / (4 * r1 * r2)


def _slit_to_halfplane(z):
    return 1j * nm.csqrt(z)


def _ratio(d: Domain, x: Sequence, y: Sequence):
    if d.kind in ("disc", "ball"):
        return _ball_ratio(x, y)
    if d.kind == "siegel":
        return _siegel_ratio(x, y)
    if d.kind == "slitplane":
        return _siegel_ratio((_slit_to_halfplane(x[0]),), (_slit_to_halfplane(y[0]),))
    raise AssertionError(d.kind)


def _key(p):
    return tuple((float(c.real), float(c.imag)) for c in p)


def _from_ratio(t) -> float:
    t = max(t, 0)
    return float(2 * nm.asinh(nm.rsqrt(t))) * convention_factor()


def kobayashi_distance(d: Domain, x, y) -> float:
    """Kobayashi distance k_d(x, y)."""
    x, y = as_point(x), as_point(y)
    _check_dim(d, x)
    _check_dim(d, y)
    _require(d, x, y)
    # fixed argument order makes the result exactly symmetric
    if _key(y) < _key(x):
        x, y = y, x
    with nm.guard(x, y):
        if d.kind == "polydisc":
            disc = Domain.disc()
            return max(kobayashi_distance(disc, (a,), (b,)) for a, b in zip(x, y))
        return _from_ratio(_ratio(d, x, y))


def kobayashi_metric(d: Domain, base, direction) -> float:
    """Kobayashi metric kappa_d(base; direction)."""
    z, v = as_point(base), as_point(direction)
    _check_dim(d, z)
    _check_dim(d, v)
    _require(d, z)
    f = convention_factor()
    with nm.guard(z, v):
        if d.kind in ("disc", "ball"):
            s = _one_minus_norm2(z)
            val = 2 * nm.rsqrt(_norm2(v) / s + _abs2(_inner(v, z)) / (s * s))
        elif d.kind == "polydisc":
            val = max(2 * abs(vc) / _one_minus_norm2((zc,)) for zc, vc in zip(z, v))
        elif d.kind == "siegel":
            val = _siegel_metric(z, v)
        else:
            root = nm.csqrt(z[0])
            val = _siegel_metric((1j * root,), (1j * v[0] / (2 * root),))
        return float(val) * f


def _siegel_metric(z: Sequence, v: Sequence):
    r = siegel_slack(z)
    vz = v[0] - 2j * _inner(v[1:], z[1:]) if len(v) > 1 else v[0]
    return 2 * nm.rsqrt(_abs2(vz) / (4 * r * r) + _norm2(v[1:]) / r)


# --- Boundary approach ------------------------------------------------------------


def unit_boundary_point(zeta) -> tuple:
    zeta = as_point(zeta)
    if abs(math.sqrt(float(_norm2(zeta))) - 1.0) > 1e-12:
        raise DomainError("boundary point must be a unit vector (within 1e-12)")
    return zeta


def koranyi_membership(z, zeta, R: float) -> bool:
    """True iff |1 - <z, zeta>| < R (1 - ||z||)."""
    if R <= 1:
        raise ValueError("Koranyi amplitude R must exceed 1")
    z, zeta = as_point(z), unit_boundary_point(zeta)
    _require(Domain.ball(len(z)), z)
    with nm.guard(z):
        one_minus = _one_minus_norm2(z) / (1 + nm.rsqrt(_norm2(z)))
        return bool(abs(1 - _inner(z, zeta)) < R * one_minus)


@dataclass(frozen=True)
class SequenceFlags:
    special: str
    restricted: str
    special_values: tuple[float, ...]
    restricted_ratios: tuple[float, ...]


def _nondecreasing(vals: Sequence[float], slack: float = 1e-12) -> bool:
    return all(b >= a - slack for a, b in zip(vals, vals[1:]))


def sequence_flags(seq, zeta, tail: int = 10) -> SequenceFlags:
    """Empirical special/restricted verdicts for a sequence in the ball tending to zeta.

    Verdicts are "yes", "no" or "inconclusive".
    """
    zeta = unit_boundary_point(zeta)
    pts = [as_point(p) for p in seq]
    if not pts:
        raise ValueError("sequence must be nonempty")
    d = Domain.ball(len(zeta))
    special_vals, ratios, gaps = [], [], []
    for z in pts:
        with nm.guard(z):
            c = _inner(z, zeta)
            proj = tuple(c * e for e in zeta)
            special_vals.append(kobayashi_distance(d, z, proj))
            gap = abs(1 - c)
            gaps.append(float(gap))
            one_minus = 1 - abs(c)
            ratios.append(float(gap / one_minus) if one_minus > 0 else math.inf)

    sv = special_vals[-tail:]
    if max(sv) < 1e-6:
        special = "yes"
    elif min(sv) >= 1e-6 and sv[-1] >= 0.5 * sv[0]:
        # bounded away from zero with no decay over the tail
        special = "no"
    else:
        special = "inconclusive"

    rt, gt = ratios[-tail:], gaps[-tail:]
    if max(rt) < 10 and gt[-1] < 1e-8:
        restricted = "yes"
    elif (rt[-1] >= 10 and _nondecreasing(rt)) or gt[-1] >= gt[0]:
        restricted = "no"
    else:
        restricted = "inconclusive"
    return SequenceFlags(special, restricted, tuple(special_vals), tuple(ratios))


# --- Ball charts: every one-dimensional or Siegel domain seen as a ball --------


def to_ball_chart(d: Domain, p) -> tuple[tuple, object]:
    """Map a native point to the ball model and return (b, 1 - ||b||^2).

    The slack is computed from native coordinates, which keeps it accurate
    when b is within rounding distance of the sphere. Not defined for the
    polydisc.
    """
    p = as_point(p)
    with nm.guard(p):
        if d.kind in ("disc", "ball"):
            return p, _one_minus_norm2(p)
        if d.kind == "slitplane":
            p = (_slit_to_halfplane(p[0]),)
        elif d.kind != "siegel":
            raise ValueError("the polydisc has no ball chart")
        b = cayley_transform("to_ball", p)
        return b, 4 * siegel_slack(p) / _abs2(p[0] + 1j)


def from_ball_chart(d: Domain, b) -> tuple:
    b = as_point(b)
    with nm.guard(b):
        if d.kind in ("disc", "ball"):
            return b
        if d.kind == "siegel":
            return cayley_transform("to_siegel", b)
        if d.kind == "slitplane":
            (h,) = cayley_transform("to_siegel", b)
            return ((h / 1j) ** 2,)
    raise ValueError("the polydisc has no ball chart")


def one_minus_norm(b, slack2=None):
    """1 - ||b||, optionally from a precomputed 1 - ||b||^2."""
    with nm.guard(b):
        s = _one_minus_norm2(b) if slack2 is None else slack2
        return s / (1 + nm.rsqrt(max(1 - s, 0)))
