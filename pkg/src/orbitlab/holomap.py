"""Forward and backward orbits of a holomorphic self-map.

Backward orbits of a map with a repelling boundary point run into the
boundary geometrically, so by default they are computed with mpmath at
``DEFAULT_DIGITS`` decimal digits. Pass ``digits=None`` for plain doubles.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Optional

import mpmath
import numpy as np

from . import _numeric as nm
from .dsl import MapDef, eval_jet, eval_value
from .errors import (
    DomainError,
    EvaluationError,
    InversionError,
    BelowResolution,
    LeftDomain,
    NewtonDiverged,
    SingularJacobian,
)
from .geometry import as_point, contains, relative_slack

NEWTON_MAX_ITER = 50
DEFAULT_CAP = 200


@dataclass
class OrbitRecord:
    direction: str  # "forward" or "backward"
    points: list
    residuals: list = field(default_factory=list)
    exit_index: Optional[int] = None
    exit_reason: Optional[str] = None
    digits: Optional[int] = None  # working precision the points were computed at

    def __len__(self) -> int:
        return len(self.points)

    @property
    def complete(self) -> bool:
        return self.exit_index is None

    def precision(self):
        """Context manager restoring the orbit's working precision."""
        return nm.working(self.digits)

    def as_complex(self) -> list:
        return [nm.lower(p) for p in self.points]


def _norm(v) -> float:
    return math.sqrt(sum(float(abs(c)) ** 2 for c in v))


def _tolerance(y) -> float:
    base = 1e-12 if not nm.uses_mp(y) else 10.0 ** -(mpmath.mp.dps - 4)
    return base * max(1.0, _norm(y))


def inside(m: MapDef, p, digits: int | None = None) -> bool:
    """Membership with the numerical exit rule used by every orbit.

    A point whose relative slack is below ``resolution(digits)`` cannot be
    told apart from the boundary and counts as outside.
    """
    if not contains(m.domain, p):
        return False
    with nm.guard(p):
        return bool(relative_slack(m.domain, p) >= nm.resolution(digits))


def _residual(m: MapDef, x, y) -> float:
    fx = eval_value(m, x)
    return _norm([a - b for a, b in zip(fx, y)])


def _solve(jac, rhs, mp: bool):
    if mp:
        try:
            sol = mpmath.lu_solve(mpmath.matrix(jac.tolist()), mpmath.matrix(list(rhs)))
        except ZeroDivisionError:
            raise SingularJacobian("Jacobian is singular") from None
        return [sol[i] for i in range(len(rhs))]
    a = np.asarray(jac, dtype=complex)
    if not np.all(np.isfinite(a)) or np.linalg.cond(a) > 1e14:
        raise SingularJacobian("Jacobian is singular or too ill-conditioned")
    return list(np.linalg.solve(a, np.asarray(rhs, dtype=complex)))


def _newton(m: MapDef, y, guess, tol: float):
    mp = nm.uses_mp(y)
    x = tuple(guess)
    jet = eval_jet(m, x)
    r = [a - b for a, b in zip(jet.value, y)]
    res = _norm(r)
    for _ in range(NEWTON_MAX_ITER):
        if res < tol:
            return x, res
        step = _solve(jet.jacobian, r, mp)
        t = 1.0
        while True:
            trial = tuple(a - t * s for a, s in zip(x, step))
            try:
                tjet = eval_jet(m, trial)
                tr = [a - b for a, b in zip(tjet.value, y)]
                tres = _norm(tr)
            except EvaluationError:
                tres = math.inf
            if tres < res:
                break
            t *= 0.5
            if t < 1e-10:
                raise NewtonDiverged(f"damping failed to reduce residual {res:.3g}")
        x, jet, r, res = trial, tjet, tr, tres
    if res < tol:
        return x, res
    raise NewtonDiverged(f"residual {res:.3g} above {tol:.3g} after {NEWTON_MAX_ITER} iterations")


def _invert(m: MapDef, y, guess, digits):
    tol = _tolerance(y)
    if m.inverse is not None:
        x = m.apply_inverse(y)
        res = _residual(m, x, y)
        if res >= tol:
            x, res = _newton(m, y, x, tol)
    else:
        if guess is None:
            raise ValueError("a guess is required for maps without an exact inverse")
        x, res = _newton(m, y, nm.lift(guess, digits) if nm.uses_mp(y) else guess, tol)
    if not contains(m.domain, x):
        raise LeftDomain(f"preimage {nm.lower(x)!r} is not inside {m.domain}")
    if not inside(m, x, digits):
        raise BelowResolution(f"preimage {nm.lower(x)!r} is within working resolution of the boundary")
    return x, res


def invert_point(m: MapDef, y, guess=None, digits: int | None = None):
    """Return x in the domain with f(x) = y.

    Uses the exact inverse expressions when the map carries them, otherwise
    damped Newton from ``guess``. ``digits`` selects mpmath precision; the
    result then has mpmath coordinates.
    """
    y = as_point(y)
    if len(y) != m.q:
        raise DomainError(f"point has {len(y)} coordinates, map expects {m.q}")
    with nm.working(digits):
        y = nm.lift(y, digits) if digits is not None else y
        x, _ = _invert(m, y, guess, digits)
        return x


def forward_orbit(m: MapDef, x, n: int, digits: int | None = None, cap: int | None = None) -> OrbitRecord:
    """Points x, f(x), ..., f^n(x), stopping early if an iterate leaves the domain."""
    _check_count(n, cap)
    x = as_point(x)
    with nm.working(digits):
        p = nm.lift(x, digits)
        if not contains(m.domain, p):
            raise DomainError(f"start point {x!r} is outside {m.domain}")
        rec = OrbitRecord("forward", [p], digits=digits)
        for k in range(1, n + 1):
            try:
                p = eval_value(m, p)
            except (EvaluationError, ZeroDivisionError, OverflowError) as exc:
                rec.exit_index, rec.exit_reason = k, f"evaluation: {exc}"
                break
            if not nm.finite(p) or not contains(m.domain, p):
                rec.exit_index, rec.exit_reason = k, "left domain"
                break
            rec.points.append(p)
    return rec


def backward_orbit(m: MapDef, x, n: int, digits: int | None = nm.DEFAULT_DIGITS,
                   cap: int | None = None) -> OrbitRecord:
    """Points x = z_0, z_1, ..., z_n with f(z_{k+1}) = z_k.

    Each inversion is warm-started at the previous point. On failure the
    orbit is truncated and ``exit_index``/``exit_reason`` say why.
    """
    _check_count(n, cap)
    x = as_point(x)
    with nm.working(digits):
        p = nm.lift(x, digits)
        if not contains(m.domain, p):
            raise DomainError(f"start point {x!r} is outside {m.domain}")
        rec = OrbitRecord("backward", [p], digits=digits)
        for k in range(1, n + 1):
            try:
                p, res = _invert(m, p, p, digits)
            except (InversionError, EvaluationError, ZeroDivisionError, OverflowError) as exc:
                rec.exit_index = k
                rec.exit_reason = f"{type(exc).__name__}: {exc}"
                break
            rec.points.append(p)
            rec.residuals.append(res)
    return rec


def backward_orbit_adaptive(m: MapDef, x, n: int, digits: int = nm.DEFAULT_DIGITS,
                            max_digits: int = 400, cap: int | None = None) -> OrbitRecord:
    """backward_orbit, doubling the precision while the orbit stops only
    because it got too close to the boundary to resolve."""
    while True:
        rec = backward_orbit(m, x, n, digits=digits, cap=cap)
        if rec.complete or not rec.exit_reason.startswith("BelowResolution") or 2 * digits > max_digits:
            return rec
        digits *= 2


def forward_orbit_adaptive(m: MapDef, x, n: int, digits: int = nm.DEFAULT_DIGITS,
                           max_digits: int = 400, cap: int | None = None) -> OrbitRecord:
    """forward_orbit, doubling the precision while that lets the orbit run longer.

    An orbit that overshoots the domain for analytic reasons stops at the
    same index at every precision; one that merely hit the rounding floor
    gets further with more digits.
    """
    rec = forward_orbit(m, x, n, digits=digits, cap=cap)
    while not rec.complete and 2 * digits <= max_digits:
        digits *= 2
        more = forward_orbit(m, x, n, digits=digits, cap=cap)
        if not more.complete and more.exit_index <= rec.exit_index:
            return rec
        rec = more
    return rec


def _check_count(n: int, cap: int | None) -> None:
    cap = DEFAULT_CAP if cap is None else cap
    if n < 0:
        raise ValueError("orbit length must be nonnegative")
    if n > cap:
        raise ValueError(f"orbit length {n} exceeds cap {cap}; raise cap explicitly")
