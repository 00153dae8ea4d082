"""Working-precision helpers.

Points are tuples of complex scalars. Plain ``complex`` means native double
precision; ``mpmath.mpc`` coordinates switch every computation that touches
them to the mpmath context. Backward orbits approach the boundary
exponentially fast, so the orbit-based modules default to ``DEFAULT_DIGITS``.
"""

from __future__ import annotations

import contextlib
import math
from typing import Iterable, Sequence

import mpmath

DEFAULT_DIGITS = 50
DOUBLE_DIGITS = 16

Point = tuple


def is_mp(x) -> bool:
    return isinstance(x, (mpmath.mpc, mpmath.mpf))


def uses_mp(*points: Sequence) -> bool:
    return any(is_mp(c) for p in points for c in p)


def working(digits: int | None):
    """Context running mpmath at ``digits`` decimal digits (no-op for None).

    mpmath keeps its precision in a process-wide setting, so this is not
    thread-safe."""
    if digits is None:
        return contextlib.nullcontext()
    return mpmath.workdps(max(int(digits), mpmath.mp.dps))


def guard(*points: Sequence):
    """Keep at least DEFAULT_DIGITS while operating on mp points."""
    if uses_mp(*points):
        return mpmath.workdps(max(mpmath.mp.dps, DEFAULT_DIGITS))
    return contextlib.nullcontext()


def lift(point: Sequence, digits: int | None) -> Point:
    if digits is None:
        return tuple(complex(c) for c in point)
    with working(digits):
        return tuple(mpmath.mpc(c) for c in point)


def lower(point: Sequence) -> tuple[complex, ...]:
    return tuple(complex(c) for c in point)


def fsum(terms: Iterable) -> float:
    terms = list(terms)
    if any(is_mp(t) for t in terms):
        return mpmath.fsum(terms)
    return math.fsum(terms)


def rsqrt(x):
    return mpmath.sqrt(x) if is_mp(x) else math.sqrt(x)


def rlog(x):
    return mpmath.log(x) if is_mp(x) else math.log(x)


def asinh(x):
    return mpmath.asinh(x) if is_mp(x) else math.asinh(x)


def csqrt(z):
    import cmath

    return mpmath.sqrt(z) if is_mp(z) else cmath.sqrt(z)


def resolution(digits: int | None) -> float:
    """Relative boundary slack below which a point counts as having left.

    Keeps six significant digits of slack: 1e-10 in double precision.
    """
    d = DOUBLE_DIGITS if digits is None else int(digits)
    return 10.0 ** -(d - 6)


def digits_of(point: Sequence) -> int | None:
    return mpmath.mp.dps if uses_mp(point) else None


def finite(point: Sequence) -> bool:
    for c in point:
        if is_mp(c):
            if not (mpmath.isfinite(c.real) and mpmath.isfinite(c.imag)):
                return False
        elif not (math.isfinite(c.real) and math.isfinite(c.imag)):
            return False
    return True
