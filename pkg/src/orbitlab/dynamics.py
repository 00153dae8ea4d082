"""Step sequences, divergence rate, type classification, Denjoy-Wolff point.

Limits of monotone sequences are estimated with a doubling test: the
sequence is sampled at n = 0, 1, 2, 4, 8, ... and the increments between
consecutive samples decide the verdict. Window tests over consecutive n
cannot tell slow logarithmic growth from convergence.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Optional, Sequence

from . import _numeric as nm
from .dsl import MapDef, eval_jet, eval_value
from .errors import DomainError, EvaluationError, InversionError
from .geometry import (
    INFINITY,
    as_point,
    contains,
    from_ball_chart,
    kobayashi_distance,
    one_minus_norm,
    to_ball_chart,
)
from .holomap import _solve, backward_orbit, backward_orbit_adaptive, forward_orbit, forward_orbit_adaptive

CONVERGED_TOL = 1e-6
DIVERGING_TOL = 1e-4
RATE_THRESHOLD = 1e-6
DILATION_TAIL = 20
CLASSIFY_M = 64  # largest step used by classify_type
MONOTONE_SLACK = 1e-9


@dataclass
class StepEstimate:
    m: int
    values: list
    limit: float
    verdict: str  # converged, diverging, inconclusive
    table: list = field(default_factory=list)  # (n, value) at doubling indices
    monotone: bool = True
    exit_index: Optional[int] = None


@dataclass
class TypeReport:
    type: str  # elliptic, parabolic, hyperbolic, inconclusive
    rate: float
    evidence: list  # rows (m, sigma_m, slope)
    source: str = "backward"  # or "forward-only"
    notes: str = ""


@dataclass
class DWReport:
    kind: str  # interior, boundary, inconclusive
    point: object  # interior point, native boundary point, or None
    ball_point: Optional[tuple]  # boundary point as a unit vector in the ball chart
    dilation: Optional[float]
    converged_starts: int
    diagnostics: dict = field(default_factory=dict)


def doubling_indices(length: int) -> list:
    idx = [0]
    n = 1
    while n < length:
        idx.append(n)
        n *= 2
    return idx


def doubling_test(values: Sequence[float], converged_tol: float = CONVERGED_TOL,
                  diverging_tol: float = DIVERGING_TOL):
    """Verdict and limit estimate for a monotone sequence.

    Returns (verdict, limit, table). A converged limit gets an Aitken-style
    correction when the last two increments shrink geometrically.
    """
    idx = doubling_indices(len(values))
    table = [(n, values[n]) for n in idx]
    if len(table) < 3:
        return "inconclusive", float(values[-1]) if values else math.nan, table
    deltas = [abs(b[1] - a[1]) for a, b in zip(table, table[1:])]
    last, prev = deltas[-1], deltas[-2]
    v = float(table[-1][1])
    if last < converged_tol:
        if prev > 1e-13 and 0 < last < prev:
            rho = last / prev
            sign = 1.0 if table[-1][1] >= table[-2][1] else -1.0
            v += sign * last * rho / (1 - rho)
        return "converged", v, table
    if last >= diverging_tol and prev >= diverging_tol and last >= 0.75 * prev:
        return "diverging", math.inf, table
    return "inconclusive", v, table


def _is_monotone(values: Sequence[float], increasing: bool) -> bool:
    s = 1 if increasing else -1
    return all(s * (b - a) >= -MONOTONE_SLACK for a, b in zip(values, values[1:]))


def _estimate(m: int, values: list, increasing: bool, exit_index) -> StepEstimate:
    verdict, limit, table = doubling_test(values)
    if exit_index is not None:
        verdict = "inconclusive"
    return StepEstimate(m, values, limit, verdict, table, _is_monotone(values, increasing), exit_index)


def _backward(m: MapDef, x, n: int, digits):
    if digits is None:
        return backward_orbit(m, x, n, digits=None, cap=max(n, 200))
    return backward_orbit_adaptive(m, x, n, digits=digits, cap=max(n, 200))


def _forward(m: MapDef, x, n: int, digits):
    if digits is None:
        return forward_orbit(m, x, n, digits=None, cap=max(n, 200))
    return forward_orbit_adaptive(m, x, n, digits=digits, cap=max(n, 200))


def backward_step(m: MapDef, x, step: int = 1, n_max: int = 64,
                  digits: int | None = nm.DEFAULT_DIGITS) -> StepEstimate:
    """sigma_step(x) as the limit of k(f^{-n-step} x, f^{-n} x), n = 0..n_max."""
    if step < 1:
        raise ValueError("step must be positive")
    n_total = n_max + step
    orbit = _backward(m, x, n_total, digits)
    pts = orbit.points
    with orbit.precision():
        values = [kobayashi_distance(m.domain, pts[n + step], pts[n]) for n in range(len(pts) - step)]
    return _estimate(step, values, True, orbit.exit_index)


def forward_step(m: MapDef, x, step: int = 1, n_max: int = 64,
                 digits: int | None = nm.DEFAULT_DIGITS) -> StepEstimate:
    """s_step(x) as the limit of k(f^n x, f^{n+step} x), n = 0..n_max."""
    if step < 1:
        raise ValueError("step must be positive")
    n_total = n_max + step
    orbit = _forward(m, x, n_total, digits)
    pts = orbit.points
    with orbit.precision():
        values = [kobayashi_distance(m.domain, pts[n], pts[n + step]) for n in range(len(pts) - step)]
    return _estimate(step, values, False, orbit.exit_index)


def divergence_rate(m: MapDef, x, m_max: int = 50, digits: int | None = nm.DEFAULT_DIGITS) -> float:
    """min over 1 <= j <= m_max of k(x, f^j x) / j.

    The divergence rate is the infimum of these quotients, so the result is
    an upper bound for it that can only decrease as ``m_max`` grows.
    """
    orbit = _forward(m, x, m_max, digits)
    pts = orbit.points
    if len(pts) < 2:
        raise DomainError("forward orbit left the domain immediately")
    with orbit.precision():
        return min(kobayashi_distance(m.domain, pts[0], pts[j]) / j for j in range(1, len(pts)))


# --- Classification -------------------------------------------------------------


def _radius_growth(m: MapDef, pts: list) -> tuple[float, float]:
    """Largest distance from the start over the first half and over all points."""
    d = [kobayashi_distance(m.domain, pts[0], p) for p in pts]
    half = len(d) // 2 + 1
    return max(d[:half]), max(d)


def _classify_table(rows: list, radius: tuple[float, float]):
    """Type and rate from rows (m, s_m) at m = 1, 2, 4, ... and the radius test."""
    sig = [s for _, s in rows]
    growth = [b - a for a, b in zip(sig, sig[1:])]
    r_half, r_all = radius
    if (len(growth) >= 2 and max(abs(g) for g in growth[-2:]) < CONVERGED_TOL) or (
        r_all - r_half < max(CONVERGED_TOL, 0.01 * r_all)
    ):
        return "elliptic", 0.0
    slopes = [(sig[j + 1] - sig[j]) / rows[j][0] for j in range(len(sig) - 1)]
    if len(slopes) < 3:
        return "inconclusive", math.nan
    s1, s2 = slopes[-2], slopes[-1]
    if s2 > RATE_THRESHOLD and abs(s2 - s1) <= 0.1 * s2:
        return "hyperbolic", s2
    if 0 <= s2 <= 0.75 * s1 and slopes[-3] > 0 and s1 <= 0.75 * slopes[-3]:
        return "parabolic", 0.0
    return "inconclusive", math.nan


def _rows_with_slopes(rows: list) -> list:
    out = []
    for j, (mm, s) in enumerate(rows):
        slope = (rows[j + 1][1] - s) / mm if j + 1 < len(rows) else math.nan
        out.append((mm, s, slope))
    return out


def classify_type(m: MapDef, x, m_max: int = CLASSIFY_M,
                  digits: int | None = nm.DEFAULT_DIGITS) -> TypeReport:
    """Elliptic, parabolic or hyperbolic, from the growth of sigma_m in m.

    sigma_m is read off one backward orbit of length 2 m_max at
    m = 1, 2, 4, ..., m_max. Bounded sigma_m (no growth over the last two
    doublings, or an orbit that stops spreading) means elliptic; a stable
    positive slope means hyperbolic with that slope as the rate; slopes that
    keep shrinking mean parabolic. Points without a long enough backward
    orbit are classified from the forward orbit instead.
    """
    ms = [1 << j for j in range(int(math.log2(m_max)) + 1)]
    n_total = 2 * m_max
    orbit = _backward(m, x, n_total, digits)
    if orbit.complete:
        pts = orbit.points
        with orbit.precision():
            rows = [(mm, kobayashi_distance(m.domain, pts[-1], pts[-1 - mm])) for mm in ms]
            radius = _radius_growth(m, pts)
        kind, rate = _classify_table(rows, radius)
        return TypeReport(kind, rate, _rows_with_slopes(rows), "backward")
    fwd = _forward(m, x, n_total, digits)
    pts = fwd.points
    note = f"backward orbit stopped at step {orbit.exit_index} ({orbit.exit_reason})"
    if not fwd.complete:
        return TypeReport("inconclusive", math.nan, [], "forward-only", note + "; forward orbit also stopped")
    with fwd.precision():
        rows = [(mm, kobayashi_distance(m.domain, pts[0], pts[mm])) for mm in ms]
        radius = _radius_growth(m, pts)
    kind, rate = _classify_table(rows, radius)
    return TypeReport(kind, rate, _rows_with_slopes(rows), "forward-only", note)


# --- Denjoy-Wolff point and dilation -------------------------------------------


def _chart_of(m: MapDef):
    if m.domain.kind == "polydisc":
        raise ValueError("the polydisc has no ball chart; use per-coordinate disc maps")
    return m.domain


def _native_boundary(m: MapDef, zeta: tuple):
    kind = m.domain.kind
    if kind in ("disc", "ball"):
        return zeta
    if kind == "siegel":
        if abs(zeta[0] - 1) < 1e-9:
            return INFINITY
        return from_ball_chart(m.domain, tuple(complex(c) * (1 - 1e-300) for c in zeta))
    # slit plane: the ball point 1 is infinity, -1 is the origin
    if abs(zeta[0] - 1) < 1e-9:
        return INFINITY
    h = 1j * (1 + zeta[0]) / (1 - zeta[0])
    return ((h / 1j) ** 2,)


def _interior_fixed_point(m: MapDef, guess):
    """Newton on f(x) - x; returns the fixed point or None."""
    x = tuple(guess)
    mp = nm.uses_mp(x)
    for _ in range(60):
        try:
            jet = eval_jet(m, x)
        except EvaluationError:
            return None
        r = [a - b for a, b in zip(jet.value, x)]
        if max(float(abs(c)) for c in r) < (1e-20 if mp else 1e-13):
            break
        jac = jet.jacobian.copy()
        for i in range(len(x)):
            jac[i, i] = jac[i, i] - 1
        try:
            step = _solve(jac, r, mp)
        except InversionError:
            return None
        x = tuple(a - s for a, s in zip(x, step))
        if not nm.finite(x):
            return None
    else:
        return None
    if contains(m.domain, x) and all(abs(complex(a - b)) < 1e-9 for a, b in zip(eval_value(m, x), x)):
        return x
    return None


def denjoy_wolff(m: MapDef, starts: Sequence, n: int = 60,
                 digits: int | None = nm.DEFAULT_DIGITS) -> DWReport:
    """Locate the Denjoy-Wolff point from forward orbits of ``starts``.

    Orbits that stay in a compact set mean an interior fixed point (found by
    Newton from the last iterate). Otherwise the orbits are read in the ball
    chart; if all of them approach one boundary point, it is reported with
    the dilation estimated along the first orbit.
    """
    if not starts:
        raise ValueError("at least one start is required")
    if m.domain.kind == "polydisc":
        return _denjoy_wolff_polydisc(m, starts, n, digits)
    orbits = [_forward(m, s, n, digits) for s in starts]
    traces = [_ball_trace(m, orb) for orb in orbits]
    slacks = [t["slack"][-1] for t in traces]
    diag = {"final_slack": slacks}
    if all(s > 1e-3 for s in slacks) and all(t["radius"][1] - t["radius"][0] < max(1e-6, 0.05 * t["radius"][1])
                                           for t in traces):
        with orbits[0].precision():
            fp = _interior_fixed_point(m, orbits[0].points[-1]) or _interior_fixed_point(m, orbits[0].points[0])
        if fp is not None:
            return DWReport("interior", nm.lower(fp), None, None, len(starts), diag)
        return DWReport("inconclusive", None, None, None, 0, dict(diag, reason="bounded orbits but no fixed point found"))
    near = [s < 1e-6 for s in slacks]
    ref = traces[0]["limit"]
    spread = max(_dist(t["limit"], ref) for t in traces)
    diag["spread"] = spread
    if not all(near) or spread >= 1e-6:
        return DWReport("inconclusive", None, None, None, sum(near),
                        dict(diag, reason="orbits disagree or stay away from the boundary"))
    t0 = traces[0]
    dists = [_dist(b, ref) for b in t0["ball"][:-1]]
    dil = _tail_min(t0["ratio"], t0["gap"][:-1], dists, floor=nm.resolution(orbits[0].digits))
    return DWReport("boundary", _native_boundary(m, ref), ref, dil, len(starts), diag)


def _ball_trace(m: MapDef, orb) -> dict:
    """Ball-chart view of an orbit: points, slacks, gaps and successive gap ratios."""
    with orb.precision():
        charts = [to_ball_chart(m.domain, p) for p in orb.points]
        gaps = [one_minus_norm(b, s2) for b, s2 in charts]
        ratios = [float(g1 / g0) for g0, g1 in zip(gaps, gaps[1:])]
        radius = _radius_growth(m, orb.points)
    ball = [tuple(complex(c) for c in b) for b, _ in charts]
    last = ball[-1]
    nb = math.sqrt(sum(abs(c) ** 2 for c in last))
    return {
        "ball": ball,
        "slack": [float(s2) for _, s2 in charts],
        "gap": [float(g) for g in gaps],
        "ratio": ratios,
        "radius": radius,
        "limit": tuple(c / nb for c in last),
    }


def _denjoy_wolff_polydisc(m: MapDef, starts, n, digits) -> DWReport:
    orbits = [_forward(m, s, n, digits) for s in starts]
    finals = [nm.lower(o.points[-1]) for o in orbits]
    spread = max(max(abs(a - b) for a, b in zip(finals[0], f)) for f in finals)
    diag = {"finals": finals, "spread": spread}
    if spread < 1e-6 and all(abs(c) < 1 - 1e-3 for c in finals[0]):
        fp = _interior_fixed_point(m, orbits[0].points[-1])
        if fp is not None:
            return DWReport("interior", nm.lower(fp), None, None, len(starts), diag)
    if spread < 1e-6:
        return DWReport("boundary", finals[0], None, None, len(starts), diag)
    return DWReport("inconclusive", None, None, None, 0, diag)


def _dist(b, zeta) -> float:
    return math.sqrt(sum(abs(complex(a) - complex(z)) ** 2 for a, z in zip(b, zeta)))


def _tail_min(ratios: list, gaps: list, dists: list, floor: float, tail: int = DILATION_TAIL) -> float:
    """Liminf surrogate: min over the last ``tail`` usable ratios.

    A ratio is usable when its point lies within 1e-3 of the boundary point
    and its gap to the sphere is above the working resolution.
    """
    usable = [r for r, g, d in zip(ratios, gaps, dists) if d < 1e-3 and g > floor and math.isfinite(r)]
    if not usable:
        usable = [r for r in ratios if math.isfinite(r)]
    if not usable:
        return math.nan
    return min(usable[-tail:])


def dilation_at(m: MapDef, zeta, approach: Sequence, chart: str = "ball",
                digits: int | None = nm.DEFAULT_DIGITS) -> float:
    """Estimate the dilation of f at the boundary point ``zeta``.

    ``zeta`` and the approach points are given in the ball chart of the
    domain (Cayley transform for Siegel maps); pass ``chart="native"`` to
    give the approach points in the map's own coordinates. Returns the
    minimum of (1 - ||f(z)||)/(1 - ||z||) over the approach tail.
    """
    dom = _chart_of(m)
    if zeta is INFINITY:
        zeta = (1,) + (0,) * (m.q - 1)
    zeta = tuple(complex(c) for c in as_point(zeta))
    ratios, gaps, dists = [], [], []
    with nm.working(digits):
        for p in approach:
            p = nm.lift(as_point(p), digits)
            if chart == "ball":
                native = from_ball_chart(dom, p)
            elif chart == "native":
                native = p
            else:
                raise ValueError("chart must be 'ball' or 'native'")
            if not contains(dom, native):
                raise DomainError(f"approach point {nm.lower(p)!r} is not inside the domain")
            b0, s0 = to_ball_chart(dom, native)
            b1, s1 = to_ball_chart(dom, eval_value(m, native))
            g0 = one_minus_norm(b0, s0)
            ratios.append(float(one_minus_norm(b1, s1) / g0))
            gaps.append(float(g0))
            dists.append(_dist(b0, zeta))
    if not dists or dists[-1] >= 1e-3:
        raise ValueError("approach sequence does not reach within 1e-3 of the boundary point")
    return _tail_min(ratios, gaps, dists, floor=nm.resolution(digits))
