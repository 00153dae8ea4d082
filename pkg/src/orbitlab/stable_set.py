"""Bounded-step equivalence, empirical partition into canonical submanifolds,
per-class rate and tangent-space membership.

Two points are equivalent when k(f^{-n} x, f^{-n} y) stays bounded as n grows.
The sequence is increasing, so the test samples it at n = 1, 2, 4, ... and
looks at the last increment.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from itertools import combinations
from typing import Optional, Sequence

import numpy as np
from scipy.sparse import coo_matrix
from scipy.sparse.csgraph import connected_components

from . import _numeric as nm
from .dsl import MapDef, eval_jet
from .dynamics import StepEstimate, classify_type, doubling_indices, doubling_test, _backward
from .errors import InconclusiveError
from .geometry import as_point, kobayashi_distance, kobayashi_metric
from .holomap import OrbitRecord, _solve

BOUNDED_TOL = 1e-6
UNBOUNDED_TOL = 1e-3
DISTANCE_CAP = 60.0
MONOTONE_SLACK = 1e-9


@dataclass
class BoundednessVerdict:
    verdict: str  # bounded, unbounded, inconclusive
    series: list  # (n, value) at doubling indices
    bound_estimate: Optional[float] = None
    reason: str = ""
    monotone: bool = True


@dataclass
class Partition:
    samples: list
    class_of: dict  # sample index -> class index, resolved samples only
    classes: list  # list of dicts: members, mu
    unresolved: list  # sample indices
    non_stable: list  # sample indices whose backward orbit stops or has unbounded step
    verdicts: dict = field(default_factory=dict)  # (i, j) -> verdict, i < j

    @property
    def n_classes(self) -> int:
        return len(self.classes)

    def groups(self) -> list:
        return [sorted(c["members"]) for c in self.classes]


def _series_verdict(series: list, cap: float = DISTANCE_CAP) -> BoundednessVerdict:
    vals = [v for _, v in series]
    mono = all(b >= a - MONOTONE_SLACK for a, b in zip(vals, vals[1:]))
    if any(not math.isfinite(v) or v > cap for v in vals):
        return BoundednessVerdict("unbounded", series, None, f"value exceeds cap {cap:g}", mono)
    if len(vals) < 3:
        return BoundednessVerdict("inconclusive", series, None, "too few doublings", mono)
    inc = vals[-1] - vals[-2]
    if abs(inc) < BOUNDED_TOL:
        return BoundednessVerdict("bounded", series, max(vals), "last increment below tolerance", mono)
    if inc >= UNBOUNDED_TOL:
        return BoundednessVerdict("unbounded", series, None, "last increment stays large", mono)
    return BoundednessVerdict("inconclusive", series, None, f"last increment {inc:.3g} between thresholds", mono)


def _orbit(m: MapDef, x, n_max: int, digits) -> OrbitRecord:
    return _backward(m, x, n_max, digits)


def _exited(orb: OrbitRecord) -> bool:
    return not orb.complete and not orb.exit_reason.startswith("BelowResolution")


def _pair_verdict(m: MapDef, ox: OrbitRecord, oy: OrbitRecord) -> BoundednessVerdict:
    ex, ey = _exited(ox), _exited(oy)
    if ex and ey:
        return BoundednessVerdict("inconclusive", [], None, "both backward orbits stop early")
    if ex != ey:
        return BoundednessVerdict("unbounded", [], None, "exactly one backward orbit leaves the domain")
    n = min(len(ox), len(oy))
    digits = max(ox.digits or 0, oy.digits or 0) or None
    with nm.working(digits):
        series = [(k, kobayashi_distance(m.domain, ox.points[k], oy.points[k])) for k in doubling_indices(n)]
    v = _series_verdict(series)
    if not (ox.complete and oy.complete) and v.verdict == "bounded":
        v.verdict, v.reason = "inconclusive", "orbit ran into the precision floor before the test finished"
    return v


def equivalent(m: MapDef, x, y, n_max: int = 64, digits: int | None = nm.DEFAULT_DIGITS) -> BoundednessVerdict:
    """Is k(f^{-n} x, f^{-n} y) bounded in n?

    Bounded if the last doubling increment is below 1e-6; unbounded if it is
    at least 1e-3 or the distance exceeds 60; otherwise inconclusive.
    """
    return _pair_verdict(m, _orbit(m, x, n_max, digits), _orbit(m, y, n_max, digits))


def step_bounded(m: MapDef, orb: OrbitRecord) -> str:
    """Verdict on sigma_1 along a backward orbit: converged means bounded step."""
    with orb.precision():
        vals = [kobayashi_distance(m.domain, orb.points[k + 1], orb.points[k]) for k in range(len(orb) - 1)]
    if not vals:
        return "inconclusive"
    verdict, _, _ = doubling_test(vals)
    return verdict


def in_stable_set(m: MapDef, x, n_max: int = 64, digits: int | None = nm.DEFAULT_DIGITS) -> tuple[str, str]:
    """("yes" | "no" | "inconclusive", reason) for membership in the stable subset."""
    orb = _orbit(m, x, n_max, digits)
    if _exited(orb):
        return "no", f"backward orbit stops at step {orb.exit_index}: {orb.exit_reason}"
    step = step_bounded(m, orb)
    if step == "converged":
        return "yes", "backward step converges"
    if step == "diverging":
        return "no", "backward step diverges"
    return "inconclusive", "backward step verdict inconclusive"


def partition(m: MapDef, samples: Sequence, n_max: int = 64,
              digits: int | None = nm.DEFAULT_DIGITS, rates: bool = True) -> Partition:
    """Group samples into empirical canonical submanifolds.

    Pairwise verdicts over stable samples feed a connected-components merge
    of the "bounded" pairs. Inconclusive pairs never merge: both samples are
    quarantined in ``unresolved``. A class that would contain an "unbounded"
    pair is dissolved into ``unresolved`` as well.
    """
    pts = [as_point(s) for s in samples]
    if not pts:
        raise ValueError("at least one sample is required")
    orbits = [_orbit(m, p, n_max, digits) for p in pts]
    non_stable, candidates, unresolved = [], [], set()
    for i, orb in enumerate(orbits):
        if _exited(orb):
            non_stable.append(i)
            continue
        step = step_bounded(m, orb)
        if step == "converged":
            candidates.append(i)
        elif step == "diverging":
            non_stable.append(i)
        else:
            unresolved.add(i)

    verdicts = {}
    rows, cols = [], []
    for i, j in combinations(candidates, 2):
        v = _pair_verdict(m, orbits[i], orbits[j])
        verdicts[(i, j)] = v.verdict
        if v.verdict == "bounded":
            rows.append(i)
            cols.append(j)
        elif v.verdict == "inconclusive":
            unresolved.update((i, j))

    resolved = [i for i in candidates if i not in unresolved]
    pos = {s: k for k, s in enumerate(resolved)}
    edges = [(pos[i], pos[j]) for i, j in zip(rows, cols) if i in pos and j in pos]
    n = len(resolved)
    if edges:
        graph = coo_matrix((np.ones(len(edges)), tuple(zip(*edges))), shape=(n, n))
    else:
        graph = coo_matrix((n, n))
    _, labels = connected_components(graph, directed=False) if n else (0, np.array([], dtype=int))

    groups: dict[int, list] = {}
    for s in resolved:
        groups.setdefault(int(labels[pos[s]]), []).append(s)
    classes, class_of = [], {}
    for members in sorted(groups.values(), key=min):
        if any(verdicts.get((a, b)) == "unbounded" for a, b in combinations(sorted(members), 2)):
            unresolved.update(members)
            continue
        mu = None
        if rates:
            try:
                mu = class_rate(m, pts[members[0]], digits=digits)
            except InconclusiveError:
                mu = None
        for s in members:
            class_of[s] = len(classes)
        classes.append({"members": members, "mu": mu})
    return Partition(pts, class_of, classes, sorted(unresolved), non_stable, verdicts)


def class_rate(m: MapDef, x, digits: int | None = nm.DEFAULT_DIGITS) -> float:
    """mu = exp(lim sigma_m / m) for the canonical submanifold through x."""
    rep = classify_type(m, x, digits=digits)
    if rep.type == "inconclusive" or rep.source != "backward":
        raise InconclusiveError(f"classification through {x!r} is {rep.type} ({rep.source})")
    return math.exp(rep.rate)


def tangent_bounded(m: MapDef, base, direction, n_max: int = 64,
                    digits: int | None = nm.DEFAULT_DIGITS) -> BoundednessVerdict:
    """Is kappa(f^{-n} x; d f^{-n}(v)) bounded in n?

    The pushed-forward vector is kept at unit size and its scale tracked
    as a logarithm so long products of inverse Jacobians cannot overflow.
    """
    v0 = as_point(direction)
    if all(c == 0 for c in v0):
        return BoundednessVerdict("bounded", [(0, 0.0)], 0.0, "zero vector")
    orb = _orbit(m, base, n_max, digits)
    if _exited(orb):
        return BoundednessVerdict("inconclusive", [], None, f"base point has no backward orbit: {orb.exit_reason}")
    keep = set(doubling_indices(len(orb)))
    series = []
    with orb.precision():
        mp = nm.uses_mp(orb.points[0])
        u = nm.lift(v0, orb.digits) if mp else tuple(complex(c) for c in v0)
        log_scale = 0.0
        for k, z in enumerate(orb.points):
            if k > 0:
                jac = eval_jet(m, z).jacobian
                try:
                    u = tuple(_solve(jac, list(u), mp))
                except ArithmeticError as exc:
                    return BoundednessVerdict("inconclusive", series, None, f"Jacobian solve failed: {exc}")
                norm = math.sqrt(sum(float(abs(c)) ** 2 for c in u))
                if norm == 0 or not math.isfinite(norm):
                    return BoundednessVerdict("inconclusive", series, None, "Jacobian accumulation degenerated")
                u = tuple(c / norm for c in u)
                log_scale += math.log(norm)
            if k in keep:
                kap = kobayashi_metric(m.domain, z, u)
                lv = log_scale + math.log(kap) if kap > 0 else -math.inf
                series.append((k, math.exp(lv) if lv < 700 else math.inf))
    v = _series_verdict(series)
    if not orb.complete and v.verdict == "bounded":
        v.verdict, v.reason = "inconclusive", "orbit ran into the precision floor before the test finished"
    return v


def limit_distance(m: MapDef, x, y, n_max: int = 64, digits: int | None = nm.DEFAULT_DIGITS) -> StepEstimate:
    """k(f^{-n} x, f^{-n} y) for n = 0..n_max and its increasing limit.

    The limit is the intrinsic distance of the canonical submanifold that
    contains both points. Raises ValueError for inequivalent points.
    """
    ox, oy = _orbit(m, x, n_max, digits), _orbit(m, y, n_max, digits)
    v = _pair_verdict(m, ox, oy)
    if v.verdict == "unbounded":
        raise ValueError(f"points are not equivalent ({v.reason})")
    n = min(len(ox), len(oy))
    with nm.working(max(ox.digits or 0, oy.digits or 0) or None):
        values = [kobayashi_distance(m.domain, ox.points[k], oy.points[k]) for k in range(n)]
    verdict, limit, table = doubling_test(values)
    exit_index = None if ox.complete and oy.complete else n
    if exit_index is not None or v.verdict == "inconclusive":
        verdict = "inconclusive"
    mono = all(b >= a - MONOTONE_SLACK for a, b in zip(values, values[1:]))
    return StepEstimate(0, values, limit, verdict, table, mono, exit_index)
