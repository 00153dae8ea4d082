"""Hyperbolic normal forms on the Siegel half-space and pre-model verification.

A pre-model for f is a triple (Z, g, tau): a domain Z, an automorphism tau
of Z and a map g from Z into the domain of f with f(g(z)) = g(tau(z)).
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from . import _numeric as nm
from .dsl import MapDef, eval_value, parse_map
from .errors import DomainError
from .geometry import Domain, as_point, contains, convention_factor, kobayashi_distance
from .holomap import backward_orbit_adaptive


@dataclass(frozen=True)
class HyperbolicNormalForm:
    """(z, w) -> (z / mu, U w / sqrt(mu)) on H^k with U diagonal unitary."""

    k: int
    mu: float
    U: tuple = ()

    def __post_init__(self):
        if self.k < 1:
            raise ValueError("k must be a positive integer")
        if len(self.U) != self.k - 1:
            raise ValueError(f"U needs {self.k - 1} diagonal entries")
        if any(abs(abs(complex(u)) - 1) > 1e-12 for u in self.U):
            raise ValueError("U entries must be unimodular within 1e-12")


def normal_form_tau(nf: HyperbolicNormalForm) -> MapDef:
    if not nf.mu > 1:
        raise ValueError("mu must exceed 1")
    params = {"mu": nf.mu}
    comps, inv = ["z1/mu"], ["mu*z1"]
    for j, u in enumerate(nf.U, start=1):
        u = complex(u)
        params[f"u{j}"] = u
        params[f"uc{j}"] = u.conjugate()
        comps.append(f"u{j}*z{j + 1}/sqrt(mu)")
        inv.append(f"sqrt(mu)*uc{j}*z{j + 1}")
    text = f"siegel {nf.k} : ({', '.join(comps)}) inverse ({', '.join(inv)})"
    return parse_map(text, params=params, name=f"normal_form(mu={nf.mu:g})")


def sigma_closed_form(theta: float, lam: float, m: int) -> float:
    """Backward m-step of a hyperbolic automorphism along a restricted orbit.

    log[(A + B)/(A - B)] with A = |exp(-2i theta) + lam^m|, B = |1 - lam^m|.
    Since A^2 - B^2 = 4 lam^m cos^2(theta) the value is rewritten without
    the cancellation in A - B:
    2 log(A/L + B/L) + m log(lam) - log 4 - 2 log cos(theta), L = lam^m.
    Like every distance, the value is halved under the arctanh convention.
    """
    if not -math.pi / 2 < theta < math.pi / 2:
        raise ValueError("theta must lie in (-pi/2, pi/2)")
    if not lam > 1:
        raise ValueError("lambda must exceed 1")
    if m < 0:
        raise ValueError("m must be nonnegative")
    if m == 0:
        return 0.0
    log_l = m * math.log(lam)
    inv_l = math.exp(-log_l)
    a = abs(complex(math.cos(2 * theta), -math.sin(2 * theta)) * inv_l + 1)
    b = -math.expm1(-log_l)
    val = 2 * math.log(a + b) + log_l - math.log(4) - 2 * math.log(math.cos(theta))
    return val * convention_factor()


@dataclass(frozen=True)
class PreModel:
    Z: Domain
    g: MapDef  # from Z-coordinates into the ambient domain
    tau: MapDef  # automorphism of Z
    name: str = ""


@dataclass
class PremodelReport:
    intertwining_residual: float
    step_residuals: list  # per probe, max over m of |sigma_m(g(z)) - k_Z(z, tau^m z)|
    collisions: int
    outside: int  # probes whose image under g is not in the ambient domain
    m_max: int
    probes: list = field(default_factory=list)

    @property
    def step_residual(self) -> float:
        return max(self.step_residuals) if self.step_residuals else math.nan

    def passed(self, intertwining_tol: float = 1e-12, step_tol: float = 1e-6) -> bool:
        return (
            self.intertwining_residual < intertwining_tol
            and self.step_residual < step_tol
            and self.collisions == 0
            and self.outside == 0
        )


def default_probes(Z: Domain, count: int = 9) -> list:
    ts = np.logspace(math.log10(0.25), math.log10(4.0), count)
    return [(1j * float(t),) + (0j,) * (Z.q - 1) for t in ts]


def _norm(v) -> float:
    return math.sqrt(sum(float(abs(c)) ** 2 for c in v))


def verify_premodel(f: MapDef, pm: PreModel, probes: Sequence | None = None, m_max: int = 20,
                    n_max: int = 32, digits: int = nm.DEFAULT_DIGITS) -> PremodelReport:
    """Check f o g = g o tau and sigma_m(g(z)) = k_Z(z, tau^m z) on probes.

    sigma_m is estimated from one backward orbit of g(z) under f of length
    n_max + m_max, as k(f^{-n-m} g(z), f^{-n} g(z)) at n = n_max.
    """
    probes = default_probes(pm.Z) if probes is None else [as_point(p) for p in probes]
    for p in probes:
        if not contains(pm.Z, p):
            raise DomainError(f"probe {p!r} is outside {pm.Z}")
    images = [eval_value(pm.g, p) for p in probes]
    outside = sum(not contains(f.domain, y) for y in images)
    resid = max(
        _norm([a - b for a, b in zip(eval_value(f, y), eval_value(pm.g, eval_value(pm.tau, p)))])
        for p, y in zip(probes, images)
    )
    collisions = sum(
        1
        for i in range(len(probes))
        for j in range(i + 1, len(probes))
        if _norm([a - b for a, b in zip(images[i], images[j])]) < 1e-9
        and _norm([a - b for a, b in zip(probes[i], probes[j])]) >= 1e-9
    )
    step_res = []
    for p, y in zip(probes, images):
        if not contains(f.domain, y):
            step_res.append(math.inf)
            continue
        orb = backward_orbit_adaptive(f, y, n_max + m_max, digits=digits, cap=n_max + m_max)
        if not orb.complete:
            step_res.append(math.inf)
            continue
        worst = 0.0
        tz = p
        for mm in range(1, m_max + 1):
            tz = eval_value(pm.tau, tz)
            expected = kobayashi_distance(pm.Z, p, tz)
            with orb.precision():
                sigma = kobayashi_distance(f.domain, orb.points[n_max + mm], orb.points[n_max])
            worst = max(worst, abs(sigma - expected))
        step_res.append(worst)
    return PremodelReport(resid, step_res, collisions, outside, m_max, [nm.lower(p) for p in probes])


def siegel_example_premodel(r: float) -> PreModel:
    """Pre-model of the shear (z, w) -> (2z + i w^2, w) through the slice w = i r.

    g(z) = (z + i r^2, i r), tau(z) = 2 z.
    """
    g = parse_map("siegel 1 : (z1 + i*r^2, i*r)", params={"r": float(r)}, self_map=False,
                  name=f"g_{r:g}")
    tau = parse_map("siegel 1 : (2*z1) inverse (z1/2)", name="tau")
    return PreModel(Domain.siegel(1), g, tau, name=f"siegel_example(r={r:g})")
