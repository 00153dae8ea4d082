"""Built-in example maps with known ground truth.

Every truth field carries a provenance tag: "SOURCE" (stated in the source
theory), "DERIVED" (computed by hand, with the oracle named) or "TRIVIAL".
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, Mapping

from .dsl import MapDef, parse_map
from .geometry import INFINITY


@dataclass(frozen=True)
class Truth:
    value: object
    provenance: str  # SOURCE, DERIVED, TRIVIAL
    oracle: str = ""


@dataclass(frozen=True)
class CatalogEntry:
    name: str
    params: dict
    map: MapDef
    truth: dict
    description: str = ""
    sample_point: tuple = ()


@dataclass(frozen=True)
class _Spec:
    factory: Callable
    defaults: dict
    description: str
    param_help: dict = field(default_factory=dict)


def _check(cond: bool, msg: str) -> None:
    if not cond:
        raise ValueError(msg)


def siegel_shear() -> CatalogEntry:
    m = parse_map("siegel 2 : (2*z1 + i*z2^2, z2) inverse ((z1 - i*z2^2)/2, z2)", name="siegel_shear")
    truth = {
        "type": Truth("hyperbolic", "DERIVED", "sigma_m((i,0)) = m log 2 by dilation invariance"),
        "rate": Truth(math.log(2), "DERIVED", "k((i,0),(2^m i,0)) = m log 2"),
        "dw_point": Truth(INFINITY, "DERIVED", "first coordinate of forward iterates tends to infinity"),
        "dw_dilation": Truth(0.5, "DERIVED", "forward orbits: (1-|b_{n+1}|)/(1-|b_n|) -> 1/2 in the ball chart"),
        "brfp": Truth((-1, 0), "SOURCE", "boundary point 0 of the Siegel model, ball chart (-1, 0)"),
        "brfp_dilation": Truth(2.0, "SOURCE", "boundary repelling fixed point with dilation 2"),
        "invariant_set": Truth("Re w = 0", "SOURCE", "backward orbits exist iff w is pure imaginary"),
        "classes": Truth("Sigma_r = {w = i r}, one per real r", "SOURCE", "stable subsets at (i r^2, i r)"),
        "class_mu": Truth(2.0, "DERIVED", "conjugation h_r onto Sigma_0"),
    }
    return CatalogEntry("siegel_shear", {}, m, truth, "(z, w) -> (2z + i w^2, w) on the Siegel half-space H^2", (1j, 0j))


def halfplane_translation() -> CatalogEntry:
    m = parse_map("siegel 1 : (z1 + 1) inverse (z1 - 1)", name="halfplane_translation")
    truth = {
        "type": Truth("parabolic", "DERIVED", "sigma_m(i) = k(i, i+m) = 2 asinh(m/2) ~ 2 log m"),
        "rate": Truth(0.0, "DERIVED", "2 asinh(m/2)/m -> 0"),
        "dw_point": Truth(INFINITY, "TRIVIAL"),
        "dw_dilation": Truth(1.0, "DERIVED", "translations preserve Im z"),
        "classes": Truth("one class, the whole half-plane", "DERIVED", "translation is an automorphism"),
    }
    return CatalogEntry("halfplane_translation", {}, m, truth, "z -> z + 1 on the upper half-plane", (1j,))


def slitplane_translation() -> CatalogEntry:
    m = parse_map("slitplane 1 : (z1 + 1) inverse (z1 - 1)", name="slitplane_translation")
    truth = {
        "type": Truth("parabolic", "DERIVED", "k_slit(x, x+m) <= k_H(x, x+m) ~ 2 log m, no fixed point"),
        "rate": Truth(0.0, "DERIVED", "bounded above by the half-plane rate"),
        "dw_point": Truth(INFINITY, "TRIVIAL"),
        "classes": Truth("upper and lower half-planes", "SOURCE", "two canonical invariant submanifolds at one Denjoy-Wolff point"),
    }
    return CatalogEntry("slitplane_translation", {}, m, truth, "z -> z + 1 on C minus the nonpositive reals", (1j,))


def disc_hyperbolic(lam: float = 3.0) -> CatalogEntry:
    _check(lam > 1, "lam must exceed 1")
    m = parse_map(
        "disc 1 : (((1 + lam)*z1 + 1 - lam) / (1 + lam + (1 - lam)*z1))"
        " inverse (((1 + lam)*z1 - 1 + lam) / (1 + lam - (1 - lam)*z1))",
        params={"lam": lam},
        name="disc_hyperbolic",
    )
    truth = {
        "type": Truth("hyperbolic", "DERIVED", "half-plane conjugation to w -> lam w"),
        "rate": Truth(math.log(lam), "DERIVED", "sigma_m = m log lam on the real axis"),
        "dw_point": Truth(-1.0, "DERIVED", "f'(-1) = 1/lam < 1"),
        "dw_dilation": Truth(1 / lam, "DERIVED", "boundary derivative at -1"),
        "brfp": Truth(1.0, "DERIVED", "f'(1) = lam"),
        "brfp_dilation": Truth(lam, "DERIVED", "boundary derivative at +1"),
        "class_mu": Truth(lam, "DERIVED", "sigma_m = m log lam exactly on the axis"),
    }
    return CatalogEntry("disc_hyperbolic", {"lam": lam}, m, truth,
                        "disc automorphism fixing +1 (repelling, multiplier lam) and -1", (0j,))


def disc_parabolic() -> CatalogEntry:
    m = parse_map(
        "disc 1 : ((1 + (2*i - 1)*z1) / (1 + 2*i - z1)) inverse (((1 + 2*i)*z1 - 1) / (z1 - 1 + 2*i))",
        name="disc_parabolic",
    )
    truth = {
        "type": Truth("parabolic", "DERIVED", "Cayley conjugate of h -> h + 1 on the half-plane"),
        "rate": Truth(0.0, "DERIVED", "same step sequence as the half-plane translation"),
        "dw_point": Truth(1.0, "DERIVED", "image of infinity under the Cayley transform"),
        "dw_dilation": Truth(1.0, "DERIVED", "parabolic boundary fixed point"),
    }
    return CatalogEntry("disc_parabolic", {}, m, truth, "parabolic disc automorphism fixing 1", (0j,))


def disc_rotation(theta: float = 1.0) -> CatalogEntry:
    m = parse_map("disc 1 : (exp(i*theta)*z1) inverse (exp(-i*theta)*z1)", params={"theta": theta},
                  name="disc_rotation")
    truth = {
        "type": Truth("elliptic", "TRIVIAL", "rotation fixes 0"),
        "rate": Truth(0.0, "TRIVIAL"),
        "fixed_point": Truth(0.0, "TRIVIAL"),
    }
    return CatalogEntry("disc_rotation", {"theta": theta}, m, truth, "z -> exp(i theta) z on the disc", (0.5 + 0j,))


def _unitary_exprs(U, var_offset: int, prefix: str):
    q = len(U)
    rows = []
    for r in range(q):
        terms = [f"{prefix}{r + 1}_{c + 1}*z{c + 1 + var_offset}" for c in range(q) if U[r][c] != 0]
        rows.append(" + ".join(terms) if terms else "0")
    return rows


def ball_unitary(U=((1j, 0), (0, -1))) -> CatalogEntry:
    U = [list(map(complex, row)) for row in U]
    q = len(U)
    _check(all(len(r) == q for r in U), "U must be square")
    for a in range(q):
        for b in range(q):
            dot = sum(U[a][k] * U[b][k].conjugate() for k in range(q))
            _check(abs(dot - (a == b)) < 1e-12, "U must be unitary within 1e-12")
    Uh = [[U[c][r].conjugate() for c in range(q)] for r in range(q)]
    params = {f"u{r + 1}_{c + 1}": U[r][c] for r in range(q) for c in range(q)}
    params.update({f"v{r + 1}_{c + 1}": Uh[r][c] for r in range(q) for c in range(q)})
    fwd = _unitary_exprs(U, 0, "u")
    inv = _unitary_exprs(Uh, 0, "v")
    m = parse_map(f"ball {q} : ({', '.join(fwd)}) inverse ({', '.join(inv)})", params=params, name="ball_unitary")
    truth = {
        "type": Truth("elliptic", "DERIVED", "orbits lie on a compact torus; sigma_m <= 2 k(0, x)"),
        "rate": Truth(0.0, "TRIVIAL"),
        "fixed_point": Truth(tuple(0j for _ in range(q)), "TRIVIAL"),
    }
    return CatalogEntry("ball_unitary", {"U": tuple(tuple(r) for r in U)}, m, truth,
                        "linear unitary map of the ball", tuple([0.3 + 0j, 0.2 + 0j] + [0j] * (q - 2)))


def polydisc_product(lam1: float = 2.0, lam2: float = 3.0) -> CatalogEntry:
    _check(lam1 > 1 and lam2 > 1, "lam1 and lam2 must exceed 1")
    comp = "((1 + {l})*{z} + 1 - {l}) / (1 + {l} + (1 - {l})*{z})"
    inv = "((1 + {l})*{z} - 1 + {l}) / (1 + {l} - (1 - {l})*{z})"
    text = (f"polydisc 2 : ({comp.format(l='lam1', z='z1')}, {comp.format(l='lam2', z='z2')})"
            f" inverse ({inv.format(l='lam1', z='z1')}, {inv.format(l='lam2', z='z2')})")
    m = parse_map(text, params={"lam1": lam1, "lam2": lam2}, name="polydisc_product")
    truth = {
        "type": Truth("hyperbolic", "DERIVED", "product of hyperbolic disc automorphisms"),
        "rate": Truth(math.log(max(lam1, lam2)), "DERIVED", "max of coordinate distances, each m log lam_j on the axes"),
        "dw_point": Truth((-1.0, -1.0), "DERIVED", "each factor converges to -1"),
    }
    return CatalogEntry("polydisc_product", {"lam1": lam1, "lam2": lam2}, m, truth,
                        "product of two disc_hyperbolic maps on the bidisc", (0j, 0j))


def siegel_affine(mu: float = 2.0, U=(1,), b=None) -> CatalogEntry:
    """(z, w) -> Heisenberg translation by b of (mu z, sqrt(mu) U w), U diagonal unitary."""
    _check(mu > 0 and mu != 1, "mu must be positive and different from 1")
    U = [complex(u) for u in U]
    _check(all(abs(abs(u) - 1) < 1e-12 for u in U), "U entries must be unimodular within 1e-12")
    k = len(U)
    b = [0j] * k if b is None else [complex(c) for c in b]
    _check(len(b) == k, "b needs one entry per w coordinate")
    params = {"mu": mu}
    for j in range(k):
        params.update({f"u{j + 1}": U[j], f"uc{j + 1}": U[j].conjugate(),
                       f"b{j + 1}": b[j], f"bc{j + 1}": b[j].conjugate()})
    q = k + 1
    if k == 0:
        m = parse_map("siegel 1 : (mu*z1) inverse (z1/mu)", params={"mu": mu}, name="siegel_affine")
    else:
        a = " + ".join(f"b{j + 1}*bc{j + 1}" for j in range(k))
        W = [f"sqrt(mu)*u{j + 1}*z{j + 2}" for j in range(k)]
        z_new = f"mu*z1 + i*({a}) + 2*i*({' + '.join(f'{W[j]}*bc{j + 1}' for j in range(k))})"
        w_new = [f"{W[j]} + b{j + 1}" for j in range(k)]
        Wi = [f"(z{j + 2} - b{j + 1})" for j in range(k)]
        z_inv = f"(z1 - i*({a}) - 2*i*({' + '.join(f'{Wi[j]}*bc{j + 1}' for j in range(k))}))/mu"
        w_inv = [f"uc{j + 1}*{Wi[j]}/sqrt(mu)" for j in range(k)]
        m = parse_map(f"siegel {q} : ({', '.join([z_new] + w_new)}) inverse ({', '.join([z_inv] + w_inv)})",
                      params=params, name="siegel_affine")
    lm = abs(math.log(mu))
    truth = {
        "type": Truth("hyperbolic", "DERIVED", "affine conjugate of the dilation (z, w) -> (mu z, sqrt(mu) U w)"),
        "rate": Truth(lm, "DERIVED", "k((i,0), (mu^m i, 0)) = m |log mu|"),
        "dw_point": Truth(INFINITY if mu > 1 else "finite boundary point", "DERIVED", "expanding dilation"),
        "dw_dilation": Truth(1 / mu if mu > 1 else mu, "DERIVED", "1 - |b|^2 scales by 1/mu in the ball chart"),
    }
    return CatalogEntry("siegel_affine", {"mu": mu, "U": tuple(U), "b": tuple(b)}, m, truth,
                        "Heisenberg translation composed with an anisotropic dilation", (1j,) + (0j,) * k)


_REGISTRY: dict[str, _Spec] = {
    "siegel_shear": _Spec(siegel_shear, {}, "(z, w) -> (2z + i w^2, w) on H^2"),
    "halfplane_translation": _Spec(halfplane_translation, {}, "z -> z + 1 on H^1"),
    "slitplane_translation": _Spec(slitplane_translation, {}, "z -> z + 1 on the slit plane"),
    "disc_hyperbolic": _Spec(disc_hyperbolic, {"lam": 3.0}, "hyperbolic disc automorphism", {"lam": "real > 1"}),
    "disc_parabolic": _Spec(disc_parabolic, {}, "parabolic disc automorphism fixing 1"),
    "disc_rotation": _Spec(disc_rotation, {"theta": 1.0}, "rotation of the disc", {"theta": "real"}),
    "ball_unitary": _Spec(ball_unitary, {"U": ((1j, 0), (0, -1))}, "unitary map of the ball",
                          {"U": "unitary matrix (list of rows)"}),
    "polydisc_product": _Spec(polydisc_product, {"lam1": 2.0, "lam2": 3.0}, "product map on the bidisc",
                              {"lam1": "real > 1", "lam2": "real > 1"}),
    "siegel_affine": _Spec(siegel_affine, {"mu": 2.0, "U": (1,), "b": None}, "affine automorphism of H^q",
                           {"mu": "real > 0, != 1", "U": "unimodular diagonal entries", "b": "complex vector"}),
}


def catalog_names() -> list:
    return list(_REGISTRY)


def catalog_get(name: str, params: Mapping | None = None) -> CatalogEntry:
    """Instantiate catalog entry ``name`` with optional parameter overrides."""
    if name not in _REGISTRY:
        raise KeyError(f"unknown catalog entry {name!r}; known: {', '.join(_REGISTRY)}")
    spec = _REGISTRY[name]
    params = dict(params or {})
    unknown = set(params) - set(spec.defaults)
    if unknown:
        raise ValueError(f"unknown parameter(s) for {name}: {', '.join(sorted(unknown))}")
    return spec.factory(**{**spec.defaults, **params})


def catalog_list() -> list:
    return [(name, spec.description, spec.param_help) for name, spec in _REGISTRY.items()]
