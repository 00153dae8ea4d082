import math

import numpy as np
import pytest

from orbitlab.catalog import catalog_get, catalog_list, catalog_names
from orbitlab.dynamics import classify_type, denjoy_wolff, dilation_at, divergence_rate
from orbitlab.geometry import INFINITY, contains
from orbitlab.holomap import invert_point
from orbitlab.stable_set import class_rate, equivalent

ROSTER = ["siegel_shear", "halfplane_translation", "slitplane_translation", "disc_hyperbolic",
          "disc_parabolic", "disc_rotation", "ball_unitary", "polydisc_product", "siegel_affine"]


def test_roster():
    assert catalog_names() == ROSTER
    assert [n for n, _, _ in catalog_list()] == ROSTER


def test_unknown_name_and_bad_params():
    with pytest.raises(KeyError):
        catalog_get("nope")
    with pytest.raises(ValueError):
        catalog_get("disc_hyperbolic", {"lam": 0.5})
    with pytest.raises(ValueError):
        catalog_get("disc_hyperbolic", {"mu": 2})
    with pytest.raises(ValueError):
        catalog_get("ball_unitary", {"U": ((1, 1), (0, 1))})
    with pytest.raises(ValueError):
        catalog_get("siegel_affine", {"mu": 1.0})


@pytest.mark.parametrize("name", ROSTER)
def test_truth_has_provenance(name):
    entry = catalog_get(name)
    assert "type" in entry.truth
    for t in entry.truth.values():
        assert t.provenance in ("SOURCE", "DERIVED", "TRIVIAL")
        if t.provenance == "DERIVED":
            assert t.oracle


def _grid(domain):
    pts = []
    for a in np.linspace(-0.8, 0.8, 5):
        for b in np.linspace(-0.8, 0.8, 5):
            if domain.kind == "siegel":
                w = [complex(a, b) * 0.5] * (domain.q - 1)
                pts.append((complex(2 * a, sum(abs(c) ** 2 for c in w) + 0.3 + b + 0.8),) + tuple(w))
            elif domain.kind == "slitplane":
                pts.append((complex(3 * a, 3 * b if b else 0.5),))
            else:
                pts.append(tuple(complex(a, b) * 0.85 / math.sqrt(domain.q) for _ in range(domain.q)))
    return [p for p in pts if contains(domain, p)]


@pytest.mark.parametrize("name", ROSTER)
def test_inverse_round_trip_on_grid(name):
    m = catalog_get(name).map
    assert m.inverse is not None
    grid = _grid(m.domain)
    assert len(grid) >= 20
    for x in grid:
        y = m(x)
        back = invert_point(m, y)
        scale = max(1, np.abs(y).max())
        assert np.abs(np.array(m(back)) - np.array(y)).max() < 1e-12 * scale
        assert np.abs(np.array(back) - np.array(x)).max() < 1e-12 * scale


@pytest.mark.parametrize("name", ROSTER)
def test_type_and_rate_reproduced(name):
    entry = catalog_get(name)
    rep = classify_type(entry.map, entry.sample_point)
    assert rep.type == entry.truth["type"].value
    if rep.type == "hyperbolic":
        assert rep.rate == pytest.approx(entry.truth["rate"].value, abs=1e-6)


@pytest.mark.parametrize("name", ["siegel_shear", "disc_hyperbolic", "siegel_affine"])
def test_dw_truth_reproduced(name):
    entry = catalog_get(name)
    rep = denjoy_wolff(entry.map, [entry.sample_point])
    assert rep.kind == "boundary"
    want = entry.truth["dw_point"].value
    if want is INFINITY:
        assert rep.point is INFINITY
    else:
        assert complex(rep.point[0]) == pytest.approx(want, abs=1e-6)
    assert rep.dilation == pytest.approx(entry.truth["dw_dilation"].value, abs=1e-3)


def test_rotation_fixed_point():
    entry = catalog_get("disc_rotation")
    rep = denjoy_wolff(entry.map, [entry.sample_point])
    assert rep.kind == "interior"
    assert abs(rep.point[0]) < 1e-9


def test_brfp_dilations():
    shear = catalog_get("siegel_shear")
    approach = [(-(1 - 2.0**-k), 0) for k in range(10, 50)]
    assert dilation_at(shear.map, (-1, 0), approach) == pytest.approx(shear.truth["brfp_dilation"].value, abs=1e-3)
    disc = catalog_get("disc_hyperbolic")
    approach = [(1 - 2.0**-k,) for k in range(10, 50)]
    assert dilation_at(disc.map, (1,), approach) == pytest.approx(disc.truth["brfp_dilation"].value, abs=1e-3)


def test_class_mu_truth():
    for name, x in [("siegel_shear", (2j, 0.5j)), ("disc_hyperbolic", (0.1,))]:
        entry = catalog_get(name)
        assert class_rate(entry.map, x) == pytest.approx(entry.truth["class_mu"].value, abs=1e-3)


def test_slitplane_two_classes():
    m = catalog_get("slitplane_translation").map
    assert equivalent(m, 1j, 2j, n_max=4096).verdict == "bounded"
    assert equivalent(m, 1j, -1j, n_max=4096).verdict == "unbounded"


def test_polydisc_rate_is_max_of_factors():
    entry = catalog_get("polydisc_product", {"lam1": 2.0, "lam2": 5.0})
    assert divergence_rate(entry.map, (0, 0)) == pytest.approx(math.log(5), abs=1e-9)


def test_siegel_affine_variants():
    entry = catalog_get("siegel_affine", {"mu": 3.0, "U": (1j,), "b": (0.5,)})
    x = entry.sample_point
    assert contains(entry.map.domain, entry.map(x))
    # the translation part only adds an O(1/j) term to k(x, f^j x)/j
    assert divergence_rate(entry.map, x) == pytest.approx(math.log(3), abs=1e-2)
    rep = classify_type(entry.map, x)
    assert rep.type == "hyperbolic"
    assert rep.rate == pytest.approx(math.log(3), abs=1e-6)
