import math

import pytest
from hypothesis import given, settings, strategies as st

from orbitlab.catalog import catalog_get
from orbitlab.dsl import parse_map
from orbitlab.errors import InconclusiveError
from orbitlab.geometry import Domain, kobayashi_distance
from orbitlab.stable_set import (
    class_rate,
    equivalent,
    in_stable_set,
    limit_distance,
    partition,
    tangent_bounded,
)

from . import oracles

SHEAR = catalog_get("siegel_shear").map
SLIT = catalog_get("slitplane_translation").map
IDENTITY = parse_map("ball 2 : (z1, z2) inverse (z1, z2)")


def test_equivalent_examples():
    assert equivalent(SHEAR, (2j, 0.5j), (3j, 0.5j)).verdict == "bounded"
    assert equivalent(SHEAR, (2j, 0.5j), (2j, 0.25j)).verdict == "unbounded"
    assert equivalent(SLIT, 1j, -1j, n_max=4096).verdict == "unbounded"


def test_equivalent_slitplane_same_half():
    v = equivalent(SLIT, 1j, 2j, n_max=4096)
    assert v.verdict == "bounded"
    assert v.monotone


def test_equivalent_exit_rules():
    v = equivalent(SHEAR, (2j, 0.5j), (2j, 0.5 + 0.5j))
    assert v.verdict == "unbounded"
    assert "exactly one" in v.reason
    v = equivalent(SHEAR, (2j, 0.3 + 0.5j), (2j, 0.5 + 0.5j))
    assert v.verdict == "inconclusive"


def test_series_is_monotone():
    v = equivalent(SHEAR, (2j, 0.1j), (5j, 0.6j))
    vals = [d for _, d in v.series]
    assert all(b >= a - 1e-9 for a, b in zip(vals, vals[1:]))


def test_in_stable_set():
    assert in_stable_set(SHEAR, (2j, 0.5j))[0] == "yes"
    assert in_stable_set(SHEAR, (2j, 0.5 + 0.5j))[0] == "no"


def test_partition_example():
    samples = [(2j, 0j), (3j, 0j), (2j, 0.3j), (3j, 0.3j), (2j, 0.6j), (3j, 0.6j), (2j, 0.5 + 0.5j)]
    p = partition(SHEAR, samples)
    assert p.groups() == [[0, 1], [2, 3], [4, 5]]
    assert p.non_stable == [6]
    assert p.unresolved == []
    for c in p.classes:
        assert c["mu"] == pytest.approx(2.0, abs=1e-3)


def test_partition_single_sample():
    p = partition(SHEAR, [(1j, 0j)], rates=False)
    assert p.n_classes == 1
    with pytest.raises(ValueError):
        partition(SHEAR, [])


def test_partition_is_f_invariant():
    samples = [(2j, 0j), (3j, 0j), (2j, 0.3j), (5j, 0.3j), (2j, -0.6j), (3j, -0.6j)]
    p = partition(SHEAR, samples, rates=False)
    q = partition(SHEAR, [SHEAR(s) for s in samples], rates=False)
    assert p.groups() == q.groups()


def test_partition_closure_has_no_unbounded_pair():
    samples = [(2j, 0j), (3j, 0.01j), (4j, 0.02j), (2j, 0.4j)]
    p = partition(SHEAR, samples, rates=False)
    for c in p.classes:
        ms = sorted(c["members"])
        for a in ms:
            for b in ms:
                if a < b:
                    assert p.verdicts[(a, b)] != "unbounded"
    assert set(p.class_of) | set(p.unresolved) | set(p.non_stable) == set(range(len(samples)))


def test_class_rate_examples():
    assert class_rate(SHEAR, (2j, 0.5j)) == pytest.approx(2.0, abs=1e-3)
    assert class_rate(IDENTITY, (0.2, 0.1)) == pytest.approx(1.0)
    m = catalog_get("disc_hyperbolic", {"lam": 3.0}).map
    assert class_rate(m, (0.2,)) == pytest.approx(3.0, abs=1e-3)


def test_class_rate_inconclusive_off_the_invariant_set():
    with pytest.raises(InconclusiveError):
        class_rate(SHEAR, (2j, 0.5 + 0.5j))


def test_tangent_examples():
    assert tangent_bounded(SHEAR, (1j, 0), (1, 0)).verdict == "bounded"
    v = tangent_bounded(SHEAR, (1j, 0), (0, 1))
    assert v.verdict == "unbounded"
    assert tangent_bounded(SHEAR, (1j, 0), (0, 0)).verdict == "bounded"


def test_limit_distance_examples():
    est = limit_distance(SHEAR, (2j, 0), (3j, 0))
    assert all(v == pytest.approx(math.log(1.5), abs=1e-12) for v in est.values)
    est = limit_distance(SHEAR, (2j, 0.2j), (2j, 0.2j))
    assert est.limit == 0
    # conjugation by h_r maps the class through w = i r onto w = 0
    r = 0.5
    x, y = (2j, 0.5j), (3j, 0.5j)
    hx, hy = oracles.h_r(r, x), oracles.h_r(r, y)
    expected = kobayashi_distance(Domain.siegel(1), hx[0], hy[0])
    assert limit_distance(SHEAR, x, y).limit == pytest.approx(expected, abs=1e-6)
    with pytest.raises(ValueError):
        limit_distance(SHEAR, (2j, 0.5j), (2j, 0.25j))


@settings(max_examples=25)
@given(st.floats(1, 5), st.floats(-0.8, 0.8), st.floats(1, 5), st.floats(-0.8, 0.8))
def test_equivalence_axioms(a, r, b, s):
    x, y = (complex(0, a + r * r), complex(0, r)), (complex(0, b + s * s), complex(0, s))
    assert equivalent(SHEAR, x, x).verdict == "bounded"
    assert equivalent(SHEAR, x, y).verdict == equivalent(SHEAR, y, x).verdict


@settings(max_examples=20)
@given(st.floats(-1, 1), st.floats(1, 4), st.floats(1, 4))
def test_limit_distance_dominates_ambient_distance(r, a, b):
    x, y = (complex(0.3, a + r * r), complex(0, r)), (complex(-0.2, b + r * r), complex(0, r))
    est = limit_distance(SHEAR, x, y)
    k = kobayashi_distance(SHEAR.domain, x, y)
    assert math.isfinite(est.limit)
    assert all(v >= k - 1e-9 for v in est.values)


@settings(max_examples=10)
@given(st.floats(-0.8, 0.8), st.floats(1.5, 4), st.floats(1.5, 4))
def test_class_rate_constant_on_class(r, a, b):
    x, y = (complex(0, a + r * r), complex(0, r)), (complex(1, b + r * r), complex(0, r))
    assert class_rate(SHEAR, x) == pytest.approx(class_rate(SHEAR, y), abs=1e-3)


@settings(max_examples=10)
@given(st.lists(st.sampled_from([0.0, 0.2, 0.5]), min_size=3, max_size=3), st.floats(1, 4))
def test_transitivity_of_resolved_verdicts(rs, a):
    pts = [(complex(k * 0.3, a + k + r * r), complex(0, r)) for k, r in enumerate(rs)]
    v = {(i, j): equivalent(SHEAR, pts[i], pts[j]).verdict for i in range(3) for j in range(i + 1, 3)}
    for i, j, k in [(0, 1, 2), (0, 2, 1), (1, 2, 0)]:
        e1, e2 = tuple(sorted((i, k))), tuple(sorted((j, k)))
        if v[e1] == "bounded" and v[e2] == "bounded":
            assert v[(i, j)] != "unbounded"
