import cmath

import numpy as np
import pytest
from hypothesis import assume, given, strategies as st

from orbitlab.catalog import catalog_get, catalog_names
from orbitlab.dsl import (
    eval_jet,
    eval_value,
    format_expr,
    format_map,
    parse_expr,
    parse_map,
    parse_point,
)
from orbitlab.errors import EvaluationError, MapSyntaxError
from orbitlab.geometry import Domain, contains

SHEAR = "siegel 2 : (2*z1 + i*z2^2, z2) inverse ((z1 - i*z2^2)/2, z2)"


# --- expression strategy ------------------------------------------------------------

atoms = st.one_of(
    st.sampled_from(["z1", "z2", "i", "2", "0.5", "3i", "1.25"]),
    st.integers(0, 99).map(str),
)


def _expr(children):
    return st.one_of(
        st.tuples(children, st.sampled_from("+-*/"), children).map(lambda t: f"({t[0]} {t[1]} {t[2]})"),
        children.map(lambda e: f"-{e}"),
        st.tuples(children, st.integers(-3, 4)).map(lambda t: f"({t[0]})^{t[1]}"),
        st.tuples(st.sampled_from(["exp", "sqrt", "log"]), children).map(lambda t: f"{t[0]}({t[1]})"),
    )


exprs = st.recursive(atoms, _expr, max_leaves=12)


# --- examples -----------------------------------------------------------------------


def test_shear_example_parses():
    m = parse_map(SHEAR)
    assert m.domain == Domain.siegel(2)
    assert m.inverse is not None
    assert m.q == 2


def test_identity_example():
    m = parse_map("disc 1 : (z1)")
    assert eval_value(m, 0.3j) == pytest.approx((0.3j,))


def test_syntax_error_offset_at_end_of_input():
    text = "siegel 1 : (z1 + 1"
    with pytest.raises(MapSyntaxError) as err:
        parse_map(text)
    assert err.value.offset == len(text)


@pytest.mark.parametrize(
    "text",
    [
        "disc 1 : (z2)",  # variable index above q
        "disc 1 : (foo*z1)",  # unknown identifier
        "disc 1 : (z1^0.5)",  # non-integer exponent
        "disc 1 : (sin(z1))",  # unknown function
        "ball 2 : (z1)",  # arity mismatch
        "annulus 1 : (z1)",
        "disc 1 : (z1) inverse (z1, z1)",
        "disc 1 : (z1 +)",
    ],
)
def test_invalid_maps_raise(text):
    with pytest.raises(MapSyntaxError):
        parse_map(text)


def test_error_offset_points_at_offending_token():
    text = "disc 1 : (2*foo)"
    with pytest.raises(MapSyntaxError) as err:
        parse_map(text)
    assert err.value.offset == text.index("foo")


def test_jet_examples():
    jet = eval_jet(parse_map(SHEAR), (1j, 0))
    assert jet.value == pytest.approx((2j, 0))
    assert np.allclose(jet.jacobian, [[2, 0], [0, 1]])

    jet = eval_jet(parse_map("ball 2 : (z1, z2)"), (0.1, 0.2j))
    assert np.allclose(jet.jacobian, np.eye(2))

    jet = eval_jet(parse_map("disc 1 : (z1^2)"), (0.5,))
    assert jet.value == pytest.approx((0.25,))
    assert np.allclose(jet.jacobian, [[1.0]])


def test_branch_cut_is_an_error():
    m = parse_map("disc 1 : (sqrt(z1 - 0.5))")
    with pytest.raises(EvaluationError):
        eval_value(m, (0.2,))
    with pytest.raises(EvaluationError):
        eval_value(parse_map("disc 1 : (log(z1))"), (0.0,))
    with pytest.raises(EvaluationError):
        eval_value(parse_map("disc 1 : (1/z1)"), (0.0,))
    # just off the cut the principal branch applies
    v = eval_value(m, (0.2 + 1e-12j,))[0]
    assert v == pytest.approx(cmath.sqrt(-0.3 + 1e-12j))


def test_params_bind_names():
    m = parse_map("disc 1 : (a*z1)", params={"a": 0.5j})
    assert eval_value(m, (0.4,)) == pytest.approx((0.2j,))
    with pytest.raises(ValueError):
        parse_map("disc 1 : (z1)", params={"i": 1})


def test_parse_point_forms():
    assert parse_point("(i, 0)") == (1j, 0)
    assert parse_point("2i") == (2j,)
    assert parse_point("(1/3, -0.5i)") == pytest.approx((1 / 3, -0.5j))
    with pytest.raises(MapSyntaxError):
        parse_point("(i, z1)")


def test_precedence():
    # ^ binds tighter than unary minus, which binds tighter than * and /
    assert eval_value(parse_map("disc 1 : (-z1^2)"), (0.5,)) == pytest.approx((-0.25,))
    assert eval_value(parse_map("disc 1 : (1 - z1/2*3)"), (0.5,)) == pytest.approx((0.25,))
    assert eval_value(parse_map("disc 1 : (2^-1*z1)"), (0.5,)) == pytest.approx((0.25,))


def test_mpmath_evaluation_matches_float():
    import mpmath

    m = parse_map(SHEAR)
    with mpmath.workdps(40):
        p = (mpmath.mpc(0.3, 2), mpmath.mpc(0.1, 0.4))
        v = eval_value(m, p)
    f = eval_value(m, (0.3 + 2j, 0.1 + 0.4j))
    assert [complex(a) for a in v] == pytest.approx(list(f), abs=1e-14)


# --- properties ---------------------------------------------------------------------


@given(exprs)
def test_printer_round_trip_is_fixed_point(text):
    once = format_expr(parse_expr(text, q=2))
    twice = format_expr(parse_expr(once, q=2))
    assert once == twice


@given(exprs, st.complex_numbers(max_magnitude=2, allow_nan=False, allow_infinity=False))
def test_printed_expression_evaluates_identically(text, z):
    m1 = parse_map(f"polydisc 2 : ({text}, z2)")
    m2 = parse_map(format_map(m1))
    try:
        a = eval_value(m1, (z, 0.3))
    except (EvaluationError, OverflowError, ZeroDivisionError):
        return
    b = eval_value(m2, (z, 0.3))
    assert a == b


def _catalog_maps():
    return [catalog_get(n).map for n in catalog_names()]


@given(st.sampled_from(_catalog_maps()), st.lists(st.floats(-0.7, 0.7), min_size=6, max_size=6))
def test_jacobian_matches_central_differences(m, raw):
    d = m.domain
    if d.kind == "siegel":
        w = [complex(raw[2 * k], raw[2 * k + 1]) for k in range(d.q - 1)]
        p = (complex(raw[4], sum(abs(c) ** 2 for c in w) + 0.5 + abs(raw[5])),) + tuple(w)
    elif d.kind == "slitplane":
        p = (complex(raw[0] * 3, 0.2 + abs(raw[1])),)
    else:
        p = tuple(complex(raw[2 * k], raw[2 * k + 1]) * 0.9 for k in range(d.q))
    assume(contains(d, p))
    jac = eval_jet(m, p).jacobian
    h = 1e-6
    for j in range(d.q):
        # holomorphic: the derivative along the real direction is the complex derivative
        plus = list(p)
        minus = list(p)
        plus[j] += h
        minus[j] -= h
        fd = (np.array(eval_value(m, tuple(plus))) - np.array(eval_value(m, tuple(minus)))) / (2 * h)
        scale = max(1.0, np.abs(jac[:, j]).max())
        assert np.abs(fd - jac[:, j]).max() < 1e-5 * scale


@given(st.sampled_from([m for m in _catalog_maps() if m.inverse is not None]),
       st.lists(st.floats(-0.7, 0.7), min_size=6, max_size=6))
def test_inverse_consistency(m, raw):
    d = m.domain
    if d.kind == "siegel":
        w = [complex(raw[2 * k], raw[2 * k + 1]) for k in range(d.q - 1)]
        y = (complex(raw[4], sum(abs(c) ** 2 for c in w) + 0.5 + abs(raw[5])),) + tuple(w)
    elif d.kind == "slitplane":
        y = (complex(raw[0] * 3, 0.2 + abs(raw[1])),)
    else:
        y = tuple(complex(raw[2 * k], raw[2 * k + 1]) * 0.9 for k in range(d.q))
    assume(contains(d, y))
    back = eval_value(m, m.apply_inverse(y))
    assert np.abs(np.array(back) - np.array(y)).max() < 1e-9
