from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from qperiod.lperiod import (
    LaurentPoly,
    OrderMismatchError,
    classical_period,
    convex_hull,
    match,
    newton_polygon_checks,
)
from qperiod.series import Series

exponents = st.tuples(st.integers(-2, 2), st.integers(-2, 2))
coeffs = st.integers(-3, 3).filter(bool)


@st.composite
def laurent(draw):
    terms = draw(st.dictionaries(exponents, coeffs, min_size=1, max_size=6))
    return LaurentPoly({e: {(): Fraction(c)} for e, c in terms.items()})


@st.composite
def unimodular(draw):
    M = [[1, 0], [0, 1]]
    for _ in range(draw(st.integers(0, 4))):
        a = draw(st.integers(-2, 2))
        step = draw(st.sampled_from([[[1, a], [0, 1]], [[1, 0], [a, 1]], [[0, 1], [1, 0]], [[-1, 0], [0, 1]]]))
        M = [[sum(M[i][k] * step[k][j] for k in range(2)) for j in range(2)] for i in range(2)]
    return M


def test_p2_mirror_period():
    f = LaurentPoly.parse("x + y + 1/(x*y)")
    pi = classical_period(f, 9)
    assert pi.lines() == ["t^0: 1", "t^3: 6", "t^6: 90", "t^9: 1680"]


def test_parameterised_polynomial():
    f = LaurentPoly.parse("x + y + a/(x*y) + 1/x", ("a",))
    pi = classical_period(f, 3)
    assert pi.coefficient(3) == {(1,): Fraction(6)}


def test_convex_hull_drops_interior_points():
    assert convex_hull([(0, 0), (1, 0), (0, 1), (-1, -1), (0, 0)]) == [(-1, -1), (1, 0), (0, 1)]


def test_newton_checks():
    assert newton_polygon_checks(LaurentPoly.parse("x + y + 1/(x*y)")).fano
    rep = newton_polygon_checks(LaurentPoly.parse("x + y"))
    assert not rep.fano


def test_negative_order_rejected():
    with pytest.raises(ValueError):
        classical_period(LaurentPoly.parse("x + 1/x"), -1)


def test_match_with_identification():
    G = Series.from_lines(["t^0: 1", "t^2: 2*x"], ("x",), 2)
    pi = Series.from_lines(["t^0: 1", "t^2: 2*a + 6"], ("a",), 2)
    assert match(G, pi, {"x": "a + 3"}).ok
    bad = match(G, pi, {"x": "a"})
    assert not bad.ok and bad.mismatch == 2


def test_match_order_checks():
    G = Series.from_lines(["t^0: 1"], (), 2)
    pi = Series.from_lines(["t^0: 1"], (), 3)
    with pytest.raises(OrderMismatchError):
        match(G, pi)
    assert match(G, pi, order=2).ok


@settings(max_examples=60)
@given(laurent(), st.integers(0, 6))
def test_pruned_equals_naive(f, B):
    assert classical_period(f, B, prune=True) == classical_period(f, B, prune=False)


@settings(max_examples=60)
@given(laurent(), unimodular())
def test_period_is_gl2_invariant(f, M):
    assert classical_period(f.transform(M), 6) == classical_period(f, 6)
