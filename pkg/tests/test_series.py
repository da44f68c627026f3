import json
from fractions import Fraction

from hypothesis import given
from hypothesis import strategies as st

from qperiod.series import Series, format_poly, parse_poly

rationals = st.fractions(max_denominator=50).filter(bool)
monomials = st.tuples(st.integers(0, 3), st.integers(0, 3))


@st.composite
def series(draw):
    coeffs = draw(
        st.dictionaries(
            st.integers(0, 8).map(Fraction),
            st.dictionaries(monomials, rationals, min_size=1, max_size=4),
            max_size=6,
        )
    )
    return Series(8, ("x", "y"), coeffs)


def test_parse_and_format():
    p = parse_poly("3/2*x^2 - x*y + 4", ("x", "y"))
    assert p == {(2, 0): Fraction(3, 2), (1, 1): Fraction(-1), (0, 0): Fraction(4)}
    assert parse_poly(format_poly(p, ("x", "y")), ("x", "y")) == p


def test_regularize():
    s = Series.from_lines(["t^0: 1", "t^2: 1/2", "t^3: x"], ("x",), 3)
    assert s.regularize().lines() == ["t^0: 1", "t^2: 1", "t^3: 6*x"]


def test_substitute_affine():
    s = Series.from_lines(["t^2: x^2"], ("x",), 2)
    out = s.substitute({"x": "a + 1"}, ("a",))
    assert out.coefficient(2) == {(2,): 1, (1,): 2, (0,): 1}


@given(series())
def test_json_round_trip(s):
    text = json.dumps(s.to_json())
    assert Series.from_json(json.loads(text)) == s


@given(series())
def test_lines_round_trip(s):
    assert Series.from_lines(s.lines(), s.params, s.order) == s


@given(series())
def test_json_has_no_floats(s):
    def walk(x):
        if isinstance(x, dict):
            return all(walk(v) for v in x.values())
        if isinstance(x, list):
            return all(walk(v) for v in x)
        return not isinstance(x, float)

    assert walk(s.to_json())
