import itertools
import math
from fractions import Fraction

import pytest

from qperiod import catalog
from qperiod.catalog import (
    UnknownFamilyError,
    load,
    names,
    normalize_name,
    reconstruct_mirror,
    records,
    run_all,
    run_family,
    table_status_counts,
)
from qperiod.lperiod import LaurentPoly
from qperiod.series import Series

SHAPED = [r.name for r in records() if r.asymptotics]


def test_catalog_has_every_family():
    assert len(names()) == 29
    assert [r.index for r in records()] == list(range(1, 30))


def test_names_are_normalised():
    assert normalize_name("X_{2,8/3}") == normalize_name("x2,8/3")
    assert load("x1,22/3").name == "X_{1,22/3}"


def test_unknown_family():
    with pytest.raises(UnknownFamilyError):
        load("X_{9,9}")


def test_toric_record():
    rec = load("X_{1,22/3}")
    assert (rec.method, rec.polygon, rec.executable) == ("toric", "n.25", True)


@pytest.mark.parametrize("name", ["X_{5,5/3}", "X_{5,2/3}", "X_{6,1}"])
def test_no_model_records(name):
    rec = load(name)
    assert rec.method == "no-model" and not rec.executable and rec.document is None
    v = run_family(rec, 4)
    assert (v.status, v.detail) == ("skipped", "missing good model")


def test_quantum_only_record():
    rec = load("X_{4,1/3}")
    assert rec.quantum_only and rec.mirror is None
    assert run_family(rec, 4).status == "quantum-only"


def test_status_counts():
    assert table_status_counts() == {"series": 25, "quantum-only": 1, "skipped": 3}


def test_replaced_printed_values_are_kept():
    assert load("B_{1,16/3}").printed == {6: "4440 + 90*x"}
    assert load("X_{6,2}").mirror_printed is not None


@pytest.mark.parametrize("name", SHAPED)
def test_asymptotic_shapes_are_reproduced(name):
    rec = load(name)
    assert rec.asymptotic_shape() == rec.asymptotics


def test_printed_leading_terms_in_shapes():
    assert "(2*q^(0,1,0) + 2*q^(1,0,0))*1_0" in load("X_{2,11/3}").asymptotics
    assert "(2*xi2)*1_0" in load("X_{4,7/3}").asymptotics
    assert "(24*q^(1))*1_0" in load("X_{1,4/3}").asymptotics
    assert "(12*q^(0,0,1) + 12*q^(0,1,0) + 12*q^(1,0,0))*1_0" in load("X_{3,1}").asymptotics


def test_x62_matches_four_index_sum():
    order = 9
    raw = {}
    for l1, l2, l3, l4 in itertools.product(range(order + 1), repeat=4):
        a, b = l1 + l2 - l4, -l1 + l3 + l4
        e = l1 + 2 * l2 + 2 * l3 + l4
        if a < 0 or b < 0 or e > order:
            continue
        den = math.prod(math.factorial(x) for x in (l1, l2, l3, l4, a, b))
        raw[e] = raw.get(e, Fraction(0)) + Fraction(1, den)
    G = Series(order, (), {e: {(): c} for e, c in raw.items()}).regularize()
    assert load("X_{6,2}").quantum_period(order) == G


def test_three_parameter_family():
    G = load("X_{3,5}").quantum_period(5)
    assert G.coefficient(2) == {(0, 0, 0): 2, (1, 0, 0): 2}
    assert G.coefficient(3) == {(0, 0, 1): 6}


def test_reconstruct_mirror_binomial_edges():
    f = reconstruct_mirror([(1, 0), (0, 1), (-1, -1)], {}, ())
    assert f == LaurentPoly.parse("x + y + 1/(x*y)")
    g = reconstruct_mirror([(2, -1), (-1, 2), (-1, -1)], {}, ())
    # every edge has lattice length 3, so its inner points carry C(3,1) = 3
    assert (0, 0) not in g.terms
    for pt in [(1, 0), (0, 1), (-1, 1), (-1, 0), (0, -1), (1, -1)]:
        assert g.terms[pt] == {(): 3}


def test_reconstruct_mirror_rejects_boundary_coefficients():
    with pytest.raises(ValueError):
        reconstruct_mirror([(1, 0), (0, 1), (-1, -1)], {(1, 0): {(): Fraction(5)}}, ())


def test_run_all_jobs_do_not_change_results():
    only = ["P(1,1,3)", "X_{1,22/3}", "X_{6,1}"]
    a = run_all(3, jobs=1, only=only)
    b = run_all(3, jobs=2, only=only)
    strip = lambda vs: [(v.name, v.status, v.series_ok, v.mirror_ok) for v in vs]
    assert strip(a) == strip(b)
    assert [v.name for v in a] == ["P(1,1,3)", "X_{1,22/3}", "X_{6,1}"]
