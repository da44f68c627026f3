from fractions import Fraction

import numpy as np
import pytest
import sympy
from hypothesis import assume, given, settings
from hypothesis import strategies as st
from sympy.matrices.normalforms import smith_normal_form

from qperiod.exactalg import (
    Cone,
    ExactAlgebraError,
    UnsupportedDimensionError,
    as_int_matrix,
    as_rat_matrix,
    cone_intersection,
    determinant,
    dual_cone,
    gale_dual,
    hermite_normal_form,
    inverse,
    kernel_basis,
    primitive,
    rank,
    solve_integer,
    solve_rational,
)

small = st.integers(-6, 6)


def int_matrix(rows, cols):
    return st.lists(st.lists(small, min_size=cols, max_size=cols), min_size=rows, max_size=rows)


@st.composite
def matrices(draw, max_rows=4, max_cols=5):
    r = draw(st.integers(1, max_rows))
    c = draw(st.integers(1, max_cols))
    return draw(int_matrix(r, c))


@st.composite
def cones(draw):
    dim = draw(st.integers(1, 4))
    gens = draw(st.lists(st.lists(small, min_size=dim, max_size=dim), min_size=1, max_size=6))
    return Cone(gens, dim)


def test_as_int_matrix_rejects_fractions():
    with pytest.raises(ExactAlgebraError):
        as_int_matrix([[Fraction(1, 2)]])


def test_determinant_and_inverse():
    M = as_rat_matrix([[2, 1], [1, 1]])
    assert determinant(M) == 1
    assert inverse(M).tolist() == [[1, -1], [-1, 2]]


def test_inverse_of_singular_raises():
    with pytest.raises(ExactAlgebraError):
        inverse(as_rat_matrix([[1, 2], [2, 4]]))


def test_solve_rational_and_integer():
    M = as_int_matrix([[2, 0], [0, 3]])
    assert solve_rational(M, [1, 1]) == [Fraction(1, 2), Fraction(1, 3)]
    assert solve_integer(M, [1, 1]) is None
    assert solve_integer(M, [4, 9]) == [2, 3]


def test_primitive():
    assert primitive([Fraction(2, 3), Fraction(4, 3)]) == (1, 2)
    assert primitive([0, -6, 9]) == (0, -2, 3)


def test_gale_dual_of_p113_blowup():
    rho = as_int_matrix([[1, 0, -1, -2], [-1, 1, 2, 1]])
    W, torsion = gale_dual(rho)
    assert not torsion
    assert not (as_int_matrix(rho).dot(W.T)).any()
    assert rank(W) == 2


@settings(max_examples=200)
@given(matrices())
def test_determinant_matches_sympy(rows):
    n = min(len(rows), len(rows[0]))
    sq = [r[:n] for r in rows[:n]]
    assert determinant(as_rat_matrix(sq)) == sympy.Matrix(sq).det()


@settings(max_examples=200)
@given(matrices())
def test_kernel_is_saturated(rows):
    """Smith invariants of a kernel basis are all 1, so the basis spans the saturated lattice."""
    M = as_int_matrix(rows)
    assume(rank(M) == M.shape[0])
    K = kernel_basis(M)
    if K.shape[0] == 0:
        assert rank(M) == M.shape[1]
        return
    assert not M.dot(K.T).any()
    assert K.shape[0] == M.shape[1] - rank(M)
    snf = smith_normal_form(sympy.Matrix(K.tolist()), domain=sympy.ZZ)
    invariants = [abs(snf[i, i]) for i in range(min(snf.shape))]
    assert invariants == [1] * K.shape[0]


@settings(max_examples=200)
@given(matrices())
def test_hermite_normal_form_is_row_equivalent(rows):
    M = as_int_matrix(rows)
    H = hermite_normal_form(M)
    assert rank(H) == rank(M) == H.shape[0]
    stacked = np.vstack([H, M])
    assert rank(stacked) == rank(M)
    # Same lattice: every row of M solves integrally in the rows of H.
    for row in rows:
        assert solve_integer(H.T, row) is not None


@settings(max_examples=200)
@given(cones())
def test_dual_cone_is_an_involution(C):
    D2 = dual_cone(dual_cone(C))
    assert D2.same_set(C)


@settings(max_examples=100)
@given(cones())
def test_generators_pair_nonnegatively_with_dual(C):
    D = dual_cone(C)
    for a in D.generators:
        for g in C.generators:
            assert sum(x * y for x, y in zip(a, g)) >= 0


def test_cone_intersection_of_quadrants():
    A = Cone([[1, 0], [0, 1]])
    B = Cone([[1, 1], [-1, 1]])
    I = cone_intersection([A, B])
    assert I.same_set(Cone([[1, 1], [0, 1]]))


def test_kernel_of_rank_deficient_matrix_names_rows():
    with pytest.raises(ExactAlgebraError, match=r"dependent rows \[1\]"):
        kernel_basis(as_int_matrix([[1, 2], [2, 4]]))


def test_cone_dimension_cap():
    with pytest.raises(UnsupportedDimensionError):
        Cone([[1, 0, 0, 0, 0]])
