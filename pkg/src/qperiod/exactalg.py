"""Exact integer and rational linear algebra, plus small polyhedral cones.

Matrices are numpy arrays of ``dtype=object`` holding Python ``int`` or
``fractions.Fraction`` entries, so every operation is exact and big integers
never overflow. Cones live in dimension at most four, which keeps
Fourier-Motzkin elimination cheap.
"""

from __future__ import annotations

import itertools
import math
from fractions import Fraction
from functools import reduce
from typing import Iterable, Sequence

import numpy as np

__all__ = [
    "ExactAlgebraError",
    "UnsupportedDimensionError",
    "as_int_matrix",
    "as_rat_matrix",
    "rank",
    "rref",
    "solve_rational",
    "inverse",
    "determinant",
    "hermite_normal_form",
    "kernel_basis",
    "solve_integer",
    "gale_dual",
    "primitive",
    "Cone",
    "dual_cone",
    "cone_intersection",
]

MAX_CONE_DIM = 4


class ExactAlgebraError(ValueError):
    """Raised when an exact linear-algebra precondition fails."""


class UnsupportedDimensionError(ExactAlgebraError):
    """Raised when a cone computation is asked for in dimension above 4."""


def _exact_int(v) -> int:
    i = int(v)
    if i != v:
        raise ExactAlgebraError(f"non-integer entry {v}")
    return i


def as_int_matrix(rows: Iterable[Iterable[int]], cols: int | None = None) -> np.ndarray:
    """Builds an object-dtype integer matrix from nested sequences.

    Args:
        rows: row-major integer entries.
        cols: column count, needed only when ``rows`` is empty.

    Returns:
        A 2-d ``numpy`` array with Python ``int`` entries.
    """
    data = [[_exact_int(v) for v in row] for row in rows]
    if not data:
        return np.empty((0, cols or 0), dtype=object)
    width = len(data[0])
    if any(len(r) != width for r in data):
        raise ExactAlgebraError("ragged integer matrix")
    out = np.empty((len(data), width), dtype=object)
    for i, row in enumerate(data):
        for j, v in enumerate(row):
            out[i, j] = v
    return out


def as_rat_matrix(rows: Iterable[Iterable], cols: int | None = None) -> np.ndarray:
    """Same as :func:`as_int_matrix` but with ``Fraction`` entries."""
    data = [[Fraction(v) for v in row] for row in rows]
    if not data:
        return np.empty((0, cols or 0), dtype=object)
    out = np.empty((len(data), len(data[0])), dtype=object)
    for i, row in enumerate(data):
        for j, v in enumerate(row):
            out[i, j] = v
    return out


def rref(M: np.ndarray) -> tuple[np.ndarray, list[int]]:
    """Reduced row echelon form over the rationals.

    Returns:
        The reduced matrix and the list of pivot columns.
    """
    A = as_rat_matrix(M.tolist(), M.shape[1])
    rows, cols = A.shape
    pivots: list[int] = []
    r = 0
    for c in range(cols):
        if r == rows:
            break
        p = next((i for i in range(r, rows) if A[i, c] != 0), None)
        if p is None:
            continue
        if p != r:
            A[[r, p]] = A[[p, r]]
        A[r] = A[r] / A[r, c]
        for i in range(rows):
            if i != r and A[i, c] != 0:
                A[i] = A[i] - A[i, c] * A[r]
        pivots.append(c)
        r += 1
    return A, pivots


def rank(M: np.ndarray) -> int:
    """Rank of a rational matrix."""
    if M.size == 0:
        return 0
    return len(rref(M)[1])


def solve_rational(M: np.ndarray, b: Sequence) -> list[Fraction] | None:
    """Returns one rational solution of ``M x = b``, or None if inconsistent."""
    rows, cols = M.shape
    aug = np.empty((rows, cols + 1), dtype=object)
    aug[:, :cols] = M
    for i in range(rows):
        aug[i, cols] = b[i]
    R, piv = rref(aug)
    if cols in piv:
        return None
    x = [Fraction(0)] * cols
    for i, c in enumerate(piv):
        x[c] = R[i, cols]
    return x


def determinant(M: np.ndarray) -> Fraction:
    """Exact determinant by fraction-free elimination (Bareiss)."""
    n = M.shape[0]
    if M.shape != (n, n):
        raise ExactAlgebraError("determinant of a non-square matrix")
    if n == 0:
        return Fraction(1)
    A = [[Fraction(v) for v in row] for row in M.tolist()]
    sign = 1
    prev = Fraction(1)
    for k in range(n - 1):
        if A[k][k] == 0:
            swap = next((i for i in range(k + 1, n) if A[i][k] != 0), None)
            if swap is None:
                return Fraction(0)
            A[k], A[swap] = A[swap], A[k]
            sign = -sign
        for i in range(k + 1, n):
            for j in range(k + 1, n):
                A[i][j] = (A[i][j] * A[k][k] - A[i][k] * A[k][j]) / prev
        prev = A[k][k]
    return sign * A[n - 1][n - 1]


def inverse(M: np.ndarray) -> np.ndarray:
    """Exact inverse of a square rational matrix."""
    n = M.shape[0]
    aug = np.empty((n, 2 * n), dtype=object)
    aug[:, :n] = M
    for i in range(n):
        for j in range(n):
            aug[i, n + j] = Fraction(int(i == j))
    R, piv = rref(aug)
    if piv[:n] != list(range(n)):
        raise ExactAlgebraError("matrix is singular")
    return R[:, n:]


def hermite_normal_form(M: np.ndarray) -> np.ndarray:
    """Row-style Hermite normal form of an integer matrix, zero rows dropped.

    Pivots are positive, entries above each pivot are reduced into
    ``[0, pivot)``, and pivot columns strictly increase down the rows.
    """
    A = [list(map(int, row)) for row in M.tolist()]
    rows = len(A)
    cols = M.shape[1]
    r = 0
    for c in range(cols):
        if r == rows:
            break
        # Euclid on column c below row r, using unimodular row operations.
        while True:
            nz = [i for i in range(r, rows) if A[i][c] != 0]
            if not nz:
                break
            p = min(nz, key=lambda i: abs(A[i][c]))
            A[r], A[p] = A[p], A[r]
            done = True
            for i in range(r + 1, rows):
                if A[i][c]:
                    q = A[i][c] // A[r][c]
                    A[i] = [a - q * b for a, b in zip(A[i], A[r])]
                    if A[i][c]:
                        done = False
            if done:
                break
        if all(A[i][c] == 0 for i in range(r, rows)):
            continue
        if A[r][c] < 0:
            A[r] = [-a for a in A[r]]
        for i in range(r):
            q = A[i][c] // A[r][c]
            if q:
                A[i] = [a - q * b for a, b in zip(A[i], A[r])]
        r += 1
    return as_int_matrix(A[:r], cols)


def _column_reduction(M: np.ndarray) -> tuple[list[list[int]], list[list[int]]]:
    """Unimodular column operations bringing ``M`` to column echelon form.

    Returns:
        ``(H, U)`` with ``H = M U`` lower echelon and ``U`` unimodular, both as
        nested lists.
    """
    rows, cols = M.shape
    H = [list(map(int, row)) for row in M.tolist()]
    U = [[int(i == j) for j in range(cols)] for i in range(cols)]

    def colop(dst: int, src: int, q: int) -> None:
        for row in H:
            row[dst] -= q * row[src]
        for row in U:
            row[dst] -= q * row[src]

    def swap(a: int, b: int) -> None:
        for row in H:
            row[a], row[b] = row[b], row[a]
        for row in U:
            row[a], row[b] = row[b], row[a]

    c = 0
    for r in range(rows):
        if c == cols:
            break
        while True:
            nz = [j for j in range(c, cols) if H[r][j] != 0]
            if not nz:
                break
            p = min(nz, key=lambda j: abs(H[r][j]))
            swap(c, p)
            for j in range(c + 1, cols):
                if H[r][j]:
                    colop(j, c, H[r][j] // H[r][c])
            if all(H[r][j] == 0 for j in range(c + 1, cols)):
                c += 1
                break
    return H, U


def kernel_basis(M: np.ndarray) -> np.ndarray:
    """Z-basis of the saturated kernel ``{v in Z^cols : M v = 0}``.

    Args:
        M: integer matrix of full row rank over Q.

    Returns:
        A matrix whose rows form the kernel basis in row-style Hermite normal
        form, so the output is canonical.

    Raises:
        ExactAlgebraError: if ``M`` is rank deficient; the message names the
            rows that depend on earlier ones.
    """
    rows, cols = M.shape
    if rows and rank(M) < rows:
        dependent, prev = [], 0
        for i in range(rows):
            cur = rank(M[: i + 1])
            if cur == prev:
                dependent.append(i)
            prev = cur
        raise ExactAlgebraError(f"matrix is rank deficient; dependent rows {dependent}")
    H, U = _column_reduction(M)
    basis = [[U[i][j] for i in range(cols)] for j in range(rows, cols)]
    if not basis:
        return np.empty((0, cols), dtype=object)
    return hermite_normal_form(as_int_matrix(basis))


def solve_integer(M: np.ndarray, b: Sequence[int]) -> list[int] | None:
    """One integer solution of ``M x = b``, or None when none exists."""
    rows, cols = M.shape
    H, U = _column_reduction(M)
    # H = M U is column echelon; solve H y = b by forward substitution.
    y = [0] * cols
    residual = [int(v) for v in b]
    c = 0
    for r in range(rows):
        if c < cols and H[r][c] != 0:
            q, rem = divmod(residual[r], H[r][c])
            if rem:
                return None
            y[c] = q
            for i in range(rows):
                residual[i] -= H[i][c] * q
            c += 1
        elif residual[r] != 0:
            return None
    if any(residual):
        return None
    return [sum(U[i][j] * y[j] for j in range(cols)) for i in range(cols)]


def gale_dual(rho: np.ndarray) -> tuple[np.ndarray, bool]:
    """Divisor matrix of a fan sequence.

    The rows of the returned ``D`` are a canonical Z-basis of
    ``L = ker(rho)``; column ``i`` of ``D`` is then the class of ``D_i`` in
    ``L^dual`` expressed in the dual basis.

    Args:
        rho: ``d x n`` integer ray matrix of full row rank.

    Returns:
        ``(D, torsion)`` where ``torsion`` reports a nontrivial finite
        cokernel of ``rho``. In that case ``D`` only describes the
        torsion-free quotient.

    Raises:
        ExactAlgebraError: if the cokernel of ``rho`` is infinite.
    """
    d, n = rho.shape
    if rank(rho) < d:
        raise ExactAlgebraError("ray matrix has infinite cokernel")
    D = kernel_basis(rho)
    # The cokernel is trivial iff the gcd of the maximal minors is 1.
    g = 0
    for cols in itertools.combinations(range(n), d):
        g = math.gcd(g, int(determinant(rho[:, list(cols)])))
        if g == 1:
            break
    return D, g != 1


def primitive(v: Sequence) -> tuple[int, ...]:
    """Scales a nonzero rational vector to a primitive integer vector."""
    fr = [Fraction(x) for x in v]
    den = reduce(lambda a, b: a * b // math.gcd(a, b), (x.denominator for x in fr), 1)
    ints = [int(x * den) for x in fr]
    g = reduce(math.gcd, ints, 0)
    if g == 0:
        raise ExactAlgebraError("zero vector has no primitive scaling")
    return tuple(x // g for x in ints)


def _dot(a: Sequence, b: Sequence):
    return sum(x * y for x, y in zip(a, b))


def _det_int(rows: list[list[int]]) -> int:
    """Bareiss fraction-free determinant of a small integer matrix."""
    M = [list(r) for r in rows]
    n = len(M)
    sign, prev = 1, 1
    for k in range(n - 1):
        if M[k][k] == 0:
            swap = next((i for i in range(k + 1, n) if M[i][k] != 0), None)
            if swap is None:
                return 0
            M[k], M[swap] = M[swap], M[k]
            sign = -sign
        for i in range(k + 1, n):
            for j in range(k + 1, n):
                M[i][j] = (M[i][j] * M[k][k] - M[i][k] * M[k][j]) // prev
        prev = M[k][k]
    return sign * M[n - 1][n - 1] if n else 1


def _in_cone_of(v: tuple, gens: list[tuple], dim: int) -> bool:
    """Exact test whether ``v`` is a nonnegative combination of ``gens``.

    By Caratheodory ``v`` is a nonnegative combination of linearly
    independent generators, and those extend to a basis of their span with
    zero coefficients, so only maximal independent subsets are tried. Each
    one is solved by Cramer's rule on integer coordinates of the span.
    """
    if not any(v):
        return True
    if not gens:
        return False
    v = primitive(v)
    gens = [primitive(g) for g in gens]
    size = rank(as_int_matrix(gens))
    if rank(as_int_matrix(gens + [v])) > size:
        return False
    # Coordinates on which the span projects isomorphically.
    _, coords = rref(as_rat_matrix(gens))
    proj = [[g[c] for c in coords] for g in gens]
    w = [v[c] for c in coords]
    for sub in itertools.combinations(range(len(gens)), size):
        cols = [proj[i] for i in sub]
        det = _det_int([list(r) for r in zip(*cols)])
        if det == 0:
            continue
        ok = True
        for j in range(size):
            swapped = cols[:j] + [w] + cols[j + 1:]
            num = _det_int([list(r) for r in zip(*swapped)])
            if num * det < 0:
                ok = False
                break
        if ok:
            return True
    return False


def _minimal_generators(gens: Iterable[tuple], dim: int) -> list[tuple]:
    """Drops duplicates and generators lying in the cone of the others."""
    uniq = sorted(set(primitive(g) for g in gens if any(g)))
    keep = list(uniq)
    for g in uniq:
        others = [h for h in keep if h != g]
        if _in_cone_of(g, others, dim):
            keep = others
    return keep


def _fourier_motzkin(gens: list[tuple], dim: int) -> list[tuple]:
    """Inequalities ``a . x >= 0`` cutting out ``cone(gens)``.

    Eliminates the multipliers ``mu`` from ``x = G mu, mu >= 0``.
    Constraints are stored as ``(coeffs over x, coeffs over mu)`` meaning
    ``coeffs_x . x + coeffs_mu . mu >= 0``.
    """
    p = len(gens)
    if p == 0:
        # The zero cone: x = 0, i.e. both signs of every coordinate.
        out = []
        for i in range(dim):
            e = tuple(int(i == j) for j in range(dim))
            out += [e, tuple(-c for c in e)]
        return out
    # Equalities x_k - sum_i mu_i g_ik = 0, and inequalities mu_i >= 0.
    eqs = [
        ([Fraction(int(k == j)) for j in range(dim)], [Fraction(-g[k]) for g in gens])
        for k in range(dim)
    ]
    ineqs = [
        ([Fraction(0)] * dim, [Fraction(int(i == j)) for j in range(p)]) for i in range(p)
    ]
    alive = set(range(p))
    # Use equalities to substitute multipliers away.
    while True:
        pick = None
        for ei, (ex, em) in enumerate(eqs):
            j = next((j for j in alive if em[j] != 0), None)
            if j is not None:
                pick = (ei, j)
                break
        if pick is None:
            break
        ei, j = pick
        ex, em = eqs.pop(ei)

        def subst(cx, cm):
            f = cm[j] / em[j]
            return (
                [a - f * b for a, b in zip(cx, ex)],
                [a - f * b for a, b in zip(cm, em)],
            )

        eqs = [subst(cx, cm) for cx, cm in eqs]
        ineqs = [subst(cx, cm) for cx, cm in ineqs]
        alive.discard(j)
    # Remaining multipliers are eliminated by pairing signs.
    for j in sorted(alive):
        pos = [c for c in ineqs if c[1][j] > 0]
        neg = [c for c in ineqs if c[1][j] < 0]
        zero = [c for c in ineqs if c[1][j] == 0]
        new = list(zero)
        for px, pm in pos:
            for nx, nm in neg:
                a, b = pm[j], -nm[j]
                new.append(
                    ([b * u + a * v for u, v in zip(px, nx)], [b * u + a * v for u, v in zip(pm, nm)])
                )
        # Pairwise dominance: drop scalar duplicates before the next round.
        seen = {}
        for cx, cm in new:
            vec = cx + cm
            if not any(vec):
                continue
            seen.setdefault(primitive(vec), (cx, cm))
        ineqs = list(seen.values())
    out = [tuple(cx) for cx, _ in ineqs if any(cx)]
    # Leftover equalities in x alone hold with both signs.
    for ex, _ in eqs:
        if any(ex):
            out += [tuple(ex), tuple(-c for c in ex)]
    return out


class Cone:
    """A rational polyhedral cone given by generators.

    Facet normals are computed lazily by Fourier-Motzkin elimination. A point
    lies in the cone iff it pairs nonnegatively with every facet normal.

    Attributes:
        dim: ambient dimension.
        generators: minimal list of primitive integer generators.
    """

    def __init__(self, generators: Iterable[Sequence], dim: int | None = None):
        gens = [tuple(Fraction(x) for x in g) for g in generators]
        if dim is None:
            if not gens:
                raise ExactAlgebraError("dimension required for the zero cone")
            dim = len(gens[0])
        if any(len(g) != dim for g in gens):
            raise ExactAlgebraError("generators of mixed dimension")
        if dim > MAX_CONE_DIM:
            raise UnsupportedDimensionError(f"cone dimension {dim} exceeds {MAX_CONE_DIM}")
        self.dim = dim
        self.generators = _minimal_generators(gens, dim)
        self._facets: list[tuple] | None = None

    @property
    def facets(self) -> list[tuple]:
        """Primitive inner normals ``a`` with ``a . x >= 0`` on the cone."""
        if self._facets is None:
            self._facets = _minimal_generators(_fourier_motzkin(self.generators, self.dim), self.dim)
        return self._facets

    def contains(self, x: Sequence) -> bool:
        return all(_dot(a, x) >= 0 for a in self.facets)

    def interior_contains(self, x: Sequence) -> bool:
        """Membership in the topological interior (needs a full cone)."""
        if self.linear_span_dim() < self.dim:
            return False
        return all(_dot(a, x) > 0 for a in self.facets)

    def linear_span_dim(self) -> int:
        if not self.generators:
            return 0
        return rank(as_int_matrix(self.generators))

    def is_pointed(self) -> bool:
        return self.dual().linear_span_dim() == self.dim

    def dual(self) -> "Cone":
        return dual_cone(self)

    def same_set(self, other: "Cone") -> bool:
        return all(other.contains(g) for g in self.generators) and all(
            self.contains(g) for g in other.generators
        )

    def __repr__(self) -> str:
        return f"Cone({[list(g) for g in self.generators]})"


def dual_cone(C: Cone) -> Cone:
    """Dual cone ``{y : <y, x> >= 0 for all x in C}``.

    Raises:
        UnsupportedDimensionError: above dimension 4.
    """
    if C.dim > MAX_CONE_DIM:
        raise UnsupportedDimensionError(f"cone dimension {C.dim} exceeds {MAX_CONE_DIM}")
    out = Cone(C.facets, C.dim)
    out._facets = list(C.generators)
    return out


def cone_intersection(cones: Sequence[Cone]) -> Cone:
    """Intersection of cones in a common ambient space.

    Facet normals of all inputs are pooled; the intersection is the dual of
    the cone they generate.
    """
    if not cones:
        raise ExactAlgebraError("intersection of an empty list of cones")
    dim = cones[0].dim
    if any(c.dim != dim for c in cones):
        raise ExactAlgebraError("cones live in different dimensions")
    if len(cones) == 1:
        return cones[0]
    pooled = Cone([a for c in cones for a in c.facets], dim)
    return dual_cone(pooled)
