"""Stacky fans of toric orbifolds and their S-extensions.

A :class:`StackyFan` stores the ray matrix ``rho`` (``d x n``), the maximal
cones, and a weight matrix ``W`` whose rows form a basis of
``L = ker(rho)``. Column ``i`` of ``W`` is the divisor class ``D_i`` in the
dual basis ``p_1, ..., p_r`` of ``L^dual``.

An :class:`ExtendedStackyFan` adds vectors ``s_1, ..., s_m``. Its extended
weight matrix has the block shape ``[[W, 0], [C, I]]``, where each ``C_j`` is
an integer vector with ``rho C_j = -s_j``. Extended classes are therefore
written ``(l, k)``: ``l`` lives in ``Q^r`` and ``k`` in ``Z^m``.
"""

from __future__ import annotations

import itertools
import math
import random
from dataclasses import dataclass, field
from fractions import Fraction
from functools import cached_property, reduce
from typing import Iterator, Sequence

import numpy as np

from .exactalg import (
    Cone,
    ExactAlgebraError,
    as_int_matrix,
    as_rat_matrix,
    cone_intersection,
    determinant,
    dual_cone,
    hermite_normal_form,
    inverse,
    kernel_basis,
    rank,
    solve_integer,
    solve_rational,
)

__all__ = [
    "FanError",
    "ImproperDegreeError",
    "StackyFan",
    "BoxElement",
    "ExtendedStackyFan",
    "ExtendedClass",
    "box_elements",
    "nef_and_mori",
    "extend",
    "reduction",
    "enumerate_classes",
    "enumerate_classes_grid",
]

SAMPLE_DIRECTIONS = 1000


class FanError(ValueError):
    """Invalid fan, GIT or extension data."""


class ImproperDegreeError(FanError):
    """A degree functional fails to be positive on the extended Mori cone."""


def _frac(x: Fraction) -> Fraction:
    return x - math.floor(x)


def _lcm(values) -> int:
    return reduce(lambda a, b: a * b // math.gcd(a, b), values, 1)


@dataclass(frozen=True)
class BoxElement:
    """A twisted sector: ``b = sum_i a_i rho_i`` with ``0 <= a_i < 1``.

    Attributes:
        vector: the lattice point ``b``.
        coords: fractional coordinates ``a_i``, one per ray.
        cone: indices with ``a_i > 0`` (the minimal cone).
        age: ``sum_i a_i``.
    """

    vector: tuple[int, ...]
    coords: tuple[Fraction, ...]
    cone: tuple[int, ...]
    age: Fraction

    @property
    def is_zero(self) -> bool:
        return not any(self.vector)

    def __str__(self) -> str:
        return f"{self.vector} age {self.age}"


class StackyFan:
    """A complete simplicial stacky fan.

    Args:
        rays: ``n`` primitive integer vectors in ``Z^d``.
        cones: maximal cones as collections of 0-based ray indices.
        weights: optional ``r x n`` matrix whose rows are a basis of
            ``ker(rho)``. It fixes the basis of ``L^dual`` used for printing;
            the canonical Hermite basis is used when omitted.
        check: run the completeness and simplicial checks.

    Raises:
        FanError: on non-primitive rays, non-simplicial or incomplete fans,
            or a weight matrix that does not span ``ker(rho)``.
    """

    def __init__(
        self,
        rays: Sequence[Sequence[int]],
        cones: Sequence[Sequence[int]],
        weights: Sequence[Sequence[int]] | None = None,
        check: bool = True,
    ):
        self.rays = tuple(tuple(int(v) for v in r) for r in rays)
        if not self.rays:
            raise FanError("a fan needs at least one ray")
        self.dim = len(self.rays[0])
        self.n = len(self.rays)
        self.rho = as_int_matrix(list(zip(*self.rays)))
        self.cones = tuple(sorted(tuple(sorted(int(i) for i in c)) for c in cones))
        for r in self.rays:
            if len(r) != self.dim:
                raise FanError("rays of mixed dimension")
            if reduce(math.gcd, r, 0) != 1:
                raise FanError(f"ray {r} is not primitive")
        for c in self.cones:
            if len(c) != self.dim or len(set(c)) != self.dim:
                raise FanError(f"cone {c} does not have {self.dim} distinct rays")
            if any(i < 0 or i >= self.n for i in c):
                raise FanError(f"cone {c} refers to a missing ray")
            if rank(self.rho[:, list(c)]) < self.dim:
                raise FanError(f"cone {c} is not simplicial")
        if rank(self.rho) < self.dim:
            raise FanError("rays do not span the lattice")
        canonical = kernel_basis(self.rho)
        if weights is None:
            self.W = canonical
        else:
            W = as_int_matrix(weights, self.n)
            if W.shape != canonical.shape or (
                W.shape[0] and not np.array_equal(hermite_normal_form(W), canonical)
            ):
                raise FanError("weight rows do not form a basis of ker(rho)")
            self.W = W
        self.r = self.W.shape[0]
        if check:
            self.check_complete()

    @classmethod
    def from_git(
        cls,
        weights: Sequence[Sequence[int]],
        stability: Sequence | None = None,
    ) -> "StackyFan":
        """Builds the fan of a GIT quotient ``C^n // (C^*)^r``.

        Rays are the canonical kernel of the weight matrix. Maximal cones are
        the complements of the ``r``-subsets whose classes span a cone with
        the stability class in its interior.

        Args:
            weights: ``r x n`` weight matrix.
            stability: class in ``L^dual``; defaults to ``-K``, the sum of the
                weight columns.

        Raises:
            FanError: when the stability class lies on a wall, or the weights
                do not define a well-formed orbifold.
        """
        W = as_int_matrix(weights)
        r, n = W.shape
        if rank(W) < r:
            raise FanError("weight matrix is rank deficient")
        omega = [Fraction(v) for v in (stability or [sum(row) for row in W.tolist()])]
        rho_rows = kernel_basis(W)
        cones = []
        for I in itertools.combinations(range(n), r):
            sub = W[:, list(I)]
            if determinant(sub) == 0:
                continue
            a = inverse(sub).dot(np.array(omega, dtype=object))
            if any(x == 0 for x in a):
                raise FanError(
                    f"stability class {omega} lies on a wall spanned by divisors {I}; "
                    "pass a generic stability class"
                )
            if all(x > 0 for x in a):
                cones.append([i for i in range(n) if i not in I])
        if not cones:
            raise FanError("stability class lies outside the effective cone")
        rays = [tuple(col) for col in zip(*rho_rows.tolist())]
        used = {i for c in cones for i in c}
        if len(used) < n:
            raise FanError(f"divisors {sorted(set(range(n)) - used)} are unstable")
        if rho_rows.shape[0] and not np.array_equal(
            hermite_normal_form(W), kernel_basis(as_int_matrix(list(zip(*rays))))
        ):
            raise FanError("weight rows do not span a saturated lattice")
        return cls(rays, cones, weights=W.tolist())

    # Validation -------------------------------------------------------------

    @cached_property
    def _cone_adjugates(self) -> list[tuple[list[list[int]], int]]:
        """Per maximal cone: ``adj`` and ``det > 0`` with ``rho_c^{-1} = adj / det``."""
        out = []
        for c in self.cones:
            inv = inverse(self.rho[:, list(c)])
            det = _lcm(Fraction(x).denominator for x in inv.flat)
            out.append(([[int(x * det) for x in row] for row in inv.tolist()], det))
        return out

    def cone_coordinates(self, v: Sequence) -> tuple[int, list[Fraction]] | None:
        """Finds a maximal cone containing ``v`` and the coordinates there."""
        fr = [Fraction(x) for x in v]
        den = _lcm(x.denominator for x in fr)
        ints = [int(x * den) for x in fr]
        for idx, (adj, det) in enumerate(self._cone_adjugates):
            a = [sum(r * x for r, x in zip(row, ints)) for row in adj]
            if all(x >= 0 for x in a):
                return idx, [Fraction(x, det * den) for x in a]
        return None

    def check_complete(self) -> None:
        """Verifies completeness two ways.

        Every wall of a maximal cone must be shared by exactly one other
        maximal cone lying on the opposite side; this is exact. In addition
        deterministic pseudo-random directions must each land in some cone.
        """
        d = self.dim
        if d == 1:
            signs = sorted(self.rays[c[0]][0] for c in self.cones)
            if signs != [-1, 1]:
                raise FanError("one-dimensional fan must be {-1, +1}")
            return
        walls: dict[tuple[int, ...], list[tuple[int, int]]] = {}
        for c in self.cones:
            for drop in c:
                wall = tuple(i for i in c if i != drop)
                walls.setdefault(wall, []).append((drop, 0))
        for wall, uses in walls.items():
            if len(uses) != 2:
                raise FanError(f"wall {wall} lies in {len(uses)} maximal cones")
            normal = _normal(self.rho[:, list(wall)])
            s = [_dot(normal, self.rays[i]) for i, _ in uses]
            if s[0] * s[1] >= 0:
                raise FanError(f"cones on wall {wall} overlap")
        # A rational direction spans the same ray as an integer one.
        rng = random.Random(20240917)
        dirs = np.array(
            [[rng.randint(-997, 997) for _ in range(d)] for _ in range(SAMPLE_DIRECTIONS)],
            dtype=np.int64,
        )
        covered = ~dirs.any(axis=1)
        for adj, _ in self._cone_adjugates:
            covered |= (dirs.dot(np.array(adj, dtype=np.int64).T) >= 0).all(axis=1)
        if not covered.all():
            v = dirs[np.argmin(covered)].tolist()
            raise FanError(f"direction {v} is not covered by the fan")

    # Derived data -------------------------------------------------------------

    @cached_property
    def anticanonical(self) -> tuple[int, ...]:
        """``-K = sum_i D_i`` in the weight basis."""
        return tuple(sum(row) for row in self.W.tolist())

    def divisor(self, i: int) -> tuple[int, ...]:
        return tuple(self.W[:, i].tolist())

    @cached_property
    def multiplicities(self) -> tuple[int, ...]:
        return tuple(abs(int(determinant(self.rho[:, list(c)]))) for c in self.cones)

    @cached_property
    def e(self) -> int:
        """Least common multiple of the cone multiplicities."""
        return _lcm(self.multiplicities)

    @cached_property
    def box(self) -> tuple[BoxElement, ...]:
        return tuple(box_elements(self))

    @cached_property
    def _box_by_vector(self) -> dict[tuple[int, ...], BoxElement]:
        return {b.vector: b for b in self.box}

    def box_of(self, vector: Sequence[int]) -> BoxElement:
        key = tuple(int(v) for v in vector)
        try:
            return self._box_by_vector[key]
        except KeyError:
            raise FanError(f"{key} is not a Box element") from None

    @cached_property
    def nef(self) -> Cone:
        return nef_and_mori(self)[0]

    @cached_property
    def mori(self) -> Cone:
        return nef_and_mori(self)[1]

    @cached_property
    def is_fano(self) -> bool:
        return nef_and_mori(self)[2]

    def splitting(self, v: Sequence[int]) -> dict[int, Fraction]:
        """Writes a lattice vector in its minimal cone: ``{i: coefficient}``."""
        hit = self.cone_coordinates(v)
        if hit is None:
            raise FanError(f"{tuple(v)} lies outside the support of the fan")
        idx, a = hit
        return {i: x for i, x in zip(self.cones[idx], a) if x != 0}


def _dot(a, b):
    return sum(x * y for x, y in zip(a, b))


def _normal(M: np.ndarray) -> list[Fraction]:
    """A nonzero vector orthogonal to the ``d-1`` columns of ``M``."""
    d = M.shape[0]
    out = []
    for i in range(d):
        minor = np.delete(M, i, axis=0)
        out.append((-1) ** i * determinant(minor))
    return out


def box_elements(fan: StackyFan) -> list[BoxElement]:
    """All Box elements, sorted by age then vector, zero element first."""
    found: dict[tuple[int, ...], BoxElement] = {}
    for cone, (adj, det) in zip(fan.cones, fan._cone_adjugates):
        # Fractional parts of rho_sigma^{-1} v generate N / (cone lattice).
        gens = [tuple(_frac(Fraction(row[k], det)) for row in adj) for k in range(fan.dim)]
        seen = {tuple(Fraction(0) for _ in cone)}
        frontier = list(seen)
        while frontier:
            nxt = []
            for a in frontier:
                for g in gens:
                    b = tuple(_frac(x + y) for x, y in zip(a, g))
                    if b not in seen:
                        seen.add(b)
                        nxt.append(b)
            frontier = nxt
        for a in seen:
            coords = [Fraction(0)] * fan.n
            for i, x in zip(cone, a):
                coords[i] = x
            vec = tuple(
                int(sum(coords[i] * fan.rays[i][k] for i in range(fan.n))) for k in range(fan.dim)
            )
            if vec not in found:
                found[vec] = BoxElement(
                    vector=vec,
                    coords=tuple(coords),
                    cone=tuple(i for i in range(fan.n) if coords[i]),
                    age=sum(coords, Fraction(0)),
                )
    return sorted(found.values(), key=lambda b: (b.age, b.vector))


def nef_and_mori(fan: StackyFan) -> tuple[Cone, Cone, bool]:
    """Nef cone, Mori cone, and whether ``-K`` is ample.

    ``Nef`` is the intersection over maximal cones of the span of the
    divisors off the cone, and ``NE`` is its dual.
    """
    pieces = []
    for c in fan.cones:
        off = [i for i in range(fan.n) if i not in c]
        pieces.append(Cone([fan.divisor(i) for i in off], fan.r))
    nef = cone_intersection(pieces)
    mori = dual_cone(nef)
    return nef, mori, nef.interior_contains(fan.anticanonical)


@dataclass(frozen=True)
class ExtendedClass:
    """A point ``(l, k)`` of the extended lattice.

    Attributes:
        l: coordinates along the weight rows, rationals.
        k: coordinates along the extension rows, integers.
        lam: full vector ``(lambda_1, ..., lambda_{n+m})``.
        d: projected curve class in ``L (x) Q``.
        box: the reduction ``v^S(lambda)``.
        degree: value of the degree functional used for enumeration.
    """

    l: tuple[Fraction, ...]
    k: tuple[int, ...]
    lam: tuple[Fraction, ...] = field(compare=False)
    d: tuple[Fraction, ...] = field(compare=False)
    box: BoxElement = field(compare=False)
    degree: Fraction = field(compare=False, default=Fraction(0))

    @property
    def coords(self) -> tuple[Fraction, ...]:
        return self.l + tuple(Fraction(x) for x in self.k)

    @property
    def is_zero(self) -> bool:
        return not any(self.l) and not any(self.k)


class ExtendedStackyFan:
    """An S-extended stacky fan.

    Build it with :func:`extend` from lattice vectors, or with
    :meth:`from_rows` from the extension rows ``C_j`` of the extended weight
    matrix.

    Attributes:
        base: the underlying :class:`StackyFan`.
        S: extension vectors ``s_j``.
        C: extension rows, integers with ``rho C_j = -s_j``.
        split: per ``j`` the map ``{i: s^i_j}`` over the minimal cone.
        gamma: per ``j`` the curve class ``d`` of the unit ``k = e_j``, ``l = 0``.
    """

    def __init__(self, base: StackyFan, S: Sequence[Sequence[int]], C: Sequence[Sequence[int]]):
        self.base = base
        self.S = tuple(tuple(int(v) for v in s) for s in S)
        self.C = tuple(tuple(int(v) for v in c) for c in C)
        self.m = len(self.S)
        n, r = base.n, base.r
        self.split = tuple(base.splitting(s) for s in self.S)
        gam = []
        WT = as_rat_matrix(base.W.T.tolist(), r) if r else None
        for c, sp in zip(self.C, self.split):
            vec = [Fraction(c[i]) + sp.get(i, Fraction(0)) for i in range(n)]
            g = solve_rational(WT, vec) if r else []
            if g is None:
                raise FanError("extension row is inconsistent with its vector")
            gam.append(tuple(g))
        self.gamma = tuple(gam)

    @classmethod
    def from_rows(cls, base: StackyFan, rows: Sequence[Sequence[int]]) -> "ExtendedStackyFan":
        """Extension given by rows ``C_j``; then ``s_j = -rho C_j``."""
        S = []
        for j, c in enumerate(rows):
            if len(c) != base.n:
                raise FanError(f"extension row {j} has length {len(c)}, expected {base.n}")
            S.append(tuple(-sum(base.rays[i][a] * c[i] for i in range(base.n)) for a in range(base.dim)))
        for j, s in enumerate(S):
            if not any(s):
                raise FanError(f"extension vector {j} is zero")
        return cls(base, S, rows)

    @property
    def n(self) -> int:
        return self.base.n

    @property
    def r(self) -> int:
        return self.base.r

    @property
    def rank(self) -> int:
        return self.base.r + self.m

    @cached_property
    def rho_ext(self) -> np.ndarray:
        cols = list(self.base.rays) + list(self.S)
        return as_int_matrix(list(zip(*cols)))

    @cached_property
    def W_ext(self) -> np.ndarray:
        """Extended weight matrix ``[[W, 0], [C, I]]``."""
        n, m, r = self.n, self.m, self.r
        rows = [list(self.base.W[i].tolist()) + [0] * m for i in range(r)]
        for j, c in enumerate(self.C):
            rows.append(list(c) + [int(a == j) for a in range(m)])
        return as_int_matrix(rows, n + m)

    @cached_property
    def anticanonical(self) -> tuple[int, ...]:
        """Extended anticanonical class: sum of the extended divisor columns."""
        return tuple(sum(row) for row in self.W_ext.tolist())

    @cached_property
    def _columns(self) -> list[list[int]]:
        return [[int(x) for x in col] for col in self.W_ext.T.tolist()]

    def lam(self, l: Sequence[Fraction], k: Sequence[int]) -> tuple[Fraction, ...]:
        coords = list(l) + list(k)
        return tuple(
            sum((c * w for c, w in zip(coords, col) if w), Fraction(0)) for col in self._columns
        )

    def curve_class(self, l: Sequence[Fraction], k: Sequence[int]) -> tuple[Fraction, ...]:
        """The splitting: ``d = l + sum_j k_j gamma_j``."""
        d = [Fraction(x) for x in l]
        for kj, g in zip(k, self.gamma):
            for a in range(self.r):
                d[a] += kj * g[a]
        return tuple(d)

    def make_class(self, l: Sequence, k: Sequence[int], degree: Fraction = Fraction(0)) -> ExtendedClass:
        l = tuple(Fraction(x) for x in l)
        k = tuple(int(x) for x in k)
        lam = self.lam(l, k)
        return ExtendedClass(l, k, lam, self.curve_class(l, k), reduction(self, lam), degree)

    @cached_property
    def mori_rays(self) -> list[tuple[Fraction, ...]]:
        """Extremal rays of ``NE^S = NE x R_{>=0}^m`` in ``(l, k)`` coordinates."""
        m = self.m
        rays = [tuple(Fraction(x) for x in g) + (Fraction(0),) * m for g in self.base.mori.generators]
        for j, g in enumerate(self.gamma):
            rays.append(tuple(-x for x in g) + tuple(Fraction(int(a == j)) for a in range(m)))
        return rays

    def in_mori(self, l: Sequence[Fraction], k: Sequence[int]) -> bool:
        if any(x < 0 for x in k):
            return False
        return self.base.mori.contains(self.curve_class(l, k))

    @cached_property
    def nef(self) -> Cone:
        """Extended nef cone, intersection over maximal cones.

        Each piece is spanned by the off-cone divisors together with every
        extension divisor.
        """
        pieces = []
        for c in self.base.cones:
            gens = [tuple(self.W_ext[:, i].tolist()) for i in range(self.n) if i not in c]
            gens += [tuple(self.W_ext[:, self.n + j].tolist()) for j in range(self.m)]
            pieces.append(Cone(gens, self.rank))
        return cone_intersection(pieces)

    def in_lambda(self, lam: Sequence[Fraction]) -> bool:
        """Membership in ``Lambda^S``: some cone makes the off-cone entries integral."""
        if any(Fraction(x).denominator != 1 for x in lam[self.n :]):
            return False
        return any(
            all(Fraction(lam[i]).denominator == 1 for i in range(self.n) if i not in c)
            for c in self.base.cones
        )


def extend(fan: StackyFan, S: Sequence[Sequence[int]]) -> ExtendedStackyFan:
    """S-extension by lattice vectors in the support of the fan.

    Raises:
        FanError: naming the first vector outside the support.
    """
    C = []
    for j, s in enumerate(S):
        if len(s) != fan.dim or not any(s):
            raise FanError(f"extension vector {j} must be a nonzero vector of length {fan.dim}")
        if fan.cone_coordinates(s) is None:
            raise FanError(f"extension vector {j} = {tuple(s)} lies outside the support")
        c = solve_integer(fan.rho, [-x for x in s])
        if c is None:
            raise FanError(f"extension vector {j} is not in the image of rho")
        C.append(c)
    return ExtendedStackyFan(fan, S, C)


def reduction(ext: ExtendedStackyFan, lam: Sequence[Fraction]) -> BoxElement:
    """``v^S(lambda) = sum_i <-lambda_i> rho_i`` as a Box element.

    Raises:
        FanError: when ``lambda`` is not in ``Lambda^S``.
    """
    base = ext.base
    for j in range(ext.m):
        if Fraction(lam[base.n + j]).denominator != 1:
            raise FanError(f"extension coordinate k_{j + 1} = {lam[base.n + j]} is not integral")
    if not ext.in_lambda(lam):
        bad = [i for i in range(base.n) if Fraction(lam[i]).denominator != 1]
        raise FanError(f"lambda has fractional entries at rays {bad}, which span no cone")
    vec = tuple(
        int(sum(_frac(-Fraction(lam[i])) * base.rays[i][a] for i in range(base.n)))
        for a in range(base.dim)
    )
    return base.box_of(vec)


def _check_proper(ext: ExtendedStackyFan, functional: Sequence[Fraction]) -> list[Fraction]:
    values = []
    for ray in ext.mori_rays:
        v = _dot(functional, ray)
        if v <= 0:
            raise ImproperDegreeError(
                f"improper degree functional: value {v} on extremal ray {tuple(ray)}"
            )
        values.append(v)
    return values


def _vertices(ext: ExtendedStackyFan, functional, B) -> list[tuple[Fraction, ...]]:
    values = _check_proper(ext, functional)
    B = Fraction(B)
    verts = [tuple(Fraction(0) for _ in range(ext.rank))]
    for ray, v in zip(ext.mori_rays, values):
        verts.append(tuple(x * B / v for x in ray))
    return verts


def _budget_vectors(c: Sequence[Fraction], B: Fraction):
    """Nonnegative integer vectors ``k`` with ``c . k <= B`` (all ``c_j > 0``)."""
    if not c:
        yield ()
        return
    for k0 in range(math.floor(B / c[0]) + 1):
        for rest in _budget_vectors(c[1:], B - k0 * c[0]):
            yield (k0,) + rest


def enumerate_classes(
    ext: ExtendedStackyFan, functional: Sequence, B
) -> list[ExtendedClass]:
    """All ``lambda`` in ``Lambda E^S`` with ``degree(lambda) <= B``.

    For each maximal cone the off-cone entries of ``lambda`` are integers in
    an exact bounding box of the polytope ``NE^S`` cut by ``degree <= B``;
    each integer choice determines ``l`` uniquely.

    Args:
        ext: the extended fan.
        functional: linear form on ``(l, k)`` coordinates.
        B: degree bound.

    Returns:
        Classes sorted by ``(degree, coordinates)``.

    Raises:
        ImproperDegreeError: if the functional is not positive on every
            extremal ray of ``NE^S``.
    """
    functional = tuple(Fraction(x) for x in functional)
    if len(functional) != ext.rank:
        raise FanError(f"degree functional needs {ext.rank} entries")
    values = _check_proper(ext, functional)
    B = Fraction(B)
    n, m, r = ext.n, ext.m, ext.r
    f_l = functional[:r]
    # degree(l, k) = f_l . d + c . k with d = l + sum k_j gamma_j in NE
    c = values[len(values) - m:]
    ne_scaled = [
        tuple(x / v for x in ray[:r]) for ray, v in zip(ext.mori_rays, values) if not any(ray[r:])
    ]
    W = ext.W_ext
    Wi = [[int(W[a, i]) for a in range(r + m)] for i in range(n)]
    facets = [tuple(Fraction(x) for x in a) for a in ext.base.mori.facets]
    gamma_row = [[_dot(Wi[i][:r], g) for g in ext.gamma] for i in range(n)]
    ks = list(_budget_vectors(c, B))
    found: dict[tuple, ExtendedClass] = {}
    for cone in ext.base.cones:
        off = [i for i in range(n) if i not in cone]
        # lambda_i = W_i . d + (W_i^k - W_i . Gamma) . k, with d in budget * NE_1
        span = []
        for i in off:
            vals = [_dot(Wi[i][:r], v) for v in ne_scaled]
            span.append((min(vals + [Fraction(0)]), max(vals + [Fraction(0)])))
        # l = adj (y - shift) / det, kept as integer numerators
        if r:
            M = as_rat_matrix([Wi[i][:r] for i in off], r)
            det = abs(int(determinant(M)))
            adj = [[int(x * det) for x in row] for row in inverse(M).tolist()]
        else:
            det, adj = 1, []
        # degree and NE facet tests become integer linear forms in y
        f_row = [sum(f_l[a] * adj[a][b] for a in range(r)) for b in range(r)]
        f_scale = _lcm(x.denominator for x in f_row)
        A = np.array(
            [[int(x * f_scale) for x in f_row]]
            + [[int(sum(g[a] * adj[a][b] for a in range(r))) for b in range(r)] for g in facets],
            dtype=object,
        ).reshape(1 + len(facets), r)
        g_gamma = [[det * _dot(g, gam) for gam in ext.gamma] for g in facets]
        f_k = functional[r:]
        for k in ks:
            budget = B - _dot(c, k)
            shift = [sum(k[j] * Wi[i][r + j] for j in range(m)) for i in off]
            base = [s - _dot(gamma_row[i], k) for s, i in zip(shift, off)]
            ranges = [
                np.arange(math.ceil(b + budget * lo), math.floor(b + budget * hi) + 1, dtype=np.int64)
                for b, (lo, hi) in zip(base, span)
            ]
            if any(len(x) == 0 for x in ranges):
                continue
            # bounds: f.y <= f_max and g.y >= g_min
            shifted = A.dot(np.array(shift, dtype=object)) if r else np.zeros(len(A), dtype=object)
            f_max = math.floor(f_scale * (det * (B - _dot(f_k, k))) + shifted[0])
            g_min = [
                math.ceil(shifted[1 + t] - sum((kj * gg for kj, gg in zip(k, g_gamma[t])), Fraction(0)))
                for t in range(len(facets))
            ]
            grid = np.stack(np.meshgrid(*ranges, indexing="ij"), axis=-1).reshape(-1, r) if r else np.zeros((1, 0), dtype=np.int64)
            vals = grid.dot(A.astype(np.int64).T) if r else np.zeros((1, len(A)), dtype=np.int64)
            keep = vals[:, 0] <= f_max
            for t, gm in enumerate(g_min):
                keep &= vals[:, 1 + t] >= gm
            for y in grid[keep].tolist():
                l = tuple(
                    Fraction(sum(adj[a][b] * (y[b] - shift[b]) for b in range(r)), det)
                    for a in range(r)
                )
                key = (l, k)
                if key in found:
                    continue
                found[key] = ext.make_class(l, k, _dot(functional, l + k))
    return sorted(found.values(), key=lambda c: (c.degree, c.coords))


def enumerate_classes_grid(
    ext: ExtendedStackyFan, functional: Sequence, B
) -> list[ExtendedClass]:
    """Brute-force oracle for :func:`enumerate_classes`.

    Scans the ``(1/e) Z^r x Z^m`` grid over the bounding box of the polytope
    and tests the defining conditions of ``Lambda E^S`` directly.
    """
    functional = tuple(Fraction(x) for x in functional)
    verts = _vertices(ext, functional, B)
    B = Fraction(B)
    e = ext.base.e
    r, m = ext.r, ext.m
    axes = []
    for a in range(r + m):
        lo = min(v[a] for v in verts)
        hi = max(v[a] for v in verts)
        step = e if a < r else 1
        axes.append([Fraction(t, step) for t in range(math.ceil(lo * step), math.floor(hi * step) + 1)])
    out = []
    for pt in itertools.product(*axes):
        l, k = pt[:r], tuple(int(x) for x in pt[r:])
        deg = _dot(functional, pt)
        if deg > B or not ext.in_mori(l, k):
            continue
        if not ext.in_lambda(ext.lam(l, k)):
            continue
        out.append(ext.make_class(l, k, deg))
    return sorted(out, key=lambda c: (c.degree, c.coords))
