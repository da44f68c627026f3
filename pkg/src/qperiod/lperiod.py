"""Classical periods of two-variable Laurent polynomials and period matching.

The classical period of ``f`` is ``pi_f(t) = sum_d coeff_1(f^d) t^d``.  Powers
are computed by sparse convolution; with pruning enabled, after ``j`` of
``B`` multiplications an exponent ``v`` is kept only when ``-v`` lies in
``(B - j)`` times the Newton polygon, so that it can still return to the
origin.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Mapping, Sequence

from sympy import Poly, Symbol, expand, fraction, together

from .series import (
    PolyDict,
    Series,
    dict_to_poly,
    format_poly,
    make_ring,
    parse_expr_safe,
    poly_to_dict,
)

Point = tuple[int, int]


class OrderMismatchError(ValueError):
    """Two series are compared beyond the order at which both are known."""


def _cross(o: Point, a: Point, b: Point) -> int:
    return (a[0] - o[0]) * (b[1] - o[1]) - (a[1] - o[1]) * (b[0] - o[0])


def convex_hull(points) -> list[Point]:
    """Vertices of the convex hull in counter-clockwise order (monotone chain)."""
    pts = sorted(set(points))
    if len(pts) <= 2:
        return pts
    lower: list[Point] = []
    for p in pts:
        while len(lower) >= 2 and _cross(lower[-2], lower[-1], p) <= 0:
            lower.pop()
        lower.append(p)
    upper: list[Point] = []
    for p in reversed(pts):
        while len(upper) >= 2 and _cross(upper[-2], upper[-1], p) <= 0:
            upper.pop()
        upper.append(p)
    hull = lower[:-1] + upper[:-1]
    return hull


def _halfplanes(hull: Sequence[Point]) -> list[tuple[int, int, int]] | None:
    """``(n1, n2, h)`` with ``n . u <= h`` describing a 2-dimensional hull."""
    if len(hull) < 3:
        return None
    out = []
    for i, p in enumerate(hull):
        q = hull[(i + 1) % len(hull)]
        n = (q[1] - p[1], p[0] - q[0])  # outward for counter-clockwise order
        out.append((n[0], n[1], n[0] * p[0] + n[1] * p[1]))
    return out


class LaurentPoly:
    """A Laurent polynomial in ``x, y`` with coefficients polynomial in parameters.

    Attributes:
        params: parameter names.
        terms: ``{(a, b): {monomial: Fraction}}`` without zero coefficients.
    """

    def __init__(self, terms: Mapping[Point, PolyDict], params: Sequence[str] = ()):
        self.params = tuple(params)
        self.terms: dict[Point, PolyDict] = {}
        for exp, coeff in terms.items():
            clean = {tuple(m): Fraction(c) for m, c in coeff.items() if c}
            if clean:
                self.terms[(int(exp[0]), int(exp[1]))] = clean

    @classmethod
    def parse(cls, text: str, params: Sequence[str] = (), variables: Sequence[str] = ("x", "y")) -> "LaurentPoly":
        """Reads an expression such as ``"(1+y)^4/(x*y^2) + x*y + a*y"``.

        Raises:
            ValueError: if the expression is not Laurent in the variables.
        """
        params = tuple(params)
        names = tuple(variables) + params
        expr = parse_expr_safe(text, names)
        num, den = fraction(together(expr))
        vx, vy = Symbol(variables[0]), Symbol(variables[1])
        den_poly = Poly(expand(den), vx, vy)
        if len(den_poly.terms()) != 1:
            raise ValueError(f"denominator of {text!r} is not a monomial in {variables}")
        (dexp, dcoeff), = den_poly.terms()
        if dcoeff.free_symbols:
            raise ValueError(f"denominator of {text!r} involves parameters")
        num_poly = Poly(expand(num / dcoeff), vx, vy)
        terms = {}
        psyms = [Symbol(p) for p in params]
        for (a, b), c in num_poly.terms():
            key = (a - dexp[0], b - dexp[1])
            if params:
                cp = Poly(c, *psyms)
                terms[key] = {tuple(m): Fraction(str(v)) for m, v in cp.terms()}
            else:
                terms[key] = {(): Fraction(str(c))}
        return cls(terms, params)

    def support(self) -> list[Point]:
        return sorted(self.terms)

    def newton_polygon(self) -> list[Point]:
        return convex_hull(self.terms)

    def constant_term(self) -> PolyDict:
        return dict(self.terms.get((0, 0), {}))

    def transform(self, matrix: Sequence[Sequence[int]]) -> "LaurentPoly":
        """Monomial change of variables ``x^u -> x^{M u}``."""
        (a, b), (c, d) = matrix
        return LaurentPoly({(a * u + b * v, c * u + d * v): co for (u, v), co in self.terms.items()}, self.params)

    def specialize(self, values: Mapping[str, Fraction]) -> "LaurentPoly":
        """Substitutes numbers for some parameters."""
        keep = [i for i, p in enumerate(self.params) if p not in values]
        out: dict[Point, PolyDict] = {}
        for exp, coeff in self.terms.items():
            acc: PolyDict = {}
            for mon, c in coeff.items():
                for i, p in enumerate(self.params):
                    if p in values:
                        c *= Fraction(values[p]) ** mon[i]
                m2 = tuple(mon[i] for i in keep)
                acc[m2] = acc.get(m2, Fraction(0)) + c
            out[exp] = acc
        return LaurentPoly(out, [self.params[i] for i in keep])

    def __str__(self) -> str:
        parts = []
        for (a, b) in sorted(self.terms, reverse=True):
            parts.append(f"({format_poly(self.terms[(a, b)], self.params)})*x^{a}*y^{b}")
        return " + ".join(parts) or "0"

    def __eq__(self, other) -> bool:
        return isinstance(other, LaurentPoly) and self.params == other.params and self.terms == other.terms


class ClassicalPeriod(Series):
    """``pi_f`` truncated at ``t^order``; coefficients are parameter polynomials."""


def classical_period(f: LaurentPoly, order: int, prune: bool = True) -> ClassicalPeriod:
    """``sum_{d <= order} coeff_1(f^d) t^d`` by iterated sparse convolution.

    Args:
        f: the Laurent polynomial.
        order: the largest power ``d`` computed.
        prune: discard exponents that cannot return to the origin.
    """
    if order < 0:
        raise ValueError("order must be nonnegative")
    ring = make_ring(f.params)
    n = len(f.params)
    fterms = [(exp, dict_to_poly(ring, c)) for exp, c in f.terms.items()]
    planes = _halfplanes(f.newton_polygon()) if prune else None
    nested = planes is not None and all(h >= 0 for _, _, h in planes)

    def reachable(w: Point, left: int) -> bool:
        # -w must lie in d * Newton polygon for some 0 <= d <= left
        if w == (0, 0):
            return True
        scales = (left,) if nested else range(1, left + 1)
        return any(all(-(n1 * w[0] + n2 * w[1]) <= d * h for n1, n2, h in planes) for d in scales)

    coeffs = {0: {(0,) * n: Fraction(1)}}
    current = {(0, 0): ring.one}
    for j in range(1, order + 1):
        nxt: dict[Point, object] = {}
        left = order - j
        for (u, v), c in current.items():
            for (a, b), fc in fterms:
                w = (u + a, v + b)
                if planes is not None and not reachable(w, left):
                    continue
                nxt[w] = nxt.get(w, ring.zero) + c * fc
        current = {w: c for w, c in nxt.items() if c}
        const = current.get((0, 0))
        if const:
            coeffs[j] = poly_to_dict(const, n)
    return ClassicalPeriod(order, f.params, coeffs)


@dataclass
class MatchVerdict:
    """Result of comparing a regularised quantum period with a classical period.

    Attributes:
        ok: whether every coefficient through ``order`` agrees.
        order: the order checked.
        mismatch: first exponent where they differ, or None.
        expected: the classical coefficient there, as text.
        actual: the quantum coefficient there, as text.
    """

    ok: bool
    order: int
    mismatch: int | None = None
    expected: str = ""
    actual: str = ""

    def __str__(self) -> str:
        if self.ok:
            return f"match through t^{self.order}"
        return f"mismatch at t^{self.mismatch}: quantum {self.actual}, classical {self.expected}"


def match(
    G_hat: Series,
    pi: Series,
    identification: Mapping[str, str] | None = None,
    order: int | None = None,
) -> MatchVerdict:
    """Compares ``G_hat`` after an affine substitution of parameters with ``pi``.

    Args:
        G_hat: regularised quantum period.
        pi: classical period.
        identification: image of each quantum parameter as a polynomial in the
            classical parameters; parameters not listed map to themselves.
        order: compare through this power; defaults to the common order.

    Raises:
        OrderMismatchError: if the orders differ and no order is given, or if
            ``order`` exceeds either series.
    """
    if order is None:
        if G_hat.order != pi.order:
            raise OrderMismatchError(f"quantum order {G_hat.order} differs from classical order {pi.order}")
        order = int(pi.order)
    if order > G_hat.order or order > pi.order:
        raise OrderMismatchError(
            f"order {order} exceeds the known orders ({G_hat.order}, {pi.order})"
        )
    images = {p: p for p in G_hat.params}
    images.update(identification or {})
    G2 = G_hat.substitute(images, pi.params)
    bad = G2.first_difference(pi, order)
    if bad is None:
        return MatchVerdict(True, order)
    return MatchVerdict(
        False,
        order,
        int(bad),
        format_poly(pi.coefficient(bad), pi.params),
        format_poly(G2.coefficient(bad), pi.params),
    )


@dataclass
class NewtonReport:
    """Fano-polygon checks on the Newton polygon of a Laurent polynomial."""

    vertices: list[Point]
    two_dimensional: bool
    origin_interior: bool
    primitive_vertices: bool

    @property
    def fano(self) -> bool:
        return self.two_dimensional and self.origin_interior and self.primitive_vertices

    def __str__(self) -> str:
        verts = ", ".join(f"({a},{b})" for a, b in self.vertices)
        return f"Fano: {'yes' if self.fano else 'no'}; vertices {{{verts}}}"


def newton_polygon_checks(f: LaurentPoly) -> NewtonReport:
    """Origin strictly interior and primitive vertices for the Newton polygon."""
    from math import gcd

    hull = f.newton_polygon()
    planes = _halfplanes(hull)
    two_dim = planes is not None
    interior = two_dim and all(h > 0 for _, _, h in planes)
    primitive = bool(hull) and all(gcd(a, b) == 1 for a, b in hull)
    return NewtonReport(hull, two_dim, interior, primitive)
