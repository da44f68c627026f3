"""Truncated power series in ``t`` with polynomial coefficients.

Exponents of ``t`` are exact rationals. Coefficients are polynomials over
``Q`` in named parameters, held as sympy ``PolyElement`` objects during
arithmetic and as plain ``{monomial: Fraction}`` dictionaries in results.
"""

from __future__ import annotations

import math
import re
from fractions import Fraction
from typing import Iterable, Mapping, Sequence

from sympy import QQ, Rational, Symbol, expand, Poly
from sympy.parsing.sympy_parser import (
    convert_xor,
    implicit_multiplication,
    parse_expr,
    standard_transformations,
)
from sympy.polys.rings import PolyRing

__all__ = [
    "PolyDict",
    "make_ring",
    "to_fraction",
    "poly_to_dict",
    "dict_to_poly",
    "format_poly",
    "parse_poly",
    "parse_expr_safe",
    "TSeries",
    "Series",
]

PolyDict = dict  # {tuple[int, ...]: Fraction}

_TRANSFORMS = standard_transformations + (convert_xor, implicit_multiplication)


def make_ring(names: Sequence[str]) -> PolyRing:
    """Polynomial ring over ``QQ``; a dummy generator keeps it nonempty."""
    return PolyRing(list(names) or ["_"], QQ)


def to_fraction(c) -> Fraction:
    """Converts a sympy/gmpy rational to ``Fraction``."""
    if isinstance(c, Fraction):
        return c
    if isinstance(c, int):
        return Fraction(c)
    num = getattr(c, "numerator", None)
    if num is None:
        num, den = c.p, c.q
    else:
        den = c.denominator
    return Fraction(int(num), int(den))


def poly_to_dict(p, nvars: int) -> PolyDict:
    """Ring element to ``{monomial: Fraction}``, trimmed to ``nvars``."""
    out = {}
    for mon, c in p.terms():
        if c:
            out[tuple(mon[:nvars])] = to_fraction(c)
    return out


def dict_to_poly(ring: PolyRing, d: Mapping[tuple, Fraction]):
    ngens = len(ring.gens)
    data = {}
    for mon, c in d.items():
        full = tuple(mon) + (0,) * (ngens - len(mon))
        data[full] = QQ(c.numerator, c.denominator)
    return ring.from_dict(data) if data else ring.zero


def _fmt_rat(c: Fraction) -> str:
    return str(c.numerator) if c.denominator == 1 else f"{c.numerator}/{c.denominator}"


def _fmt_mon(mon: Sequence[int], names: Sequence[str]) -> str:
    parts = []
    for e, name in zip(mon, names):
        if e == 1:
            parts.append(name)
        elif e:
            parts.append(f"{name}^{e}")
    return "*".join(parts)


def format_poly(d: Mapping[tuple, Fraction], names: Sequence[str]) -> str:
    """Deterministic text form, highest total degree first.

    Example: ``{(3,): 20, (1,): 120}`` with names ``("x",)`` gives
    ``"20*x^3 + 120*x"``.
    """
    items = [(m, c) for m, c in d.items() if c]
    if not items:
        return "0"
    items.sort(key=lambda mc: (-sum(mc[0]), tuple(-e for e in mc[0])))
    out = []
    for i, (mon, c) in enumerate(items):
        mon_s = _fmt_mon(mon, names)
        mag = abs(c)
        if mon_s:
            body = mon_s if mag == 1 else f"{_fmt_rat(mag)}*{mon_s}"
        else:
            body = _fmt_rat(mag)
        if i == 0:
            out.append(("-" if c < 0 else "") + body)
        else:
            out.append(("- " if c < 0 else "+ ") + body)
    return " ".join(out)


def parse_expr_safe(text: str, names: Iterable[str]):
    """Parses an arithmetic expression in the given symbol names only."""
    local = {name: Symbol(name) for name in names}
    if re.search(r"[^0-9A-Za-z_+\-*/^(). \t]", text):
        raise ValueError(f"unexpected character in expression {text!r}")
    expr = parse_expr(text, local_dict=local, transformations=_TRANSFORMS, evaluate=True)
    stray = {s.name for s in expr.free_symbols} - set(local)
    if stray:
        raise ValueError(f"unknown symbols {sorted(stray)} in {text!r}")
    return expr


def parse_poly(text: str, names: Sequence[str]) -> PolyDict:
    """Parses a polynomial such as ``"(6x^2 + 108x + 168)"``."""
    expr = expand(parse_expr_safe(text, names))
    if not names:
        if expr.free_symbols:
            raise ValueError(f"constant expected, got {text!r}")
        c = Rational(expr)
        return {(): Fraction(int(c.p), int(c.q))} if c != 0 else {}
    P = Poly(expr, *[Symbol(n) for n in names], domain=QQ)
    return {tuple(m): to_fraction(c) for m, c in P.terms() if c != 0}


class TSeries:
    """Truncated series ``sum_e c_e t^e`` with ring-valued coefficients.

    Terms with exponent above ``order`` are discarded on construction and
    after every product.
    """

    __slots__ = ("ring", "order", "terms")

    def __init__(self, ring: PolyRing, order, terms: Mapping[Fraction, object] | None = None):
        self.ring = ring
        self.order = Fraction(order)
        self.terms = {}
        for e, c in (terms or {}).items():
            e = Fraction(e)
            if e <= self.order and c:
                self.terms[e] = c

    @classmethod
    def monomial(cls, ring, order, exponent, coeff) -> "TSeries":
        return cls(ring, order, {Fraction(exponent): ring(coeff)})

    @classmethod
    def one(cls, ring, order) -> "TSeries":
        return cls(ring, order, {Fraction(0): ring.one})

    def copy(self) -> "TSeries":
        return TSeries(self.ring, self.order, dict(self.terms))

    def __add__(self, other: "TSeries") -> "TSeries":
        out = dict(self.terms)
        for e, c in other.terms.items():
            s = out.get(e, self.ring.zero) + c
            if s:
                out[e] = s
            else:
                out.pop(e, None)
        return TSeries(self.ring, min(self.order, other.order), out)

    def __neg__(self) -> "TSeries":
        return TSeries(self.ring, self.order, {e: -c for e, c in self.terms.items()})

    def __sub__(self, other: "TSeries") -> "TSeries":
        return self + (-other)

    def __mul__(self, other) -> "TSeries":
        if not isinstance(other, TSeries):
            return TSeries(self.ring, self.order, {e: c * other for e, c in self.terms.items()})
        order = min(self.order, other.order)
        out: dict[Fraction, object] = {}
        for e1, c1 in self.terms.items():
            for e2, c2 in other.terms.items():
                e = e1 + e2
                if e > order:
                    continue
                out[e] = out.get(e, self.ring.zero) + c1 * c2
        return TSeries(self.ring, order, {e: c for e, c in out.items() if c})

    __rmul__ = __mul__

    def valuation(self) -> Fraction | None:
        return min(self.terms) if self.terms else None

    def exp(self) -> "TSeries":
        """``exp`` of a series with strictly positive valuation."""
        v = self.valuation()
        if v is None:
            return TSeries.one(self.ring, self.order)
        if v <= 0:
            raise ValueError("exp needs a series of positive valuation")
        total = TSeries.one(self.ring, self.order)
        term = TSeries.one(self.ring, self.order)
        n = 1
        while n * v <= self.order:
            term = term * self * QQ(1, n)
            total = total + term
            n += 1
        return total

    def shift(self, exponent) -> "TSeries":
        """Multiplies by ``t^exponent``."""
        e0 = Fraction(exponent)
        return TSeries(self.ring, self.order, {e + e0: c for e, c in self.terms.items()})


class Series:
    """An immutable truncated series with dictionary coefficients.

    Attributes:
        order: truncation order; coefficients above it are unknown.
        params: parameter names.
        coeffs: ``{exponent: {monomial: Fraction}}`` without zero entries.
    """

    def __init__(self, order, params: Sequence[str], coeffs: Mapping[Fraction, Mapping[tuple, Fraction]]):
        self.order = Fraction(order)
        self.params = tuple(params)
        self.coeffs = {}
        for e, poly in coeffs.items():
            e = Fraction(e)
            clean = {tuple(m): Fraction(c) for m, c in poly.items() if c}
            if clean and e <= self.order:
                self.coeffs[e] = clean

    @classmethod
    def from_tseries(cls, s: TSeries, params: Sequence[str]) -> "Series":
        n = len(params)
        return cls(s.order, params, {e: poly_to_dict(c, n) for e, c in s.terms.items()})

    def to_tseries(self, ring: PolyRing | None = None) -> TSeries:
        ring = ring or make_ring(self.params)
        return TSeries(ring, self.order, {e: dict_to_poly(ring, p) for e, p in self.coeffs.items()})

    def coefficient(self, e) -> dict:
        return dict(self.coeffs.get(Fraction(e), {}))

    def truncate(self, order) -> "Series":
        return type(self)(min(self.order, Fraction(order)), self.params, self.coeffs)

    def exponents(self) -> list[Fraction]:
        return sorted(self.coeffs)

    def non_integral_exponents(self) -> list[Fraction]:
        return [e for e in self.exponents() if e.denominator != 1]

    def __eq__(self, other) -> bool:
        if not isinstance(other, Series):
            return NotImplemented
        return self.order == other.order and self.params == other.params and self.coeffs == other.coeffs

    def same_through(self, other: "Series", order) -> bool:
        """Coefficient equality for all exponents ``<= order``."""
        order = Fraction(order)
        keys = {e for e in list(self.coeffs) + list(other.coeffs) if e <= order}
        return all(self.coefficient(e) == other.coefficient(e) for e in keys)

    def first_difference(self, other: "Series", order) -> Fraction | None:
        order = Fraction(order)
        keys = sorted({e for e in list(self.coeffs) + list(other.coeffs) if e <= order})
        for e in keys:
            if self.coefficient(e) != other.coefficient(e):
                return e
        return None

    def regularize(self) -> "Series":
        """Multiplies the ``t^d`` coefficient by ``d!``.

        Raises:
            ValueError: if a nonzero coefficient sits at a non-integral exponent.
        """
        bad = self.non_integral_exponents()
        if bad:
            raise ValueError(f"non-integral exponent {bad[0]} in a series to regularise")
        out = {}
        for e, poly in self.coeffs.items():
            f = math.factorial(int(e))
            out[e] = {m: c * f for m, c in poly.items()}
        return type(self)(self.order, self.params, out)

    def substitute(self, images: Mapping[str, str], new_params: Sequence[str]) -> "Series":
        """Affine (or polynomial) change of parameters.

        Args:
            images: for each old parameter a polynomial string in ``new_params``.
            new_params: names of the parameters of the result.
        """
        src = make_ring(self.params)
        dst = make_ring(new_params)
        vals = []
        for name in self.params:
            vals.append(dict_to_poly(dst, parse_poly(images.get(name, name), new_params)))
        out = {}
        for e, poly in self.coeffs.items():
            acc = dst.zero
            for mon, c in poly.items():
                term = dst(QQ(c.numerator, c.denominator))
                for v, p in zip(vals, mon):
                    if p:
                        term = term * v**p
                acc += term
            out[e] = poly_to_dict(acc, len(new_params))
        return type(self)(self.order, new_params, out)

    def specialize(self, values: Mapping[str, Fraction]) -> "Series":
        keep = [p for p in self.params if p not in values]
        images = {p: str(values[p]) for p in values}
        return self.substitute(images, keep)

    def lines(self) -> list[str]:
        """``"t^d: poly"`` lines in increasing exponent order."""
        return [f"t^{_fmt_rat(e)}: {format_poly(self.coeffs[e], self.params)}" for e in self.exponents()]

    def to_json(self) -> dict:
        return {
            "order": _fmt_rat(self.order),
            "params": list(self.params),
            "coefficients": [
                {
                    "exponent": _fmt_rat(e),
                    "terms": [
                        {"monomial": list(m), "coefficient": _fmt_rat(c)}
                        for m, c in sorted(self.coeffs[e].items(), reverse=True)
                    ],
                }
                for e in self.exponents()
            ],
        }

    @classmethod
    def from_json(cls, data: Mapping) -> "Series":
        coeffs = {}
        for entry in data["coefficients"]:
            coeffs[Fraction(entry["exponent"])] = {
                tuple(t["monomial"]): Fraction(t["coefficient"]) for t in entry["terms"]
            }
        return cls(Fraction(data["order"]), data["params"], coeffs)

    @classmethod
    def from_lines(cls, lines: Iterable[str], params: Sequence[str], order) -> "Series":
        coeffs = {}
        for line in lines:
            line = line.strip()
            if not line:
                continue
            head, _, body = line.partition(":")
            e = Fraction(head.strip().removeprefix("t^"))
            coeffs[e] = parse_poly(body, params)
        return cls(order, params, coeffs)

    def __str__(self) -> str:
        return "\n".join(self.lines()) or "0"

    def __repr__(self) -> str:
        return f"Series(order={self.order}, params={self.params}, terms={len(self.coeffs)})"
