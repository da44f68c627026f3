"""Abelian/non-Abelian correspondence for a rank-two Weyl group of order two.

The non-Abelian quotient ``[A // G]`` is replaced by its Abelianization
``[A // T]``, a toric orbifold with a Weyl involution swapping the two
coordinates of the curve lattice.  The operator ``z d/d omega`` along the
positive root ``omega = p_1 - p_2`` is applied to each hypergeometric term
and the result divided by ``omega``.  To first order in the divisor classes
each factor contributes a harmonic number, so the identity component of the
quotient is::

    s(l) * (1 + (l_1 - l_2)/2 * sum_i c_i kappa_i(l))

where ``s`` is the scalar part of the term, ``c_i`` is the ``omega``
component of the i-th weight and ``kappa_i = -H`` for ambient factors,
``+H`` for bundle factors.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from functools import cached_property
from typing import Sequence

from .giventaleng import QuantumPeriod
from .stackyfan import ExtendedStackyFan, StackyFan, extend


class UnsupportedWeylError(ValueError):
    """The data is not symmetric under the coordinate swap of the curve lattice."""


class HarmonicCache:
    """Exact harmonic numbers ``H_l = 1 + 1/2 + ... + 1/l`` with ``H_0 = 0``."""

    def __init__(self):
        self._values = [Fraction(0)]

    def __call__(self, l: int) -> Fraction:
        if l < 0:
            raise ValueError(f"harmonic number of negative index {l}")
        while len(self._values) <= l:
            self._values.append(self._values[-1] + Fraction(1, len(self._values)))
        return self._values[l]

    def __len__(self) -> int:
        return len(self._values)


def _swap(w: Sequence[int]) -> tuple[int, int]:
    return (w[1], w[0])


@dataclass
class AbelianizedModel:
    """A toric Abelianization with rank-two curve lattice and ``W = Z/2``.

    Attributes:
        weights: toric weights ``(w_1, w_2)`` of each coordinate.
        bundles: weights of the line bundle summands of the twist.
        root: the positive root as a linear form on the curve lattice.
        name: label used in reports.
    """

    weights: tuple[tuple[int, int], ...]
    bundles: tuple[tuple[int, int], ...]
    root: tuple[int, int] = (1, -1)
    name: str = ""
    harmonic: HarmonicCache = field(default_factory=HarmonicCache, repr=False)

    def __post_init__(self):
        self.weights = tuple(tuple(int(x) for x in w) for w in self.weights)
        self.bundles = tuple(tuple(int(x) for x in w) for w in self.bundles)
        if any(len(w) != 2 for w in self.weights + self.bundles):
            raise UnsupportedWeylError("only rank-two curve lattices are supported")
        if sorted(map(_swap, self.weights)) != sorted(self.weights):
            raise UnsupportedWeylError("toric weights are not permuted by the Weyl involution")
        if sorted(map(_swap, self.bundles)) != sorted(self.bundles):
            raise UnsupportedWeylError("bundle weights are not permuted by the Weyl involution")
        if tuple(self.root) not in ((1, -1), (-1, 1)):
            raise UnsupportedWeylError(f"root {self.root} is not anti-invariant under the swap")

    @classmethod
    def weighted_grassmannian_2_5(cls) -> "AbelianizedModel":
        """Complete intersection of four ``O(2)`` in ``wGr(2,5)``, weights ``(1/2^3, 3/2^2)``."""
        return cls(
            weights=((1, 0),) * 3 + ((2, 1),) * 2 + ((0, 1),) * 3 + ((1, 2),) * 2,
            bundles=((2, 2),) * 4,
            name="X_{1,7/3}",
        )

    @property
    def omega_coefficients(self) -> tuple[tuple[int, ...], tuple[int, ...]]:
        """``c_i = w_i . root`` for ambient weights and for bundle summands."""
        c = lambda w: w[0] * self.root[0] + w[1] * self.root[1]
        return tuple(map(c, self.weights)), tuple(map(c, self.bundles))

    @property
    def anticanonical(self) -> tuple[int, int]:
        """``-K`` of the complete intersection: ``sum weights - sum bundles``."""
        return tuple(
            sum(w[a] for w in self.weights) - sum(b[a] for b in self.bundles) for a in range(2)
        )

    def weyl(self, l: Sequence[int]) -> tuple[int, int]:
        return (l[1], l[0])

    def sign_exponent(self, l: Sequence[int]) -> int:
        """``epsilon`` of the class: pairing with the positive roots."""
        return l[0] * self.root[0] + l[1] * self.root[1]

    def degree(self, l: Sequence[int]) -> int:
        """Exponent of ``t`` for the class ``l``."""
        return sum(a * b for a, b in zip(self.anticanonical, l))

    def scalar(self, l: Sequence[int]) -> Fraction:
        """Scalar factor of the identity-sector term, including the sign twist.

        Returns 0 when an ambient factor has negative pairing, since the
        factor then vanishes on the identity sector.
        """
        value = Fraction(1)
        for w in self.weights:
            d = w[0] * l[0] + w[1] * l[1]
            if d < 0:
                return Fraction(0)
            value /= math.factorial(d)
        for w in self.bundles:
            d = w[0] * l[0] + w[1] * l[1]
            if d < 0:
                return Fraction(0)
            value *= math.factorial(d)
        return -value if self.sign_exponent(l) % 2 else value

    def bracket(self, l: Sequence[int], harmonic: bool = True) -> Fraction:
        """``1 + (l_1 - l_2)/2 * sum_i c_i kappa_i`` for a class in the identity sector."""
        if not harmonic:
            return Fraction(1)
        c_amb, c_bun = self.omega_coefficients
        total = Fraction(0)
        for w, c in zip(self.weights, c_amb):
            if c:
                total -= c * self.harmonic(w[0] * l[0] + w[1] * l[1])
        for w, c in zip(self.bundles, c_bun):
            if c:
                total += c * self.harmonic(w[0] * l[0] + w[1] * l[1])
        return 1 + Fraction(self.sign_exponent(l), 2) * total

    @cached_property
    def toric(self) -> StackyFan:
        """The Abelianized toric orbifold from its GIT data (slow in high dimension)."""
        return StackyFan.from_git([[w[0] for w in self.weights], [w[1] for w in self.weights]])

    def extended(self) -> ExtendedStackyFan:
        """The Abelianization as an extended stacky fan with empty ``S``."""
        return extend(self.toric, [])

    def classes(self, order: int) -> list[tuple[int, int]]:
        """Identity-sector classes ``l_1, l_2 >= 0`` of degree at most ``order``."""
        out = []
        for l1 in range(order + 1):
            for l2 in range(order + 1):
                if self.degree((l1, l2)) <= order:
                    out.append((l1, l2))
        return out


def tilde_scalar(model: AbelianizedModel, l: Sequence[int], harmonic: bool = True) -> Fraction:
    """Identity-sector coefficient of the ``omega``-divided derivative for class ``l``.

    Args:
        model: the Abelianized model.
        l: a class with ``l_1, l_2 >= 0``.
        harmonic: set False to drop the first-order corrections.

    Raises:
        ValueError: for classes outside the nonnegative quadrant.
    """
    l = tuple(int(x) for x in l)
    if len(l) != 2 or min(l) < 0:
        raise ValueError(f"class {l} is not in the identity sector quadrant")
    return model.scalar(l) * model.bracket(l, harmonic)


def _exp_correct(raw: dict[int, Fraction], order: int, c: Fraction) -> dict[int, Fraction]:
    """Multiply ``sum raw_d t^d`` by ``exp(-c t)`` and truncate."""
    out: dict[int, Fraction] = {}
    for d, a in raw.items():
        for n in range(order - d + 1):
            out[d + n] = out.get(d + n, Fraction(0)) + a * Fraction((-c) ** n, math.factorial(n))
    return out


def _period(coeffs: dict[int, Fraction], order: int) -> QuantumPeriod:
    return QuantumPeriod(order, (), {d: {(): v} for d, v in coeffs.items() if v})


def assembled_period(model: AbelianizedModel, order: int, harmonic: bool = True) -> QuantumPeriod:
    """Quantum period from the generic term-by-term assembly.

    The exponential correction is fixed by the string equation: it removes
    the ``t^1`` coefficient of the assembled sum.
    """
    raw: dict[int, Fraction] = {}
    for l in model.classes(order):
        v = tilde_scalar(model, l, harmonic)
        d = model.degree(l)
        raw[d] = raw.get(d, Fraction(0)) + v
    c = raw.get(1, Fraction(0))
    return _period(_exp_correct(raw, order, c), order)


def closed_form_period(order: int) -> QuantumPeriod:
    """The closed harmonic-number formula for four quadrics in ``wGr(2,5)``.

    ``exp(-8t) sum A_{l1,l2} (1 + (l1-l2)/2 (-3H_{l1} + 3H_{l2} - 2H_{2l1+l2} + 2H_{2l2+l1}))``.
    """
    H = HarmonicCache()
    raw: dict[int, Fraction] = {}
    f = math.factorial
    for l1 in range(order + 1):
        for l2 in range(order + 1 - l1):
            A = Fraction(
                (-1) ** (l1 + l2) * f(2 * l1 + 2 * l2) ** 4,
                f(l1) ** 3 * f(l2) ** 3 * f(2 * l1 + l2) ** 2 * f(l1 + 2 * l2) ** 2,
            )
            br = -3 * H(l1) + 3 * H(l2) - 2 * H(2 * l1 + l2) + 2 * H(2 * l2 + l1)
            raw[l1 + l2] = raw.get(l1 + l2, Fraction(0)) + A * (1 + Fraction(l1 - l2, 2) * br)
    return _period(_exp_correct(raw, order, Fraction(8)), order)


def weyl_orbit_sums(model: AbelianizedModel, order: int) -> dict[tuple[int, int], Fraction]:
    """``sum over {l, w(l)} of (l_1 - l_2) s(l)`` for each orbit up to ``order``.

    Every value is zero when the model is Weyl symmetric; this is the
    anti-invariance of the degree-zero part of the derivative.
    """
    out = {}
    for l in model.classes(order):
        key = min(l, model.weyl(l))
        if key in out:
            continue
        orbit = {l, model.weyl(l)}
        out[key] = sum(
            (model.sign_exponent(m) * model.scalar(m) for m in orbit), Fraction(0)
        )
    return out
