"""Extended and twisted I-functions, their asymptotics, and quantum periods.

Only degree-zero cohomological information is tracked. Each factor of an
I-function term contributes a rational scalar, a power of ``z``, and two
counters: ``nu`` counts factors ``(u + 0 z)`` in a numerator, which push the
term into positive cohomological degree, and ``pole`` counts factors
``(kappa + E + 0 z)`` in a denominator, which are poles in the equivariant
parameter. This is enough to read off the ``1_0`` component, the ``z``
asymptotics, and the pull-back-then-limit rule for complete intersections.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from functools import cached_property
from typing import Iterable, Sequence

from sympy import QQ

from .exactalg import solve_integer
from .series import Series, TSeries, make_ring, to_fraction
from .stackyfan import (
    BoxElement,
    ExtendedClass,
    ExtendedStackyFan,
    ImproperDegreeError,
    enumerate_classes,
)

__all__ = [
    "EngineError",
    "AsymptoticShapeError",
    "LimitError",
    "MirrorMapError",
    "FactorProfile",
    "ISeriesTerm",
    "TwistSpec",
    "AsymptoticProfile",
    "QuantumPeriod",
    "factor_profile",
    "iseries_terms",
    "asymptotics",
    "pullback_limit_filter",
    "quantum_period",
    "regularize",
    "ages_on_x",
]


class EngineError(RuntimeError):
    """Base class for failures of the I-function pipeline."""


class AsymptoticShapeError(EngineError):
    """The I-function does not have the shape of a J-function."""


class LimitError(EngineError):
    """A surviving term keeps a pole in the equivariant parameter."""


class MirrorMapError(EngineError):
    """The mirror map is not affine with unit coefficient."""


@dataclass(frozen=True)
class FactorProfile:
    """Degree-zero data of one hypergeometric factor.

    Attributes:
        scalar: product of the nonzero ``a`` values (toric denominators and
            twisted numerators enter as written in the ratio).
        z_exponent: net power of ``z``.
        nu: 1 when a numerator factor ``(u + 0 z)`` is present.
        pole: 1 when a denominator factor ``(kappa + E + 0 z)`` is present.
    """

    scalar: Fraction
    z_exponent: int
    nu: int = 0
    pole: int = 0

    @property
    def degree_zero(self) -> Fraction:
        """Value at ``u = 0``; vanishes when a zero factor is present."""
        return Fraction(0) if self.nu else self.scalar


def _between(lo: Fraction, hi: Fraction, residue: Fraction) -> list[Fraction]:
    """Values ``a`` with ``lo < a <= hi`` and ``a = residue mod 1``."""
    start = residue + math.floor(lo - residue) + 1
    out = []
    a = start
    while a <= hi:
        out.append(a)
        a += 1
    return out


def factor_profile(value, role: str = "toric") -> FactorProfile:
    """Profile of ``prod_{a<=0} (u+az) / prod_{a<=value} (u+az)``.

    The products run over ``a`` congruent to ``value`` modulo 1. For
    ``role="twisted"`` the ratio is inverted, which is the Euler-twist
    factor ``prod_{a<=value} (kappa+E+az) / prod_{a<=0} (kappa+E+az)``.

    Args:
        value: ``lambda_i`` for a toric factor, or ``epsilon . lambda``.
        role: ``"toric"`` or ``"twisted"``.
    """
    v = Fraction(value)
    frac = v - math.floor(v)
    if v >= 0:
        top = _between(Fraction(0), v, frac)
        prod = math.prod(top, start=Fraction(1))
        zero = None
        scal, zexp = 1 / prod, -len(top)
    else:
        bottom = _between(v, Fraction(0), frac)
        nonzero = [a for a in bottom if a != 0]
        zero = len(nonzero) != len(bottom)
        scal, zexp = math.prod(nonzero, start=Fraction(1)), len(nonzero)
    if role == "toric":
        return FactorProfile(scal, zexp, nu=int(bool(zero)))
    if role == "twisted":
        return FactorProfile(1 / scal, -zexp, pole=int(bool(zero)))
    raise ValueError(f"unknown factor role {role!r}")


@dataclass(frozen=True)
class TwistSpec:
    """Liftings of the bundle summands ``E_1, ..., E_s``.

    Each lifting is a vector on ``(l, k)`` coordinates; its first ``r``
    entries are the class of ``E_j`` in the weight basis.
    """

    liftings: tuple[tuple[Fraction, ...], ...]

    @classmethod
    def of(cls, rows: Iterable[Sequence]) -> "TwistSpec":
        return cls(tuple(tuple(Fraction(x) for x in row) for row in rows))

    def __len__(self) -> int:
        return len(self.liftings)

    def base_classes(self, r: int) -> list[tuple[Fraction, ...]]:
        return [row[:r] for row in self.liftings]

    def values(self, cls_: ExtendedClass) -> list[Fraction]:
        coords = cls_.coords
        return [sum((a * b for a, b in zip(row, coords)), Fraction(0)) for row in self.liftings]


@dataclass(frozen=True)
class ISeriesTerm:
    """One term ``lambda`` of the (twisted) I-function.

    Attributes:
        cls: the extended class.
        scalar: product of the factor scalars.
        z_degree: ``1 + sum`` of factor z-exponents.
        nu: total count of zero numerator factors.
        pole: total count of zero twisted denominator factors.
        box: sector reached, ``v^S(lambda)``.
        t_degree: exponent of ``t`` after ``Q^d -> t^{-K_X . d}`` and the
            age shift of the ``xi`` variables, when known.
    """

    cls: ExtendedClass
    scalar: Fraction
    z_degree: int
    nu: int
    pole: int
    box: BoxElement
    t_degree: Fraction | None = None

    @property
    def monomial(self) -> tuple[tuple[Fraction, ...], tuple[int, ...]]:
        return self.cls.l, self.cls.k


def iseries_terms(
    ext: ExtendedStackyFan,
    classes: Iterable[ExtendedClass],
    twist: TwistSpec | None = None,
) -> list[ISeriesTerm]:
    """Assembles the I-function terms for the given classes."""
    out = []
    for c in classes:
        scalar = Fraction(1)
        zdeg, nu, pole = 1, 0, 0
        for v in c.lam:
            p = factor_profile(v, "toric")
            scalar *= p.scalar
            zdeg += p.z_exponent
            nu += p.nu
        if twist is not None:
            for v in twist.values(c):
                p = factor_profile(v, "twisted")
                scalar *= p.scalar
                zdeg += p.z_exponent
                pole += p.pole
        out.append(ISeriesTerm(c, scalar, zdeg, nu, pole, c.box, c.degree))
    return out


def pullback_limit_filter(terms: Iterable[ISeriesTerm], dim_x: int) -> list[ISeriesTerm]:
    """Pull back to the complete intersection, then let ``kappa -> 0``.

    Terms with more than ``dim_x`` zero factors restrict to zero on ``X``
    and are dropped. Every survivor must be regular in ``kappa``.

    Raises:
        LimitError: for a survivor with a ``kappa`` pole.
    """
    out = []
    for t in terms:
        if t.nu > dim_x:
            continue
        if t.pole:
            raise LimitError(
                "non-equivariant limit undefined for this lifting: term "
                f"l={_fmt_vec(t.cls.l)} k={t.cls.k} keeps a kappa pole of order {t.pole}"
            )
        out.append(t)
    return out


def ages_on_x(ext: ExtendedStackyFan, twist: TwistSpec | None) -> dict[tuple[int, ...], Fraction]:
    """Ages of the sectors seen from the complete intersection.

    The normal bundle of ``X`` contributes the fractional part of
    ``E_j(b) = sum_i c_i a_i(b)``, where ``E_j = sum_i c_i D_i`` is any
    integral representation.
    """
    base = ext.base
    reps = []
    if twist is not None:
        for E in twist.base_classes(base.r):
            if any(x.denominator != 1 for x in E):
                raise EngineError(f"bundle class {E} is not integral")
            c = solve_integer(base.W, [int(x) for x in E])
            if c is None:
                raise EngineError(f"bundle class {E} is not a combination of toric divisors")
            reps.append(c)
    out = {}
    for b in base.box:
        age = b.age
        for c in reps:
            val = sum((ci * ai for ci, ai in zip(c, b.coords)), Fraction(0))
            age -= val - math.floor(val)
        out[b.vector] = age
    return out


def _fmt_vec(v) -> str:
    return "(" + ",".join(str(x) for x in v) + ")"


@dataclass
class AsymptoticProfile:
    """Terms of non-negative ``z``-degree, sorted by role.

    Attributes:
        leading: the ``z^1`` coefficient along ``1_0``.
        scalar: ``z^0`` terms along ``1_0``.
        boxes: ``z^0`` terms along each twisted sector of age below one.
        anomalies: offending terms with a short reason each.
        ages: sector ages on the target.
    """

    leading: Fraction
    scalar: list[ISeriesTerm]
    boxes: dict[tuple[int, ...], list[ISeriesTerm]]
    anomalies: list[tuple[str, ISeriesTerm]]
    ages: dict[tuple[int, ...], Fraction]
    scan_bound: Fraction = Fraction(0)

    @property
    def ok(self) -> bool:
        return self.leading == 1 and not self.anomalies

    def summary(self) -> dict[str, dict[tuple, Fraction]]:
        """``{sector: {(l, k): coefficient}}`` with ``"1_0"`` for the scalar part."""
        out = {"1_0": _collect(self.scalar)}
        for vec, terms in sorted(self.boxes.items()):
            out[str(vec)] = _collect(terms)
        return out

    def describe(self) -> str:
        parts = ["z*1_0"]
        for key, coll in self.summary().items():
            if not coll:
                continue
            body = " + ".join(_fmt_monomial(c, l, k) for (l, k), c in sorted(coll.items()))
            parts.append(f"({body})*1_{'0' if key == '1_0' else key}")
        return " + ".join(parts) + " + O(1/z)"


def _collect(terms: Iterable[ISeriesTerm]) -> dict[tuple, Fraction]:
    out: dict[tuple, Fraction] = {}
    for t in terms:
        key = (t.cls.l, t.cls.k)
        out[key] = out.get(key, Fraction(0)) + t.scalar
    return {k: v for k, v in out.items() if v}


def _fmt_monomial(c: Fraction, l, k) -> str:
    bits = [] if c == 1 else [str(c)]
    if any(l):
        bits.append("q^" + _fmt_vec(l))
    for j, kj in enumerate(k):
        if kj:
            name = "xi" if len(k) == 1 else f"xi{j + 1}"
            bits.append(name if kj == 1 else f"{name}^{kj}")
    return "*".join(bits) or "1"


def _z_functional(ext: ExtendedStackyFan, twist: TwistSpec | None) -> list[Fraction]:
    f = [Fraction(x) for x in ext.anticanonical]
    if twist is not None:
        for row in twist.liftings:
            f = [a - b for a, b in zip(f, row)]
    return f


def _check_twist(ext: ExtendedStackyFan, twist: TwistSpec | None) -> None:
    if twist is None:
        return
    for j, row in enumerate(twist.liftings):
        if len(row) != ext.rank:
            raise EngineError(f"lifting {j + 1} has {len(row)} entries, expected {ext.rank}")


def asymptotics(
    ext: ExtendedStackyFan,
    twist: TwistSpec | None = None,
    scan_bound=None,
    strict: bool = True,
) -> AsymptoticProfile:
    """All terms of ``z``-degree at least zero.

    Each factor's ``z``-exponent is at most ``-lambda_i`` (toric) or
    ``epsilon . lambda + 1`` (twisted). Hence ``z``-degree is at most
    ``1 + s - L(lambda)`` with ``L = -K^S - sum_j epsilon_j`` and ``s`` the
    number of bundles, and scanning ``L <= 1 + s`` is exhaustive.

    Args:
        ext: extended fan.
        twist: bundle liftings, or None for a toric run.
        scan_bound: optional larger scan bound (over-scanning is harmless).
        strict: raise on anomalies instead of only recording them.

    Raises:
        AsymptoticShapeError: when the shape is not
            ``z 1_0 + (scalar) 1_0 + sum_b F_b 1_b + O(1/z)``.
        LimitError: from the pull-back-then-limit filter.
    """
    _check_twist(ext, twist)
    nb = len(twist) if twist else 0
    bound = Fraction(1 + nb)
    if scan_bound is not None:
        bound = max(bound, Fraction(scan_bound))
    functional = _z_functional(ext, twist)
    try:
        classes = enumerate_classes(ext, functional, bound)
    except ImproperDegreeError as exc:
        raise AsymptoticShapeError(
            f"asymptotic shape violation: z-degree is unbounded above ({exc})"
        ) from None
    terms = iseries_terms(ext, classes, twist)
    if twist is not None:
        terms = pullback_limit_filter(terms, ext.base.dim - nb)
    ages = ages_on_x(ext, twist)
    leading = Fraction(0)
    scalar: list[ISeriesTerm] = []
    boxes: dict[tuple[int, ...], list[ISeriesTerm]] = {}
    anomalies: list[tuple[str, ISeriesTerm]] = []
    for t in terms:
        if t.z_degree < 0 or t.scalar == 0:
            continue
        if t.z_degree >= 2 or (t.z_degree == 1 and not t.cls.is_zero):
            anomalies.append((f"z^{t.z_degree} term beyond the leading z*1_0", t))
        elif t.z_degree == 1:
            leading += t.scalar
        elif t.nu:
            anomalies.append(("Q-dependent z^0 term in positive cohomological degree", t))
        elif t.box.is_zero:
            scalar.append(t)
        elif ages[t.box.vector] < 1:
            boxes.setdefault(t.box.vector, []).append(t)
        else:
            anomalies.append((f"z^0 term along a sector of age {ages[t.box.vector]}", t))
    prof = AsymptoticProfile(leading, scalar, boxes, anomalies, ages, bound)
    if strict and not prof.ok:
        if anomalies:
            why, t = anomalies[0]
            raise AsymptoticShapeError(
                f"asymptotic shape violation: {why} at l={_fmt_vec(t.cls.l)} k={t.cls.k}"
            )
        raise AsymptoticShapeError(f"asymptotic shape violation: leading coefficient {leading}")
    return prof


class QuantumPeriod(Series):
    """A quantum period ``G_X(x; t)`` truncated at ``t^order``.

    Extra attributes:
        ages: age on ``X`` of the sector of each parameter.
        shifts: ``x_j -> x_j + shift_j`` relating the mirror-map-corrected
            parameters to the raw coefficients of ``xi_j`` (None when the
            mirror-map offset is not a constant multiple of ``t^{1-age}``).
        specializations: constant values forced on sectors without a
            parameter, by sector vector.
    """

    def __init__(self, order, params, coeffs, ages=(), shifts=(), specializations=None):
        super().__init__(order, params, coeffs)
        self.ages = tuple(ages)
        self.shifts = tuple(shifts)
        self.specializations = dict(specializations or {})

    def truncate(self, order) -> "QuantumPeriod":
        return QuantumPeriod(
            min(self.order, Fraction(order)), self.params, self.coeffs,
            self.ages, self.shifts, self.specializations,
        )

    def check_invariants(self) -> list[str]:
        """Constant term 1, no ``t^1`` term, integral exponents only."""
        problems = []
        if self.coefficient(0) != {(0,) * len(self.params): Fraction(1)}:
            problems.append("constant coefficient is not 1")
        if self.coefficient(1):
            problems.append("coefficient of t is nonzero")
        if self.non_integral_exponents():
            problems.append(f"non-integral exponents {self.non_integral_exponents()}")
        return problems


def regularize(G: Series) -> Series:
    """``sum c_d t^d -> sum d! c_d t^d``."""
    out = G.regularize()
    if isinstance(G, QuantumPeriod):
        return QuantumPeriod(out.order, out.params, out.coeffs, G.ages, G.shifts, G.specializations)
    return out


def _dot(a, b) -> Fraction:
    return sum((x * y for x, y in zip(a, b)), Fraction(0))


def default_params(m: int) -> tuple[str, ...]:
    return ("x",) if m == 1 else tuple(f"x{j + 1}" for j in range(m))


def quantum_period(
    ext: ExtendedStackyFan,
    twist: TwistSpec | None = None,
    order=6,
    invert_mirror_map: bool = True,
    params: Sequence[str] | None = None,
    scan_bound=None,
) -> QuantumPeriod:
    """Quantum period from the (twisted) extended I-function.

    The mirror map is read from the ``z^0`` coefficients: along ``1_b`` it
    must be ``xi_j + const_b(Q)``, and along ``1_0`` it is a scalar series
    ``c(Q, xi)``. With ``xi_j = x_j t^{1-age} - const_b(t)``, ``Q^d ->
    t^{-K_X . d}`` and ``z = 1``, the period is ``exp(-c)`` times the
    degree-zero ``1_0`` component.

    Args:
        ext: extended fan of the ambient orbifold.
        twist: bundle liftings for a complete intersection, or None.
        order: truncation order in ``t``.
        invert_mirror_map: when False the raw ``xi_j = x_j t^{1-age}`` is
            used, which gives the period in the uncorrected parameters.
        params: names for ``x_1, ..., x_m``.
        scan_bound: forwarded to :func:`asymptotics`.

    Raises:
        AsymptoticShapeError, LimitError, MirrorMapError: see the classes.
    """
    _check_twist(ext, twist)
    order = Fraction(order)
    base = ext.base
    r, m = ext.r, ext.m
    params = tuple(params) if params is not None else default_params(m)
    if len(params) != m:
        raise EngineError(f"{m} parameter names needed")
    prof = asymptotics(ext, twist, scan_bound)
    ages = prof.ages
    antik = [Fraction(x) for x in base.anticanonical]
    if twist is not None:
        for E in twist.base_classes(r):
            antik = [a - b for a, b in zip(antik, E)]
    for ray in base.mori.generators:
        if _dot(antik, ray) <= 0:
            raise EngineError(f"-K_X = {antik} is not positive on the Mori ray {ray}")

    # Sector and t-weight of each xi_j.
    sector, weight = [], []
    for j in range(m):
        unit = ext.make_class([-x for x in ext.gamma[j]], [int(a == j) for a in range(m)])
        b = unit.box
        a = 1 - ages[b.vector]
        if a <= 0:
            raise EngineError(f"extension vector {j + 1} reaches a sector of age {ages[b.vector]}")
        sector.append(b.vector)
        weight.append(a)
    t_functional = antik + [_dot(antik, g) + a for g, a in zip(ext.gamma, weight)]

    ring = make_ring(params)
    gens = ring.gens

    def q_exponent(term: ISeriesTerm) -> Fraction:
        return _dot(antik, term.cls.d)

    # Mirror map along the twisted sectors.
    offsets: dict[int, TSeries] = {}
    shifts: list[Fraction | None] = [None] * m
    specializations = {}
    for vec, terms in sorted(prof.boxes.items()):
        units, const = [], []
        for t in terms:
            if not any(t.cls.k):
                const.append(t)
                continue
            j = next((a for a, kj in enumerate(t.cls.k) if kj), None)
            is_unit = sum(t.cls.k) == 1 and t.cls.k[j] == 1 and not any(t.cls.d)
            if not is_unit or t.scalar != 1:
                raise MirrorMapError(
                    "mirror map not invertible in closed form: term "
                    f"{_fmt_monomial(t.scalar, t.cls.l, t.cls.k)} along sector {vec}"
                )
            units.append(j)
        age = ages[vec]
        off = TSeries(ring, order)
        for t in const:
            off = off + TSeries.monomial(ring, order, q_exponent(t), QQ(t.scalar.numerator, t.scalar.denominator))
        if len(units) > 1:
            raise MirrorMapError(f"sector {vec} carries several parameters {units}")
        if not units:
            specializations[vec] = {e - (1 - age): c for e, c in off.terms.items()}
            continue
        j = units[0]
        rel = {e - weight[j]: c for e, c in off.terms.items()}
        if any(e < 0 for e in rel):
            raise MirrorMapError(f"mirror-map offset along {vec} has too low a t-order")
        offsets[j] = off
        if set(rel) <= {Fraction(0)}:
            shifts[j] = _to_frac(rel.get(Fraction(0), 0))
    missing = [j + 1 for j in range(m) if j not in offsets]
    if missing:
        raise MirrorMapError(f"parameters xi_{missing} do not appear in the mirror map")

    # xi_j as series in t.
    xi = []
    for j in range(m):
        s = TSeries.monomial(ring, order, weight[j], gens[j])
        if invert_mirror_map:
            s = s - offsets[j]
        xi.append(s)
    powers: list[list[TSeries]] = [[TSeries.one(ring, order)] for _ in range(m)]

    def xi_power(j: int, p: int) -> TSeries:
        while len(powers[j]) <= p:
            powers[j].append(powers[j][-1] * xi[j])
        return powers[j][p]

    def assemble(terms: Iterable[ISeriesTerm]) -> TSeries:
        by_k: dict[tuple[int, ...], TSeries] = {}
        for t in terms:
            acc = by_k.setdefault(t.cls.k, TSeries(ring, order))
            mono = TSeries.monomial(ring, order, q_exponent(t), QQ(t.scalar.numerator, t.scalar.denominator))
            by_k[t.cls.k] = acc + mono
        total = TSeries(ring, order)
        for k in sorted(by_k):
            piece = by_k[k]
            for j, kj in enumerate(k):
                if kj:
                    piece = piece * xi_power(j, kj)
            total = total + piece
        return total

    c = assemble(prof.scalar)
    classes = enumerate_classes(ext, t_functional, order)
    terms = iseries_terms(ext, classes, twist)
    if twist is not None:
        terms = pullback_limit_filter(terms, base.dim - len(twist))
    main = assemble(t for t in terms if t.box.is_zero and not t.nu and t.scalar)
    G = (-c).exp() * main
    out = Series.from_tseries(G, params)
    return QuantumPeriod(
        order, params, out.coeffs,
        ages=[ages[v] for v in sector],
        shifts=shifts,
        specializations={v: {e: _to_frac(c) for e, c in s.items()} for v, s in specializations.items()},
    )


def _to_frac(c) -> Fraction:
    """Constant ring element or number to ``Fraction``."""
    if isinstance(c, (int, Fraction)):
        return Fraction(c)
    if hasattr(c, "ring"):
        if not c:
            return Fraction(0)
        if not c.is_ground:
            raise MirrorMapError(f"expected a constant, got {c}")
        return to_fraction(c.LC)
    return to_fraction(c)
