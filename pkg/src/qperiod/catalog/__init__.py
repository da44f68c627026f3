"""Machine-readable records of the orbifold del Pezzo families.

Each family lives in ``data/NN_<name>.qp``: an input document (GIT weights,
extension rows, bundles and lifting) followed by the printed regularised
quantum period, the mirror Laurent polynomial and the parameter
identification.  Where a printed item is inconsistent, the file keeps the
printed text under ``printed``/``mirror_printed`` next to the value used.
"""

from __future__ import annotations

import math
import re
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache
from importlib import resources
from typing import Mapping, Sequence

from ..abnab import AbelianizedModel, assembled_period
from ..giventaleng import EngineError, asymptotics, quantum_period, regularize
from ..inputdoc import InputDocument, InputError
from ..lperiod import LaurentPoly, classical_period, convex_hull, match
from ..series import PolyDict, Series, parse_poly
from ..stackyfan import FanError

METHODS = ("toric", "quantum-lefschetz", "abelian-nonabelian", "no-model")
MIRROR_ORDER_CAP = 7


class UnknownFamilyError(KeyError):
    """No catalog record has the requested name."""


def normalize_name(name: str) -> str:
    """``"X_{2,8/3}"``, ``"X2_8/3"`` and ``"x_{2, 8/3}"`` all map to ``"x2,8/3"``."""
    s = re.sub(r"[\s{}]", "", name).lower().replace("-", "/")
    m = re.fullmatch(r"([a-z]+)_?(\d+)[,_](.+)", s)
    return f"{m[1]}{m[2]},{m[3]}" if m else s


def _pairs(lines: Sequence[str]) -> dict[str, str]:
    out = {}
    for line in lines:
        key, sep, value = line.partition("=")
        if not sep:
            raise InputError(f"identification line {line!r} lacks '='")
        out[key.strip()] = value.strip()
    return out


def reconstruct_mirror(
    vertices: Sequence[tuple[int, int]],
    interior: Mapping[tuple[int, int], PolyDict],
    params: Sequence[str],
) -> LaurentPoly:
    """Laurent polynomial from a polygon and its interior coefficients.

    Every lattice point of an edge of lattice length ``L`` gets the binomial
    coefficient ``C(L, i)`` by its position ``i`` along the edge; interior
    points get the given coefficients and the constant term is zero unless
    given.

    Raises:
        ValueError: if the vertices are not those of a convex polygon, or a
            coefficient is given for a point that is not interior.
    """
    hull = convex_hull(vertices)
    if len(hull) != len(set(vertices)) or len(hull) < 3:
        raise ValueError(f"{list(vertices)} are not the vertices of a convex polygon")
    one = {(0,) * len(params): Fraction(1)}
    terms: dict[tuple[int, int], PolyDict] = {}
    for i, p in enumerate(hull):
        q = hull[(i + 1) % len(hull)]
        length = math.gcd(q[0] - p[0], q[1] - p[1])
        step = ((q[0] - p[0]) // length, (q[1] - p[1]) // length)
        for j in range(length + 1):
            terms[(p[0] + j * step[0], p[1] + j * step[1])] = {
                m: c * math.comb(length, j) for m, c in one.items()
            }
    for pt, coeff in interior.items():
        if pt in terms:
            raise ValueError(f"{pt} lies on the boundary of the polygon")
        terms[pt] = dict(coeff)
    return LaurentPoly(terms, params)


def _shift(text: str, params: Sequence[str], source: str) -> dict[str, Fraction]:
    """``"3"`` for a single parameter, or ``"x1=3 x2=0"``."""
    out = {}
    for tok in text.split():
        key, sep, value = tok.partition("=")
        if not sep:
            if len(params) != 1:
                raise InputError(f"{source}: shift {text!r} needs parameter names")
            key, value = params[0], key
        if key not in params:
            raise InputError(f"{source}: shift of unknown parameter {key!r}")
        out[key] = Fraction(value)
    return out


@dataclass
class FamilyRecord:
    """One family with its model, printed data and mirror.

    Attributes:
        name: display name such as ``"X_{2,8/3}"``.
        index: row of the summary table.
        method: one of :data:`METHODS`.
        polygon: mirror polygon id such as ``"n.13"``, or None.
        result: matching dimension as printed in the summary table.
        document: the model as an input document (None without a model).
        torus_weights: torus weights of an Abelianization, if any.
        convention: ``"corrected"`` (mirror map inverted) or ``"raw"``.
        shift: for ``raw``, the shift of each parameter with
            ``G_raw(x) = G_corrected(x + shift)``.
        expected: the regularised period used for checks.
        printed: printed coefficient lines that were replaced in ``expected``.
        corrected: the period in corrected parameters when printed separately.
        mirror: the mirror Laurent polynomial used for checks, or None.
        mirror_printed: the printed mirror text when it was repaired.
        identification: images of the period parameters in mirror parameters.
        asymptotics: expected ``AsymptoticProfile.describe()`` of the I-function.
        extra: every other key of the file, verbatim.
    """

    name: str
    index: int
    method: str
    polygon: str | None
    result: str
    document: InputDocument | None
    torus_weights: list[list[int]] = field(default_factory=list)
    convention: str = "corrected"
    shift: dict[str, Fraction] = field(default_factory=dict)
    expected: Series | None = None
    printed: dict[int, str] = field(default_factory=dict)
    corrected: Series | None = None
    mirror: LaurentPoly | None = None
    mirror_printed: str | None = None
    identification: dict[str, str] = field(default_factory=dict)
    asymptotics: str | None = None
    extra: dict[str, object] = field(default_factory=dict)

    @property
    def executable(self) -> bool:
        return self.method != "no-model"

    @property
    def params(self) -> tuple[str, ...]:
        if self.document is None or self.document.params is None:
            return ()
        return self.document.params

    @property
    def expected_order(self) -> int:
        return int(self.expected.order) if self.expected is not None else 0

    @property
    def quantum_only(self) -> bool:
        """Executable but without a mirror (no toric degeneration)."""
        return self.executable and self.mirror is None

    def abelianized(self) -> AbelianizedModel:
        if not self.torus_weights:
            raise EngineError(f"{self.name} has no Abelianization")
        return AbelianizedModel(
            weights=tuple(map(tuple, self.torus_weights)),
            bundles=tuple(map(tuple, self.document.bundles)),
            name=self.name,
        )

    def quantum_period(self, order: int) -> Series:
        """The regularised quantum period ``G_hat`` through ``t^order``."""
        if not self.executable:
            raise EngineError(f"{self.name}: missing good model")
        if self.method == "abelian-nonabelian":
            return regularize(assembled_period(self.abelianized(), order))
        doc = self.document
        ext = doc.build_extended()
        G = quantum_period(
            ext,
            doc.build_twist(ext),
            order=order,
            invert_mirror_map=self.convention == "corrected",
            params=self.params,
        )
        return regularize(G)

    def asymptotic_shape(self) -> str:
        """``describe()`` of the I-function asymptotics of the model."""
        if not self.executable or self.method == "abelian-nonabelian":
            raise EngineError(f"{self.name}: no toric model to expand")
        doc = self.document
        ext = doc.build_extended()
        return asymptotics(ext, doc.build_twist(ext)).describe()

    def classical_period(self, order: int) -> Series:
        if self.mirror is None:
            raise EngineError(f"{self.name} has no mirror")
        return classical_period(self.mirror, order)


def _record_from_text(text: str, source: str) -> FamilyRecord:
    doc = InputDocument.parse(text, allow_extra=True, default_family=source)
    ex = dict(doc.extra)
    try:
        name = ex.pop("name")
        index = int(ex.pop("index"))
        method = ex.pop("method")
        result = ex.pop("result")
    except KeyError as exc:
        raise InputError(f"{source}: missing key {exc}") from None
    if method not in METHODS:
        raise InputError(f"{source}: unknown method {method!r}", doc.line_of.get("method"))
    rec = FamilyRecord(name, index, method, ex.pop("polygon", None), result, None)
    if method == "no-model":
        if doc.weights or doc.rays:
            raise InputError(f"{source}: a no-model record carries model data")
        rec.extra = ex
        return rec
    rec.document = doc
    rec.torus_weights = [[int(x) for x in line.split()] for line in ex.pop("torus_weights", [])]
    if method == "abelian-nonabelian":
        if not rec.torus_weights:
            raise InputError(f"{source}: Abelian/non-Abelian record without torus_weights")
    elif not doc.weights:
        raise InputError(f"{source}: executable record without weights")
    rec.convention = ex.pop("convention", "corrected")
    if rec.convention not in ("corrected", "raw"):
        raise InputError(f"{source}: unknown convention {rec.convention!r}", doc.line_of.get("convention"))
    params = rec.params
    rec.shift = _shift(ex.pop("shift", ""), params, source)
    order = int(ex.pop("expected_order"))
    rec.expected = Series.from_lines(ex.pop("expected"), params, order)
    for line in ex.pop("printed", []):
        head, _, body = line.partition(":")
        rec.printed[int(head.strip().removeprefix("t^"))] = body.strip()
    if "corrected" in ex:
        rec.corrected = Series.from_lines(ex.pop("corrected"), params, int(ex.pop("corrected_order")))
    mparams = tuple(str(ex.pop("mirror_params", "")).split())
    if "mirror" in ex:
        rec.mirror = LaurentPoly.parse(ex.pop("mirror"), mparams)
    elif "vertices" in ex:
        verts = [tuple(int(v) for v in p.split()) for p in ex.pop("vertices").split(",")]
        interior = {}
        for line in ex.pop("interior"):
            pt, _, coeff = line.partition(":")
            interior[tuple(int(v) for v in pt.split())] = parse_poly(coeff, mparams)
        rec.mirror = reconstruct_mirror(verts, interior, mparams)
    rec.mirror_printed = ex.pop("mirror_printed", None)
    rec.identification = _pairs(ex.pop("identification", []))
    rec.asymptotics = ex.pop("asymptotics", None)
    rec.extra = ex
    return rec


@lru_cache(maxsize=None)
def _files() -> dict[str, str]:
    """Normalized name -> file text, in table order."""
    out = {}
    data = resources.files(__package__).joinpath("data")
    for entry in sorted(data.iterdir(), key=lambda p: p.name):
        if entry.name.endswith(".qp"):
            text = entry.read_text(encoding="utf-8")
            m = re.search(r"^name:\s*(.+)$", text, re.M)
            out[normalize_name(m[1].strip())] = text
    return out


@lru_cache(maxsize=None)
def load(name: str) -> FamilyRecord:
    """The validated record of a family.

    Raises:
        UnknownFamilyError: for names not in the catalog.
        InputError: if the record is malformed.
    """
    key = normalize_name(name)
    files = _files()
    if key not in files:
        raise UnknownFamilyError(f"unknown family {name!r}")
    return _record_from_text(files[key], name)


def names() -> list[str]:
    """Display names in table order."""
    return [load(k).name for k in _files()]


def records() -> list[FamilyRecord]:
    return [load(k) for k in _files()]


@dataclass
class FamilyVerdict:
    """Outcome of running one family.

    Attributes:
        name, method, polygon, result: copied from the record.
        status: ``pass``, ``fail``, ``error``, ``quantum-only`` or ``skipped``.
        series_ok: the computed period equals the expected one (None if not run).
        mirror_ok: the classical period matches (None without a mirror).
        order: the order of the series comparison.
        mirror_order: the order of the mirror comparison.
        detail: first mismatch or error message.
        seconds: wall-clock time.
    """

    name: str
    method: str
    polygon: str | None
    result: str
    status: str
    series_ok: bool | None = None
    mirror_ok: bool | None = None
    order: int = 0
    mirror_order: int = 0
    detail: str = ""
    seconds: float = 0.0

    @property
    def ok(self) -> bool:
        return self.status in ("pass", "quantum-only", "skipped")


def run_family(rec: FamilyRecord, order: int, mirror: bool = True) -> FamilyVerdict:
    """Computes ``G_hat`` through ``order`` and compares it with the record.

    The series is compared through ``min(order, expected order)`` and the
    classical period of the mirror through the smaller of that and
    :data:`MIRROR_ORDER_CAP`.  Failures are reported, never raised.
    """
    v = FamilyVerdict(rec.name, rec.method, rec.polygon, rec.result, "skipped")
    if not rec.executable:
        v.detail = "missing good model"
        return v
    start = time.perf_counter()
    v.order = min(order, rec.expected_order)
    try:
        G = rec.quantum_period(v.order)
        bad = G.first_difference(rec.expected, v.order)
        v.series_ok = bad is None
        if bad is not None:
            v.detail = f"series differs at t^{bad}"
        if mirror and rec.mirror is not None:
            v.mirror_order = min(v.order, MIRROR_ORDER_CAP)
            verdict = match(rec.expected, rec.classical_period(v.mirror_order), rec.identification, v.mirror_order)
            v.mirror_ok = verdict.ok
            if not verdict.ok:
                v.detail = (v.detail + "; " if v.detail else "") + f"mirror {verdict}"
    except (EngineError, FanError, InputError, ValueError) as exc:
        v.status = "error"
        v.detail = f"{type(exc).__name__}: {exc}"
        v.seconds = time.perf_counter() - start
        return v
    v.seconds = time.perf_counter() - start
    if v.series_ok and v.mirror_ok is not False:
        v.status = "quantum-only" if rec.quantum_only else "pass"
    else:
        v.status = "fail"
    return v


def _run_named(args: tuple[str, int, bool]) -> FamilyVerdict:
    name, order, mirror = args
    return run_family(load(name), order, mirror)


def run_all(order: int, jobs: int = 1, mirror: bool = True, only: Sequence[str] | None = None) -> list[FamilyVerdict]:
    """Runs every record (or those in ``only``); results are in table order.

    Args:
        order: truncation order of the quantum periods.
        jobs: worker processes; results do not depend on it.
        mirror: also compare classical periods of the mirrors.
        only: restrict to these family names.
    """
    if order < 0:
        raise ValueError("order must be nonnegative")
    chosen = [r.name for r in records()]
    if only is not None:
        wanted = {normalize_name(n) for n in only}
        for n in only:
            load(n)
        chosen = [n for n in chosen if normalize_name(n) in wanted]
    tasks = [(n, order, mirror) for n in chosen]
    if jobs > 1 and len(tasks) > 1:
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            return list(pool.map(_run_named, tasks))
    return [_run_named(t) for t in tasks]


def summary_counts(verdicts: Sequence[FamilyVerdict]) -> dict[str, int]:
    """Counts by status."""
    out: dict[str, int] = {}
    for v in verdicts:
        out[v.status] = out.get(v.status, 0) + 1
    return out


def table_status_counts() -> dict[str, int]:
    """Statuses implied by the summary table: series, quantum-only, skipped."""
    out = {"series": 0, "quantum-only": 0, "skipped": 0}
    for r in records():
        if not r.executable:
            out["skipped"] += 1
        elif r.quantum_only:
            out["quantum-only"] += 1
        else:
            out["series"] += 1
    return out


__all__ = [
    "FamilyRecord",
    "FamilyVerdict",
    "METHODS",
    "UnknownFamilyError",
    "load",
    "names",
    "normalize_name",
    "reconstruct_mirror",
    "records",
    "run_all",
    "run_family",
    "summary_counts",
    "table_status_counts",
]
