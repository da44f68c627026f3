"""Line-oriented input documents for fans, GIT data, twists and Laurent polynomials.

A document is a sequence of ``key: value`` lines.  A key with an empty value
opens a block whose lines are indented::

    # blow-up of P(1,1,3) in one point
    weights:
      1 1 2 0
      0 1 3 1
    extend_rows:
      0 0 1 0
    order: 6

Cones are written with 1-based ray indices and held 0-based in memory.
``#`` starts a comment.  Every error carries the line number it refers to.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable, Sequence

from .giventaleng import TwistSpec
from .stackyfan import ExtendedStackyFan, StackyFan, extend

MODES = ("fan", "git", "laurent", "family")
MATRIX_KEYS = ("rays", "cones", "weights", "extend", "extend_rows", "bundles", "lift")
SCALAR_KEYS = ("mode", "stability", "antiK", "order", "params", "laurent", "family")
KNOWN_KEYS = MATRIX_KEYS + SCALAR_KEYS

_KEY = re.compile(r"^([A-Za-z_][A-Za-z0-9_]*)\s*:\s*(.*)$")


class InputError(ValueError):
    """A malformed or inconsistent input document.

    Attributes:
        line: 1-based line number, or None when not tied to a line.
    """

    def __init__(self, message: str, line: int | None = None):
        self.line = line
        super().__init__(f"line {line}: {message}" if line else message)


@dataclass
class RawDocument:
    """Keys in file order with their scalar text or block lines."""

    scalars: dict[str, str] = field(default_factory=dict)
    blocks: dict[str, list[str]] = field(default_factory=dict)
    lines: dict[str, int] = field(default_factory=dict)
    block_lines: dict[str, list[int]] = field(default_factory=dict)

    def __contains__(self, key: str) -> bool:
        return key in self.scalars or key in self.blocks


def read_raw(text: str) -> RawDocument:
    """Splits a document into scalars and blocks without interpreting them."""
    doc = RawDocument()
    current = None
    for no, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].rstrip()
        if not line.strip():
            continue
        if line[0] in " \t":
            if current is None:
                raise InputError("indented line outside a block", no)
            doc.blocks[current].append(line.strip())
            doc.block_lines[current].append(no)
            continue
        m = _KEY.match(line)
        if not m:
            raise InputError(f"expected 'key: value', got {line.strip()!r}", no)
        key, value = m.group(1), m.group(2).strip()
        if key in doc:
            raise InputError(f"duplicate key {key!r}", no)
        doc.lines[key] = no
        if value:
            doc.scalars[key] = value
            current = None
        else:
            doc.blocks[key] = []
            doc.block_lines[key] = []
            current = key
    return doc


def _int_rows(raw: RawDocument, key: str) -> list[list[int]]:
    rows = []
    for text, no in zip(raw.blocks.get(key, []), raw.block_lines.get(key, [])):
        try:
            rows.append([int(x) for x in text.split()])
        except ValueError:
            raise InputError(f"{key}: expected integers, got {text!r}", no) from None
    if key in raw.scalars:
        raise InputError(f"{key} must be a block of integer rows", raw.lines[key])
    return rows


def _names(text: str) -> tuple[str, ...]:
    return tuple(x for x in re.split(r"[\s,]+", text.strip()) if x)


@dataclass
class InputDocument:
    """Typed view of a document.

    Attributes:
        mode: ``fan``, ``git``, ``laurent`` or ``family``.
        rays, cones: fan data (cones 0-based).
        weights: GIT weight matrix, rows a basis of the relations.
        stability: optional GIT stability class.
        extend: extension vectors ``s_j`` in ``N``.
        extend_rows: extension rows ``C_j`` of the extended weight matrix.
        bundles: one row per line bundle summand, its class in the weight basis.
        lift: one row per summand, the extension part of its lifting.
        antiK: expected anticanonical class of the complete intersection.
        order: truncation order.
        params: names of the period parameters.
        laurent: Laurent polynomial text.
        family: catalog family name.
        extra: other keys, kept verbatim (scalars as str, blocks as lists).
        line_of: line number of each key.
    """

    mode: str
    rays: list[list[int]] = field(default_factory=list)
    cones: list[list[int]] = field(default_factory=list)
    weights: list[list[int]] = field(default_factory=list)
    stability: list[Fraction] | None = None
    extend: list[list[int]] = field(default_factory=list)
    extend_rows: list[list[int]] = field(default_factory=list)
    bundles: list[list[int]] = field(default_factory=list)
    lift: list[list[int]] = field(default_factory=list)
    antiK: list[Fraction] | None = None
    order: int | None = None
    params: tuple[str, ...] | None = None
    laurent: str | None = None
    family: str | None = None
    extra: dict[str, object] = field(default_factory=dict)
    line_of: dict[str, int] = field(default_factory=dict)

    # Parsing ----------------------------------------------------------------

    @classmethod
    def parse(
        cls, text: str, allow_extra: bool = False, default_family: str | None = None
    ) -> "InputDocument":
        """Parses and validates a document.

        Args:
            text: document text.
            allow_extra: keep unknown keys in ``extra`` instead of rejecting them.
            default_family: family name to assume when no model data is given.

        Raises:
            InputError: with the offending line number.
        """
        raw = read_raw(text)
        for key in list(raw.scalars) + list(raw.blocks):
            if key not in KNOWN_KEYS and not allow_extra:
                raise InputError(f"unknown key {key!r}", raw.lines[key])
        mode = raw.scalars.get("mode")
        if mode is None:
            if "rays" in raw:
                mode = "fan"
            elif "weights" in raw:
                mode = "git"
            elif "laurent" in raw:
                mode = "laurent"
            elif "family" in raw or default_family:
                mode = "family"
            else:
                raise InputError("cannot tell the mode: give rays, weights, laurent or family")
        if mode not in MODES:
            raise InputError(f"unknown mode {mode!r}", raw.lines.get("mode"))
        doc = cls(mode=mode, line_of=dict(raw.lines))
        for key in MATRIX_KEYS:
            if key in raw:
                setattr(doc, key, _int_rows(raw, key))
        if doc.cones:
            doc.cones = [[i - 1 for i in c] for c in doc.cones]
        for key in ("stability", "antiK"):
            if key in raw.scalars:
                try:
                    setattr(doc, key, [Fraction(x) for x in raw.scalars[key].split()])
                except ValueError:
                    raise InputError(f"{key}: expected rationals", raw.lines[key]) from None
        if "order" in raw.scalars:
            try:
                doc.order = int(raw.scalars["order"])
            except ValueError:
                raise InputError("order must be an integer", raw.lines["order"]) from None
            if doc.order < 0:
                raise InputError("order must be nonnegative", raw.lines["order"])
        if "params" in raw.scalars:
            doc.params = _names(raw.scalars["params"])
        doc.laurent = raw.scalars.get("laurent")
        doc.family = raw.scalars.get("family", default_family if mode == "family" else None)
        for key in raw.scalars:
            if key not in KNOWN_KEYS:
                doc.extra[key] = raw.scalars[key]
        for key in raw.blocks:
            if key not in KNOWN_KEYS:
                doc.extra[key] = list(raw.blocks[key])
        doc.validate()
        return doc

    def validate(self) -> None:
        """Shape checks that do not need any fan computation."""
        if self.mode == "fan":
            if not self.rays or not self.cones:
                raise InputError("fan mode needs rays and cones")
            dim = len(self.rays[0])
            for r in self.rays:
                if len(r) != dim:
                    raise InputError("rays of mixed dimension", self.line_of.get("rays"))
            for c in self.cones:
                if any(i < 0 or i >= len(self.rays) for i in c):
                    raise InputError(f"cone {[i + 1 for i in c]} refers to a missing ray", self.line_of.get("cones"))
        if self.mode == "git":
            if not self.weights:
                raise InputError("git mode needs weights")
            n = len(self.weights[0])
            if any(len(r) != n for r in self.weights):
                raise InputError("weight rows of unequal length", self.line_of.get("weights"))
        if self.mode == "laurent" and not self.laurent:
            raise InputError("laurent mode needs a laurent polynomial")
        if self.mode == "family" and not self.family:
            raise InputError("family mode needs a family name")
        if self.extend and self.extend_rows:
            raise InputError("give either extend or extend_rows, not both", self.line_of.get("extend_rows"))
        if self.lift and len(self.lift) != len(self.bundles):
            raise InputError(
                f"{len(self.lift)} lifting rows for {len(self.bundles)} bundles", self.line_of.get("lift")
            )

    # Rendering --------------------------------------------------------------

    def render(self) -> str:
        """Canonical text; ``parse(render())`` reproduces the document."""
        out = [f"mode: {self.mode}"]

        def block(key, rows):
            if rows:
                out.append(f"{key}:")
                out.extend("  " + " ".join(str(x) for x in row) for row in rows)

        block("rays", self.rays)
        block("cones", [[i + 1 for i in c] for c in self.cones])
        block("weights", self.weights)
        if self.stability is not None:
            out.append("stability: " + " ".join(str(x) for x in self.stability))
        block("extend", self.extend)
        block("extend_rows", self.extend_rows)
        block("bundles", self.bundles)
        block("lift", self.lift)
        if self.antiK is not None:
            out.append("antiK: " + " ".join(str(x) for x in self.antiK))
        if self.order is not None:
            out.append(f"order: {self.order}")
        if self.params is not None:
            out.append("params: " + " ".join(self.params))
        if self.laurent is not None:
            out.append(f"laurent: {self.laurent}")
        if self.family is not None:
            out.append(f"family: {self.family}")
        for key, value in self.extra.items():
            if isinstance(value, list):
                out.append(f"{key}:")
                out.extend("  " + v for v in value)
            else:
                out.append(f"{key}: {value}")
        return "\n".join(out) + "\n"

    def canonical(self) -> "InputDocument":
        """The document with line numbers dropped, for equality tests."""
        return InputDocument.parse(self.render(), allow_extra=True)

    def __eq__(self, other) -> bool:
        if not isinstance(other, InputDocument):
            return NotImplemented
        return self.render() == other.render()

    # Building ---------------------------------------------------------------

    def build_fan(self) -> StackyFan:
        """The stacky fan of a fan- or git-mode document."""
        if self.mode == "fan":
            return StackyFan(self.rays, self.cones, weights=self.weights or None)
        if self.mode == "git":
            return StackyFan.from_git(self.weights, self.stability)
        raise InputError(f"mode {self.mode} has no fan")

    def build_extended(self, fan: StackyFan | None = None) -> ExtendedStackyFan:
        fan = fan or self.build_fan()
        if self.extend_rows:
            return ExtendedStackyFan.from_rows(fan, self.extend_rows)
        return extend(fan, self.extend)

    def build_twist(self, ext: ExtendedStackyFan) -> TwistSpec | None:
        """Liftings ``(E_j | lift_j)``; lifting parts default to zero."""
        if not self.bundles:
            return None
        rows = []
        for j, E in enumerate(self.bundles):
            if len(E) != ext.r:
                raise InputError(
                    f"bundle {j + 1} has {len(E)} entries, the Picard rank is {ext.r}",
                    self.line_of.get("bundles"),
                )
            lift = self.lift[j] if self.lift else [0] * ext.m
            if len(lift) != ext.m:
                raise InputError(
                    f"lifting {j + 1} has {len(lift)} entries for {ext.m} extension vectors",
                    self.line_of.get("lift"),
                )
            rows.append(list(E) + list(lift))
        return TwistSpec.of(rows)

    def anticanonical_x(self, ext: ExtendedStackyFan) -> list[Fraction]:
        """``-K_Y - sum E_j`` in the weight basis."""
        antik = [Fraction(x) for x in ext.base.anticanonical]
        for E in self.bundles:
            antik = [a - b for a, b in zip(antik, E)]
        return antik

    def check_antiK(self, ext: ExtendedStackyFan) -> None:
        if self.antiK is None:
            return
        got = self.anticanonical_x(ext)
        if list(self.antiK) != got:
            raise InputError(
                f"antiK {' '.join(map(str, self.antiK))} disagrees with the computed "
                f"{' '.join(map(str, got))}",
                self.line_of.get("antiK"),
            )


def series_block(lines: Iterable[str]) -> list[str]:
    """Lines of an ``expected`` block, unchanged."""
    return [l for l in lines if l.strip()]
