"""Command-line driver: ``qperiod fan|period|match|table``.

Exit codes: 0 pass, 1 mismatch, 2 input error, 3 engine or shape error.
The environment variable ``QP_ORDER_CAP`` bounds ``--order`` (default 12).
"""

from __future__ import annotations

import argparse
import json
import os
import sys
from fractions import Fraction
from pathlib import Path
from typing import Sequence

from . import catalog
from .exactalg import ExactAlgebraError
from .giventaleng import EngineError, TwistSpec, quantum_period, regularize
from .inputdoc import InputDocument, InputError
from .lperiod import LaurentPoly, classical_period, newton_polygon_checks
from .series import Series
from .stackyfan import FanError, extend

EXIT_PASS, EXIT_MISMATCH, EXIT_INPUT, EXIT_ENGINE = 0, 1, 2, 3
DEFAULT_ORDER_CAP = 12


def order_cap() -> int:
    """The largest accepted ``--order``, from ``QP_ORDER_CAP``."""
    text = os.environ.get("QP_ORDER_CAP", str(DEFAULT_ORDER_CAP))
    try:
        return int(text)
    except ValueError:
        raise InputError(f"QP_ORDER_CAP must be an integer, got {text!r}") from None


def _check_order(order: int) -> int:
    if order < 0:
        raise InputError("order must be nonnegative")
    cap = order_cap()
    if order > cap:
        raise InputError(f"order {order} exceeds QP_ORDER_CAP={cap}")
    return order


def parse_rows(text: str) -> list[list[int]]:
    """``"1 0; 0 1"`` (or commas inside rows) to integer rows."""
    rows = []
    for chunk in text.split(";"):
        chunk = chunk.replace(",", " ").strip()
        if not chunk:
            continue
        try:
            rows.append([int(x) for x in chunk.split()])
        except ValueError:
            raise InputError(f"expected integer rows, got {text!r}") from None
    return rows


def _fmt(x) -> str:
    return str(Fraction(x))


def _vec(v) -> str:
    return "(" + ", ".join(_fmt(x) for x in v) + ")"


def _read_source(source: str) -> tuple[InputDocument, catalog.FamilyRecord | None]:
    """A document from a file, or the document of a catalog family."""
    path = Path(source)
    if path.is_file():
        doc = InputDocument.parse(path.read_text(), allow_extra=True)
        if doc.mode == "family":
            rec = catalog.load(doc.family)
            return rec.document, rec
        return doc, None
    try:
        rec = catalog.load(source)
    except catalog.UnknownFamilyError:
        raise InputError(f"{source}: no such file or catalog family") from None
    if not rec.executable:
        return None, rec
    return rec.document, rec


# Commands ---------------------------------------------------------------


def cmd_fan(args) -> int:
    """Prints Box with ages, nef and Mori generators, ``-K`` and the Fano flag."""
    doc, rec = _read_source(args.source)
    if doc is None:
        print(f"{rec.name}: skipped: missing good model")
        return EXIT_PASS
    if doc.mode not in ("fan", "git"):
        raise InputError(f"mode {doc.mode} has no fan")
    fan = doc.build_fan()
    everything = not (args.box or args.nef or args.mori or args.fano)
    out = []
    if args.box or everything:
        ages = sorted({b.age for b in fan.box})
        out.append("ages: " + ", ".join(_fmt(a) for a in ages))
        for b in fan.box:
            out.append(f"  box {_vec(b.vector)} age {_fmt(b.age)}")
    if args.nef or everything:
        out.append("nef:")
        out.extend("  " + _vec(g) for g in fan.nef.generators)
    if args.mori or everything:
        out.append("mori:")
        out.extend("  " + _vec(g) for g in fan.mori.generators)
    if args.fano or everything:
        out.append("antiK: " + " ".join(_fmt(x) for x in fan.anticanonical))
        out.append(f"fano: {'yes' if fan.is_fano else 'no'}")
    print("\n".join(out))
    return EXIT_PASS


def _document_period(doc: InputDocument, rec, args, order: int) -> Series:
    if doc.mode == "laurent":
        f = LaurentPoly.parse(doc.laurent, doc.params or ())
        return classical_period(f, order)
    fan = doc.build_fan()
    if args.extend is not None:
        ext = extend(fan, parse_rows(args.extend))
    else:
        ext = doc.build_extended(fan)
    bundles = parse_rows(args.twist) if args.twist is not None else doc.bundles
    twist = None
    if bundles:
        if args.lift is not None:
            lifts = parse_rows(args.lift)
        elif doc.lift and args.extend is None:
            lifts = doc.lift
        else:
            lifts = [[0] * ext.m for _ in bundles]
        if len(lifts) != len(bundles):
            raise InputError(f"{len(lifts)} lifting rows for {len(bundles)} bundles")
        for E, a in zip(bundles, lifts):
            if len(E) != ext.r or len(a) != ext.m:
                raise InputError(f"bundle {E} with lifting {a} does not fit rank {ext.r} + {ext.m}")
        twist = TwistSpec.of([list(E) + list(a) for E, a in zip(bundles, lifts)])
    elif args.lift is not None:
        raise InputError("--lift needs bundles")
    params = doc.params
    if params is not None and len(params) != ext.m:
        params = None
    corrected = not args.raw and (rec is None or rec.convention == "corrected")
    G = quantum_period(ext, twist, order=order, invert_mirror_map=corrected, params=params)
    return regularize(G) if args.regularize else G


def cmd_period(args) -> int:
    """Prints a (regularised) quantum period, or the classical period of a Laurent polynomial."""
    doc, rec = _read_source(args.source)
    if doc is None:
        print(f"{rec.name}: skipped: missing good model")
        return EXIT_PASS
    order = args.order if args.order is not None else (doc.order if doc.order is not None else 6)
    order = _check_order(order)
    if rec is not None and rec.method == "abelian-nonabelian":
        if args.twist or args.lift or args.extend:
            raise InputError("an Abelian/non-Abelian family takes no --twist, --lift or --extend")
        from .abnab import assembled_period

        G = assembled_period(rec.abelianized(), order)
        series = regularize(G) if args.regularize else G
    else:
        series = _document_period(doc, rec, args, order)
    if args.json:
        print(json.dumps(series.to_json(), indent=2, sort_keys=True))
    else:
        print("\n".join(series.lines()) or "0")
    return EXIT_PASS


def cmd_match(args) -> int:
    """Runs one catalog family against its expected series and mirror."""
    rec = catalog.load(args.family)
    order = _check_order(args.order if args.order is not None else rec.expected_order or 4)
    v = catalog.run_family(rec, order, mirror=not args.no_mirror)
    if v.status == "skipped":
        print(f"{v.name}: skipped: missing good model")
        return EXIT_PASS
    print(f"{v.name}: {v.status} (series through t^{v.order}"
          + (f", mirror through t^{v.mirror_order}" if v.mirror_ok is not None else "") + ")")
    if v.detail:
        print(f"  {v.detail}")
    if args.show and v.series_ok is not None:
        print("\n".join(rec.quantum_period(v.order).lines()))
    if v.status == "error":
        return EXIT_ENGINE
    return EXIT_PASS if v.ok else EXIT_MISMATCH


def _table_line(cols: Sequence[str], widths: Sequence[int]) -> str:
    return "  ".join(c.ljust(w) for c, w in zip(cols, widths)).rstrip()


def cmd_table(args) -> int:
    """Reproduces the summary table with a pass/fail column."""
    order = _check_order(args.order)
    verdicts = catalog.run_all(order, jobs=args.jobs, mirror=not args.no_mirror)
    head = ["#", "name", "method", "mirror", "result", "status"]
    if args.timing:
        head.append("seconds")
    rows = []
    for rec, v in zip(catalog.records(), verdicts):
        status = "skipped: missing good model" if v.status == "skipped" else v.status
        if v.detail and v.status in ("fail", "error"):
            status += f" ({v.detail})"
        row = [str(rec.index), v.name, v.method, v.polygon or "-", v.result, status]
        if args.timing:
            row.append(f"{v.seconds:.2f}")
        rows.append(row)
    widths = [max(len(r[i]) for r in rows + [head]) for i in range(len(head) - 1)] + [0]
    print(_table_line(head, widths))
    for r in rows:
        print(_table_line(r, widths))
    counts = catalog.summary_counts(verdicts)
    print("summary: " + ", ".join(f"{k} {counts[k]}" for k in sorted(counts)))
    if any(v.status == "error" for v in verdicts):
        return EXIT_ENGINE
    return EXIT_PASS if all(v.ok for v in verdicts) else EXIT_MISMATCH


def cmd_newton(args) -> int:
    """Checks a Laurent polynomial's Newton polygon (Fano conditions)."""
    f = LaurentPoly.parse(args.polynomial, tuple(args.params.split()) if args.params else ())
    rep = newton_polygon_checks(f)
    print(rep)
    return EXIT_PASS if rep.fano else EXIT_MISMATCH


# Parser -----------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="qperiod", description="Quantum periods of toric orbifolds and their mirrors.")
    sub = p.add_subparsers(dest="command", required=True)

    f = sub.add_parser("fan", help="Box, nef and Mori cones, -K and the Fano flag")
    f.add_argument("source", help="input document or catalog family name")
    for flag in ("box", "nef", "mori", "fano"):
        f.add_argument(f"--{flag}", action="store_true")
    f.set_defaults(func=cmd_fan)

    q = sub.add_parser("period", help="quantum period of a model, or classical period of a Laurent polynomial")
    q.add_argument("source", help="input document or catalog family name")
    q.add_argument("--order", type=int)
    q.add_argument("--twist", metavar="ROWS", help="bundle classes, rows separated by ';'")
    q.add_argument("--lift", metavar="ROWS", help="liftings of the bundles, rows separated by ';'")
    q.add_argument("--extend", metavar="ROWS", help="extension vectors in N, rows separated by ';'")
    q.add_argument("--regularize", action="store_true", help="multiply the t^d coefficient by d!")
    q.add_argument("--raw", action="store_true", help="do not invert the mirror map")
    q.add_argument("--json", action="store_true", help="exact JSON output")
    q.set_defaults(func=cmd_period)

    m = sub.add_parser("match", help="run one catalog family")
    m.add_argument("family")
    m.add_argument("--order", type=int)
    m.add_argument("--no-mirror", action="store_true")
    m.add_argument("--show", action="store_true", help="print the computed series")
    m.set_defaults(func=cmd_match)

    t = sub.add_parser("table", help="run the whole catalog")
    t.add_argument("--order", type=int, default=4)
    t.add_argument("--jobs", type=int, default=1)
    t.add_argument("--no-mirror", action="store_true")
    t.add_argument("--timing", action="store_true", help="add a seconds column (not deterministic)")
    t.set_defaults(func=cmd_table)

    n = sub.add_parser("newton", help="Newton polygon checks for a Laurent polynomial")
    n.add_argument("polynomial")
    n.add_argument("--params", default="")
    n.set_defaults(func=cmd_newton)
    return p


def main(argv: Sequence[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except (InputError, catalog.UnknownFamilyError) as exc:
        print(f"input error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    except (EngineError, FanError, ExactAlgebraError) as exc:
        print(f"engine error: {exc}", file=sys.stderr)
        return EXIT_ENGINE


if __name__ == "__main__":
    sys.exit(main())
