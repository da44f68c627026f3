"""Acceptance suite: one test per criterion, each printing a single verdict line.

All comparisons are exact. Runtimes are measured with ``time.perf_counter``
around the computation under test and checked against the stated budget.
"""

import random
import time
from fractions import Fraction

import pytest
import sympy
from sympy.matrices.normalforms import smith_normal_form

from qperiod.abnab import AbelianizedModel, assembled_period, closed_form_period, weyl_orbit_sums
from qperiod.catalog import load, records, run_all, summary_counts, table_status_counts
from qperiod.exactalg import Cone, as_int_matrix, dual_cone, kernel_basis, rank
from qperiod.giventaleng import (
    AsymptoticShapeError,
    ISeriesTerm,
    LimitError,
    TwistSpec,
    _z_functional,
    pullback_limit_filter,
    quantum_period,
    regularize,
)
from qperiod.lperiod import LaurentPoly, classical_period, match
from qperiod.series import Series, format_poly
from qperiod.stackyfan import (
    ExtendedStackyFan,
    StackyFan,
    enumerate_classes,
    enumerate_classes_grid,
    extend,
)


@pytest.fixture
def verdict(capsys):
    """Prints one ``criterion N: PASS|FAIL`` line, then asserts."""

    def report(number, ok, seconds, limit, what, detail=""):
        fast = seconds < limit
        status = "PASS" if ok and fast else "FAIL"
        line = f"criterion {number}: {status} {what} [{seconds:.2f}s, budget {limit}s]"
        if detail:
            line += f" {detail}"
        with capsys.disabled():
            print("\n" + line)
        assert ok, detail or what
        assert fast, f"took {seconds:.2f}s, budget {limit}s"

    return report


def lines_series(lines, params, order):
    return Series.from_lines(lines, params, order)


def test_criterion_1_toric_pipeline(verdict):
    start = time.perf_counter()
    fan = StackyFan(
        [[1, -1], [0, 1], [-1, 2], [-2, 1]],
        [[0, 1], [1, 2], [2, 3], [3, 0]],
        weights=[[3, 0, 1, 1], [-1, 1, -1, 0]],
    )
    G = regularize(quantum_period(extend(fan, [[-1, 1]]), order=10))
    seconds = time.perf_counter() - start
    expected = lines_series(
        ["t^0: 1", "t^2: 2*x", "t^4: 12 + 6*x^2", "t^5: 20", "t^6: 120*x + 20*x^3"], ("x",), 6
    )
    ok = G.truncate(6) == expected
    verdict(1, ok, seconds, 1, "blow-up of P(1,1,3), S = {(-1,1)}, order 10")


def test_criterion_2_p113(verdict):
    start = time.perf_counter()
    rec = load("P(1,1,3)")
    G7 = rec.quantum_period(7)
    G20 = rec.quantum_period(20).specialize({"x": 0})
    seconds = time.perf_counter() - start
    expected = lines_series(
        ["t^0: 1", "t^2: 2*x", "t^4: 6*x^2", "t^5: 20", "t^6: 20*x^3", "t^7: 210*x"], ("x",), 7
    )
    powers = [e for e in G20.exponents()]
    ok = G7 == expected and all(e % 5 == 0 for e in powers) and powers == [0, 5, 10, 15, 20]
    verdict(2, ok, seconds, 1, "P(1,1,3) series and t^5k support of G(0;t) through t^20")


def test_criterion_3_no_t1_term(verdict):
    start = time.perf_counter()
    nonzero = []
    count = 0
    for rec in records():
        if not rec.executable:
            continue
        count += 1
        if rec.quantum_period(2).coefficient(1):
            nonzero.append(rec.name)
    seconds = time.perf_counter() - start
    verdict(3, not nonzero and count == 26, seconds, 5, f"t^1 coefficient is 0 for all {count} executable families",
            f"nonzero: {nonzero}" if nonzero else "")


def _x28_closed_form(order):
    x, t = sympy.symbols("x t")
    f = sympy.factorial
    total = 0
    for l1 in range(order + 1):
        for l2 in range((order - l1) // 2 + 1):
            for k in range(order - l1 - 2 * l2 + 1):
                c = f(3 * l1 + 3 * l2 + k) / (
                    f(l1) ** 2 * f(l2) * f(l1 + l2) * f(l1 + 3 * l2 + k) * f(k)
                )
                total += c * (x - 3) ** k * t ** (l1 + 2 * l2 + k)
    expo = sum((-(x + 3) * t) ** j / f(j) for j in range(order + 1))
    poly = sympy.Poly(sympy.expand(expo * total), t)
    lines = []
    for (e,), c in sorted(poly.terms()):
        if e <= order and c != 0:
            lines.append(f"t^{e}: {sympy.expand(c)}")
    return lines_series(lines, ("x",), order)


def test_criterion_4_quantum_lefschetz_with_mirror_map(verdict):
    rec = load("X_{2,8/3}")
    start = time.perf_counter()
    ext = rec.document.build_extended()
    G = quantum_period(ext, rec.document.build_twist(ext), order=5, params=("x",))
    seconds = time.perf_counter() - start
    closed = _x28_closed_form(5)
    worked = lines_series(
        [
            "t^0: 1",
            "t^2: 12*x + 20",
            "t^3: 6*x^2 + 108*x + 168",
            "t^4: 396*x^2 + 1800*x + 2220",
            "t^5: 360*x^3 + 7980*x^2 + 26640*x + 27600",
        ],
        ("x",),
        5,
    )
    G_hat = regularize(G)
    shifted = G_hat.substitute({"x": "x + 3"}, ("x",))
    checks = {
        "closed form": G == closed,
        "worked series": G_hat == worked,
        "results block after x -> x+3": shifted == rec.expected.truncate(5),
    }
    bad = [k for k, v in checks.items() if not v]
    verdict(4, not bad, seconds, 10, "X_{2,8/3} at order 5", f"failed: {bad}" if bad else "")


def test_criterion_5_pullback_then_limit(verdict):
    start = time.perf_counter()
    fan = StackyFan.from_git([[1, 1, 1, 3]])
    ext = ExtendedStackyFan.from_rows(fan, [[0, 0, 0, 1]])
    G = regularize(quantum_period(ext, TwistSpec.of([[4, 1]]), order=7, params=("x",)))
    printed = lines_series(
        [
            "t^0: 1",
            "t^2: 8",
            "t^3: 6*x",
            "t^4: 168",
            "t^5: 240*x",
            "t^6: 4440 + 90*x",
            "t^7: 9240*x",
        ],
        ("x",),
        7,
    )
    shape_error = False
    try:
        quantum_period(ext, TwistSpec.of([[4, 2]]), order=4)
    except AsymptoticShapeError:
        shape_error = True
    limit_error = False
    cls = ext.make_class([Fraction(0)], [0])
    try:
        pullback_limit_filter([ISeriesTerm(cls, Fraction(1), 0, 0, 1, cls.box)], 1)
    except LimitError:
        limit_error = True
    seconds = time.perf_counter() - start
    diff = G.first_difference(printed, 7)
    detail = ""
    if diff is not None:
        detail = (
            f"t^{diff}: computed {format_poly(G.coefficient(diff), ('x',))}, "
            f"stated {format_poly(printed.coefficient(diff), ('x',))}"
        )
    ok = diff is None and shape_error and limit_error
    verdict(5, ok, seconds, 5, "B_{1,16/3}: lift 1 series, lift 2 shape error, kappa-pole limit error", detail)


def test_criterion_6_abelian_nonabelian(verdict):
    start = time.perf_counter()
    model = AbelianizedModel.weighted_grassmannian_2_5()
    agree = assembled_period(model, 6) == closed_form_period(6)
    G = regularize(assembled_period(model, 4))
    seconds = time.perf_counter() - start
    expected = lines_series(["t^0: 1", "t^2: 112", "t^3: 1650", "t^4: 48048"], (), 4)
    verdict(6, agree and G == expected, seconds, 5, "X_{1,7/3} closed form = assembly through t^6, series 1+112t^2+1650t^3+48048t^4")


def test_criterion_7_classical_periods(verdict):
    with_mirror = [r for r in records() if r.mirror is not None]
    start = time.perf_counter()
    failures = []
    for rec in with_mirror:
        order = min(rec.expected_order, 7)
        v = match(rec.expected, rec.classical_period(order), rec.identification, order)
        if not v.ok:
            failures.append(f"{rec.name}: {v}")
    seconds = time.perf_counter() - start
    ok = not failures and len(with_mirror) == 25
    verdict(7, ok, seconds, 60, f"{len(with_mirror)} mirrors match their periods", "; ".join(failures))


def _random_cone(rng):
    dim = rng.randint(1, 4)
    gens = []
    for _ in range(rng.randint(1, 6)):
        gens.append([Fraction(rng.randint(-5, 5), rng.randint(1, 4)) for _ in range(dim)])
    return Cone(gens, dim)


def _random_full_rank(rng):
    while True:
        rows, cols = rng.randint(1, 4), rng.randint(1, 6)
        M = [[rng.randint(-7, 7) for _ in range(cols)] for _ in range(rows)]
        if rank(as_int_matrix(M)) == rows:
            return M


def test_criterion_8_oracle_suite(verdict):
    rng = random.Random(8)
    start = time.perf_counter()
    problems = []
    # pruned versus naive convolution, bound up to 6
    for _ in range(60):
        terms = {(rng.randint(-2, 2), rng.randint(-2, 2)): {(): Fraction(rng.choice([-2, -1, 1, 2, 3]))} for _ in range(rng.randint(1, 6))}
        f = LaurentPoly(terms)
        B = rng.randint(0, 6)
        if classical_period(f, B) != classical_period(f, B, prune=False):
            problems.append(f"pruning {terms}")
    # dual-cone involution
    for _ in range(200):
        C = _random_cone(rng)
        if not dual_cone(dual_cone(C)).same_set(C):
            problems.append(f"dual {C}")
    # kernel saturation via Smith form
    for _ in range(200):
        M = _random_full_rank(rng)
        K = kernel_basis(as_int_matrix(M))
        if K.shape[0] == 0:
            continue
        snf = smith_normal_form(sympy.Matrix(K.tolist()), domain=sympy.ZZ)
        if [abs(snf[i, i]) for i in range(K.shape[0])] != [1] * K.shape[0]:
            problems.append(f"kernel {M}")
    # enumeration against the grid scan
    for name in ("X_{1,22/3}", "X_{2,8/3}", "X_{1,19/3}"):
        doc = load(name).document
        ext = doc.build_extended()
        f = _z_functional(ext, doc.build_twist(ext))
        fast = [c.coords for c in enumerate_classes(ext, f, 4)]
        slow = [c.coords for c in enumerate_classes_grid(ext, f, 4)]
        if fast != slow:
            problems.append(f"enumeration {name}")
    # Weyl anti-invariance
    sums = weyl_orbit_sums(AbelianizedModel.weighted_grassmannian_2_5(), 6)
    if not sums or any(sums.values()):
        problems.append("weyl")
    seconds = time.perf_counter() - start
    verdict(8, not problems, seconds, 120, "pruning, 200 dual cones, 200 Smith checks, 3 enumerations, Weyl sums",
            "; ".join(problems[:3]))


def test_criterion_9_table(verdict):
    start = time.perf_counter()
    verdicts = run_all(4)
    seconds = time.perf_counter() - start
    counts = summary_counts(verdicts)
    table = table_status_counts()
    got = {"series": counts.get("pass", 0), "quantum-only": counts.get("quantum-only", 0), "skipped": counts.get("skipped", 0)}
    x41 = next(v for v in verdicts if v.name == "X_{4,1/3}")
    ok = got == table == {"series": 25, "quantum-only": 1, "skipped": 3} and x41.status == "quantum-only" and not counts.get("fail") and not counts.get("error")
    verdict(9, ok, seconds, 60, f"table at order 4: {got}")
