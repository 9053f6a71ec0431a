"""Exit criteria, one test per criterion.

Each test records a PASS/FAIL line; the lines are printed together at the end
of the session (and when this file is run directly).
"""

import json
import math
import os
import time

import mpmath
import pytest
from click.testing import CliRunner

from quartic_units.arith import IntPoly, QuadElem, discriminant_quartic, resultant, tolerance
from quartic_units.cli import main
from quartic_units.cubic import verify_companion_identity, verify_factorization_identity, verify_index_three
from quartic_units.family import field_invariants, generator_matrix, params_from_s, poly_from_s
from quartic_units.pell import classify, s_sequence
from quartic_units.roots import refine_roots, verify_expansions, verify_galois_orbit
from quartic_units.units import (
    check_epsilon_from_roots,
    class_number_lower_bound,
    class_ratio_upper_bound,
    first_member_beyond,
    fundamental_unit_quad,
    kummer_check,
    regulator_subgroup,
    regulator_upper_bound,
    unit_report,
)

pytestmark = pytest.mark.acceptance

RESULTS: dict[str, str] = {}


def record(key: str, ok: bool, detail: str) -> None:
    RESULTS[key] = f"{key}: {'PASS' if ok else 'FAIL'} - {detail}"


@pytest.fixture(scope="module", autouse=True)
def summary(request):
    yield
    reporter = request.config.pluginmanager.getplugin("terminalreporter")
    lines = [RESULTS[k] for k in sorted(RESULTS)]
    if reporter is not None:
        reporter.write_sep("=", "acceptance criteria")
        for line in lines:
            reporter.write_line(line)
    else:
        print("\n".join(lines))


def cli(*args):
    return CliRunner().invoke(main, list(args))


def tsv(output):
    lines = [l for l in output.splitlines() if l and not l.startswith("#")]
    head = lines[0].split("\t")
    return [dict(zip(head, l.split("\t"))) for l in lines[1:]]


def members(count):
    return [sol.s for sol in s_sequence(count)]


def test_criterion_01_pell_list():
    t = time.perf_counter()
    r = cli("family", "list", "--count", "8")
    dt = time.perf_counter() - t
    got = [row["s"] for row in tsv(r.output)]
    expect = ["4", "-12", "48", "-176", "660", "-2460", "9184", "-34272"]
    ok = r.exit_code == 0 and got == expect and dt < 1
    record("C01", ok, f"family list --count 8 -> {','.join(got)} in {dt:.3f}s")
    assert ok


def test_criterion_02_surface_table():
    table = [
        ("1", "-5", "-4", "-5", "-2"),
        ("5", "-17", "-12", "-85", "2"),
        ("5", "-37", "-32", "-185", "-77/2"),
        ("17", "-65", "-48", "-1105", "-2"),
        ("65", "-241", "-176", "-15665", "2"),
    ]
    t = time.perf_counter()
    r = cli("search", "--bound", "250", "--workers", "1")
    dt = time.perf_counter() - t
    got = {(row["f"], row["g"], row["s"], row["p"], row["L"]) for row in tsv(r.output)}
    missing = [row for row in table if row not in got]
    ok = r.exit_code == 0 and not missing and dt < 10
    record("C02", ok, f"search --bound 250: {len(got)} points, missing={missing}, {dt:.2f}s")
    assert ok


def test_criterion_03_polynomial_string():
    text = poly_from_s(-12).format("t")
    ok = text == "t^4 - 7588t^3 - 870t^2 + 4t + 1"
    record("C03", ok, f"polyFromS(-12) = {text}")
    assert ok


def test_criterion_04_discriminant():
    t = time.perf_counter()
    bad = []
    for s in members(12):
        expect = 256 * (3 * s * s - 4 * s + 4) ** 3 * (s * s + 2) ** 3
        if discriminant_quartic(poly_from_s(s)) != expect:
            bad.append(s)
    res = resultant(IntPoly([-1, 0, 0, 0, 1]), IntPoly([4, -8, 12]))
    dt = time.perf_counter() - t
    ok = not bad and res == 24576 and dt < 30
    record("C04", ok, f"disc formula fails at {bad}; res(x^4-1, 12x^2-8x+4) = {res}; {dt:.2f}s")
    assert ok


def test_criterion_05_roots_and_orbit():
    worst = mpmath.mpf(0)
    bad = []
    for n, s in enumerate(members(10), 1):
        rq = refine_roots(s)
        thetas_ok = all(c.ok for c in verify_expansions(rq))
        res = verify_galois_orbit(rq, generator_matrix(params_from_s(s)))
        worst = max(worst, res / tolerance(rq.precision))
        if not thetas_ok or res >= tolerance(rq.precision):
            bad.append(n)
    ok = not bad
    record("C05", ok, f"theta ranges and orbit, n=1..10; failing n={bad}; max residual/tol={mpmath.nstr(worst, 3)}")
    assert ok


def test_criterion_06_units():
    bad = []
    for n, s in enumerate(members(10), 1):
        rq = refine_roots(s)
        chk = check_epsilon_from_roots(rq, fundamental_unit_quad(s))
        if not (chk.residual < tolerance(rq.precision)):
            bad.append(n)
    exact = QuadElem(17, 4, 18).with_radicand(2) == QuadElem(1, 1, 2) ** 4
    ok = not bad and exact
    record("C06", ok, f"epsilon = -r1 r3 fails at n={bad}; 17+4*sqrt(18) == (1+sqrt2)^4: {exact}")
    assert ok


def test_criterion_07_regulator():
    tol = mpmath.ldexp(1, -100)
    disagree, above = [], []
    for n, s in enumerate(members(10), 1):
        rq = refine_roots(s, 512)
        eps = fundamental_unit_quad(s)
        det, closed = regulator_subgroup(rq, eps)
        with mpmath.workprec(544):
            if abs(det - closed) / det >= tol:
                disagree.append(n)
            ratio = det / mpmath.log(eps.to_mpf(544))
            bound = regulator_upper_bound(s, 544)[0]
            if not ratio <= bound:
                above.append(f"n={n} (s={s}): {mpmath.nstr(ratio, 8)} > {mpmath.nstr(bound, 8)}")
    ok = not disagree and not above
    record("C07", ok, f"forms disagree at n={disagree}; R'/log eps above bound: {above or 'none'}")
    assert ok


def test_criterion_08_index():
    checked, bad = [], []
    for n, s in enumerate(members(12), 1):
        c = classify(s)
        if not c.status.is_squarefree:
            continue
        params = params_from_s(s)
        inv = field_invariants(params, c.status if not c.nine_divides else None)
        ia = unit_report(refine_roots(s), inv).index
        if ia.index_bound <= 8:
            checked.append(n)
            if not set(ia.possible_indices) <= {1, 5}:
                bad.append(n)
    ok = bool(checked) and not bad
    record("C08", ok, f"possibleIndices within {{1,5}} for n={checked}; violations={bad}")
    assert ok


@pytest.mark.skipif(not os.environ.get("QU_ORACLE_CMD"), reason="QU_ORACLE_CMD not set")
def test_criterion_08_oracle_index_40():
    r = cli("oracle", "compare", "--s", "4")
    row = tsv(r.output)[0] if r.exit_code in (0, 1) else {}
    ok = row.get("unit_index") == "40"
    record("C08-oracle", ok, f"oracle index at s=4: {row.get('unit_index')} (not part of the primary exit status)")
    assert ok


def test_criterion_09_kummer():
    tol = mpmath.ldexp(1, -100)
    bad, passing = [], {}
    for n, s in enumerate(members(10), 1):
        kr = kummer_check(refine_roots(s, 512), params_from_s(s), tol=tol)
        passing[n] = kr.passing_rotations
        if not kr.holds:
            bad.append((n, mpmath.nstr(kr.rel_residual, 3), mpmath.nstr(kr.negated_residual, 3)))
    ok = not bad
    detail = "passing rotations " + str(passing)
    if bad:
        detail = "no rotation passes for (n, residual, residual with opposite sign) " + str(bad)
    record("C09", ok, detail)
    assert ok


def test_criterion_10_cubic():
    t = time.perf_counter()
    ident = [f for f in range(-200, 201) if not (verify_factorization_identity(f) and verify_companion_identity(f))]
    tol = mpmath.ldexp(1, -100)
    ratios = {f: verify_index_three(f, 512) for f in (0, 1, 2, 5, 10)}
    off = [f for f, r in ratios.items() if not abs(r - 3) < tol]
    dt = time.perf_counter() - t
    ok = not ident and not off and dt < 30
    record("C10", ok, f"identities fail at {ident}; index-3 ratio off at f={off}; {dt:.2f}s")
    assert ok


def test_criterion_11_class_bounds():
    s = first_member_beyond(10**5)
    lb = class_number_lower_bound(s)
    samples = sorted({int(round(math.exp(math.log(270) + k * (math.log(10**6) - math.log(270)) / 299))) for k in range(300)})
    bad = [fk for fk in samples if not class_ratio_upper_bound(fk).below_conductor]
    ok = lb.value > 1 and not bad
    record(
        "C11",
        ok,
        f"h/h2 lower bound at s={s}: {mpmath.nstr(lb.value, 6)}; ratio bound >= f_K at {bad} of {len(samples)} samples in (269, 1e6]",
    )
    assert ok


def test_criterion_12_determinism():
    a = cli("verify", "--n", "5", "--workers", "1", "--format", "json")
    b = cli("verify", "--n", "5", "--workers", "8", "--format", "json")
    ok = a.exit_code == b.exit_code == 0 and a.output == b.output and json.loads(a.output)["s"] == "660"
    record("C12", ok, f"verify --n 5 JSON identical across workers: {a.output == b.output} ({len(a.output)} bytes)")
    assert ok


if __name__ == "__main__":
    raise SystemExit(pytest.main([__file__, "-q", "-p", "no:cacheprovider"]))
