"""Command-line interface: ``quartic-units``.

Exit codes: 0 all checks pass, 1 verification failure, 2 usage or input
error, 3 oracle infrastructure error.
"""

from __future__ import annotations

import sys
from concurrent.futures import ProcessPoolExecutor
from functools import partial

import click
import mpmath

from .arith import DEFAULT_TRIAL_BOUND
from .cubic import (
    ReducibleCubicError,
    verify_companion_identity,
    verify_factorization_identity,
    verify_index_three,
)
from .family import NotInFamilyError, field_invariants, params_from_s, poly_from_fg, poly_from_s, poly_with_l
from .oracle import EXPECTED_CLASS_GROUPS, EXPECTED_INDEX, OracleError, query_oracle
from .pell import classify, pell_solution, s_sequence
from .report import CHECK_NAMES, canonical_json, to_jsonable, verify_member
from .roots import CertificationError, refine_roots
from .units import (
    BoundError,
    class_number_lower_bound,
    class_ratio_upper_bound,
    first_member_beyond,
    unit_report,
)

EXIT_OK, EXIT_FAIL, EXIT_USAGE, EXIT_ORACLE = 0, 1, 2, 3

FORMAT = click.option(
    "--format", "fmt", type=click.Choice(["tsv", "json"]), default="tsv", show_default=True
)
WORKERS = click.option("--workers", type=click.IntRange(min=1), default=1, show_default=True)
BITS = click.option("--bits", type=click.IntRange(min=64), default=None, help="Working precision; default depends on s.")
TRIAL = click.option(
    "--trial-bound",
    type=click.IntRange(min=2),
    default=DEFAULT_TRIAL_BOUND,
    show_default=True,
    help="Trial-division bound for squarefree tests.",
)


class InputError(click.ClickException):
    exit_code = EXIT_USAGE


def _emit(rows: list[dict], fmt: str, columns: list[str]) -> None:
    if fmt == "json":
        for row in rows:
            click.echo(canonical_json(row))
        return
    click.echo("\t".join(columns))
    for row in rows:
        cells = []
        for c in columns:
            v = to_jsonable(row[c])
            cells.append(",".join(v) if isinstance(v, list) else "" if v is None else str(v))
        click.echo("\t".join(cells))


def _resolve(n: int | None, s: int | None) -> tuple[int | None, int]:
    if (n is None) == (s is None):
        raise click.UsageError("give exactly one of --n, --s")
    if n is not None:
        if n < 1:
            raise click.BadParameter("must be >= 1", param_hint="--n")
        return n, pell_solution(n).s
    try:
        params_from_s(s)
    except NotInFamilyError as exc:
        raise InputError(str(exc)) from exc
    except ValueError as exc:
        raise InputError(str(exc)) from exc
    return _index_of(s), s


def _index_of(s: int) -> int | None:
    # |s_n| grows strictly, so stop once it passes |s|
    n = 1
    while True:
        t = pell_solution(n).s
        if t == s:
            return n
        if abs(t) > abs(s):
            return None
        n += 1


def _pool_map(fn, items, workers: int) -> list:
    if workers <= 1 or len(items) <= 1:
        return [fn(x) for x in items]
    with ProcessPoolExecutor(max_workers=min(workers, len(items))) as pool:
        return list(pool.map(fn, items))


@click.group()
def main() -> None:
    """Verify the cyclic quartic family F_s and its unit computations."""


# --------------------------------------------------------------------------
# family
# --------------------------------------------------------------------------


@main.group()
def family() -> None:
    """Enumerate family members and print their polynomials."""


@family.command("list")
@click.option("--count", type=int, default=8, show_default=True)
@TRIAL
@FORMAT
def family_list(count: int, trial_bound: int, fmt: str) -> None:
    """Pell-index n, parameter s and the squarefree status of s^2 + 2."""
    if count < 1:
        raise click.BadParameter("must be >= 1", param_hint="--count")
    rows = []
    for sol in s_sequence(count):
        c = classify(sol, trial_bound)
        rows.append(
            {
                "n": sol.n,
                "s": sol.s,
                "nine_divides": c.nine_divides,
                "tested": c.tested,
                "classification": str(c.status),
            }
        )
    _emit(rows, fmt, ["n", "s", "nine_divides", "tested", "classification"])


@family.command("poly")
@click.option("--n", type=int)
@click.option("--s", type=int)
@click.option(
    "--form",
    type=click.Choice(["s", "fg", "L"]),
    default="s",
    show_default=True,
    help="Which parametrisation to expand; all give the same polynomial.",
)
@FORMAT
def family_poly(n, s, form: str, fmt: str) -> None:
    """The defining quartic of a family member."""
    n, s = _resolve(n, s)
    p = params_from_s(s)
    poly = {
        "s": lambda: poly_from_s(s),
        "fg": lambda: poly_from_fg(p.f, p.g),
        "L": lambda: poly_with_l(s, p.p, p.L),
    }[form]()
    row = {
        "n": n,
        "s": s,
        "f": p.f,
        "g": p.g,
        "polynomial": poly.format("t"),
        "coefficients": list(poly.coeffs),
    }
    _emit([row], fmt, ["n", "s", "f", "g", "polynomial"])


# --------------------------------------------------------------------------
# verify
# --------------------------------------------------------------------------


def _verify_one(sel: tuple, bits, trial_bound, timings):
    n, s = sel
    return verify_member(s=s if n is None else None, n=n, precision=bits, trial_bound=trial_bound, timings=timings)


@main.command()
@click.option("--n", "ns", type=int, multiple=True, help="Pell index; repeatable.")
@click.option("--s", "ss", type=int, multiple=True, help="Family parameter; repeatable.")
@click.option("--count", type=int, default=None, help="Verify n = 1..count.")
@click.option(
    "--check",
    "only",
    type=click.Choice(CHECK_NAMES),
    multiple=True,
    help="Restrict reported and gating checks; repeatable.",
)
@click.option("--timings/--no-timings", default=False, help="Include wall-clock timings (not reproducible).")
@BITS
@WORKERS
@TRIAL
@FORMAT
def verify(ns, ss, count, only, timings, bits, workers, trial_bound, fmt) -> None:
    """Run the full verification pipeline on family members."""
    sels: list[tuple] = []
    if count is not None:
        if count < 1:
            raise click.BadParameter("must be >= 1", param_hint="--count")
        sels += [(n, None) for n in range(1, count + 1)]
    for n in ns:
        sels.append(_resolve(n, None))
    for s in ss:
        sels.append(_resolve(None, s))
    if not sels:
        raise click.UsageError("give --n, --s or --count")
    try:
        reports = _pool_map(
            partial(_verify_one, bits=bits, trial_bound=trial_bound, timings=timings), sels, workers
        )
    except CertificationError as exc:
        click.echo(f"error: {exc}", err=True)
        sys.exit(EXIT_FAIL)

    ok = True
    rows = []
    for rep in reports:
        checks = [c for c in rep.checks if not only or c.name in only]
        ok &= all(c.status != "fail" for c in checks if c.gating)
        if fmt == "json":
            d = rep.to_dict()
            if only:
                d["checks"] = {k: v for k, v in d["checks"].items() if k in only}
                d["passed"] = all(v["status"] != "fail" for v in d["checks"].values() if v["gating"])
            rows.append(d)
        else:
            for c in checks:
                rows.append(
                    {"n": rep.n, "s": rep.s, "check": c.name, "status": c.status, "gating": c.gating}
                )
    if fmt == "json":
        for d in rows:
            click.echo(canonical_json(d))
    else:
        _emit(rows, fmt, ["n", "s", "check", "status", "gating"])
    sys.exit(EXIT_OK if ok else EXIT_FAIL)


# --------------------------------------------------------------------------
# search
# --------------------------------------------------------------------------


@main.command()
@click.option("--bound", type=int, required=True, help="Scan max(|f|, |g|) <= bound.")
@WORKERS
@FORMAT
def search(bound: int, workers: int, fmt: str) -> None:
    """Integer points (f, g) whose quartic has integer coefficients."""
    from .family import search_integral_points

    if bound < 1:
        raise click.BadParameter("must be >= 1", param_hint="--bound")
    rows = [
        {"f": pt.f, "g": pt.g, "s": pt.s, "p": pt.p, "L": pt.L}
        for pt in search_integral_points(bound, workers)
    ]
    _emit(rows, fmt, ["f", "g", "s", "p", "L"])


# --------------------------------------------------------------------------
# bounds
# --------------------------------------------------------------------------


@main.group()
def bounds() -> None:
    """Regulator, index and class-number bounds."""


def _index_row(n: int, bits, trial_bound: int) -> dict:
    s = pell_solution(n).s
    params = params_from_s(s)
    c = classify(s, trial_bound)
    inv = field_invariants(params, c.status if not c.nine_divides else None)
    rq = refine_roots(s, bits)
    ur = unit_report(rq, inv)
    return {
        "n": n,
        "s": s,
        "classification": str(c.status),
        "ratio": ur.rprime / ur.log_eps,
        "upper_bound": ur.upper_bound,
        "rvsd_lower": ur.rvsd_lower,
        "quotient": ur.index.quotient,
        "index_bound": ur.index.index_bound,
        "possible_indices": list(ur.index.possible_indices),
    }


@bounds.command("index")
@click.option("--count", type=int, default=12, show_default=True)
@BITS
@WORKERS
@TRIAL
@FORMAT
def bounds_index(count, bits, workers, trial_bound, fmt) -> None:
    """Index bound and surviving indices for n = 1..count."""
    if count < 1:
        raise click.BadParameter("must be >= 1", param_hint="--count")
    rows = _pool_map(
        partial(_index_row, bits=bits, trial_bound=trial_bound), list(range(1, count + 1)), workers
    )
    _emit(
        rows,
        fmt,
        ["n", "s", "classification", "ratio", "upper_bound", "rvsd_lower", "quotient", "index_bound", "possible_indices"],
    )


@bounds.command("class")
@click.option("--beyond", type=int, default=10**5, show_default=True, help="Use the first member with |s| >= this.")
@click.option("--f-k", "f_ks", type=int, multiple=True, help="Conductors for the ratio bound; repeatable.")
@FORMAT
def bounds_class(beyond: int, f_ks, fmt: str) -> None:
    """Class-number lower bound and the h_K/h_k upper bound."""
    s = first_member_beyond(beyond)
    lb = class_number_lower_bound(s)
    rows = [
        {
            "kind": "lower",
            "arg": s,
            "value": lb.value,
            "holds": lb.value > 1,
            "threshold": None,
        }
    ]
    for fk in f_ks or (8 * (s * s + 2),):
        try:
            rb = class_ratio_upper_bound(fk)
        except BoundError as exc:
            raise InputError(str(exc)) from exc
        rows.append(
            {"kind": "ratio", "arg": fk, "value": rb.value, "holds": rb.below_conductor, "threshold": rb.threshold}
        )
    _emit(rows, fmt, ["kind", "arg", "value", "holds", "threshold"])


# --------------------------------------------------------------------------
# cubic
# --------------------------------------------------------------------------


@main.group()
def cubic() -> None:
    """The cubic analogue G_f."""


@cubic.command("verify")
@click.option("--f", "fs", type=int, multiple=True, help="Values of f for the index-3 check; repeatable.")
@click.option("--identity-range", type=click.IntRange(min=0), default=200, show_default=True)
@click.option("--bits", type=click.IntRange(min=64), default=512, show_default=True)
@FORMAT
def cubic_verify(fs, identity_range: int, bits: int, fmt: str) -> None:
    """Both exact identities on [-R, R] and the regulator ratio for each f."""
    fs = fs or (0, 1, 2, 5, 10)
    bad = [
        f
        for f in range(-identity_range, identity_range + 1)
        if not (verify_factorization_identity(f) and verify_companion_identity(f))
    ]
    ok = not bad
    tol = mpmath.ldexp(1, -100)
    rows = []
    for f in fs:
        try:
            ratio = verify_index_three(f, bits)
        except ReducibleCubicError as exc:
            raise InputError(str(exc)) from exc
        good = abs(ratio - 3) < tol
        ok &= good
        rows.append({"f": f, "ratio": ratio, "status": "pass" if good else "fail"})
    click.echo(
        f"# identities on [{-identity_range}, {identity_range}]: "
        + ("pass" if not bad else f"fail at f = {bad[:10]}"),
        err=fmt == "json",
    )
    _emit(rows, fmt, ["f", "ratio", "status"])
    sys.exit(EXIT_OK if ok else EXIT_FAIL)


# --------------------------------------------------------------------------
# oracle
# --------------------------------------------------------------------------


@main.group()
def oracle() -> None:
    """Cross-check against an external computer-algebra process (QU_ORACLE_CMD)."""


@oracle.command("compare")
@click.option("--n", type=int)
@click.option("--s", type=int)
@click.option("--timeout", type=float, default=60.0, show_default=True)
@BITS
@FORMAT
def oracle_compare(n, s, timeout: float, bits, fmt: str) -> None:
    """Compare the oracle's class group and unit index with the expected values."""
    n, s = _resolve(n, s)
    try:
        res = query_oracle(poly_from_s(s), timeout=timeout)
    except OracleError as exc:
        click.echo(f"oracle error ({type(exc).__name__}): {exc}", err=True)
        sys.exit(EXIT_ORACLE)

    expected_cls = EXPECTED_CLASS_GROUPS.get(s)
    expected_idx = EXPECTED_INDEX.get(s)
    rq = refine_roots(s, bits)
    params = params_from_s(s)
    ur = unit_report(rq, field_invariants(params))
    cls_ok = None if expected_cls is None or res.class_group is None else res.class_group == expected_cls
    if res.unit_index is None:
        idx_ok = None
    elif expected_idx is not None:
        idx_ok = res.unit_index == expected_idx
    else:
        idx_ok = res.unit_index in ur.index.possible_indices
    row = {
        "n": n,
        "s": s,
        "class_group": list(res.class_group) if res.class_group is not None else None,
        "expected_class_group": list(expected_cls) if expected_cls is not None else None,
        "class_group_match": cls_ok,
        "unit_index": res.unit_index,
        "expected_index": expected_idx,
        "possible_indices": list(ur.index.possible_indices),
        "index_match": idx_ok,
        "regulator": res.regulator,
    }
    _emit(
        [row],
        fmt,
        ["n", "s", "class_group", "expected_class_group", "class_group_match", "unit_index", "expected_index", "index_match"],
    )
    sys.exit(EXIT_FAIL if False in (cls_ok, idx_ok) else EXIT_OK)


if __name__ == "__main__":
    main()
