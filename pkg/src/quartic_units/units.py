"""Units of K_s: the quadratic fundamental unit, the regulator of the subgroup
generated by the roots, index bounds, the Kummer relation and class-number
bounds."""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction

import mpmath

from .arith import GaussElem, QuadElem, to_mpf, tolerance
from .family import FamilyParams, FieldInvariants, galois_matrix
from .pell import pell_solution
from .roots import RootQuadruple, orbit_order

__all__ = [
    "EXCLUDED_INDICES",
    "BoundError",
    "EpsilonCheck",
    "IndexAnalysis",
    "KummerReport",
    "UnitReport",
    "ClassLowerBound",
    "ClassRatioBound",
    "fundamental_unit_quad",
    "check_epsilon_from_roots",
    "regulator_subgroup",
    "regulator_upper_bound",
    "rvsd_lower_bound",
    "index_analysis",
    "sums_of_two_squares",
    "kummer_target",
    "kummer_check",
    "class_number_lower_bound",
    "class_ratio_upper_bound",
    "unit_report",
    "first_member_beyond",
]

# 3, 6, 7 are not norms from Z[i]; 2, 4, 8 are ruled out because -epsilon
# is not epsilon times a square of a unit of the quadratic subfield.
EXCLUDED_INDICES = frozenset({2, 3, 4, 6, 7, 8})


class BoundError(ValueError):
    """The requested bound is vacuous or undefined for this input."""


def fundamental_unit_quad(s: int) -> QuadElem:
    """epsilon = s^2 + 1 + |s| sqrt(s^2 + 2), a unit of norm +1."""
    if s == 0:
        raise ValueError("s must be nonzero")
    eps = QuadElem(s * s + 1, abs(s), s * s + 2)
    if eps.norm() != 1:
        raise ArithmeticError("epsilon does not have norm 1")
    return eps


@dataclass(frozen=True)
class EpsilonCheck:
    residual: mpmath.mpf
    in_range: bool


def check_epsilon_from_roots(rq: RootQuadruple, eps: QuadElem) -> EpsilonCheck:
    """Relative gap between -r1*r3 and epsilon; also 1 < -r1*r3 < epsilon^2."""
    with mpmath.workprec(rq.precision + 32):
        e = eps.to_mpf(rq.precision + 32)
        prod = -rq.r1 * rq.r3
        return EpsilonCheck(abs(prod - e) / e, bool(1 < prod < e * e))


def _logs(rq: RootQuadruple):
    return [mpmath.log(abs(r)) for r in rq.roots]


def regulator_subgroup(rq: RootQuadruple, eps: QuadElem) -> tuple[mpmath.mpf, mpmath.mpf]:
    """(determinant form, closed form) of the regulator of <-1, r1, r2, r3, r4>."""
    with mpmath.workprec(rq.precision + 32):
        l1, l2, l3, l4 = _logs(rq)
        det = abs(mpmath.det(mpmath.matrix([[l1, l2, l3], [l2, l3, l4], [l3, l4, l1]])))
        closed = (
            ((l1 - l3) ** 2 + (l2 - l4) ** 2)
            / 4
            * 2
            * mpmath.log(eps.to_mpf(rq.precision + 32))
        )
    return det, closed


def regulator_upper_bound(s: int, prec: int = 256) -> tuple[mpmath.mpf, bool]:
    """(1/2)(log^2(9 s^4) + log^2 4), and whether it is below 9 log^2 |s|."""
    if abs(s) < 3:
        raise ValueError("need |s| >= 3")
    with mpmath.workprec(prec):
        bound = (mpmath.log(9 * mpmath.mpf(s) ** 4) ** 2 + mpmath.log(4) ** 2) / 2
        return bound, bool(bound < 9 * mpmath.log(abs(s)) ** 2)


def rvsd_lower_bound(inv: FieldInvariants, prec: int = 256) -> mpmath.mpf:
    """(1/4) log^2(D_K / (16 d_k^2)), a lower bound for R_K / log(epsilon)."""
    ratio = Fraction(inv.D_K, 16 * inv.d_k**2)
    if ratio < 1:
        raise BoundError(f"D_K / (16 d_k^2) = {ratio} < 1: bound is vacuous")
    with mpmath.workprec(prec):
        return mpmath.log(to_mpf(ratio)) ** 2 / 4


def sums_of_two_squares(limit: int) -> list[int]:
    """Positive m <= limit that are norms a^2 + b^2 from Z[i]."""
    out = set()
    a = 0
    while a * a <= limit:
        b = a
        while a * a + b * b <= limit:
            if a * a + b * b:
                out.add(a * a + b * b)
            b += 1
        a += 1
    return sorted(out)


@dataclass(frozen=True)
class IndexAnalysis:
    quotient: mpmath.mpf
    index_bound: int
    possible_indices: tuple[int, ...]


def index_analysis(rprime, log_eps, rvsd_lower) -> IndexAnalysis:
    """Bound [E:U] by (R'/log eps) / rvsd_lower and drop impossible indices."""
    if rvsd_lower <= 0:
        raise BoundError("lower bound must be positive")
    q = rprime / log_eps / rvsd_lower
    # one unit in the last place of slack so rounding never drops a true index
    bound = int(mpmath.floor(q + mpmath.ldexp(abs(q), 1 - mpmath.mp.prec)))
    possible = tuple(m for m in sums_of_two_squares(bound) if m not in EXCLUDED_INDICES)
    return IndexAnalysis(q, bound, possible)


def kummer_target(params: FamilyParams) -> GaussElem:
    """-2^6 i (f + g i)^8 pi^3 conj(pi) with pi = (f+1)/2 - i(g+1)/2."""
    f, g = params.f, params.g
    pi = GaussElem(Fraction(f + 1, 2), -Fraction(g + 1, 2))
    return GaussElem(0, -64) * GaussElem(f, g) ** 8 * pi**3 * pi.conj()


@dataclass(frozen=True)
class KummerReport:
    rho4: mpmath.mpc
    target: GaussElem
    rel_residual: mpmath.mpf
    orbit_order: tuple[int, ...]
    rotation_residuals: tuple
    passing_rotations: tuple[int, ...]
    negated_residual: mpmath.mpf
    tolerance: mpmath.mpf

    @property
    def holds(self) -> bool:
        return bool(self.passing_rotations)

    @property
    def negated_holds(self) -> bool:
        return self.negated_residual < self.tolerance


def kummer_check(
    rq: RootQuadruple, params: FamilyParams, precision: int | None = None, tol=None
) -> KummerReport:
    """Compare rho^4 with the conjectured Gaussian integer, rho = r1 + r2 i - r3 - r4 i.

    Roots are put in M-orbit order (M r_j = r_{j+1} with M from the params),
    then each cyclic relabelling is tried. The residual of the sign-flipped
    relation rho^4 = +2^6 i (f+gi)^8 pi^3 conj(pi) is reported alongside.
    """
    prec = precision or rq.precision
    tol = tolerance(prec) if tol is None else tol
    order = orbit_order(rq, galois_matrix(params))
    target = kummer_target(params)
    with mpmath.workprec(prec + 32):
        roots = [rq.roots[i] for i in order]
        t = target.to_mpc(prec + 32)
        res = []
        for k in range(4):
            a, b, c, d = roots[k:] + roots[:k]
            rho = mpmath.mpc(a - c, b - d)
            res.append(abs(rho**4 - t) / abs(t))
        a, b, c, d = roots
        rho4 = mpmath.mpc(a - c, b - d) ** 4
        negated = abs(rho4 + t) / abs(t)
    return KummerReport(
        rho4=rho4,
        target=target,
        rel_residual=min(res),
        orbit_order=order,
        rotation_residuals=tuple(res),
        passing_rotations=tuple(k for k, r in enumerate(res) if r < tol),
        negated_residual=negated,
        tolerance=tol,
    )


@dataclass(frozen=True)
class ClassLowerBound:
    value: mpmath.mpf
    louboutin: mpmath.mpf
    valid: bool


def class_number_lower_bound(s: int, prec: int = 256) -> ClassLowerBound:
    """Lower bound for h/h_2; only proven for |s| >= 10^5 (``valid``)."""
    if abs(s) < 2:
        raise ValueError("need |s| >= 2 so that log|s| > 0")
    m = s * s + 2
    with mpmath.workprec(prec):
        c = 8 * mpmath.mpf(m)
        value = mpmath.mpf(m) / (450 * mpmath.log(abs(s)) ** 2 * mpmath.log(c / mpmath.pi) ** 2)
        lou = 1 / (10 * mpmath.log(c / mpmath.pi))
    return ClassLowerBound(value, lou, abs(s) >= 10**5)


@dataclass(frozen=True)
class ClassRatioBound:
    value: mpmath.mpf
    below_conductor: bool
    threshold: mpmath.mpf


def class_ratio_upper_bound(f_K: int, prec: int = 256) -> ClassRatioBound:
    """((c + log f_K) / (2 log(f_K/16)))^2 f_K with c = 2 + gamma - log(4 pi)."""
    if f_K <= 16:
        raise BoundError("need f_K > 16")
    with mpmath.workprec(prec):
        c = 2 + mpmath.euler - mpmath.log(4 * mpmath.pi)
        fk = mpmath.mpf(f_K)
        value = ((c + mpmath.log(fk)) / (2 * mpmath.log(fk / 16))) ** 2 * fk
        return ClassRatioBound(value, bool(value < fk), 256 * mpmath.exp(c))


@dataclass(frozen=True)
class UnitReport:
    epsilon: QuadElem
    log_eps: mpmath.mpf
    epsilon_check: EpsilonCheck
    rprime: mpmath.mpf
    rprime_closed: mpmath.mpf
    upper_bound: mpmath.mpf
    rvsd_lower: mpmath.mpf
    index: IndexAnalysis
    precision: int = field(default=0)

    @property
    def regulator_agreement(self) -> mpmath.mpf:
        return abs(self.rprime - self.rprime_closed) / self.rprime


def unit_report(rq: RootQuadruple, inv: FieldInvariants) -> UnitReport:
    s = rq.s
    eps = fundamental_unit_quad(s)
    prec = rq.precision
    with mpmath.workprec(prec + 32):
        log_eps = mpmath.log(eps.to_mpf(prec + 32))
        rp, rc = regulator_subgroup(rq, eps)
        lower = rvsd_lower_bound(inv, prec + 32)
        idx = index_analysis(rp, log_eps, lower)
    return UnitReport(
        epsilon=eps,
        log_eps=log_eps,
        epsilon_check=check_epsilon_from_roots(rq, eps),
        rprime=rp,
        rprime_closed=rc,
        upper_bound=regulator_upper_bound(s, prec)[0],
        rvsd_lower=lower,
        index=idx,
        precision=prec,
    )


def first_member_beyond(bound: int) -> int:
    """Smallest-index family s with |s| >= bound."""
    n = 1
    while abs(pell_solution(n).s) < bound:
        n += 1
    return pell_solution(n).s

