"""Certified real roots of F_s and of small auxiliary polynomials.

Enclosures are produced numerically (bisection safeguarding Newton) and then
certified exactly: the mpf midpoint and radius are converted to rationals and
the polynomial's sign is evaluated exactly at both endpoints. Disjoint
sign-changing enclosures, as many as the degree, hold exactly one root each.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction

import mpmath

from .arith import IntPoly, Mobius2, QuadElem, RatPoly, mobius_apply, to_fraction, to_mpf, tolerance
from .family import poly_from_s

__all__ = [
    "CertificationError",
    "Bracket",
    "RootQuadruple",
    "ThetaCheck",
    "THETA_RANGES",
    "default_precision",
    "expansion_centers",
    "initial_brackets",
    "sturm_sequence",
    "isolate_real_roots",
    "refine_in_bracket",
    "real_roots",
    "refine_roots",
    "verify_expansions",
    "verify_galois_orbit",
    "orbit_residuals",
    "orbit_order",
]

GUARD_BITS = 16

# closed theta ranges for r1..r4; r3's expansion subtracts its theta term
THETA_RANGES = (
    (Fraction(1), Fraction(2)),
    (Fraction(-3, 2), Fraction(-1, 2)),
    (Fraction(0), Fraction(1)),
    (Fraction(-1, 2), Fraction(1, 2)),
)


class CertificationError(ArithmeticError):
    def __init__(self, message: str, achieved_radius=None) -> None:
        super().__init__(message)
        self.achieved_radius = achieved_radius


def default_precision(s: int) -> int:
    return max(256, 8 * math.ceil(math.log2(abs(s) + 2)))


def _sign(x) -> int:
    if isinstance(x, QuadElem):
        return x.sign()
    return (x > 0) - (x < 0)


# --------------------------------------------------------------------------
# Lemma brackets
# --------------------------------------------------------------------------


@dataclass(frozen=True)
class Bracket:
    lo: QuadElem
    hi: QuadElem

    def to_mpf(self, prec: int) -> tuple[mpmath.mpf, mpmath.mpf]:
        return self.lo.to_mpf(prec), self.hi.to_mpf(prec)


def _q3(a, b=0) -> QuadElem:
    return QuadElem(Fraction(a), Fraction(b), 3)


def expansion_centers(s: int) -> tuple[QuadElem, QuadElem, QuadElem, QuadElem]:
    """Truncated expansions of r1..r4 in powers of 1/s, exact in Q(sqrt3)."""
    S = Fraction(s)
    r1 = _q3(-4 * S**3 + 4 * S**2 - 8 * S + 4 - Fraction(3, 2) / S - Fraction(3, 2) / S**2)
    # 1/(3 sqrt3) = sqrt3 / 9
    r2 = _q3(Fraction(1, 2) / S + Fraction(1, 2) / S**2, Fraction(1, 2) / S + Fraction(1, 6) / S**2 - Fraction(1, 9) / S**3)
    r3 = _q3(Fraction(1, 2) / S + Fraction(1, 2) / S**2)
    r4 = _q3(Fraction(1, 2) / S + Fraction(1, 2) / S**2, -Fraction(1, 2) / S - Fraction(1, 6) / S**2 + Fraction(1, 9) / S**3)
    return r1, r2, r3, r4


def initial_brackets(s: int) -> list[Bracket]:
    """Intervals [c_i + a_i s^-4, c_i + b_i s^-4] around the expansion centres.

    The sign change of F_s across every bracket is checked exactly.
    """
    if abs(s) < 3:
        raise ValueError(f"lemma brackets need |s| >= 3, got s = {s}")
    F = poly_from_s(s)
    e = Fraction(1, s**4)
    out = []
    for i, (c, (a, b)) in enumerate(zip(expansion_centers(s), THETA_RANGES)):
        if i == 2:
            a, b = -b, -a
        lo, hi = c + a * e, c + b * e
        if _sign(F(lo)) * _sign(F(hi)) >= 0:
            raise CertificationError(f"no sign change of F_s on bracket r{i + 1} at s = {s}")
        out.append(Bracket(lo, hi))
    return out


# --------------------------------------------------------------------------
# Sturm isolation
# --------------------------------------------------------------------------


def _rem(a: RatPoly, b: RatPoly) -> RatPoly:
    r = list(a.coeffs)
    db, lb = b.degree, b.leading
    while len(r) - 1 >= db and any(r):
        k = len(r) - 1 - db
        q = r[-1] / lb
        for i, c in enumerate(b.coeffs):
            r[i + k] -= q * c
        r.pop()
        while r and r[-1] == 0:
            r.pop()
    return RatPoly(r)


def sturm_sequence(poly: IntPoly | RatPoly) -> list[RatPoly]:
    p0 = RatPoly(poly.coeffs)
    seq = [p0, p0.derivative()]
    while not seq[-1].is_zero and seq[-1].degree > 0:
        seq.append(-_rem(seq[-2], seq[-1]))
    return [q for q in seq if not q.is_zero]


def _variations(seq: list[RatPoly], x: Fraction) -> int:
    signs = [v for v in (_sign(q(x)) for q in seq) if v]
    return sum(1 for u, w in zip(signs, signs[1:]) if u != w)


def isolate_real_roots(poly: IntPoly | RatPoly) -> list[tuple[Fraction, Fraction]]:
    """Disjoint rational intervals, ascending, each holding one simple real root."""
    seq = sturm_sequence(poly)
    lead = Fraction(poly.leading)
    bound = 1 + max(abs(Fraction(c) / lead) for c in poly.coeffs[:-1])
    todo = [(-bound, bound)]
    out = []
    while todo:
        lo, hi = todo.pop()
        n = _variations(seq, lo) - _variations(seq, hi)
        if n == 0:
            continue
        if n == 1:
            out.append((lo, hi))
            continue
        mid = (lo + hi) / 2
        k = 3
        while poly(mid) == 0:
            mid = lo + (hi - lo) * Fraction(k, 2 * k + 1)
            k += 1
        todo += [(lo, mid), (mid, hi)]
    return sorted(out)


# --------------------------------------------------------------------------
# Refinement
# --------------------------------------------------------------------------


def _working_bits(poly: IntPoly, prec: int) -> int:
    return prec + 64 + max(abs(c).bit_length() for c in poly.coeffs)


def refine_in_bracket(poly: IntPoly, lo, hi, prec: int, guard: int = GUARD_BITS):
    """Refine the unique root of ``poly`` in [lo, hi] and certify an enclosure.

    Returns ``(mid, radius)`` as mpf values; the exact signs of ``poly`` at
    mid - radius and mid + radius differ. The radius is 2^(guard - prec)
    relative to max(1, |mid|), widened by doubling only if certification
    needs it.
    """
    wp = _working_bits(poly, prec)
    dpoly = poly.derivative()
    with mpmath.workprec(wp):
        a, b = to_mpf(lo), to_mpf(hi)
        fa, fb = poly(a), poly(b)
        if fa * fb > 0:
            raise CertificationError(f"no sign change on [{a}, {b}]")
        sa = _sign(fa)
        x = (a + b) / 2
        stop = mpmath.ldexp(1, -(wp - 8))
        for _ in range(4 * wp + 200):
            fx = poly(x)
            if fx == 0:
                break
            if _sign(fx) == sa:
                a = x
            else:
                b = x
            d = dpoly(x)
            nxt = x - fx / d if d != 0 else None
            if nxt is None or not (a < nxt < b):
                nxt = (a + b) / 2
            step = abs(nxt - x)
            x = nxt
            if step <= stop * max(1, abs(x)) or b - a <= stop * max(1, abs(x)):
                break
        radius = mpmath.ldexp(max(mpmath.mpf(1), abs(x)), guard - prec)
        xq = to_fraction(x)
        for _ in range(64):
            rq = to_fraction(radius)
            if _sign(poly(xq - rq)) * _sign(poly(xq + rq)) < 0:
                return x, radius
            radius *= 2
    raise CertificationError(
        f"could not certify root near {mpmath.nstr(x, 20)} at {prec} bits", achieved_radius=radius
    )


def real_roots(poly: IntPoly, prec: int) -> list[tuple[mpmath.mpf, mpmath.mpf]]:
    """All real roots of a squarefree integer polynomial, ascending, with radii."""
    return [refine_in_bracket(poly, lo, hi, prec) for lo, hi in isolate_real_roots(poly)]


@dataclass(frozen=True)
class RootQuadruple:
    """Four certified roots of F_s.

    When ``ordered`` is true the labels follow the 1/s expansions (r1 the
    large root near -4s^3, r2 and r4 the (1 +- sqrt3)/(2s) branches, r3 near
    1/(2s)); otherwise roots are ascending. Midpoints carry a few dozen bits
    beyond ``precision``; ``radii`` are certified error bounds.
    """

    s: int
    precision: int
    roots: tuple
    radii: tuple
    ordered: bool = True

    @property
    def radius(self):
        return max(self.radii)

    @property
    def r1(self):
        return self.roots[0]

    @property
    def r2(self):
        return self.roots[1]

    @property
    def r3(self):
        return self.roots[2]

    @property
    def r4(self):
        return self.roots[3]

    def relabeled(self, order) -> RootQuadruple:
        return RootQuadruple(
            self.s,
            self.precision,
            tuple(self.roots[i] for i in order),
            tuple(self.radii[i] for i in order),
            self.ordered,
        )

    def enclosures(self) -> list[tuple[Fraction, Fraction]]:
        out = []
        for m, r in zip(self.roots, self.radii):
            mq, rq = to_fraction(m), to_fraction(r)
            out.append((mq - rq, mq + rq))
        return out


def _check_disjoint(encl: list[tuple[Fraction, Fraction]]) -> None:
    ivs = sorted(encl)
    for (_, hi), (lo, _) in zip(ivs, ivs[1:]):
        if hi >= lo:
            raise CertificationError("root enclosures overlap")


def refine_roots(s: int, precision: int | None = None) -> RootQuadruple:
    """Certified roots of F_s at ``precision`` bits (default per ``default_precision``)."""
    prec = precision or default_precision(s)
    F = poly_from_s(s)
    if abs(s) >= 3:
        wp = _working_bits(F, prec)
        pairs = [refine_in_bracket(F, *br.to_mpf(wp), prec) for br in initial_brackets(s)]
        ordered = True
    else:
        pairs = real_roots(F, prec)
        if len(pairs) != 4:
            raise CertificationError(f"F_s has {len(pairs)} real roots at s = {s}")
        ordered = False
    rq = RootQuadruple(s, prec, tuple(m for m, _ in pairs), tuple(r for _, r in pairs), ordered)
    _check_disjoint(rq.enclosures())
    return rq


# --------------------------------------------------------------------------
# Checks
# --------------------------------------------------------------------------


@dataclass(frozen=True)
class ThetaCheck:
    name: str
    value: mpmath.mpf
    lo: Fraction
    hi: Fraction

    @property
    def ok(self) -> bool:
        return self.lo <= to_fraction(self.value) <= self.hi


def verify_expansions(rq: RootQuadruple) -> list[ThetaCheck]:
    """Solve each expansion for its theta and compare with its closed range."""
    if not rq.ordered or abs(rq.s) < 3:
        raise ValueError("expansions apply to ordered roots with |s| >= 3")
    s = rq.s
    wp = rq.precision + 64
    out = []
    with mpmath.workprec(wp):
        s4 = mpmath.mpf(s) ** 4
        for i, (c, r, (lo, hi)) in enumerate(zip(expansion_centers(s), rq.roots, THETA_RANGES)):
            theta = (r - c.to_mpf(wp)) * s4
            if i == 2:
                theta = -theta
            out.append(ThetaCheck(f"theta{i + 1}", theta, lo, hi))
    return out


def orbit_residuals(rq: RootQuadruple, m: Mobius2) -> tuple[mpmath.mpf, mpmath.mpf]:
    """Max |M r_j - r_{j+1}| and max |M r_j - r_{j-1}| over j (indices mod 4)."""
    r = rq.roots
    with mpmath.workprec(rq.precision + 64):
        images = [mobius_apply(m, x) for x in r]
        fwd = max(abs(images[j] - r[(j + 1) % 4]) for j in range(4))
        bwd = max(abs(images[j] - r[(j - 1) % 4]) for j in range(4))
    return fwd, bwd


def verify_galois_orbit(rq: RootQuadruple, m: Mobius2):
    """Max over j of |M r_j - r_{j+1 mod 4}|."""
    return orbit_residuals(rq, m)[0]


def orbit_order(rq: RootQuadruple, m: Mobius2) -> tuple[int, int, int, int]:
    """Indices (0, j1, j2, j3) with r_{j(k+1)} = M r_{j(k)}, starting from the first root."""
    tol = tolerance(rq.precision)
    order = [0]
    with mpmath.workprec(rq.precision + 64):
        x = rq.roots[0]
        for _ in range(3):
            x = mobius_apply(m, x)
            j = min(range(4), key=lambda k: abs(rq.roots[k] - x))
            if abs(rq.roots[j] - x) > tol * max(1, abs(x)) or j in order:
                raise CertificationError("M does not permute the roots cyclically")
            order.append(j)
            x = rq.roots[j]
    return tuple(order)
