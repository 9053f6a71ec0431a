"""Family members: parameters, defining polynomials, Galois matrix, invariants,
and the integral-point search on the parameter surface."""

from __future__ import annotations

from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from fractions import Fraction

import mpmath

from .arith import (
    IntPoly,
    Mobius2,
    MobiusPoleError,
    RatPoly,
    SquarefreeStatus,
    discriminant_quartic,
    isqrt_exact,
    squarefree_status,
)

__all__ = [
    "NotInFamilyError",
    "FamilyParams",
    "SurfacePoint",
    "FieldInvariants",
    "params_from_s",
    "poly_from_s",
    "poly_from_fg",
    "poly_with_l",
    "compute_l",
    "galois_matrix",
    "generator_matrix",
    "irreducible_over_q",
    "field_invariants",
    "search_integral_points",
    "norm_relation_residual",
]


class NotInFamilyError(ValueError):
    """3s^2 - 4s + 4 is not a perfect square."""


@dataclass(frozen=True)
class FamilyParams:
    s: int
    v: int
    f: int
    g: int
    p: int
    L: Fraction

    def fglemma_holds(self) -> bool:
        s, f, g = self.s, self.f, self.g
        lhs = Fraction(s * s + 2, 2)
        rhs = Fraction(f + 1, 2) ** 2 + Fraction(g + 1, 2) ** 2
        return lhs == rhs and (f - g) ** 2 == 3 * s * s - 4 * s + 4

    def parity_holds(self) -> bool:
        return self.s % 2 == 0 and self.f % 2 == 1 and self.g % 2 == 1 and self.p % 2 == 1


@dataclass(frozen=True)
class SurfacePoint:
    f: int
    g: int

    @property
    def s(self) -> int:
        return self.f + self.g

    @property
    def p(self) -> int:
        return self.f * self.g

    @property
    def L(self) -> Fraction:
        return compute_l(self.f, self.g)

    def on_surface(self) -> bool:
        f, g, L = self.f, self.g, self.L
        return (f + g) ** 4 - 4 * f * f * g * g + 4 + 4 * L * f * g * (f + g) == 0


@dataclass(frozen=True)
class FieldInvariants:
    s: int
    disc_poly: int
    D_K: int
    d_k: int
    f_K: int
    index_sq: int
    disc_verified: bool
    conditional: bool


def compute_l(f: int, g: int) -> Fraction:
    s, p = f + g, f * g
    if p * s == 0:
        raise ValueError("need f*g*(f+g) != 0")
    return Fraction(-(s**4 - 4 * p * p + 4), 4 * s * p)


def params_from_s(s: int) -> FamilyParams:
    """Parameters of the member with parameter ``s``; f = (s + v)/2 with v >= 0."""
    if s == 0:
        raise ValueError("s = 0 is excluded from the family")
    disc = 3 * s * s - 4 * s + 4
    v = isqrt_exact(disc)
    if v is None:
        raise NotInFamilyError(f"3s^2 - 4s + 4 = {disc} is not a square (s = {s})")
    f, g = (s + v) // 2, (s - v) // 2
    p = s - (s * s + 2) // 2
    if f * g != p:
        raise ArithmeticError(f"fg != p at s = {s}")
    L = compute_l(f, g)
    if L != 2:
        raise ArithmeticError(f"L = {L} != 2 at s = {s}")
    return FamilyParams(s=s, v=v, f=f, g=g, p=p, L=L)


def poly_from_s(s: int) -> IntPoly:
    return IntPoly([1, 4, -6 * s * s - 6, 4 * s**3 - 4 * s * s + 8 * s - 4, 1])


def poly_with_l(s: int, p: int, L) -> RatPoly:
    L = Fraction(L)
    return RatPoly(
        [
            1,
            2 * L,
            -3 * s * s - 3 * L * s + 6 * p,
            2 * s**3 + L * s * s - 4 * p * s + 2 * L * p,
            1,
        ]
    )


def poly_from_fg(f: int, g: int) -> RatPoly:
    """Quartic satisfied by a norm-one theta whose conjugates are its images under M."""
    s, p = f + g, f * g
    if p * s == 0:
        raise ValueError("need f*g*(f+g) != 0")
    q = f * f + g * g
    return RatPoly(
        [
            1,
            -Fraction(s**4 - 4 * p * p + 4, 2 * p * s),
            Fraction(3 * (q * q + 4), 4 * p),
            -Fraction(q**3 + 4 * q + 16 * p, 4 * p * s),
            1,
        ]
    )


def galois_matrix(params: FamilyParams) -> Mobius2:
    f, g = params.f, params.g
    return Mobius2(f, -1, Fraction(f * f + g * g, 2), -g)


def generator_matrix(params: FamilyParams) -> Mobius2:
    """The matrix of ``galois_matrix`` with f and g chosen so it sends r_j to r_{j+1}.

    With f = (s + v)/2 that holds for s > 0; for s < 0 the same matrix is the
    inverse generator, and swapping f and g (projectively the inverse) fixes it.
    """
    if params.s > 0:
        return galois_matrix(params)
    f, g = params.g, params.f
    return Mobius2(f, -1, Fraction(f * f + g * g, 2), -g)


def irreducible_over_q(poly: IntPoly) -> bool:
    """Irreducibility of a monic integer quartic with constant term +-1.

    No rational root (only +-1 can occur) and no factorisation into two monic
    integer quadratics (t^2 + a t + b)(t^2 + c t + d) with b d = constant term.
    """
    if poly.degree != 4 or poly.leading != 1 or poly[0] not in (1, -1):
        raise ValueError("expected a monic quartic with constant term +-1")
    if poly(1) == 0 or poly(-1) == 0:
        return False
    c0, c1, c2, c3 = poly[0], poly[1], poly[2], poly[3]
    for b in (1, -1):
        d = c0 * b  # b*d = c0 since b = +-1
        if b != d:
            # a + c = c3 and a d + b c = c1
            num = c1 - b * c3
            den = d - b
            if num % den:
                continue
            a = num // den
            c = c3 - a
            if a * c + b + d == c2:
                return False
        else:
            if b * c3 != c1:
                continue
            disc = c3 * c3 - 4 * (c2 - 2 * b)
            if disc >= 0 and isqrt_exact(disc) is not None and (c3 + isqrt_exact(disc)) % 2 == 0:
                return False
    return True


def field_invariants(
    params: FamilyParams, sf_status: SquarefreeStatus | None = None
) -> FieldInvariants:
    """Discriminants and conductor of K_s; ``conditional`` when s^2 + 2 is not known squarefree."""
    s = params.s
    m = s * s + 2
    disc_poly = 256 * (3 * s * s - 4 * s + 4) ** 3 * m**3
    D_K = 2**8 * m**3
    if sf_status is None:
        sf_status = squarefree_status(m)
    return FieldInvariants(
        s=s,
        disc_poly=disc_poly,
        D_K=D_K,
        d_k=4 * m,
        f_K=8 * m,
        index_sq=disc_poly // D_K,
        disc_verified=discriminant_quartic(poly_from_s(s)) == disc_poly,
        conditional=not sf_status.is_squarefree,
    )


def _canonical(f: int, g: int) -> tuple[int, int]:
    # representative of {(f,g), (g,f), (-f,-g), (-g,-f)} with 0 < f and |f| <= |g|
    if abs(f) > abs(g):
        f, g = g, f
    if f < 0:
        f, g = -f, -g
    return f, g


def _scan_rows(bound: int, fs: list[int]) -> set[tuple[int, int]]:
    found = set()
    for f in fs:
        for g in range(-bound, bound + 1):
            s, p = f + g, f * g
            den = 4 * s * p
            if den == 0:
                continue
            num = -(s**4 - 4 * p * p + 4)
            if (2 * num) % den:
                continue
            if num % den and s % 2:
                continue
            found.add(_canonical(f, g))
    return found


def search_integral_points(f_bound: int, workers: int = 1) -> list[SurfacePoint]:
    """All (f, g) with max(|f|, |g|) <= f_bound whose quartic has integer coefficients.

    Points are reported once per symmetry class under (f,g) <-> (g,f) and
    (f,g) <-> (-f,-g), sorted by max(|f|, |g|) and then by (f, g).
    """
    if f_bound < 1:
        raise ValueError("f_bound must be >= 1")
    fs = list(range(-f_bound, f_bound + 1))
    if workers <= 1:
        found = _scan_rows(f_bound, fs)
    else:
        chunks = [fs[i::workers] for i in range(workers)]
        found = set()
        with ProcessPoolExecutor(max_workers=workers) as pool:
            for part in pool.map(_scan_rows, [f_bound] * workers, chunks):
                found |= part
    ordered = sorted(found, key=lambda fg: (max(abs(fg[0]), abs(fg[1])), fg))
    return [SurfacePoint(f, g) for f, g in ordered]


def norm_relation_residual(theta, params: FamilyParams):
    """|product of theta and its three M-images - 1| at the current mpmath precision."""
    f, g = params.f, params.g
    q = mpmath.mpf(f * f + g * g)
    factors = [
        (theta, 1),
        (f * theta - 1, q / 2 * theta - g),
        ((f + g) * theta - 2, q * theta - g - f),
        (g * theta - 1, q / 2 * theta - f),
    ]
    prod = mpmath.mpf(1)
    for num, den in factors:
        if den == 0:
            raise MobiusPoleError(f"factor denominator vanishes at theta = {theta}")
        prod *= num / den
    return abs(prod - 1)
