"""The cubic analogue on the singular fiber lambda = 3."""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

import mpmath

from .arith import IntPoly, RatPoly, discriminant, int_matmul
from .roots import real_roots

__all__ = [
    "CubicParams",
    "ReducibleCubicError",
    "cubic_poly",
    "g_poly",
    "kishi_poly",
    "verify_factorization_identity",
    "companion_matrix",
    "charpoly3",
    "verify_companion_identity",
    "verify_index_three",
]


class ReducibleCubicError(ValueError):
    pass


@dataclass(frozen=True)
class CubicParams:
    f: int
    g: int
    h: int

    def __post_init__(self) -> None:
        if self.f * self.g * self.h == 0:
            raise ValueError("need f*g*h != 0")

    @property
    def lam(self) -> Fraction:
        return Fraction(self.f**3 + self.g**3 + self.h**3, self.f * self.g * self.h)


def cubic_poly(cp: CubicParams) -> RatPoly:
    f, g, h, lam = cp.f, cp.g, cp.h, cp.lam
    return RatPoly(
        [-1, lam, (3 * (f * f + g * g - f * g) - lam * h * (f + g)) / Fraction(h * h), 1]
    )


def g_poly(f: int) -> IntPoly:
    """G_f(t) = t^3 + (9f^2 + 9f + 6) t^2 + 3t - 1."""
    return IntPoly([-1, 3, 9 * f * f + 9 * f + 6, 1])


def kishi_poly(f: int) -> IntPoly:
    """x^3 + (3f + 3) x^2 + 3f x - 1, whose roots r give roots -r^2 - r of G_f."""
    return IntPoly([-1, 3 * f, 3 * f + 3, 1])


def verify_factorization_identity(f: int) -> bool:
    """X^3 - 3fX + f^3 + 1 == (X + f + 1)(X^2 - (f+1)X + f^2 - f + 1)."""
    lhs = IntPoly([f**3 + 1, -3 * f, 0, 1])
    rhs = IntPoly([f + 1, 1]) * IntPoly([f * f - f + 1, -(f + 1), 1])
    return lhs == rhs


def companion_matrix(f: int) -> list[list[int]]:
    """Companion matrix of ``kishi_poly(f)``.

    The last column is (1, -3f, -3f - 3). Swapping its lower two entries gives
    the companion of x^3 + 3f x^2 + (3f + 3) x - 1 instead, whose -A^2 - A does
    not have characteristic polynomial G_f.
    """
    return [[0, 0, 1], [1, 0, -3 * f], [0, 1, -3 * f - 3]]


def charpoly3(m: list[list[int]]) -> IntPoly:
    """det(t I - m) for an integer 3x3 matrix."""
    tr = m[0][0] + m[1][1] + m[2][2]
    minors = (
        m[0][0] * m[1][1] - m[0][1] * m[1][0]
        + m[0][0] * m[2][2] - m[0][2] * m[2][0]
        + m[1][1] * m[2][2] - m[1][2] * m[2][1]
    )
    det = (
        m[0][0] * (m[1][1] * m[2][2] - m[1][2] * m[2][1])
        - m[0][1] * (m[1][0] * m[2][2] - m[1][2] * m[2][0])
        + m[0][2] * (m[1][0] * m[2][1] - m[1][1] * m[2][0])
    )
    return IntPoly([-det, minors, -tr, 1])


def verify_companion_identity(f: int) -> bool:
    """charpoly(-A^2 - A) == G_f where A is the companion matrix of ``kishi_poly(f)``."""
    a = companion_matrix(f)
    a2 = int_matmul(a, a)
    b = [[-a2[i][j] - a[i][j] for j in range(3)] for i in range(3)]
    return charpoly3(b) == g_poly(f)


def _check_totally_real_irreducible(p: IntPoly) -> None:
    if p(1) == 0 or p(-1) == 0:
        raise ReducibleCubicError(f"{p} has a rational root")
    if discriminant(p) <= 0:
        raise ReducibleCubicError(f"{p} does not have three real roots")


def _cubic_regulator(logs) -> mpmath.mpf:
    # |det [[l1, l2], [l2, l3]]| with l3 = -l1 - l2; independent of orientation
    l1, l2 = logs[0], logs[1]
    return abs(l1 * l1 + l1 * l2 + l2 * l2)


def verify_index_three(f: int, precision: int = 512) -> mpmath.mpf:
    """Regulator of <roots of G_f> over regulator of <roots of kishi_poly(f)>."""
    p, gf = kishi_poly(f), g_poly(f)
    _check_totally_real_irreducible(p)
    _check_totally_real_irreducible(gf)
    r = [m for m, _ in real_roots(p, precision)]
    g_roots = [m for m, _ in real_roots(gf, precision)]
    with mpmath.workprec(precision + 32):
        images = [-x * x - x for x in r]
        # each image must match a certified root of G_f
        tol = mpmath.ldexp(1, -(precision // 2))
        for y in images:
            if min(abs(y - z) for z in g_roots) > tol * max(1, abs(y)):
                raise ArithmeticError("-r^2 - r is not a root of G_f")
        rp = _cubic_regulator([mpmath.log(abs(x)) for x in r])
        rg = _cubic_regulator([mpmath.log(abs(y)) for y in images])
        return rg / rp
