"""Exact arithmetic substrate.

Integers and rationals are Python ``int`` / ``fractions.Fraction``; real
numbers at a chosen precision are ``mpmath.mpf`` values, with the precision
carried by whichever container holds them.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from numbers import Rational
from typing import Iterable, Sequence

import mpmath

__all__ = [
    "IntPoly",
    "RatPoly",
    "QuadElem",
    "GaussElem",
    "Mobius2",
    "MobiusPoleError",
    "SquarefreeStatus",
    "isqrt_exact",
    "resultant",
    "discriminant",
    "discriminant_quartic",
    "squarefree_status",
    "mobius_apply",
    "projectively_equal",
    "tolerance",
    "to_mpf",
    "to_fraction",
    "DEFAULT_TRIAL_BOUND",
]

DEFAULT_TRIAL_BOUND = 10**6


def tolerance(prec: int) -> mpmath.mpf:
    """Default verification tolerance 2^(-prec/2) at working precision ``prec``."""
    return mpmath.ldexp(mpmath.mpf(1), -(prec // 2))


def to_mpf(q) -> mpmath.mpf:
    """Round an int, Fraction or mpf to an mpf at the current precision."""
    if isinstance(q, Fraction):
        return mpmath.mpf(q.numerator) / q.denominator
    return mpmath.mpf(q)


def to_fraction(x) -> Fraction:
    """Exact rational value of a (finite) mpf."""
    if isinstance(x, (int, Fraction)):
        return Fraction(x)
    if not isinstance(x, mpmath.mpf):
        # only non-mpf input is converted; mpf(x) would round to the context precision
        x = mpmath.mpf(x)
    if not mpmath.isfinite(x):
        raise ValueError(f"not a finite value: {x}")
    sign, man, exp, _ = x._mpf_
    man = -int(man) if sign else int(man)
    return Fraction(man * 2**exp) if exp >= 0 else Fraction(man, 2**-exp)


def isqrt_exact(n: int) -> int | None:
    """Return ``r`` with ``r*r == n`` if ``n`` is a perfect square, else ``None``."""
    if n < 0:
        raise ValueError(f"isqrt_exact needs n >= 0, got {n}")
    r = math.isqrt(n)
    return r if r * r == n else None


# --------------------------------------------------------------------------
# Polynomials
# --------------------------------------------------------------------------


def _strip(coeffs: Iterable) -> tuple:
    c = list(coeffs)
    while c and c[-1] == 0:
        c.pop()
    return tuple(c)


class _Poly:
    """Dense univariate polynomial, coefficients in ascending degree."""

    __slots__ = ("coeffs",)
    _var = "t"

    def __init__(self, coeffs: Iterable) -> None:
        object.__setattr__(self, "coeffs", _strip(self._coerce(c) for c in coeffs))

    @staticmethod
    def _coerce(c):
        raise NotImplementedError

    def __setattr__(self, name, value):
        raise AttributeError("polynomials are immutable")

    @property
    def degree(self) -> int:
        return len(self.coeffs) - 1

    @property
    def is_zero(self) -> bool:
        return not self.coeffs

    @property
    def leading(self):
        return self.coeffs[-1] if self.coeffs else 0

    def __getitem__(self, i: int):
        return self.coeffs[i] if 0 <= i < len(self.coeffs) else 0

    def __eq__(self, other) -> bool:
        if isinstance(other, _Poly):
            return self.coeffs == other.coeffs
        return NotImplemented

    def __hash__(self) -> int:
        return hash(self.coeffs)

    def __repr__(self) -> str:
        return f"{type(self).__name__}({list(self.coeffs)!r})"

    def __call__(self, x):
        acc = 0
        for c in reversed(self.coeffs):
            acc = acc * x + c
        return acc

    def _like(self, other):
        # int-with-int stays IntPoly; anything rational promotes.
        if isinstance(self, IntPoly) and isinstance(other, IntPoly):
            return IntPoly
        return RatPoly

    def __add__(self, other: _Poly) -> _Poly:
        n = max(len(self.coeffs), len(other.coeffs))
        return self._like(other)(self[i] + other[i] for i in range(n))

    def __sub__(self, other: _Poly) -> _Poly:
        n = max(len(self.coeffs), len(other.coeffs))
        return self._like(other)(self[i] - other[i] for i in range(n))

    def __neg__(self) -> _Poly:
        return type(self)(-c for c in self.coeffs)

    def __mul__(self, other):
        if isinstance(other, _Poly):
            if self.is_zero or other.is_zero:
                return self._like(other)([])
            out = [0] * (len(self.coeffs) + len(other.coeffs) - 1)
            for i, a in enumerate(self.coeffs):
                for j, b in enumerate(other.coeffs):
                    out[i + j] += a * b
            return self._like(other)(out)
        if isinstance(other, int):
            return type(self)(c * other for c in self.coeffs)
        if isinstance(other, Rational):
            return RatPoly(c * other for c in self.coeffs)
        return NotImplemented

    __rmul__ = __mul__

    def __pow__(self, k: int) -> _Poly:
        out = type(self)([1])
        for _ in range(k):
            out = out * self
        return out

    def derivative(self) -> _Poly:
        return type(self)(i * c for i, c in enumerate(self.coeffs) if i)

    def reflect(self) -> _Poly:
        """The polynomial p(-t)."""
        return type(self)(c if i % 2 == 0 else -c for i, c in enumerate(self.coeffs))

    def format(self, var: str = "t") -> str:
        """Human form, highest degree first: ``t^4 - 7588t^3 - 870t^2 + 4t + 1``."""
        if self.is_zero:
            return "0"
        parts: list[str] = []
        for i in range(self.degree, -1, -1):
            c = self.coeffs[i]
            if c == 0:
                continue
            sign = "-" if c < 0 else "+"
            mag = -c if c < 0 else c
            if isinstance(mag, Fraction) and mag.denominator != 1:
                mag_s = f"({mag})" if i else str(mag)
            else:
                mag_s = str(int(mag))
                if mag == 1 and i:
                    mag_s = ""
            mono = "" if i == 0 else (var if i == 1 else f"{var}^{i}")
            term = mag_s + mono
            if not parts:
                parts.append(term if sign == "+" else "-" + term)
            else:
                parts.append(f"{sign} {term}")
        return " ".join(parts)

    def __str__(self) -> str:
        return self.format()


class IntPoly(_Poly):
    """Polynomial with exact integer coefficients."""

    __slots__ = ()

    @staticmethod
    def _coerce(c) -> int:
        if isinstance(c, bool):
            raise TypeError("bool is not a coefficient")
        if isinstance(c, int):
            return c
        if isinstance(c, Fraction) and c.denominator == 1:
            return c.numerator
        raise TypeError(f"IntPoly coefficient must be an integer, got {c!r}")

    def to_rat(self) -> RatPoly:
        return RatPoly(self.coeffs)


class RatPoly(_Poly):
    """Polynomial with exact rational coefficients (kept in lowest terms)."""

    __slots__ = ()

    @staticmethod
    def _coerce(c) -> Fraction:
        if isinstance(c, bool):
            raise TypeError("bool is not a coefficient")
        if isinstance(c, (int, Fraction)):
            return Fraction(c)
        raise TypeError(f"RatPoly coefficient must be rational, got {c!r}")

    def is_integral(self) -> bool:
        return all(c.denominator == 1 for c in self.coeffs)

    def to_int(self) -> IntPoly:
        if not self.is_integral():
            raise ValueError("polynomial has non-integral coefficients")
        return IntPoly(c.numerator for c in self.coeffs)

    def clear_denominators(self) -> IntPoly:
        """Integer polynomial obtained by scaling with the lcm of the denominators."""
        m = 1
        for c in self.coeffs:
            m = m * c.denominator // math.gcd(m, c.denominator)
        return IntPoly((c * m).numerator for c in self.coeffs)


# --------------------------------------------------------------------------
# Resultants and discriminants
# --------------------------------------------------------------------------


def _bareiss_det(rows: list[list[int]]) -> int:
    """Fraction-free Gaussian elimination; exact for integer matrices."""
    a = [list(r) for r in rows]
    n = len(a)
    if n == 0:
        return 1
    sign = 1
    prev = 1
    for k in range(n - 1):
        if a[k][k] == 0:
            for r in range(k + 1, n):
                if a[r][k] != 0:
                    a[k], a[r] = a[r], a[k]
                    sign = -sign
                    break
            else:
                return 0
        for i in range(k + 1, n):
            for j in range(k + 1, n):
                a[i][j] = (a[i][j] * a[k][k] - a[i][k] * a[k][j]) // prev
        prev = a[k][k]
    return sign * a[n - 1][n - 1]


def sylvester_matrix(p: IntPoly, q: IntPoly) -> list[list[int]]:
    m, n = p.degree, q.degree
    size = m + n
    rows = []
    hi_p = list(reversed(p.coeffs))
    hi_q = list(reversed(q.coeffs))
    for i in range(n):
        rows.append([0] * i + hi_p + [0] * (size - m - 1 - i))
    for i in range(m):
        rows.append([0] * i + hi_q + [0] * (size - n - 1 - i))
    return rows


def resultant(p: IntPoly, q: IntPoly) -> int:
    """Resultant of two integer polynomials as the Sylvester determinant."""
    if p.is_zero or q.is_zero:
        raise ValueError("resultant of the zero polynomial is undefined")
    if p.degree == 0 and q.degree == 0:
        return 1
    return _bareiss_det(sylvester_matrix(p, q))


def discriminant(p: IntPoly) -> int:
    """disc(p) = (-1)^(n(n-1)/2) res(p, p') / lc(p)."""
    n = p.degree
    if n < 1:
        raise ValueError("discriminant needs degree >= 1")
    if n == 1:
        return 1
    r = resultant(p, p.derivative())
    q, rem = divmod(r, p.leading)
    if rem:
        raise ArithmeticError("leading coefficient does not divide the resultant")
    return -q if (n * (n - 1) // 2) % 2 else q


def discriminant_quartic(p: IntPoly) -> int:
    if p.degree != 4 or p.leading != 1:
        raise ValueError("discriminant_quartic expects a monic quartic")
    return discriminant(p)


# --------------------------------------------------------------------------
# Squarefree testing
# --------------------------------------------------------------------------


@lru_cache(maxsize=8)
def _primes_upto(n: int) -> tuple[int, ...]:
    if n < 2:
        return ()
    sieve = bytearray(b"\x01") * (n + 1)
    sieve[:2] = b"\x00\x00"
    for p in range(2, math.isqrt(n) + 1):
        if sieve[p]:
            sieve[p * p :: p] = bytes(len(range(p * p, n + 1, p)))
    return tuple(i for i, flag in enumerate(sieve) if flag)


@dataclass(frozen=True)
class SquarefreeStatus:
    """Outcome of a bounded squarefree test.

    ``kind`` is one of ``"squarefree"``, ``"not_squarefree"`` (``witness``
    holds some w > 1 with w^2 | n) or ``"probably_squarefree"`` (``residual``
    holds the cofactor that could not be settled).
    """

    kind: str
    witness: int | None = None
    residual: int | None = None

    @property
    def is_squarefree(self) -> bool:
        return self.kind == "squarefree"

    def __str__(self) -> str:
        if self.kind == "not_squarefree":
            return f"not_squarefree({self.witness})"
        if self.kind == "probably_squarefree":
            return f"probably_squarefree({self.residual})"
        return self.kind


def squarefree_status(n: int, trial_bound: int = DEFAULT_TRIAL_BOUND) -> SquarefreeStatus:
    """Decide whether ``n`` is squarefree using trial division up to ``trial_bound``.

    A cofactor ``c`` left after trial division has no prime factor <= B. It
    is settled when c < B^2 (then prime), when c is a perfect square, or when
    c < B^3 (at most two primes, distinct unless c is a square). Otherwise the
    answer is ``probably_squarefree``; nothing false is ever claimed.
    """
    if n < 1:
        raise ValueError("squarefree_status needs n >= 1")
    if trial_bound < 2:
        raise ValueError("trial_bound must be >= 2")
    m = n
    for p in _primes_upto(trial_bound):
        if p * p > m:
            return SquarefreeStatus("squarefree")
        if m % p == 0:
            m //= p
            if m % p == 0:
                return SquarefreeStatus("not_squarefree", witness=p)
    if m == 1:
        return SquarefreeStatus("squarefree")
    r = isqrt_exact(m)
    if r is not None:
        return SquarefreeStatus("not_squarefree", witness=r)
    if m < trial_bound**3:
        return SquarefreeStatus("squarefree")
    return SquarefreeStatus("probably_squarefree", residual=m)


# --------------------------------------------------------------------------
# Quadratic and Gaussian elements
# --------------------------------------------------------------------------


@dataclass(frozen=True)
class QuadElem:
    """a + b*sqrt(d) with a, b rational and d a positive nonsquare integer."""

    a: Fraction
    b: Fraction
    d: int

    def __post_init__(self) -> None:
        object.__setattr__(self, "a", Fraction(self.a))
        object.__setattr__(self, "b", Fraction(self.b))
        if self.d <= 0 or isqrt_exact(self.d) is not None:
            raise ValueError(f"radicand must be a positive nonsquare, got {self.d}")

    def _lift(self, other) -> QuadElem:
        if isinstance(other, QuadElem):
            if other.d != self.d:
                raise ValueError(f"radicand mismatch: {self.d} vs {other.d}")
            return other
        if isinstance(other, (int, Fraction)):
            return QuadElem(Fraction(other), Fraction(0), self.d)
        return NotImplemented

    def __add__(self, other):
        o = self._lift(other)
        if o is NotImplemented:
            return o
        return QuadElem(self.a + o.a, self.b + o.b, self.d)

    __radd__ = __add__

    def __neg__(self) -> QuadElem:
        return QuadElem(-self.a, -self.b, self.d)

    def __sub__(self, other):
        o = self._lift(other)
        if o is NotImplemented:
            return o
        return QuadElem(self.a - o.a, self.b - o.b, self.d)

    def __rsub__(self, other):
        return -self + other

    def __mul__(self, other):
        o = self._lift(other)
        if o is NotImplemented:
            return o
        return QuadElem(
            self.a * o.a + self.d * self.b * o.b, self.a * o.b + self.b * o.a, self.d
        )

    __rmul__ = __mul__

    def conj(self) -> QuadElem:
        return QuadElem(self.a, -self.b, self.d)

    def norm(self) -> Fraction:
        return self.a * self.a - self.d * self.b * self.b

    def inverse(self) -> QuadElem:
        n = self.norm()
        if n == 0:
            raise ZeroDivisionError("zero element has no inverse")
        c = self.conj()
        return QuadElem(c.a / n, c.b / n, self.d)

    def __truediv__(self, other):
        o = self._lift(other)
        if o is NotImplemented:
            return o
        return self * o.inverse()

    def __pow__(self, k: int) -> QuadElem:
        if k < 0:
            return self.inverse() ** (-k)
        out = QuadElem(Fraction(1), Fraction(0), self.d)
        base = self
        while k:
            if k & 1:
                out = out * base
            base = base * base
            k >>= 1
        return out

    def sign(self) -> int:
        """Exact sign of a + b*sqrt(d) as a real number."""
        sa = (self.a > 0) - (self.a < 0)
        sb = (self.b > 0) - (self.b < 0)
        if sa == sb or sb == 0:
            return sa
        if sa == 0:
            return sb
        # opposite signs: compare a^2 with d*b^2
        diff = self.a * self.a - self.d * self.b * self.b
        return sa if diff > 0 else (sb if diff < 0 else 0)

    def with_radicand(self, d2: int) -> QuadElem:
        """Re-express over sqrt(d2) when d/d2 is a rational square."""
        ratio = Fraction(self.d, d2)
        rn, rd = isqrt_exact(ratio.numerator), isqrt_exact(ratio.denominator)
        if rn is None or rd is None:
            raise ValueError(f"sqrt({self.d}) is not a rational multiple of sqrt({d2})")
        return QuadElem(self.a, self.b * Fraction(rn, rd), d2)

    def to_mpf(self, prec: int) -> mpmath.mpf:
        with mpmath.workprec(prec):
            return to_mpf(self.a) + to_mpf(self.b) * mpmath.sqrt(self.d)

    def __str__(self) -> str:
        return f"{self.a} + {self.b}*sqrt({self.d})"


@dataclass(frozen=True)
class GaussElem:
    """Exact Gaussian rational re + im*i."""

    re: Fraction
    im: Fraction

    def __post_init__(self) -> None:
        object.__setattr__(self, "re", Fraction(self.re))
        object.__setattr__(self, "im", Fraction(self.im))

    @staticmethod
    def _lift(other) -> GaussElem:
        if isinstance(other, GaussElem):
            return other
        if isinstance(other, (int, Fraction)):
            return GaussElem(other, 0)
        return NotImplemented

    def __add__(self, other):
        o = self._lift(other)
        if o is NotImplemented:
            return o
        return GaussElem(self.re + o.re, self.im + o.im)

    __radd__ = __add__

    def __neg__(self) -> GaussElem:
        return GaussElem(-self.re, -self.im)

    def __sub__(self, other):
        o = self._lift(other)
        if o is NotImplemented:
            return o
        return GaussElem(self.re - o.re, self.im - o.im)

    def __mul__(self, other):
        o = self._lift(other)
        if o is NotImplemented:
            return o
        return GaussElem(self.re * o.re - self.im * o.im, self.re * o.im + self.im * o.re)

    __rmul__ = __mul__

    def __pow__(self, k: int) -> GaussElem:
        if k < 0:
            raise ValueError("negative powers not supported")
        out, base = GaussElem(1, 0), self
        while k:
            if k & 1:
                out = out * base
            base = base * base
            k >>= 1
        return out

    def conj(self) -> GaussElem:
        return GaussElem(self.re, -self.im)

    def norm(self) -> Fraction:
        return self.re * self.re + self.im * self.im

    def to_mpc(self, prec: int) -> mpmath.mpc:
        with mpmath.workprec(prec):
            return mpmath.mpc(to_mpf(self.re), to_mpf(self.im))


I = GaussElem(0, 1)


# --------------------------------------------------------------------------
# Linear fractional transformations
# --------------------------------------------------------------------------


class MobiusPoleError(ArithmeticError):
    """The transformation has a pole at the requested point."""


@dataclass(frozen=True)
class Mobius2:
    """Exact 2x2 rational matrix [[a, b], [c, d]] acting by x -> (ax+b)/(cx+d)."""

    a: Fraction
    b: Fraction
    c: Fraction
    d: Fraction

    def __post_init__(self) -> None:
        for name in "abcd":
            object.__setattr__(self, name, Fraction(getattr(self, name)))
        if self.det == 0:
            raise ValueError("singular matrix")

    @classmethod
    def identity(cls) -> Mobius2:
        return cls(1, 0, 0, 1)

    @property
    def det(self) -> Fraction:
        return self.a * self.d - self.b * self.c

    @property
    def entries(self) -> tuple[Fraction, Fraction, Fraction, Fraction]:
        return (self.a, self.b, self.c, self.d)

    def __matmul__(self, o: Mobius2) -> Mobius2:
        return Mobius2(
            self.a * o.a + self.b * o.c,
            self.a * o.b + self.b * o.d,
            self.c * o.a + self.d * o.c,
            self.c * o.b + self.d * o.d,
        )

    def __pow__(self, k: int) -> Mobius2:
        if k < 0:
            raise ValueError("use inverse() for negative powers")
        out = Mobius2.identity()
        for _ in range(k):
            out = out @ self
        return out

    def scaled(self, lam) -> Mobius2:
        lam = Fraction(lam)
        return Mobius2(lam * self.a, lam * self.b, lam * self.c, lam * self.d)

    def inverse(self) -> Mobius2:
        return Mobius2(self.d, -self.b, -self.c, self.a).scaled(1 / self.det)

    def __call__(self, x):
        return mobius_apply(self, x)


def mobius_apply(m: Mobius2, x):
    """(a x + b) / (c x + d) for exact rationals or mpf values.

    Exact input raises ``MobiusPoleError`` when c x + d == 0. For mpf input
    the pole test is relative: |c x + d| must exceed the rounding noise of
    its two terms.
    """
    if isinstance(x, (int, Fraction)):
        x = Fraction(x)
        den = m.c * x + m.d
        if den == 0:
            raise MobiusPoleError(f"pole at x = {x}")
        return (m.a * x + m.b) / den
    a, b, c, d = (to_mpf(e) for e in m.entries)
    cx = c * x
    den = cx + d
    if den == 0 or abs(den) <= (abs(cx) + abs(d)) * mpmath.ldexp(1, 4 - mpmath.mp.prec):
        raise MobiusPoleError(f"denominator vanishes numerically at x = {x}")
    return (a * x + b) / den


def projectively_equal(ma: Mobius2, mb: Mobius2) -> bool:
    """True iff ma = lambda * mb for some nonzero rational lambda."""
    ea, eb = ma.entries, mb.entries
    for i in range(4):
        for j in range(i + 1, 4):
            if ea[i] * eb[j] != ea[j] * eb[i]:
                return False
    return True


def int_matmul(x: Sequence[Sequence[int]], y: Sequence[Sequence[int]]) -> list[list[int]]:
    n, k, m = len(x), len(y), len(y[0])
    return [[sum(x[i][t] * y[t][j] for t in range(k)) for j in range(m)] for i in range(n)]
