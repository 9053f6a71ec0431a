"""Solutions of (3u - 1)^2 - 3 w^2 = -2 and the admissible s-values they give."""

from __future__ import annotations

from dataclasses import dataclass

from .arith import DEFAULT_TRIAL_BOUND, SquarefreeStatus, squarefree_status

__all__ = ["PellSolution", "SClassification", "pell_solution", "s_sequence", "classify"]


@dataclass(frozen=True)
class PellSolution:
    n: int
    u: int
    w: int

    @property
    def s(self) -> int:
        return 2 * self.u

    @property
    def v(self) -> int:
        return 2 * self.w

    def check(self) -> bool:
        s, v = self.s, self.v
        return (3 * self.u - 1) ** 2 - 3 * self.w**2 == -2 and v * v == 3 * s * s - 4 * s + 4


@dataclass(frozen=True)
class SClassification:
    s: int
    nine_divides: bool
    status: SquarefreeStatus

    @property
    def tested(self) -> int:
        """The integer whose squarefreeness ``status`` describes."""
        m = self.s * self.s + 2
        return m // 9 if self.nine_divides else m


def _times_unit(a: int, b: int) -> tuple[int, int]:
    # (a + b sqrt3)(2 + sqrt3)
    return 2 * a + 3 * b, a + 2 * b


def pell_solution(n: int) -> PellSolution:
    """Expand (-1)^(n+1) (1 + sqrt3)(2 + sqrt3)^n = A + B sqrt3 and read off u, w.

    ``A = 3u - 1``; the sign of ``B`` only selects a square root of 3, so
    ``w = |B|``.
    """
    if n < 1:
        raise ValueError(f"n must be >= 1, got {n}")
    a, b = 1, 1
    for _ in range(n):
        a, b = _times_unit(a, b)
    if n % 2 == 0:
        a, b = -a, -b
    u, rem = divmod(a + 1, 3)
    if rem:
        raise ArithmeticError(f"3 does not divide A + 1 at n={n}")
    return PellSolution(n=n, u=u, w=abs(b))


def s_sequence(count: int) -> list[PellSolution]:
    """Solutions for n = 1..count, built incrementally."""
    if count < 1:
        raise ValueError(f"count must be >= 1, got {count}")
    out = []
    a, b = 1, 1
    for n in range(1, count + 1):
        a, b = _times_unit(a, b)
        sa, sb = (a, b) if n % 2 else (-a, -b)
        out.append(PellSolution(n=n, u=(sa + 1) // 3, w=abs(sb)))
    return out


def classify(sol: PellSolution | int, trial_bound: int = DEFAULT_TRIAL_BOUND) -> SClassification:
    """Squarefree status of s^2 + 2, or of (s^2 + 2)/9 when 9 divides it."""
    s = sol.s if isinstance(sol, PellSolution) else sol
    m = s * s + 2
    nine = m % 9 == 0
    return SClassification(
        s=s, nine_divides=nine, status=squarefree_status(m // 9 if nine else m, trial_bound)
    )
