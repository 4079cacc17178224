"""Plain trial-division number theory, used as an oracle for solver results.

Nothing here knows about time-travel registers; keep it that way.
"""

from __future__ import annotations

from dataclasses import dataclass


class InvalidInput(ValueError):
    pass


def integer_sqrt(n: int) -> int:
    """Largest r with r*r <= n, found by counting upward (no floating point)."""
    if n < 0:
        raise InvalidInput(f"integer_sqrt of negative number {n}")
    r = 0
    while (r + 1) * (r + 1) <= n:
        r += 1
    return r


@dataclass(frozen=True)
class FactorView:
    n: int
    divisors_gt1: tuple[int, ...]
    smallest_nontrivial: int
    is_prime: bool

    @property
    def proper_divisors(self) -> tuple[int, ...]:
        """Divisors d with 1 < d < n."""
        return tuple(d for d in self.divisors_gt1 if d != self.n)


def factor_view(n: int) -> FactorView:
    if not isinstance(n, int) or n < 2:
        raise InvalidInput(f"factor_view needs an integer n >= 2, got {n!r}")
    small, large = [], []
    d = 2
    while d * d <= n:
        if n % d == 0:
            small.append(d)
            if d != n // d:
                large.append(n // d)
        d += 1
    divisors = tuple(small + large[::-1] + [n])
    smallest = small[0] if small else n
    return FactorView(n, divisors, smallest, not small)


def is_prime(n: int) -> bool:
    return n >= 2 and factor_view(n).is_prime
