"""
Exact integer helpers for the fair-share relation

x ≈ p/q holds when ⌊p/q⌋ ≤ x ≤ ⌈p/q⌉. Everything here stays in integers;
a rational left-hand side a/b is compared as b·⌊p/q⌋ ≤ a ≤ b·⌈p/q⌉.
"""

from math import comb, prod
from typing import Iterable, Tuple


def floor_div(p: int, q: int) -> int:
    """⌊p/q⌋ for q > 0"""
    if q <= 0:
        raise ValueError(f"Denominator must be positive, got {q}")
    return p // q


def ceil_div(p: int, q: int) -> int:
    """⌈p/q⌉ for q > 0"""
    if q <= 0:
        raise ValueError(f"Denominator must be positive, got {q}")
    return -((-p) // q)


def fair_bounds(p: int, q: int) -> Tuple[int, int]:
    """Return (⌊p/q⌋, ⌈p/q⌉)"""
    return floor_div(p, q), ceil_div(p, q)


def approx(x: int, p: int, q: int = 1) -> bool:
    """x ≈ p/q"""
    lo, hi = fair_bounds(p, q)
    return lo <= x <= hi


def approx_ratio(a: int, b: int, p: int, q: int) -> bool:
    """a/b ≈ p/q, evaluated as b·⌊p/q⌋ ≤ a ≤ b·⌈p/q⌉ with b > 0"""
    if b <= 0:
        raise ValueError(f"Denominator must be positive, got {b}")
    lo, hi = fair_bounds(p, q)
    return b * lo <= a <= b * hi


def binomial_product(pairs: Iterable[Tuple[int, int]]) -> int:
    """Π C(n_i, k_i) over (n_i, k_i) pairs"""
    return prod(comb(n, k) for n, k in pairs)


def divides(a: int, b: int) -> bool:
    """a | b for a > 0"""
    return a > 0 and b % a == 0
