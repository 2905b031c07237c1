"""Exact base-p digit arithmetic on rationals.

Rationals are plain :class:`fractions.Fraction` values (always reduced, with a
positive denominator).  A rational whose denominator is prime to ``p`` lies in
Z_p and has an eventually periodic Hensel expansion; :class:`HenselDigits`
stores that expansion exactly, :class:`PadicApprox` stores a finite
truncation (optionally scaled by a power of ``p`` for elements of Q_p).
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence, Union

Rational = Union[int, Fraction]


class DomainError(ValueError):
    """An argument lies outside the domain of the operation."""


def is_prime(n: int) -> bool:
    if n < 2:
        return False
    if n % 2 == 0:
        return n == 2
    i = 3
    while i * i <= n:
        if n % i == 0:
            return False
        i += 2
    return True


@dataclass(frozen=True)
class Params:
    """The pair (p, q) defining g_{p,q}: p prime, q >= 2 and prime to p."""

    p: int
    q: int

    def __post_init__(self):
        if not is_prime(self.p):
            raise DomainError(f"p={self.p} is not prime")
        if self.q < 2:
            raise DomainError(f"q={self.q} must be >= 2")
        if math.gcd(self.p, self.q) != 1:
            raise DomainError(f"gcd(p, q) != 1 for (p, q) = ({self.p}, {self.q})")

    def __str__(self):
        return f"({self.p},{self.q})"


def as_fraction(u: Rational | str) -> Fraction:
    return u if isinstance(u, Fraction) else Fraction(u)


def multiplicative_order(a: int, n: int) -> int:
    """Smallest k >= 1 with a^k = 1 mod n (n >= 1, gcd(a, n) = 1)."""
    if n == 1:
        return 1
    if math.gcd(a, n) != 1:
        raise DomainError(f"{a} is not invertible mod {n}")
    k, x = 1, a % n
    while x != 1:
        x = x * a % n
        k += 1
    return k


def _unit_denominator(u: Fraction, p: int) -> int:
    if u.denominator % p == 0:
        raise DomainError(f"denominator of {u} is divisible by p={p}")
    return u.denominator


def eps0(u: Rational, p: int) -> int:
    """The digit d in {0..p-1} with u = d mod p (u in Z_p)."""
    u = as_fraction(u)
    b = _unit_denominator(u, p)
    return u.numerator * pow(b, -1, p) % p


def padic_valuation(u: Rational, p: int) -> int | float:
    """nu_p(u); ``math.inf`` for u = 0."""
    u = as_fraction(u)
    if u == 0:
        return math.inf
    v = 0
    a, b = u.numerator, u.denominator
    while a % p == 0:
        a //= p
        v += 1
    while b % p == 0:
        b //= p
        v -= 1
    return v


def split_valuation(u: Rational, p: int) -> tuple[int, Fraction]:
    """Write u = p^m * w with w a p-adic unit; returns (m, w).  u must be nonzero."""
    u = as_fraction(u)
    if u == 0:
        raise DomainError("0 has no unit part")
    m = padic_valuation(u, p)
    w = u / Fraction(p) ** m
    return m, w


def _to_digits(x: int, p: int, n: int) -> tuple[int, ...]:
    out = []
    for _ in range(n):
        x, d = divmod(x, p)
        out.append(d)
    return tuple(out)


def _from_digits(digits: Sequence[int], p: int) -> int:
    x = 0
    for d in reversed(digits):
        x = x * p + d
    return x


@dataclass(frozen=True)
class PadicApprox:
    """p^valuation_offset * sum(digits[i] p^i), known to ``len(digits)`` digits."""

    p: int
    digits: tuple[int, ...]
    valuation_offset: int = 0

    def __post_init__(self):
        object.__setattr__(self, "digits", tuple(self.digits))
        if any(not 0 <= d < self.p for d in self.digits):
            raise ValueError(f"digit out of range for p={self.p}: {self.digits}")

    @property
    def precision(self) -> int:
        return len(self.digits)

    def residue(self) -> int:
        """The digits read as an integer in [0, p^N)."""
        return _from_digits(self.digits, self.p)

    def value(self) -> Fraction:
        """The truncated (finite) rational value, scaling included."""
        return self.residue() * Fraction(self.p) ** self.valuation_offset

    def first_difference(self, other: PadicApprox) -> int | float:
        """Index of the first differing digit, or ``math.inf`` if none in common precision."""
        if self.p != other.p or self.valuation_offset != other.valuation_offset:
            raise ValueError("incomparable approximations")
        for i, (a, b) in enumerate(zip(self.digits, other.digits)):
            if a != b:
                return i
        return math.inf


def hensel_digits(u: Rational, p: int, n: int) -> PadicApprox:
    """First ``n`` Hensel digits of u.

    For u in Z_p the offset is 0.  If p divides the denominator, u is scaled
    to p^-v u with v = nu_p(den) and the offset records -v.
    """
    u = as_fraction(u)
    if n < 0:
        raise ValueError("precision must be nonnegative")
    offset = 0
    b = u.denominator
    while b % p == 0:
        b //= p
        offset -= 1
    a = u.numerator
    mod = p**n
    residue = a * pow(b, -1, mod) % mod if mod > 1 else 0
    return PadicApprox(p, _to_digits(residue, p, n), offset)


def _canonical(pre: Sequence[int], period: Sequence[int]) -> tuple[tuple[int, ...], tuple[int, ...]]:
    pre, period = list(pre), list(period)
    k = len(period)
    for d in range(1, k + 1):
        if k % d == 0 and period == period[:d] * (k // d):
            period = period[:d]
            break
    # absorb trailing preperiod digits into the period by rotation
    while pre and pre[-1] == period[-1]:
        pre.pop()
        period = [period[-1]] + period[:-1]
    return tuple(pre), tuple(period)


@dataclass(frozen=True)
class HenselDigits:
    """Eventually periodic digit stream: ``preperiod`` then ``period`` repeated forever.

    The representation is canonicalised on construction (minimal period, then
    minimal preperiod), so equal streams compare equal.
    """

    p: int
    preperiod: tuple[int, ...]
    period: tuple[int, ...]

    def __post_init__(self):
        if not self.period:
            raise ValueError("period must be nonempty")
        if any(not 0 <= d < self.p for d in (*self.preperiod, *self.period)):
            raise ValueError(f"digit out of range for p={self.p}")
        pre, per = _canonical(self.preperiod, self.period)
        object.__setattr__(self, "preperiod", pre)
        object.__setattr__(self, "period", per)

    def digit(self, i: int) -> int:
        n = len(self.preperiod)
        if i < n:
            return self.preperiod[i]
        return self.period[(i - n) % len(self.period)]

    def truncate(self, n: int) -> PadicApprox:
        return PadicApprox(self.p, tuple(self.digit(i) for i in range(n)))

    def to_json(self) -> dict:
        return {"p": self.p, "preperiod": list(self.preperiod), "period": list(self.period)}

    @classmethod
    def from_json(cls, data: dict) -> HenselDigits:
        return cls(int(data["p"]), tuple(data["preperiod"]), tuple(data["period"]))


def shift(u: Fraction, p: int) -> Fraction:
    """delta_p(u) = (u - eps0(u)) / p."""
    return (u - eps0(u, p)) / p


def detect_periodic_digits(u: Rational, p: int) -> HenselDigits:
    """Exact Hensel expansion of a rational in Z_p.

    Iterates the digit shift on exact rationals until a state repeats.  The
    states a/b keep the denominator b and have |a| bounded by max(|a_0|, b),
    so a repeat always occurs.
    """
    u = as_fraction(u)
    _unit_denominator(u, p)
    seen: dict[Fraction, int] = {}
    digits: list[int] = []
    state = u
    while state not in seen:
        seen[state] = len(digits)
        d = eps0(state, p)
        digits.append(d)
        state = (state - d) / p
    start = seen[state]
    return HenselDigits(p, tuple(digits[:start]), tuple(digits[start:]))


def rational_from_digits(h: HenselDigits) -> Fraction:
    p = h.p
    head = _from_digits(h.preperiod, p)
    block = _from_digits(h.period, p)
    tail = Fraction(block, 1 - p ** len(h.period))
    return head + p ** len(h.preperiod) * tail


def delta_shift(h: HenselDigits | PadicApprox) -> HenselDigits | PadicApprox:
    """Drop the first digit of a stream (the map (u - eps0(u)) / p)."""
    if isinstance(h, PadicApprox):
        if not h.digits:
            raise ValueError("cannot shift an empty approximation")
        return PadicApprox(h.p, h.digits[1:], h.valuation_offset)
    if h.preperiod:
        return HenselDigits(h.p, h.preperiod[1:], h.period)
    return HenselDigits(h.p, (), h.period[1:] + h.period[:1])
