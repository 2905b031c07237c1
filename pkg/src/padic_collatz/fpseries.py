"""The Collatz analog on F_p[[T]].

S(f) = f/T if f(0) = 0, else ((1+T) f - f(0)) / T, and
phi(f) = sum_n S^n(f)(0) T^n.  Rational functions P/Q with Q(0) != 0 are
kept reduced with a monic denominator, so equal functions compare equal and
orbits can be hashed.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence

from .padic import DomainError, is_prime


def _strip(coeffs: Sequence[int], p: int) -> tuple[int, ...]:
    c = [x % p for x in coeffs]
    while c and c[-1] == 0:
        c.pop()
    return tuple(c)


@dataclass(frozen=True)
class FpPoly:
    """Polynomial over F_p, coefficients in increasing degree, no trailing zeros."""

    p: int
    coeffs: tuple[int, ...]

    def __post_init__(self):
        object.__setattr__(self, "coeffs", _strip(self.coeffs, self.p))

    @classmethod
    def const(cls, p: int, c: int) -> FpPoly:
        return cls(p, (c,))

    @property
    def degree(self) -> int | float:
        return len(self.coeffs) - 1 if self.coeffs else -math.inf

    def __bool__(self):
        return bool(self.coeffs)

    def at0(self) -> int:
        return self.coeffs[0] if self.coeffs else 0

    def lead(self) -> int:
        return self.coeffs[-1]

    def __add__(self, other: FpPoly) -> FpPoly:
        a, b = self.coeffs, other.coeffs
        n = max(len(a), len(b))
        return FpPoly(self.p, [(a[i] if i < len(a) else 0) + (b[i] if i < len(b) else 0) for i in range(n)])

    def __neg__(self) -> FpPoly:
        return FpPoly(self.p, [-x for x in self.coeffs])

    def __sub__(self, other: FpPoly) -> FpPoly:
        return self + (-other)

    def __mul__(self, other: FpPoly | int) -> FpPoly:
        if isinstance(other, int):
            return FpPoly(self.p, [x * other for x in self.coeffs])
        a, b = self.coeffs, other.coeffs
        if not a or not b:
            return FpPoly(self.p, ())
        out = [0] * (len(a) + len(b) - 1)
        for i, x in enumerate(a):
            if x:
                for j, y in enumerate(b):
                    out[i + j] += x * y
        return FpPoly(self.p, out)

    __rmul__ = __mul__

    def __divmod__(self, other: FpPoly) -> tuple[FpPoly, FpPoly]:
        if not other:
            raise ZeroDivisionError("polynomial division by zero")
        p = self.p
        rem = list(self.coeffs)
        db = len(other.coeffs) - 1
        inv = pow(other.lead(), -1, p)
        quot = [0] * max(len(rem) - db, 0)
        for i in range(len(rem) - 1, db - 1, -1):
            c = rem[i] * inv % p
            if c:
                quot[i - db] = c
                for j, y in enumerate(other.coeffs):
                    rem[i - db + j] = (rem[i - db + j] - c * y) % p
        return FpPoly(p, quot), FpPoly(p, rem)

    def __floordiv__(self, other: FpPoly) -> FpPoly:
        return divmod(self, other)[0]

    def __mod__(self, other: FpPoly) -> FpPoly:
        return divmod(self, other)[1]

    def shift_down(self) -> FpPoly:
        """P / T, for P with zero constant term."""
        assert self.at0() == 0
        return FpPoly(self.p, self.coeffs[1:])

    def monic(self) -> FpPoly:
        return self * pow(self.lead(), -1, self.p) if self else self


def poly_gcd(a: FpPoly, b: FpPoly) -> FpPoly:
    while b:
        a, b = b, a % b
    return a.monic()


def _one_plus_t(p: int) -> FpPoly:
    return FpPoly(p, (1, 1))


@dataclass(frozen=True)
class FpRationalFunction:
    """P/Q in lowest terms, Q monic with Q(0) != 0."""

    P: FpPoly
    Q: FpPoly

    def __post_init__(self):
        P, Q = self.P, self.Q
        if not Q:
            raise ZeroDivisionError("zero denominator")
        if not P:
            P, Q = P, FpPoly.const(Q.p, 1)
        else:
            g = poly_gcd(P, Q)
            P, Q = P // g, Q // g
            s = pow(Q.lead(), -1, Q.p)
            P, Q = P * s, Q * s
        if Q.at0() == 0:
            raise DomainError("Q(0) = 0: no power series expansion")
        object.__setattr__(self, "P", P)
        object.__setattr__(self, "Q", Q)

    @classmethod
    def _reduced(cls, P: FpPoly, Q: FpPoly) -> FpRationalFunction:
        """Wrap P/Q already known to be in canonical form, skipping the gcd."""
        f = object.__new__(cls)
        object.__setattr__(f, "P", P)
        object.__setattr__(f, "Q", Q)
        return f

    @classmethod
    def from_coeffs(cls, p: int, num: Sequence[int], den: Sequence[int] = (1,)) -> FpRationalFunction:
        if not is_prime(p):
            raise DomainError(f"p={p} is not prime")
        return cls(FpPoly(p, tuple(num)), FpPoly(p, tuple(den)))

    @property
    def p(self) -> int:
        return self.P.p

    def at0(self) -> int:
        return self.P.at0() * pow(self.Q.at0(), -1, self.p) % self.p

    def __bool__(self):
        return bool(self.P)

    def __add__(self, other: FpRationalFunction) -> FpRationalFunction:
        return FpRationalFunction(self.P * other.Q + other.P * self.Q, self.Q * other.Q)

    def __sub__(self, other: FpRationalFunction) -> FpRationalFunction:
        return FpRationalFunction(self.P * other.Q - other.P * self.Q, self.Q * other.Q)

    def __mul__(self, other: FpRationalFunction) -> FpRationalFunction:
        return FpRationalFunction(self.P * other.P, self.Q * other.Q)

    def __truediv__(self, other: FpRationalFunction) -> FpRationalFunction:
        if not other:
            raise ZeroDivisionError("division by zero rational function")
        return FpRationalFunction(self.P * other.Q, self.Q * other.P)

    def expand(self, n: int) -> FpSeriesApprox:
        """First n power-series coefficients of P/Q."""
        p = self.p
        q = self.Q.coeffs
        inv = pow(q[0], -1, p)
        num = list(self.P.coeffs) + [0] * n
        out = []
        for i in range(n):
            c = num[i] * inv % p
            out.append(c)
            if c:
                for j in range(1, len(q)):
                    if i + j < len(num):
                        num[i + j] -= c * q[j]
        return FpSeriesApprox(p, tuple(out))

    def to_json(self) -> dict:
        return {"p": self.p, "P": list(self.P.coeffs), "Q": list(self.Q.coeffs)}


@dataclass(frozen=True)
class FpSeriesApprox:
    p: int
    coeffs: tuple[int, ...]

    def __post_init__(self):
        object.__setattr__(self, "coeffs", tuple(self.coeffs))
        if any(not 0 <= c < self.p for c in self.coeffs):
            raise ValueError("coefficient out of range")

    def first_difference(self, other: FpSeriesApprox) -> int | float:
        for i, (a, b) in enumerate(zip(self.coeffs, other.coeffs)):
            if a != b:
                return i
        return math.inf


def series_height(f: FpRationalFunction) -> int:
    """max(deg P, deg Q); 0 for the zero function."""
    if not f:
        return 0
    return max(f.P.degree, f.Q.degree)


def _at_minus_one(f: FpPoly) -> int:
    return sum(c if i % 2 == 0 else -c for i, c in enumerate(f.coeffs)) % f.p


def smap(f: FpRationalFunction) -> FpRationalFunction:
    # A common factor of the new numerator and Q divides T(1+T)P, and T does
    # not divide Q, so only 1+T can cancel; the full gcd is needed only then.
    c = f.at0()
    if c == 0:
        return FpRationalFunction._reduced(f.P.shift_down(), f.Q)
    num = (_one_plus_t(f.p) * f.P - f.Q * c).shift_down()
    if not num or (_at_minus_one(f.Q) == 0 and _at_minus_one(num) == 0):
        return FpRationalFunction(num, f.Q)
    return FpRationalFunction._reduced(num, f.Q)


@dataclass
class SeriesOrbit:
    states: list[FpRationalFunction]
    preperiod: int
    period: int


def smap_orbit(f: FpRationalFunction, max_steps: int = 10**6) -> SeriesOrbit:
    """Iterate S until a state repeats.

    S never increases the height, and finitely many reduced P/Q have height
    <= H(f), so a repeat always occurs; ``max_steps`` is a safety net only.
    """
    seen = {f: 0}
    states = [f]
    for i in range(1, max_steps + 1):
        f = smap(f)
        states.append(f)
        if f in seen:
            return SeriesOrbit(states, seen[f], i - seen[f])
        seen[f] = i
    raise RuntimeError("S-orbit did not repeat within max_steps")


def phi_series(f: FpRationalFunction, n: int) -> FpSeriesApprox:
    out = []
    for _ in range(n):
        out.append(f.at0())
        f = smap(f)
    return FpSeriesApprox(f.p, tuple(out))


def phi_series_exact(f: FpRationalFunction) -> tuple[tuple[int, ...], tuple[int, ...]]:
    """phi(f) as (preperiod, period) coefficient blocks."""
    orb = smap_orbit(f)
    c = [s.at0() for s in orb.states]
    return tuple(c[: orb.preperiod]), tuple(c[orb.preperiod : orb.preperiod + orb.period])


def _inv_one_plus_t(p: int, n: int) -> list[int]:
    return [(-1) ** i % p for i in range(n)]


def _mul_trunc(a: list[int], b: list[int], n: int, p: int) -> list[int]:
    out = [0] * n
    for i, x in enumerate(a[:n]):
        if x:
            for j in range(n - i):
                out[i + j] += x * b[j]
    return [x % p for x in out]


def phi_series_inverse(g: FpSeriesApprox) -> FpSeriesApprox:
    """sum_{n<N} a_n T^n / (1+T)^{r_n} truncated to N coefficients.

    r_n counts the nonzero coefficients among a_0..a_n.
    """
    p, n = g.p, len(g.coeffs)
    inv = _inv_one_plus_t(p, n)
    weight = [1] + [0] * (n - 1) if n else []
    total = [0] * n
    for i, a in enumerate(g.coeffs):
        if a:
            weight = _mul_trunc(weight, inv, n, p)
            for j in range(n - i):
                total[i + j] += a * weight[j]
    return FpSeriesApprox(p, tuple(x % p for x in total))


def _poly_t_power(p: int, k: int) -> FpPoly:
    return FpPoly(p, (0,) * k + (1,))


def periodic_series_value(p: int, pre: Sequence[int], period: Sequence[int]) -> FpRationalFunction:
    """The rational function whose expansion is pre followed by period repeated."""
    head = FpPoly(p, tuple(pre))
    block = FpPoly(p, tuple(period))
    num = head * (FpPoly.const(p, 1) - _poly_t_power(p, len(period))) + block * _poly_t_power(p, len(pre))
    return FpRationalFunction(num, FpPoly.const(p, 1) - _poly_t_power(p, len(period)))


def _binomial_poly(p: int, n: int) -> FpPoly:
    """(1+T)^n over F_p, coefficients from Lucas' theorem."""

    def c(k: int) -> int:
        out, a, b = 1, n, k
        while b:
            out = out * math.comb(a % p, b % p) % p
            a, b = a // p, b // p
        return out

    return FpPoly(p, [c(k) for k in range(n + 1)])


def _weighted_numerator(p: int, coeffs: Sequence[int], start: int) -> tuple[FpPoly, int]:
    """N and R with sum_i a_i T^(start+i) / (1+T)^(r0 + r_i) = N / (1+T)^(r0 + R).

    r_i counts nonzero coefficients up to i; one multiply by 1+T per nonzero term.
    """
    num = FpPoly(p, ())
    r = 0
    for i, a in enumerate(coeffs):
        if a % p:
            r += 1
            num = num * _one_plus_t(p) + _poly_t_power(p, start + i) * a
    return num, r


def phi_series_inverse_exact(p: int, pre: Sequence[int], period: Sequence[int]) -> FpRationalFunction:
    """phi^-1 of an eventually periodic stream, in closed form.

    The tail is geometric with ratio T^K / (1+T)^R for a period of length K
    holding R nonzero coefficients.  With head = N_h / (1+T)^r and one
    period = N_b / (1+T)^(r+R) the value is
    (N_h ((1+T)^R - T^K) + N_b) / ((1+T)^r ((1+T)^R - T^K)).
    """
    if not is_prime(p):
        raise DomainError(f"p={p} is not prime")
    n_head, r_pre = _weighted_numerator(p, pre, 0)
    n_block, big_r = _weighted_numerator(p, period, len(pre))
    lead = _binomial_poly(p, r_pre)
    if big_r == 0:
        return FpRationalFunction(n_head, lead)
    geo = _binomial_poly(p, big_r) - _poly_t_power(p, len(period))
    return FpRationalFunction(n_head * geo + n_block, lead * geo)
