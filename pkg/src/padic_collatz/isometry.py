"""The isometry phi_{p,q} of Z_p conjugating g_{p,q} to the digit shift.

phi(u) is the p-adic integer whose n-th Hensel digit is eps0(-q u_n), where
u_n = g^n(u).  Its inverse is  phi^-1(sum a_i p^i) = -sum a_i p^i / q^{r_i}
with r_i the number of nonzero digits among a_0..a_i.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction

from . import dynamics
from .padic import (
    DomainError,
    HenselDigits,
    PadicApprox,
    Params,
    Rational,
    as_fraction,
    delta_shift,
    rational_from_digits,
    hensel_digits,
    padic_valuation,
    split_valuation,
)

COLLATZ = Params(2, 3)


def phi(u: Rational, params: Params, n: int) -> PadicApprox:
    """First n digits of phi_{p,q}(u)."""
    return PadicApprox(params.p, tuple(dynamics.orbit_digits(u, params, n)))


def phi_exact(u: Rational, params: Params, max_steps: int = 10**6) -> HenselDigits | None:
    """phi(u) as an exact periodic stream, or None if the orbit does not repeat in budget."""
    rec = dynamics.orbit(u, params, max_steps)
    if rec.cycle is None:
        return None
    pre, per = rec.cycle
    return HenselDigits(params.p, tuple(rec.digits[:pre]), tuple(rec.digits[pre : pre + per]))


def _partial_sum(digits, p: int, q: int, r0: int = 0) -> tuple[Fraction, int]:
    """sum a_i p^i / q^{r_i} over the given digits, and the final r."""
    total = Fraction(0)
    r = r0
    for i, a in enumerate(digits):
        if a:
            r += 1
            total += Fraction(a * p**i, q**r)
    return total, r


def phi_inverse_exact(v: HenselDigits, params: Params) -> Fraction:
    """The rational u with phi(u) = v.

    The periodic tail is a geometric series with ratio p^K / q^R (K the
    period length, R its nonzero digit count) and is summed in closed form.
    """
    p, q = params.p, params.q
    if v.p != p:
        raise ValueError("digit base does not match params")
    head, r_pre = _partial_sum(v.preperiod, p, q)
    block, r_end = _partial_sum(v.period, p, q, r_pre)
    big_r = r_end - r_pre
    lead = Fraction(p) ** len(v.preperiod)
    if big_r == 0:
        tail = Fraction(0)  # period of zeros
    else:
        tail = lead * block / (1 - Fraction(p ** len(v.period), q**big_r))
    return -(head + tail)


def phi_inverse_approx(v: PadicApprox, params: Params) -> PadicApprox:
    """-sum_{i<N} a_i p^i / q^{r_i} reduced mod p^N."""
    p, q = params.p, params.q
    n = v.precision
    mod = p**n
    qinv = pow(q, -1, mod) if mod > 1 else 0
    total, weight = 0, 1
    pi = 1
    for a in v.digits:
        if a:
            weight = weight * qinv % mod
            total += a * pi * weight
        pi *= p
    residue = -total % mod
    out = hensel_digits(residue, p, n)
    return PadicApprox(p, out.digits, v.valuation_offset)


def phi_qp(u: Rational, params: Params, n: int) -> PadicApprox:
    """phi extended to Q_p by phi(p^m w) = p^m phi(w)."""
    u = as_fraction(u)
    if u == 0:
        return PadicApprox(params.p, (0,) * n)
    m, w = split_valuation(u, params.p)
    return PadicApprox(params.p, phi(w, params, n).digits, m)


def conjugation_check(u: Rational, params: Params, n: int) -> bool:
    """phi(g(u)) == delta(phi(u)) on the first n-1 digits."""
    lhs = phi(dynamics.step(u, params), params, n - 1)
    rhs = delta_shift(phi(u, params, n))
    return lhs.digits == rhs.digits


# -- nonzero digit positions -------------------------------------------------


@dataclass(frozen=True)
class PsiFunction:
    """Positions psi(0) < psi(1) < ... of the nonzero digits of phi(u).

    ``digits`` holds a_{psi(i)}.  ``exhausted`` means the orbit reached 0, so no
    further nonzero digit exists.
    """

    values: tuple[int, ...]
    digits: tuple[int, ...]
    exhausted: bool


def psi_function(u: Rational, params: Params, count: int, max_steps: int = 10**6) -> PsiFunction:
    a, _, nxt, digit = dynamics._engine(as_fraction(u), params)
    values, digits = [], []
    i = 0
    while len(values) < count:
        if a == 0:
            return PsiFunction(tuple(values), tuple(digits), True)
        if i >= max_steps:
            raise RuntimeError(f"step budget {max_steps} exhausted before {count} nonzero digits")
        d = digit(a)
        if d:
            values.append(i)
            digits.append(d)
        a = nxt(a)
        i += 1
    return PsiFunction(tuple(values), tuple(digits), False)


# -- discrete logarithms -----------------------------------------------------


def discrete_log_prime_power(g: int, target: int, ell: int, n: int) -> int:
    """x in [0, (ell-1) ell^(n-1)) with g^x = target mod ell^n.

    ell must be an odd prime and g a primitive root mod ell^2 (hence mod every
    ell^n).  The exponent is found mod ell by search and then lifted one power
    of ell at a time: at each level the correction c in {0..ell-1} solves a
    linear congruence mod ell.
    """
    if ell == 2:
        raise DomainError("(Z/2^n)^* is not cyclic")
    if target % ell == 0:
        raise DomainError(f"{target} is not a unit mod {ell}")
    g1 = g % ell
    if g1 == 0 or _order(g1, ell) != ell - 1:
        raise DomainError(f"{g} does not generate (Z/{ell}Z)^*")
    x = next(e for e in range(ell - 1) if pow(g1, e, ell) == target % ell)
    if n > 1 and pow(g, ell - 1, ell * ell) == 1:
        raise DomainError(f"{g} is not a primitive root mod {ell}^2")
    order = ell - 1
    for j in range(1, n):
        mod = ell ** (j + 1)
        lower = ell**j
        y = target * pow(g, -x, mod) % mod
        c_rhs = (y - 1) // lower % ell
        h = pow(g, order, mod)
        d = (h - 1) // lower % ell
        c = c_rhs * pow(d, -1, ell) % ell
        x += c * order
        order *= ell
    assert pow(g, x, ell**n) == target % ell**n
    return x


def _order(a: int, n: int) -> int:
    k, x = 1, a % n
    while x != 1:
        x = x * a % n
        k += 1
    return k


def _weighted_sum(psi: PsiFunction, p: int, q: int, n: int) -> int:
    """S_n = sum_{i<n} a_{psi(i)} p^psi(i) q^(n-1-i)."""
    s = 0
    for i in range(n):
        s = s * q + psi.digits[i] * p ** psi.values[i]
    return s


@dataclass(frozen=True)
class DensityWitness:
    n: int
    psi_prime_n: int
    v_n: Fraction
    w_n: int
    achieved_distance_exponent: int | float

    def to_json(self) -> dict:
        e = self.achieved_distance_exponent
        return {
            "n": self.n,
            "psi_prime_n": self.psi_prime_n,
            "v_n": str(self.v_n),
            "w_n": self.w_n,
            "achieved_distance_exponent": None if e == math.inf else e,
        }


def density_approximant(u: int, n: int, max_steps: int = 10**6) -> DensityWitness:
    """An integer w close to u 2-adically whose (2,3)-orbit ends in the cycle {1, 2}.

    With psi the nonzero digit positions of phi(u) and
    S_n = sum_{i<n} 2^psi(i) 3^(n-1-i), k is the least exponent above psi(n-1)
    with 2^k = S_n mod 3^n and w = (2^k - S_n) / 3^n.  Then
    phi(w) = sum_{i<n} 2^psi(i) + 2^k / (1 - 4), which agrees with phi(u) on
    every digit below psi(n-1) + 1.
    """
    if u < 0:
        raise DomainError("u must be a nonnegative integer")
    if n < 1:
        raise ValueError("n must be >= 1")
    if u == 0:
        return DensityWitness(n, 0, Fraction(0), 0, math.inf)
    psi = psi_function(u, COLLATZ, n, max_steps)
    if len(psi.values) < n:
        raise RuntimeError(f"phi({u}) has only {len(psi.values)} nonzero digits")
    s = _weighted_sum(psi, 2, 3, n)
    last = psi.values[n - 1]
    order = 2 * 3 ** (n - 1)
    k = discrete_log_prime_power(2, s, 3, n)
    if k <= last:
        k += ((last - k) // order + 1) * order
    w, rem = divmod(2**k - s, 3**n)
    assert rem == 0
    v = sum(Fraction(2) ** e for e in psi.values[:n]) + Fraction(2**k, 1 - 4)
    # phi(w) is known digit by digit: ones at psi(0..n-1), zeros up to k, then (1,0)
    head = [0] * k
    for e in psi.values[:n]:
        head[e] = 1
    stream = HenselDigits(2, tuple(head), (1, 0))
    assert rational_from_digits(stream) == v
    assert phi_inverse_exact(stream, COLLATZ) == w
    # hence g^k(w) = phi^-1(-1/3) = 1; checked in constant memory, w can have ~10^5 bits
    x = dynamics.iterate_int(w, 2, 3, k)
    assert x == 1, f"orbit of approximant {w} did not reach the cycle (1, 2)"
    return DensityWitness(n, k, v, w, padic_valuation(u - w, 2))


@dataclass(frozen=True)
class PsiPrimeSeries:
    """psi'_omega(n) for n = 1..len(values), with running ratios psi'(n)/n."""

    values: tuple[int, ...]
    exhausted: bool

    @property
    def ratios(self) -> list[Fraction]:
        return [Fraction(k, i + 1) for i, k in enumerate(self.values)]

    def liminf_estimate(self) -> Fraction | None:
        """Minimum ratio over the second half of the computed range."""
        r = self.ratios
        return min(r[len(r) // 2 :]) if r else None


def psi_prime_omega(
    u: Rational, omega: Rational, n_max: int, params: Params = COLLATZ, max_steps: int = 10**6
) -> PsiPrimeSeries:
    """psi'_omega(n) = least k >= 0 with omega p^k = S_n mod q^n, for n <= n_max.

    S_n = sum_{i<n} a_{psi(i)} p^psi(i) q^(n-1-i) from the nonzero digits of
    phi(u).  Requires q an odd prime with p a primitive root mod q^2.
    """
    p, q = params.p, params.q
    omega = as_fraction(omega)
    if omega.numerator % q == 0 or omega.denominator % q == 0:
        raise DomainError(f"omega={omega} is not a unit mod {q}")
    psi = psi_function(u, params, n_max, max_steps)
    values = []
    for n in range(1, len(psi.values) + 1):
        mod = q**n
        s = _weighted_sum(psi, p, q, n)
        target = s * omega.denominator * pow(omega.numerator, -1, mod) % mod
        k = discrete_log_prime_power(p, target, q, n)
        assert pow(p, k, mod) == target
        values.append(k)
    return PsiPrimeSeries(tuple(values), psi.exhausted)
