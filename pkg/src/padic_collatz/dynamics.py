"""The generalized Collatz map g_{p,q}, its orbits, periodic points and cycles.

g_{p,q}(u) = u/p if p | u, else (q u + eps0(-q u)) / p, for u in Z_p.

On a rational a/b with b prime to p the map never changes b, so orbits are
computed on numerators over a fixed denominator; equal numerators mean equal
states.
"""

from __future__ import annotations

import itertools
import logging
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterator, NamedTuple

from .padic import DomainError, Params, Rational, as_fraction, eps0

log = logging.getLogger(__name__)


def step(u: Rational, params: Params) -> Fraction:
    u = as_fraction(u)
    p, q = params.p, params.q
    if eps0(u, p) == 0:
        return u / p
    return (q * u + eps0(-q * u, p)) / p


def step_int(n: int, p: int, q: int) -> int:
    """g_{p,q} on an integer."""
    if n % p == 0:
        return n // p
    qn = q * n
    return (qn + (-qn) % p) // p


def iterate_int(n: int, p: int, q: int, steps: int) -> int:
    """g^steps on an integer; for p = 2 a run of halvings is one shift."""
    while steps > 0:
        if n == 0:
            return 0
        if p == 2 and not n & 1:
            k = min((n & -n).bit_length() - 1, steps)
            n >>= k
            steps -= k
        else:
            n = step_int(n, p, q)
            steps -= 1
    return n


def _engine(u: Fraction, params: Params):
    """(numerator, denominator, step function on numerators, digit function)."""
    p, q = params.p, params.q
    b = u.denominator
    if b % p == 0:
        raise DomainError(f"denominator of {u} is divisible by p={p}")
    binv = pow(b, -1, p)

    def digit(a: int) -> int:
        return -q * a * binv % p

    def nxt(a: int) -> int:
        e = -q * a * binv % p
        if e == 0:
            return a // p
        return (q * a + e * b) // p

    return u.numerator, b, nxt, digit


@dataclass
class OrbitRecord:
    """States u_0..u_n with digits a_i = eps0(-q u_i) and counts r_i.

    ``r[i]`` counts the indices j <= i with a_j != 0.  When ``cycle`` is
    ``(preperiod, period)`` the last state repeats ``states[preperiod]``.
    """

    params: Params
    states: list[Fraction]
    digits: list[int]
    r: list[int]
    cycle: tuple[int, int] | None = None
    truncated: bool = False

    @property
    def periodic(self) -> bool:
        return self.cycle is not None

    def to_json(self) -> dict:
        return {
            "p": self.params.p,
            "q": self.params.q,
            "states": [str(s) for s in self.states],
            "digits": self.digits,
            "r": self.r,
            "cycle": list(self.cycle) if self.cycle else None,
            "truncated": self.truncated,
        }


def orbit(u: Rational, params: Params, max_steps: int) -> OrbitRecord:
    """Iterate g from u until a state repeats or ``max_steps`` steps were taken."""
    if max_steps < 1:
        raise ValueError("max_steps must be >= 1")
    u = as_fraction(u)
    a, b, nxt, digit = _engine(u, params)
    p, q = params.p, params.q
    nums = [a]
    seen = {a: 0}
    cycle = None
    for _ in range(max_steps):
        a = nxt(a)
        nums.append(a)
        if a in seen:
            start = seen[a]
            cycle = (start, len(nums) - 1 - start)
            break
        seen[a] = len(nums) - 1
    digits = [digit(x) for x in nums]
    r, count = [], 0
    for i, d in enumerate(digits):
        if d:
            count += 1
        r.append(count)
        if i + 1 < len(nums):
            # p u_{n+1} = q^chi u_n + a_n, on numerators over b
            lhs = p * nums[i + 1]
            rhs = (q if d else 1) * nums[i] + d * b
            assert lhs == rhs, f"recurrence broken at index {i}"
    states = [Fraction(x, b) for x in nums]
    return OrbitRecord(params, states, digits, r, cycle, truncated=cycle is None)


def orbit_digits(u: Rational, params: Params, n: int) -> list[int]:
    """The first n digits eps0(-q u_i) along the orbit of u."""
    a, _, nxt, digit = _engine(as_fraction(u), params)
    out = []
    for _ in range(n):
        out.append(digit(a))
        a = nxt(a)
    return out


def brent_cycle(u: Rational, params: Params, max_steps: int) -> tuple[int, int] | None:
    """(preperiod, period) by Brent's algorithm in O(1) memory, None past the budget."""
    a0, _, nxt, _ = _engine(as_fraction(u), params)
    power = lam = 1
    tortoise, hare = a0, nxt(a0)
    steps = 1
    while tortoise != hare:
        if steps >= max_steps:
            return None
        if power == lam:
            tortoise = hare
            power *= 2
            lam = 0
        hare = nxt(hare)
        lam += 1
        steps += 1
    tortoise = hare = a0
    for _ in range(lam):
        hare = nxt(hare)
    mu = 0
    while tortoise != hare:
        tortoise, hare = nxt(tortoise), nxt(hare)
        mu += 1
    return mu, lam


class Periodicity(NamedTuple):
    periodic: bool
    preperiod: int | None
    period: int | None
    truncated: bool
    steps_budget: int


def height_step_bound(u: Rational, params: Params) -> int:
    """For q < p: a step count within which the orbit of u must repeat.

    Numerators satisfy |a'| <= (q|a| + (p-1)b)/p, so every state stays below
    M = max(|a_0|, (p-1)b/(p-q)) in absolute value and at most 2M+1 states exist.
    """
    p, q = params.p, params.q
    if q >= p:
        raise DomainError("a height bound exists only for q < p")
    u = as_fraction(u)
    b = u.denominator
    m = max(abs(u.numerator), -(-(p - 1) * b // (p - q)))
    return 2 * m + 1


def is_ultimately_periodic(
    u: Rational, params: Params, max_steps: int | None = None, low_memory: bool = False
) -> Periodicity:
    """Decide periodicity within a step budget.

    With q < p and no budget given the budget is ``height_step_bound`` and a
    periodic verdict is guaranteed.  Exhausting the budget yields
    ``truncated=True``, never a claim of aperiodicity.
    """
    bounded = params.q < params.p
    if max_steps is None:
        # Brent's search may need up to ~4x the states before it sees the repeat
        max_steps = (4 if low_memory else 1) * height_step_bound(u, params) if bounded else 10**6
    if low_memory:
        found = brent_cycle(u, params, max_steps)
    else:
        found = _hash_cycle(u, params, max_steps)
    if found is None:
        if bounded and not low_memory and max_steps >= height_step_bound(u, params):
            raise AssertionError(f"q < p orbit of {u} failed to repeat within its height bound")
        return Periodicity(False, None, None, True, max_steps)
    return Periodicity(True, found[0], found[1], False, max_steps)


def _hash_cycle(u: Rational, params: Params, max_steps: int) -> tuple[int, int] | None:
    a, _, nxt, _ = _engine(as_fraction(u), params)
    seen = {a: 0}
    for i in range(1, max_steps + 1):
        a = nxt(a)
        if a in seen:
            return seen[a], i - seen[a]
        seen[a] = i
    return None


def iterate(u: Rational, params: Params, n: int) -> Fraction:
    """g^n(u)."""
    u = as_fraction(u)
    a, b, nxt, _ = _engine(u, params)
    for _ in range(n):
        a = nxt(a)
    return Fraction(a, b)


# -- periodic points ---------------------------------------------------------


@dataclass(frozen=True)
class PeriodicSpec:
    """Data of a k-periodic point: nonzero digits ``a`` at positions psi[:ell]."""

    k: int
    ell: int
    a: tuple[int, ...]
    psi: tuple[int, ...]

    def __post_init__(self):
        assert len(self.a) == self.ell and len(self.psi) == self.ell + 1
        assert self.psi[-1] == self.k
        assert all(x < y for x, y in zip(self.psi, self.psi[1:]))
        assert all(d != 0 for d in self.a)

    def value(self, params: Params) -> Fraction:
        p, q = params.p, params.q
        num = sum(ai * p**si * q ** (self.ell - i - 1) for i, (ai, si) in enumerate(zip(self.a, self.psi)))
        den = q**self.ell - p**self.k
        assert den != 0
        return Fraction(-num, den)


def periodic_specs(k: int, params: Params) -> Iterator[PeriodicSpec]:
    """All specs, ordered by ell, then positions, then digit tuple."""
    if k < 1:
        raise ValueError("k must be >= 1")
    for ell in range(k + 1):
        for positions in itertools.combinations(range(k), ell):
            for a in itertools.product(range(1, params.p), repeat=ell):
                yield PeriodicSpec(k, ell, a, positions + (k,))


def enumerate_periodic(k: int, params: Params, verify: bool = True) -> list[Fraction]:
    """The p^k solutions of g^k(u) = u, sorted."""
    values = {spec.value(params) for spec in periodic_specs(k, params)}
    assert len(values) == params.p**k, "periodic points are not distinct"
    if verify:
        for u in values:
            if iterate(u, params, k) != u:
                raise AssertionError(f"{u} is not {k}-periodic")
    return sorted(values)


def catalan_search(p: int, q: int, k_max: int, ell_max: int) -> list[tuple[int, int, int]]:
    """All (k, ell, s) with 1 <= k <= k_max, 0 <= ell <= ell_max and q^ell - p^k = s = +-1."""
    powers = {q**ell: ell for ell in range(ell_max + 1)}
    out = []
    for k in range(1, k_max + 1):
        pk = p**k
        for s in (-1, 1):
            ell = powers.get(pk + s)
            if ell is not None:
                out.append((k, ell, s))
    return sorted(out, key=lambda t: (t[2], t[0]))


# -- cycles ------------------------------------------------------------------


def _rotation_key(x: Fraction):
    return (abs(x.numerator), 0 if x < 0 else 1)


@dataclass(frozen=True)
class Cycle:
    """A periodic orbit, listed from its member of smallest absolute value."""

    params: Params
    members: tuple[Fraction, ...]

    @classmethod
    def from_members(cls, params: Params, members) -> Cycle:
        members = [as_fraction(x) for x in members]
        i = min(range(len(members)), key=lambda j: _rotation_key(members[j]))
        return cls(params, tuple(members[i:] + members[:i]))

    def verify(self) -> None:
        ms = self.members
        if len(set(ms)) != len(ms):
            raise AssertionError("cycle members are not distinct")
        for i, x in enumerate(ms):
            if step(x, self.params) != ms[(i + 1) % len(ms)]:
                raise AssertionError(f"g({x}) is not the next cycle member")

    @property
    def period(self) -> int:
        return len(self.members)

    def sort_key(self):
        return (*_rotation_key(self.members[0]), len(self.members), self.members)


class CycleIdentity(NamedTuple):
    numerator: int
    denominator: int
    quotient: int | Fraction


def cycle_identity(cycle: Cycle) -> CycleIdentity:
    """Exact identity  u = -numerator / denominator  for the first member u.

    numerator = sum_i a_i p^psi(i) q^(ell-1-i), denominator = q^ell - p^k,
    quotient = numerator / denominator (so u = -quotient).
    """
    p, q = cycle.params.p, cycle.params.q
    k = cycle.period
    nonzero = [(i, eps0(-q * x, p)) for i, x in enumerate(cycle.members) if eps0(-q * x, p)]
    ell = len(nonzero)
    num = sum(a * p**pos * q ** (ell - 1 - i) for i, (pos, a) in enumerate(nonzero))
    den = q**ell - p**k
    quotient = Fraction(num, den)
    if quotient.denominator == 1:
        quotient = quotient.numerator
    assert quotient * den == num
    assert -quotient == cycle.members[0], "identity does not reproduce the cycle"
    return CycleIdentity(num, den, quotient)


@dataclass
class CycleSearchResult:
    params: Params
    u_min: int
    u_max: int
    cycles: list[Cycle]
    truncated: list[int] = field(default_factory=list)
    escaped: list[int] = field(default_factory=list)

    @property
    def suspected_divergent(self) -> list[int]:
        return sorted(self.truncated + self.escaped)


_TRUNCATED = -1
_ESCAPED = -2


def _search_shard(p: int, q: int, lo: int, hi: int, max_steps: int, escape_bits: int):
    known: dict[int, int] = {}
    cycles: list[tuple[int, ...]] = []
    truncated, escaped = [], []
    for s in range(lo, hi + 1):
        if s not in known:
            path: list[int] = []
            local: dict[int, int] = {}
            x = s
            while True:
                if x in known:
                    verdict = known[x]
                    break
                if x in local:
                    cycles.append(tuple(path[local[x]:]))
                    verdict = len(cycles) - 1
                    break
                if len(path) > max_steps:
                    verdict = _TRUNCATED
                    break
                if x.bit_length() > escape_bits:
                    verdict = _ESCAPED
                    break
                local[x] = len(path)
                path.append(x)
                x = step_int(x, p, q)
            for y in path:
                known[y] = verdict
            known.setdefault(s, verdict)
        v = known[s]
        if v == _TRUNCATED:
            truncated.append(s)
        elif v == _ESCAPED:
            escaped.append(s)
    return cycles, truncated, escaped


def integer_cycle_search(
    params: Params,
    u_min: int,
    u_max: int,
    max_steps: int = 10**6,
    escape_bits: int = 256,
    workers: int = 1,
) -> CycleSearchResult:
    """All cycles reached from integer seeds in [u_min, u_max].

    Orbits whose members exceed 2**escape_bits in absolute value, or which do
    not repeat within ``max_steps``, are reported as suspected divergent.
    Seeds are split into ``workers`` contiguous shards; the merged result does
    not depend on the shard count.
    """
    if u_min > u_max:
        raise ValueError("u_min > u_max")
    p, q = params.p, params.q
    workers = max(1, min(workers, u_max - u_min + 1))
    bounds = [u_min + (u_max - u_min + 1) * i // workers for i in range(workers + 1)]
    shards = [(p, q, bounds[i], bounds[i + 1] - 1, max_steps, escape_bits) for i in range(workers)]
    if workers == 1:
        results = [_search_shard(*shards[0])]
    else:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            results = list(pool.map(_search_shard, *zip(*shards)))
    found: dict[tuple, Cycle] = {}
    truncated, escaped = [], []
    for cycles, tr, es in results:
        for members in cycles:
            c = Cycle.from_members(params, members)
            found.setdefault(c.members, c)
        truncated += tr
        escaped += es
    for c in found.values():
        c.verify()
    if truncated or escaped:
        log.info("%s: %d seeds truncated, %d escaped", params, len(truncated), len(escaped))
    return CycleSearchResult(
        params, u_min, u_max, sorted(found.values(), key=Cycle.sort_key), sorted(truncated), sorted(escaped)
    )


def verify_positive_range(params: Params, n_max: int, target: Cycle, max_steps: int = 10**4) -> list[int]:
    """Check that every 1 <= n <= n_max reaches ``target``; returns the failures.

    Each n is iterated only until it drops below n (already checked) or lands
    in the target cycle.
    """
    p, q = params.p, params.q
    members = {int(x) for x in target.members}
    failures = []
    for n in range(1, n_max + 1):
        x = n
        for _ in range(max_steps):
            if x in members or 0 < x < n:
                break
            x = step_int(x, p, q)
        else:
            failures.append(n)
    return failures

