import math
from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from padic_collatz import dynamics as dyn
from padic_collatz.padic import DomainError, Params, eps0
from strategies import pairs, unit_rationals

P23 = Params(2, 3)
MINUS17 = (-17, -25, -37, -55, -82, -41, -61, -91, -136, -68, -34)


def naive_step(u: Fraction, p: int, q: int) -> Fraction:
    # the definition, with eps0 found by search
    if (u.numerator % p) == 0:
        return u / p
    v = -q * u
    e = next(d for d in range(p) if (v.numerator - d * v.denominator) % p == 0)
    return (q * u + e) / p


class TestStep:
    @pytest.mark.parametrize("u,params,out", [(7, P23, 11), (-2, Params(5, 13), -5), (0, P23, 0), (0, Params(7, 3), 0)])
    def test_examples(self, u, params, out):
        assert dyn.step(u, params) == out

    def test_bad_denominator(self):
        with pytest.raises(DomainError):
            dyn.step(Fraction(1, 2), P23)

    @given(pairs.flatmap(lambda pq: st.tuples(st.just(pq), unit_rationals(pq[0]))))
    def test_matches_definition(self, t):
        (p, q), u = t
        out = dyn.step(u, Params(p, q))
        assert out == naive_step(u, p, q)
        assert u.denominator % out.denominator == 0

    @given(pairs, st.integers(-10**30, 10**30))
    def test_step_int(self, pq, n):
        p, q = pq
        assert dyn.step_int(n, p, q) == dyn.step(n, Params(p, q))


class TestOrbit:
    def test_one(self):
        rec = dyn.orbit(1, P23, 100)
        assert rec.cycle == (0, 2)
        assert rec.states[:3] == [1, 2, 1]

    def test_minus17(self):
        rec = dyn.orbit(-17, P23, 100)
        assert rec.cycle == (0, 11)
        assert tuple(rec.states[:11]) == MINUS17

    def test_zero(self):
        assert dyn.orbit(0, P23, 10).cycle == (0, 1)

    def test_truncated(self):
        rec = dyn.orbit(27, P23, 10)
        assert rec.truncated and rec.cycle is None and not rec.periodic

    @given(pairs.flatmap(lambda pq: st.tuples(st.just(pq), unit_rationals(pq[0], 10**4, 50))))
    def test_invariants(self, t):
        (p, q), u = t
        rec = dyn.orbit(u, Params(p, q), 300)
        for n in range(len(rec.digits)):
            a = rec.digits[n]
            chi = 1 if a else 0
            assert 0 <= a < p
            assert (a == 0) == (rec.states[n].numerator % p == 0)
            if n + 1 < len(rec.states):
                assert p * rec.states[n + 1] == q**chi * rec.states[n] + a
            assert rec.r[n] - (rec.r[n - 1] if n else 0) == chi
        if rec.cycle:
            pre, per = rec.cycle
            assert rec.states[pre + per] == rec.states[pre]

    @given(pairs.flatmap(lambda pq: st.tuples(st.just(pq), unit_rationals(pq[0], 10**4, 50))), st.integers(0, 40))
    def test_partial_sum_identity(self, t, n):
        # u + sum_{i<=n} a_i p^i / q^{r_i} = u_{n+1} p^{n+1} / q^{r_n}
        (p, q), u = t
        params = Params(p, q)
        digits = dyn.orbit_digits(u, params, n + 1)
        r, total = 0, Fraction(0)
        for i, a in enumerate(digits):
            r += a != 0
            total += Fraction(a * p**i, q**r)
        assert u + total == dyn.iterate(u, params, n + 1) * p ** (n + 1) / Fraction(q) ** r


class TestPeriodicity:
    def test_examples(self):
        assert dyn.is_ultimately_periodic(123456789, Params(5, 2)).periodic
        v = dyn.is_ultimately_periodic(27, P23, 1000)
        assert v.periodic and not v.truncated
        v = dyn.is_ultimately_periodic(0, P23, 10)
        assert (v.preperiod, v.period) == (0, 1)

    def test_truncation_is_distinct(self):
        v = dyn.is_ultimately_periodic(27, P23, 5)
        assert not v.periodic and v.truncated

    @pytest.mark.parametrize("u", [27, -17, 97, 10**20 + 7])
    def test_brent_agrees(self, u):
        a = dyn.is_ultimately_periodic(u, P23, 10**4)
        b = dyn.is_ultimately_periodic(u, P23, 10**4, low_memory=True)
        assert (a.preperiod, a.period) == (b.preperiod, b.period)

    @settings(max_examples=300)
    @given(
        st.sampled_from([(5, 2), (7, 3), (5, 3)]).flatmap(
            lambda pq: st.tuples(st.just(pq), st.integers(-10**4, 10**4), st.integers(1, 10**4))
        )
    )
    def test_q_less_than_p_bounded(self, t):
        (p, q), a, b = t
        if b % p == 0:
            b += 1
        u = Fraction(a, b)
        params = Params(p, q)
        bound = dyn.height_step_bound(u, params)
        v = dyn.is_ultimately_periodic(u, params)
        assert v.periodic and v.preperiod + v.period <= bound
        # naive height stays bounded along the orbit
        c = max(abs(u.numerator), u.denominator)
        m = max(c, math.ceil((p - 1) * u.denominator / (p - q)))
        for x in dyn.orbit(u, params, bound).states:
            assert abs(x) * u.denominator <= m and u.denominator % x.denominator == 0


class TestEnumeratePeriodic:
    def test_k1(self):
        assert dyn.enumerate_periodic(1, P23) == [-1, 0]

    def test_k2(self):
        assert dyn.enumerate_periodic(2, P23) == [-1, 0, 1, 2]

    def test_k11_contains_minus17(self):
        assert -17 in dyn.enumerate_periodic(11, P23)

    @pytest.mark.parametrize("p,q,kmax", [(2, 3, 12), (3, 5, 8), (5, 7, 6), (3, 2, 7)])
    def test_cardinality(self, p, q, kmax):
        params = Params(p, q)
        for k in range(1, kmax + 1):
            assert len(dyn.enumerate_periodic(k, params)) == p**k

    def test_brute_force_small(self):
        # every integer in a window with g^k(u) = u shows up in the formula list
        for k in range(1, 7):
            vals = set(dyn.enumerate_periodic(k, P23))
            for u in range(-200, 200):
                if dyn.iterate(u, P23, k) == u:
                    assert u in vals

    def test_spec_order(self):
        specs = list(dyn.periodic_specs(2, P23))
        assert [s.ell for s in specs] == sorted(s.ell for s in specs)


class TestCatalan:
    def test_23(self):
        sols = dyn.catalan_search(2, 3, 64, 64)
        assert {(k, l) for k, l, s in sols if s == -1} == {(1, 0), (2, 1)}
        assert {(k, l) for k, l, s in sols if s == 1} == {(1, 1), (3, 2)}

    def test_57_empty(self):
        assert dyn.catalan_search(5, 7, 64, 64) == []

    def test_brute_force(self):
        for p, q in [(2, 3), (2, 5), (3, 5), (2, 7)]:
            expected = sorted(
                (k, l, s) for k in range(1, 20) for l in range(20) for s in (-1, 1) if q**l - p**k == s
            )
            assert sorted(dyn.catalan_search(p, q, 19, 19)) == expected


class TestCycles:
    def test_rotation(self):
        c = dyn.Cycle.from_members(P23, [-34, -17, -25, -37, -55, -82, -41, -61, -91, -136, -68])
        assert tuple(c.members) == MINUS17
        c.verify()

    def test_rotation_ties_negative_first(self):
        c = dyn.Cycle.from_members(P23, [Fraction(1, 5), Fraction(-1, 5)])
        assert c.members[0] == Fraction(-1, 5)

    def test_verify_rejects(self):
        with pytest.raises(AssertionError):
            dyn.Cycle.from_members(P23, [1, 3]).verify()

    def test_identity_minus17(self):
        ident = dyn.cycle_identity(dyn.Cycle.from_members(P23, MINUS17))
        assert ident.denominator == 139 == 3**7 - 2**11
        assert abs(ident.quotient) == 17
        assert ident.numerator == 2363

    def test_identity_one_two(self):
        ident = dyn.cycle_identity(dyn.Cycle.from_members(P23, [1, 2]))
        assert ident.denominator == -1 and -ident.quotient == 1

    def test_identity_zero(self):
        assert dyn.cycle_identity(dyn.Cycle.from_members(P23, [0])) == (0, 3**0 - 2, 0)


class TestSearch:
    def test_23_negative(self):
        res = dyn.integer_cycle_search(P23, -200, -1, 10**4)
        assert MINUS17 in [tuple(c.members) for c in res.cycles]

    def test_719(self):
        res = dyn.integer_cycle_search(Params(7, 19), -100, -1, 10**4)
        assert {-35, -5, -13} in [set(c.members) for c in res.cycles]

    def test_positive(self):
        res = dyn.integer_cycle_search(P23, 1, 100, 10**4)
        assert [tuple(c.members) for c in res.cycles] == [(1, 2)]

    def test_closure(self):
        for c in dyn.integer_cycle_search(Params(5, 7), -500, 500, 10**4).cycles:
            ms = set(c.members)
            assert all(dyn.step(x, c.params) in ms for x in ms)

    def test_shards_deterministic(self):
        a = dyn.integer_cycle_search(Params(3, 11), -700, -1, 10**4, workers=1)
        b = dyn.integer_cycle_search(Params(3, 11), -700, -1, 10**4, workers=3)
        assert a.cycles == b.cycles and a.suspected_divergent == b.suspected_divergent

    def test_truncation_reported(self):
        res = dyn.integer_cycle_search(P23, 27, 27, max_steps=5)
        assert res.truncated == [27] and res.cycles == []

    def test_bad_range(self):
        with pytest.raises(ValueError):
            dyn.integer_cycle_search(P23, 5, 1)

    def test_positive_sweep(self):
        assert dyn.verify_positive_range(P23, 10**4, dyn.Cycle.from_members(P23, [1, 2])) == []


@given(pairs, st.integers(-10**40, 10**40), st.integers(0, 200))
def test_iterate_int_matches_steps(pq, n, k):
    p, q = pq
    x = n
    for _ in range(k):
        x = dyn.step_int(x, p, q)
    assert dyn.iterate_int(n, p, q, k) == x
