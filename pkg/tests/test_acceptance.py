"""Acceptance criteria, one test each; every test records a PASS/FAIL line.

The lines are printed in the terminal summary (and inline when run with -s).
"""

import math
import random
import time
from fractions import Fraction

import pytest

from conftest import ACCEPTANCE_LINES
from padic_collatz import diagnostics as dg
from padic_collatz import dynamics as dyn
from padic_collatz import fpseries as fs
from padic_collatz import isometry as iso
from padic_collatz.padic import HenselDigits, Params, delta_shift, hensel_digits, padic_valuation, rational_from_digits
from padic_collatz.reference_table import ROWS

P23 = Params(2, 3)


def record(n: int, name: str, ok: bool, detail: str = "") -> None:
    line = f"criterion {n:2d} {'PASS' if ok else 'FAIL'}  {name}" + (f"  [{detail}]" if detail else "")
    ACCEPTANCE_LINES[n] = line
    print(line)
    assert ok, line


def random_units(rng: random.Random, p: int, count: int) -> list[Fraction]:
    out = []
    while len(out) < count:
        b = rng.randrange(1, 10**4)
        if b % p:
            out.append(Fraction(rng.randrange(-10**9, 10**9), b))
    return out


def test_01_cycle_table():
    t0 = time.time()
    by_pair: dict[tuple[int, int], list[set]] = {}
    truncated = 0
    for p, q in sorted({(r.p, r.q) for r in ROWS}):
        res = dyn.integer_cycle_search(Params(p, q), -6000, -1, max_steps=10**6)
        by_pair[(p, q)] = [set(c.members) for c in res.cycles]
        truncated += len(res.truncated)
    problems = []
    for row in ROWS:
        listed = set(row.cycle)
        cycles = by_pair[(row.p, row.q)]
        if listed in cycles:
            continue
        if row.partial and any(listed <= c for c in cycles):
            continue
        near = [sorted(c) for c in cycles if c & listed]
        problems.append(f"{row.p},{row.q},{row.u}: computed {near}")
    detail = f"{len(ROWS)} rows, {time.time() - t0:.1f}s, truncated seeds {truncated}"
    record(1, "cycle table reproduction", not problems, "; ".join(problems) or detail)


def test_02_minus17_identity():
    c = dyn.Cycle.from_members(P23, [-17, -25, -37, -55, -82, -41, -61, -91, -136, -68, -34])
    ident = dyn.cycle_identity(c)
    ok = ident.denominator == 139 == 3**7 - 2**11 and abs(ident.quotient) == 17
    record(2, "-17 cycle identity", ok, f"{ident}")


PAIRS_34 = [(2, 3), (3, 5), (5, 13)]


def test_03_isometry():
    rng = random.Random(3)
    bad = 0
    for p, q in PAIRS_34:
        params = Params(p, q)
        us, vs = random_units(rng, p, 1000), random_units(rng, p, 1000)
        for u, v in zip(us, vs):
            d = iso.phi(u, params, 64).first_difference(iso.phi(v, params, 64))
            expected = padic_valuation(u - v, p)
            bad += d != (expected if expected < 64 else math.inf)
    record(3, "phi is an isometry (1000 pairs x 3 params, N=64)", bad == 0, f"{bad} mismatches")


def test_04_conjugation():
    rng = random.Random(4)
    bad = 0
    for p, q in PAIRS_34:
        params = Params(p, q)
        for u in random_units(rng, p, 1000):
            lhs = iso.phi(dyn.step(u, params), params, 63)
            rhs = delta_shift(iso.phi(u, params, 64))
            bad += lhs.digits != rhs.digits
    record(4, "phi o g = delta o phi (1000 seeds x 3 params, N=63)", bad == 0, f"{bad} mismatches")


def test_05_special_values():
    pairs = [(2, 3), (2, 5), (3, 5), (3, 7), (5, 7), (5, 13), (7, 17), (11, 13), (5, 2), (7, 3)]
    bad = [
        (p, q)
        for p, q in pairs
        if iso.phi_inverse_exact(HenselDigits(p, (), (p - 1,)), Params(p, q)) != Fraction(1 - p, q - p)
    ]
    one = rational_from_digits(iso.phi_exact(1, P23))
    record(5, "special values of phi and its inverse", not bad and one == Fraction(-1, 3), f"bad={bad}, phi(1)={one}")


def test_06_periodic_census():
    bad = []
    for params in (Params(2, 3), Params(3, 5)):
        for k in range(1, 11):
            vals = dyn.enumerate_periodic(k, params, verify=False)
            if len(vals) != params.p**k or len(set(vals)) != len(vals):
                bad.append((params.p, k, len(vals)))
            for u in vals:
                x = u
                for _ in range(k):
                    x = dyn.step(x, params)
                if x != u:
                    bad.append((params.p, k, u))
    record(6, "periodic-point census p^k, k<=10", not bad, f"(2,3) and (3,5), problems={bad[:5]}")


def test_07_catalan():
    sols = dyn.catalan_search(2, 3, 64, 64)
    minus = {(k, l) for k, l, s in sols if s == -1}
    plus = {(k, l) for k, l, s in sols if s == 1}
    record(7, "Catalan solutions for (2,3)", minus == {(1, 0), (2, 1)} and plus == {(1, 1), (3, 2)}, f"{minus} {plus}")


def test_08_mean_drift_bracket():
    reps = [dg.mean_drift(P23, m, "full") for m in (8, 10, 12)]
    ok = all(r.in_bracket and r.sample_size == 2**r.m for r in reps)
    detail = ", ".join(f"m={r.m}: {float(r.empirical_mean):.4f} in [{r.lower_bound:.3f}, {r.upper_bound:.3f}]" for r in reps)
    record(8, "mean height drift inside the bracket", ok, detail)


def test_09_candidate():
    pairs = {(r.p, r.q) for r in ROWS} | {(2, 3), (3, 5), (2, 5)}
    bad = [pq for pq in pairs if dg.candidate_test(Params(*pq)) != (pq[1] ** (pq[0] - 1) < pq[0] ** pq[0])]
    ok = not bad and dg.candidate_test(P23) and dg.candidate_test(Params(3, 5)) and not dg.candidate_test(Params(2, 5))
    record(9, "candidate classifier", ok, f"{len(pairs)} pairs, bad={bad}")


def test_10_density():
    bad = []
    for u in (7, 27, 97):
        psi = iso.psi_function(u, P23, 10)
        for n in range(1, 11):
            w = iso.density_approximant(u, n)
            if padic_valuation(u - w.w_n, 2) < psi.values[n - 1]:
                bad.append((u, n, "distance"))
            # g^k(w) = 1, iterated with plain integer arithmetic
            if dyn.iterate_int(w.w_n, 2, 3, w.psi_prime_n) != 1:
                bad.append((u, n, "orbit"))
    w = iso.density_approximant(7, 2)
    record(10, "density witnesses", not bad and w.w_n == 3, f"bad={bad}")


def test_11_psi_prime():
    t0 = time.time()
    s = iso.psi_prime_omega(1, 1, 200)
    digits = dyn.orbit_digits(1, P23, 400)
    positions = [i for i, d in enumerate(digits) if d]
    bad = []
    for n, k in enumerate(s.values, 1):
        sn = sum(2 ** positions[i] * 3 ** (n - 1 - i) for i in range(n))
        if pow(2, k, 3**n) != sn % 3**n or (n >= 2 and k != 2 * n):
            bad.append(n)
    elapsed = time.time() - t0
    record(11, "psi'_1 for u=1 equals 2n", not bad and len(s.values) == 200 and elapsed < 10, f"bad={bad[:5]}, {elapsed:.2f}s")


def test_12_series_suite():
    t0 = time.time()
    rng = random.Random(12)
    bad = []
    for p in (2, 3):
        funcs = []
        while len(funcs) < 500:
            num = [rng.randrange(p) for _ in range(rng.randrange(0, 10))]
            den = [rng.randrange(1, p)] + [rng.randrange(p) for _ in range(rng.randrange(0, 9))]
            f = fs.FpRationalFunction.from_coeffs(p, num, den)
            if fs.series_height(f) <= 8:
                funcs.append(f)
        for f, g in zip(funcs, funcs[1:] + funcs[:1]):
            if fs.phi_series(f, 64).first_difference(fs.phi_series(g, 64)) != f.expand(64).first_difference(g.expand(64)):
                bad.append(("isometry", f))
            orb = fs.smap_orbit(f)
            hs = [fs.series_height(x) for x in orb.states]
            if any(b > a for a, b in zip(hs, hs[1:])):
                bad.append(("height", f))
            pre, per = fs.phi_series_exact(f)
            if fs.phi_series_inverse_exact(p, pre, per) != f:
                bad.append(("rational->periodic", f))
        for _ in range(500):
            pre = [rng.randrange(p) for _ in range(rng.randrange(0, 7))]
            per = [rng.randrange(p) for _ in range(rng.randrange(1, 7))]
            g = fs.phi_series_inverse_exact(p, pre, per)
            stream = [pre[i] if i < len(pre) else per[(i - len(pre)) % len(per)] for i in range(40)]
            if list(fs.phi_series(g, 40).coeffs) != stream:
                bad.append(("periodic->rational", pre, per))
    elapsed = time.time() - t0
    record(12, "F_p[[T]] isometry, height, rationality", not bad and elapsed < 30, f"bad={bad[:3]}, {elapsed:.1f}s")


def test_13_q_below_p():
    bad = []
    for params in (Params(5, 2), Params(7, 3)):
        for u in range(-10**4, 10**4 + 1):
            v = dyn.is_ultimately_periodic(u, params, max_steps=10**5)
            if not v.periodic or v.truncated:
                bad.append((params.p, params.q, u))
    record(13, "q < p: every |u| <= 10^4 ultimately periodic", not bad, f"bad={bad[:5]}")


def test_14_positive_sweep():
    t0 = time.time()
    target = dyn.Cycle.from_members(P23, [1, 2])
    failures = dyn.verify_positive_range(P23, 10**6, target)
    elapsed = time.time() - t0
    record(
        14,
        "1 <= u <= 10^6 reach (1,2) under (2,3); remaining items are finite-horizon diagnostics only",
        not failures and elapsed < 60,
        f"{len(failures)} failures, {elapsed:.1f}s",
    )
