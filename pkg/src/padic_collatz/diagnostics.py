"""Height statistics along orbits: tranches, nonzero-digit counts, mean drift.

H(u) is the integer with p^(H-1) <= |u| < p^H (archimedean absolute value).
All heights are computed with integer comparisons only.
"""

from __future__ import annotations

import logging
import math
import random
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from fractions import Fraction

from . import dynamics
from .padic import DomainError, Params, Rational, as_fraction

log = logging.getLogger(__name__)


def _floor_log(a: int, b: int, p: int) -> int:
    """Largest e with p^e <= a/b, for positive integers a, b."""

    def fits(e: int) -> bool:
        return a >= b * p**e if e >= 0 else a * p ** (-e) >= b

    e = math.floor((a.bit_length() - b.bit_length()) / math.log2(p))
    while not fits(e):
        e -= 1
    while fits(e + 1):
        e += 1
    return e


def height(u: Rational, p: int) -> int:
    """The integer H with p^(H-1) <= |u| < p^H."""
    u = as_fraction(u)
    if u == 0:
        raise DomainError("height of 0 is undefined")
    return _floor_log(abs(u.numerator), u.denominator, p) + 1


height_p_scale = height


def height_naive(u: Rational) -> int:
    """max(|a|, |b|) for u = a/b in lowest terms."""
    u = as_fraction(u)
    return max(abs(u.numerator), u.denominator)


def tranche_r(params: Params) -> int | float:
    """Largest r >= 1 with q^(r-1) < p^r; ``math.inf`` when q < p."""
    p, q = params.p, params.q
    if q < p:
        return math.inf
    r = 1
    while q**r < p ** (r + 1):
        r += 1
    return r


def candidate_test(params: Params) -> bool:
    """q^(p-1) < p^p, the condition for a negative mean height drift."""
    return params.q ** (params.p - 1) < params.p**params.p


def alpha(i: int, params: Params) -> int:
    """max{k >= 0 : p^k < q^i}; -1 for i = 0 where the set is empty."""
    if i < 0:
        raise ValueError("i must be >= 0")
    if i == 0:
        return -1
    p, target = params.p, params.q**i
    k = int(i * math.log(params.q) / math.log(p))
    while p**k >= target:
        k -= 1
    while p ** (k + 1) < target:
        k += 1
    return k


@dataclass
class HeightProfile:
    seed: Fraction
    H0: int
    H_series: list[int | None]
    drift_series: list[int | None]


def height_profile(u: Rational, params: Params, n_steps: int) -> HeightProfile:
    """H(u_n) for n <= n_steps; None where u_n = 0."""
    u = as_fraction(u)
    rec = dynamics.orbit(u, params, n_steps) if n_steps else None
    states = [u] if rec is None else list(rec.states)
    while len(states) <= n_steps:  # extend past a detected cycle
        states.append(dynamics.step(states[-1], params))
    hs = [height(x, params.p) if x else None for x in states[: n_steps + 1]]
    h0 = hs[0]
    return HeightProfile(u, h0, hs, [None if h is None else h - h0 for h in hs])


@dataclass
class TrancheStats:
    """Tranche decomposition of the first r*m digits of phi(u).

    ``ell[i]`` counts tranches with exactly i nonzero digits; ``drift`` is
    H(g^{rm}(u)) - H(u) and [lower, upper] the bracket predicted from the
    tranche counts.  ``height_ok`` is False when H(u) <= min_height, where the
    per-tranche estimates are not guaranteed.
    """

    r: int
    m: int
    ell: list[int]
    e_list: list[int]
    drift: int
    lower: int
    upper: int
    height_ok: bool

    @property
    def nonzero(self) -> int:
        return sum(i * c for i, c in enumerate(self.ell))

    @property
    def within_bounds(self) -> bool:
        return self.lower <= self.drift <= self.upper


def tranche_stats(u: Rational, params: Params, m: int, min_height: int | None = None) -> TrancheStats:
    r = tranche_r(params)
    if r == math.inf:
        raise DomainError("tranches need q > p")
    u = as_fraction(u)
    if min_height is None:
        min_height = m + r
    digits = dynamics.orbit_digits(u, params, r * m)
    e_list = [sum(1 for d in digits[k * r : (k + 1) * r] if d) for k in range(m)]
    ell = [e_list.count(i) for i in range(r + 1)]
    end = dynamics.iterate(u, params, r * m)
    h0 = height(u, params.p)
    drift = height(end, params.p) - h0 if end else None
    n = sum(e_list)
    lower = n - r * m + ell[r]
    upper = n + (1 - r) * m + ell[r] - ell[0]
    ok = h0 > min_height
    if not ok:
        log.info("tranche_stats: H(%s)=%d <= %d, bounds not guaranteed", u, h0, min_height)
    return TrancheStats(r, m, ell, e_list, drift, lower, upper, ok)


@dataclass
class NzDriftReport:
    """d = H(u_m) - H(u) - (alpha_nz - m), expected |d| <= 2."""

    m: int
    nz: int
    drift: int
    alpha_nz: int
    d: int | None
    excluded: bool

    @property
    def within_bound(self) -> bool:
        return self.excluded or abs(self.d) <= 2


def nz_drift_check(u: Rational, params: Params, m: int) -> NzDriftReport:
    """Compare the m-step height drift with alpha_{nz(u,m)} - m.

    Rows with nz = 0 are excluded since alpha_0 is a sentinel.
    """
    u = as_fraction(u)
    h0 = height(u, params.p)
    if h0 <= m:
        raise DomainError(f"need H(u) > m, got H({u})={h0}, m={m}")
    nz = sum(1 for d in dynamics.orbit_digits(u, params, m) if d)
    drift = height(dynamics.iterate(u, params, m), params.p) - h0
    a = alpha(nz, params)
    if nz == 0:
        return NzDriftReport(m, 0, drift, a, None, True)
    rep = NzDriftReport(m, nz, drift, a, drift - (a - m), False)
    if not rep.within_bound:
        log.warning("nz drift outside +-2 window: u=%s m=%d d=%d", u, m, rep.d)
    return rep


# -- mean drift --------------------------------------------------------------


def drift_bounds(params: Params, m: int) -> tuple[float, float]:
    """m((p-1)/p log q/log p - 1) -/+ 2."""
    p, q = params.p, params.q
    center = m * ((p - 1) / p * math.log(q) / math.log(p) - 1)
    return center - 2, center + 2


@dataclass
class MeanDriftReport:
    p: int
    q: int
    m: int
    sample_size: int
    empirical_mean: Fraction
    lower_bound: float
    upper_bound: float
    mode: str
    rng_seed: int | None = None
    drifts: list[int] = field(default_factory=list, repr=False)

    @property
    def in_bracket(self) -> bool:
        return self.lower_bound <= self.empirical_mean <= self.upper_bound

    def to_json(self) -> dict:
        return {
            "p": self.p,
            "q": self.q,
            "m": self.m,
            "sample_size": self.sample_size,
            "empirical_mean": str(self.empirical_mean),
            "empirical_mean_decimal": float(self.empirical_mean),
            "lower_bound": self.lower_bound,
            "upper_bound": self.upper_bound,
            "in_bracket": self.in_bracket,
            "mode": self.mode,
            "rng_seed": self.rng_seed,
        }


def _int_height(x: int, p: int) -> int:
    return _floor_log(abs(x), 1, p) + 1


def _drift_chunk(p: int, q: int, m: int, reps: list[int]) -> list[int]:
    out = []
    for u in reps:
        x = u
        for _ in range(m):
            x = dynamics.step_int(x, p, q)
        out.append(_int_height(x, p) - _int_height(u, p))
    return out


FULL_LIMIT = 2**22


def mean_drift(
    params: Params,
    m: int,
    sample: str | int = "full",
    rng_seed: int = 0,
    workers: int = 1,
) -> MeanDriftReport:
    """Average of H(g^m(u)) - H(u) over one representative per class mod p^m.

    Each class c gets the representative c + p^m K with K drawn uniformly
    from [p^m, 2 p^m) by a generator seeded with ``rng_seed``, so H(u) > m.
    ``sample="full"`` enumerates every class (allowed up to 2**22 classes);
    an integer samples that many classes uniformly with replacement.
    """
    if m < 1:
        raise ValueError("m must be >= 1")
    p, q = params.p, params.q
    pm = p**m
    rng = random.Random(rng_seed)
    if sample == "full":
        if pm > FULL_LIMIT:
            raise ValueError(f"p^m = {pm} classes is too many for full enumeration")
        classes = range(pm)
        mode = "full"
    else:
        classes = [rng.randrange(pm) for _ in range(int(sample))]
        mode = "random"
    reps = [c + pm * rng.randrange(pm, 2 * pm) for c in classes]
    if workers > 1 and len(reps) > 1:
        chunks = [reps[i::workers] for i in range(workers)]
        with ProcessPoolExecutor(max_workers=workers) as pool:
            parts = list(pool.map(_drift_chunk, [p] * workers, [q] * workers, [m] * workers, chunks))
        drifts = [0] * len(reps)
        for i, part in enumerate(parts):
            drifts[i::workers] = part
    else:
        drifts = _drift_chunk(p, q, m, reps)
    lo, hi = drift_bounds(params, m)
    mean = Fraction(sum(drifts), len(drifts))
    return MeanDriftReport(p, q, m, len(drifts), mean, lo, hi, mode, rng_seed, drifts)


def expected_alpha_mean(params: Params, m: int) -> Fraction:
    """(1/p^m) sum_i C(m,i) (p-1)^i alpha_i - m: the drift predicted from digit counts."""
    p = params.p
    total = sum(math.comb(m, i) * (p - 1) ** i * max(alpha(i, params), 0) for i in range(m + 1))
    return Fraction(total, p**m) - m


# -- asymptotic ratios -------------------------------------------------------


@dataclass
class RatioRow:
    n: int
    r_ratio: float
    psi_ratio: float | None
    height_ratio: float | None
    growth: float | None


@dataclass
class AsymptoticSeries:
    rows: list[RatioRow]
    periodic: bool
    cycle: tuple[int, int] | None


def _log_abs(x: Fraction) -> float:
    return math.log(abs(x.numerator)) - math.log(x.denominator)


def asymptotic_ratios(u: Rational, params: Params, n_steps: int) -> AsymptoticSeries:
    """Running r_n/n, psi(n)/n, H(u_n)/n and p |u_{n+1}|^(1/n) q^(-r_n/n).

    Stops at the first repeated state; the series is then flagged periodic.
    Diagnostic only, nothing is asserted about limits.
    """
    p, q = params.p, params.q
    rec = dynamics.orbit(u, params, n_steps + 1)
    states, digits, r = rec.states, rec.digits, rec.r
    psi = [i for i, d in enumerate(digits) if d]
    rows = []
    last = len(states) - 2 if rec.cycle else min(n_steps, len(states) - 2)
    for n in range(1, last + 1):
        nxt = states[n + 1]
        growth = None
        if nxt:
            growth = math.exp(math.log(p) + _log_abs(nxt) / n - r[n] / n * math.log(q))
        rows.append(
            RatioRow(
                n,
                r[n] / n,
                psi[n] / n if n < len(psi) else None,
                height(states[n], p) / n if states[n] else None,
                growth,
            )
        )
    return AsymptoticSeries(rows, rec.cycle is not None, rec.cycle)


def limsup_estimate(values: list[float | None]) -> float | None:
    """Max over the second half of the defined values."""
    vals = [v for v in values if v is not None]
    if not vals:
        return None
    return max(vals[len(vals) // 2 :])
