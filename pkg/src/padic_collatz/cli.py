"""Command-line front end.

Exit codes: 0 success, 1 unexpected error, 2 inconclusive (step budget
exhausted), 64 usage error, 65 domain error.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import os
import re
import sys
from fractions import Fraction

from . import __version__, diagnostics, dynamics, fpseries, isometry
from .padic import DomainError, HenselDigits, PadicApprox, Params, detect_periodic_digits, rational_from_digits
from .reference_table import PAIRS

EXIT_OK, EXIT_ERROR, EXIT_INCONCLUSIVE, EXIT_USAGE, EXIT_DOMAIN = 0, 1, 2, 64, 65

NEGATIVE_VALUE = re.compile(r"^-\d")


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        print(f"{self.prog}: error: {message}", file=sys.stderr)
        raise SystemExit(EXIT_USAGE)


def _rational(text: str) -> Fraction:
    try:
        return Fraction(text)
    except (ValueError, ZeroDivisionError):
        raise argparse.ArgumentTypeError(f"not a rational: {text!r}")


def _digits(text: str) -> tuple[int, ...]:
    text = text.strip()
    if not text:
        return ()
    try:
        return tuple(int(x) for x in text.split(","))
    except ValueError:
        raise argparse.ArgumentTypeError(f"not a digit list: {text!r}")


def _range(text: str) -> tuple[int, int]:
    try:
        lo, hi = text.split("..")
        return int(lo), int(hi)
    except ValueError:
        raise argparse.ArgumentTypeError(f"range must look like A..B, got {text!r}")


def _pairs(text: str) -> list[tuple[int, int]]:
    if text == "paper":
        return list(PAIRS)
    try:
        return [tuple(int(x) for x in item.split(":")) for item in text.split(",")]
    except ValueError:
        raise argparse.ArgumentTypeError(f"pairs must be 'paper' (the built-in reference table) or P:Q[,P:Q...], got {text!r}")


def _q(x: Fraction | int, decimal: bool):
    if isinstance(x, Fraction) and x.denominator == 1:
        x = x.numerator
    if isinstance(x, int):
        return x
    if decimal:
        return {"exact": str(x), "decimal": float(x)}
    return str(x)


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--format", choices=("json", "csv", "plain"), default="json")
    common.add_argument("--output", "-o", help="write the report here instead of stdout")
    common.add_argument("--decimal", action="store_true", help="add decimal approximations of rationals")
    common.add_argument("--rng-seed", type=int, default=0)

    pq = argparse.ArgumentParser(add_help=False)
    pq.add_argument("--p", type=int, default=2)
    pq.add_argument("--q", type=int, default=3)

    parser = _Parser(prog="padic-collatz", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=__version__)
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p = sub.add_parser("orbit", parents=[common, pq], help="iterate g_{p,q} from u")
    p.add_argument("--u", type=_rational, required=True)
    p.add_argument("--max-steps", type=int, default=10**4)

    p = sub.add_parser("table", parents=[common], help="integer cycle search over (p,q) pairs")
    p.add_argument("--pairs", type=_pairs, default="paper", help="'paper' for the built-in reference table, or P:Q[,P:Q...]")
    p.add_argument("--range", type=_range, default=(-6000, -1), dest="seed_range")
    p.add_argument("--max-steps", type=int, default=10**6)
    p.add_argument("--escape-bits", type=int, default=256)
    p.add_argument("--threads", type=int, default=os.cpu_count() or 1)

    p = sub.add_parser("phi", parents=[common, pq], help="digits of phi_{p,q}(u)")
    p.add_argument("--u", type=_rational, required=True)
    p.add_argument("--n", type=int, default=32, help="number of digits")
    p.add_argument("--exact", action="store_true", help="exact periodic expansion")
    p.add_argument("--max-steps", type=int, default=10**6)

    p = sub.add_parser("phi-inv", parents=[common, pq], help="inverse of phi on a digit stream")
    p.add_argument("--preperiod", type=_digits, default=())
    p.add_argument("--period", type=_digits, help="periodic block (exact inverse)")
    p.add_argument("--digits", type=_digits, help="finite digits (inverse mod p^N)")
    p.add_argument("--value", type=_rational, help="use the Hensel expansion of this rational")

    p = sub.add_parser("periodic", parents=[common, pq], help="all u with g^k(u) = u")
    p.add_argument("--k", type=int, required=True)

    p = sub.add_parser("catalan", parents=[common, pq], help="solutions of q^l - p^k = +-1")
    p.add_argument("--bound", type=int, default=64)

    p = sub.add_parser("stats", parents=[common, pq], help="height statistics")
    p.add_argument("kind", choices=("mean-drift", "height", "tranche", "nz", "ratios", "candidate", "profile"))
    p.add_argument("--m", type=int, default=12)
    p.add_argument("--u", type=_rational)
    p.add_argument("--steps", type=int, default=200)
    grp = p.add_mutually_exclusive_group()
    grp.add_argument("--full", action="store_true", help="enumerate every class mod p^m")
    grp.add_argument("--samples", type=int, help="number of random classes")
    p.add_argument("--threads", type=int, default=os.cpu_count() or 1)

    p = sub.add_parser("density", parents=[common], help="integers approximating u 2-adically")
    p.add_argument("--u", type=int, required=True)
    p.add_argument("--n", type=int, default=10, help="largest n")
    p.add_argument("--max-steps", type=int, default=10**6)

    p = sub.add_parser("psiprime", parents=[common, pq], help="the psi'_omega series")
    p.add_argument("--u", type=_rational, required=True)
    p.add_argument("--omega", type=_rational, default=Fraction(1))
    p.add_argument("--n-max", type=int, default=50)

    p = sub.add_parser("series", parents=[common], help="the F_p[[T]] analog")
    p.add_argument("action", choices=("smap", "orbit", "phi", "phi-inv", "height"))
    p.add_argument("--p", type=int, default=2)
    p.add_argument("--num", type=_digits, default=(1,), help="numerator coefficients, low degree first")
    p.add_argument("--den", type=_digits, default=(1,), help="denominator coefficients")
    p.add_argument("--coeffs", type=_digits, help="series coefficients for phi-inv")
    p.add_argument("--n", type=int, default=16)
    return parser


def _config(args) -> dict:
    return {k: (list(v) if isinstance(v, tuple) else str(v) if isinstance(v, Fraction) else v)
            for k, v in vars(args).items() if k not in ("output",)}


# -- commands: each returns (exit code, result payload, csv rows or None) ---


def cmd_orbit(args):
    params = Params(args.p, args.q)
    rec = dynamics.orbit(args.u, params, args.max_steps)
    res = rec.to_json()
    res["states"] = [_q(s, args.decimal) for s in rec.states]
    if rec.cycle:
        pre, per = rec.cycle
        res["cycle_members"] = [_q(s, args.decimal) for s in rec.states[pre : pre + per]]
    rows = [["n", "u_n", "digit", "r"]] + [[i, str(s), d, r] for i, (s, d, r) in enumerate(zip(rec.states, rec.digits, rec.r))]
    return (EXIT_OK if rec.cycle else EXIT_INCONCLUSIVE), res, rows


def cmd_table(args):
    lo, hi = args.seed_range
    rows = [["p", "q", "representative", "cycle"]]
    results = []
    inconclusive = False
    for p, q in args.pairs:
        params = Params(p, q)
        res = dynamics.integer_cycle_search(params, lo, hi, args.max_steps, args.escape_bits, args.threads)
        for c in res.cycles:
            rows.append([p, q, str(c.members[0]), ";".join(str(x) for x in c.members)])
        results.append({
            "p": p,
            "q": q,
            "cycles": [[_q(x, args.decimal) for x in c.members] for c in res.cycles],
            "truncated_seeds": len(res.truncated),
            "escaped_seeds": len(res.escaped),
        })
        inconclusive |= bool(res.truncated)
    return (EXIT_INCONCLUSIVE if inconclusive else EXIT_OK), results, rows


def cmd_phi(args):
    params = Params(args.p, args.q)
    if args.exact:
        h = isometry.phi_exact(args.u, params, args.max_steps)
        if h is None:
            return EXIT_INCONCLUSIVE, {"verdict": "aperiodic within budget", "max_steps": args.max_steps}, None
        res = h.to_json()
        res["value"] = _q(rational_from_digits(h), args.decimal)
        rows = [["p", "preperiod", "period", "value"],
                [h.p, ",".join(map(str, h.preperiod)), ",".join(map(str, h.period)), str(rational_from_digits(h))]]
        return EXIT_OK, res, rows
    a = isometry.phi_qp(args.u, params, args.n)
    res = {"p": a.p, "valuation_offset": a.valuation_offset, "digits": list(a.digits)}
    return EXIT_OK, res, [["i", "digit"]] + [[i, d] for i, d in enumerate(a.digits)]


def cmd_phi_inv(args):
    params = Params(args.p, args.q)
    if args.value is not None:
        h = detect_periodic_digits(args.value, params.p)
    elif args.period is not None:
        h = HenselDigits(params.p, args.preperiod, args.period)
    elif args.digits is not None:
        a = isometry.phi_inverse_approx(PadicApprox(params.p, args.digits), params)
        res = {"p": a.p, "digits": list(a.digits), "residue": a.residue(), "modulus": a.p**a.precision}
        return EXIT_OK, res, [["residue", "modulus"], [a.residue(), a.p**a.precision]]
    else:
        raise UsageError("one of --value, --period or --digits is required")
    u = isometry.phi_inverse_exact(h, params)
    res = {"input": h.to_json(), "value": _q(u, args.decimal)}
    return EXIT_OK, res, [["value"], [str(u)]]


def cmd_periodic(args):
    params = Params(args.p, args.q)
    vals = dynamics.enumerate_periodic(args.k, params)
    return EXIT_OK, {"k": args.k, "count": len(vals), "points": [_q(v, args.decimal) for v in vals]}, \
        [["u"]] + [[str(v)] for v in vals]


def cmd_catalan(args):
    sols = dynamics.catalan_search(args.p, args.q, args.bound, args.bound)
    res = {
        "minus_one": [[k, l] for k, l, s in sols if s == -1],
        "plus_one": [[k, l] for k, l, s in sols if s == 1],
    }
    return EXIT_OK, res, [["k", "ell", "sign"]] + [list(t) for t in sols]


def cmd_stats(args):
    params = Params(args.p, args.q)
    kind = args.kind
    if kind == "mean-drift":
        sample = args.samples if args.samples else "full"
        rep = diagnostics.mean_drift(params, args.m, sample, args.rng_seed, args.threads)
        row = [args.m, str(rep.empirical_mean), rep.lower_bound, rep.upper_bound, rep.sample_size, args.rng_seed]
        return EXIT_OK, rep.to_json(), [["m", "empirical", "lower", "upper", "samples", "rng_seed"], row]
    if kind == "candidate":
        ok = diagnostics.candidate_test(params)
        return EXIT_OK, {"p": args.p, "q": args.q, "candidate": ok, "r": _inf(diagnostics.tranche_r(params))}, \
            [["p", "q", "candidate"], [args.p, args.q, ok]]
    if args.u is None:
        raise UsageError(f"stats {kind} needs --u")
    if kind == "height":
        h = diagnostics.height(args.u, params.p)
        return EXIT_OK, {"u": str(args.u), "H": h, "h_naive": diagnostics.height_naive(args.u)}, [["u", "H"], [str(args.u), h]]
    if kind == "profile":
        prof = diagnostics.height_profile(args.u, params, args.steps)
        return EXIT_OK, {"H0": prof.H0, "H": prof.H_series, "drift": prof.drift_series}, \
            [["n", "H"]] + [[i, h] for i, h in enumerate(prof.H_series)]
    if kind == "tranche":
        t = diagnostics.tranche_stats(args.u, params, args.m)
        res = {"r": t.r, "m": t.m, "ell": t.ell, "e_list": t.e_list, "drift": t.drift,
               "lower": t.lower, "upper": t.upper, "within_bounds": t.within_bounds, "height_ok": t.height_ok}
        return EXIT_OK, res, [list(res), list(res.values())]
    if kind == "nz":
        rep = diagnostics.nz_drift_check(args.u, params, args.m)
        res = {"m": rep.m, "nz": rep.nz, "drift": rep.drift, "alpha_nz": rep.alpha_nz, "d": rep.d,
               "excluded": rep.excluded, "within_bound": rep.within_bound}
        return EXIT_OK, res, [list(res), list(res.values())]
    series = diagnostics.asymptotic_ratios(args.u, params, args.steps)
    header = ["n", "r_n/n", "psi(n)/n", "H(u_n)/n", "growth"]
    rows = [[r.n, r.r_ratio, r.psi_ratio, r.height_ratio, r.growth] for r in series.rows]
    res = {"periodic": series.periodic, "cycle": series.cycle, "columns": header, "rows": rows}
    return EXIT_OK, res, [header] + rows


def _inf(x):
    return "infinite" if x == float("inf") else x


def cmd_density(args):
    out = [isometry.density_approximant(args.u, n, args.max_steps).to_json() for n in range(1, args.n + 1)]
    rows = [list(out[0])] + [list(w.values()) for w in out]
    return EXIT_OK, out, rows


def cmd_psiprime(args):
    params = Params(args.p, args.q)
    s = isometry.psi_prime_omega(args.u, args.omega, args.n_max, params)
    est = s.liminf_estimate()
    res = {"values": list(s.values), "ratios": [_q(r, args.decimal) for r in s.ratios],
           "liminf_estimate": None if est is None else _q(est, args.decimal), "exhausted": s.exhausted}
    return EXIT_OK, res, [["n", "psi_prime"]] + [[i + 1, k] for i, k in enumerate(s.values)]


def cmd_series(args):
    f = fpseries.FpRationalFunction.from_coeffs(args.p, args.num, args.den)
    act = args.action
    if act == "smap":
        g = fpseries.smap(f)
        return EXIT_OK, {"input": f.to_json(), "output": g.to_json()}, [["P", "Q"], [list(g.P.coeffs), list(g.Q.coeffs)]]
    if act == "height":
        h = fpseries.series_height(f)
        return EXIT_OK, {"input": f.to_json(), "height": h}, [["height"], [h]]
    if act == "orbit":
        orb = fpseries.smap_orbit(f)
        res = {"states": [s.to_json() for s in orb.states], "preperiod": orb.preperiod, "period": orb.period}
        return EXIT_OK, res, [["n", "P", "Q"]] + [[i, list(s.P.coeffs), list(s.Q.coeffs)] for i, s in enumerate(orb.states)]
    if act == "phi":
        s = fpseries.phi_series(f, args.n)
        pre, per = fpseries.phi_series_exact(f)
        res = {"coeffs": list(s.coeffs), "preperiod": list(pre), "period": list(per)}
        return EXIT_OK, res, [["n", "coeff"]] + [[i, c] for i, c in enumerate(s.coeffs)]
    if args.coeffs is None:
        raise UsageError("series phi-inv needs --coeffs")
    s = fpseries.phi_series_inverse(fpseries.FpSeriesApprox(args.p, args.coeffs))
    return EXIT_OK, {"coeffs": list(s.coeffs)}, [["n", "coeff"]] + [[i, c] for i, c in enumerate(s.coeffs)]


COMMANDS = {
    "orbit": cmd_orbit,
    "table": cmd_table,
    "phi": cmd_phi,
    "phi-inv": cmd_phi_inv,
    "periodic": cmd_periodic,
    "catalan": cmd_catalan,
    "stats": cmd_stats,
    "density": cmd_density,
    "psiprime": cmd_psiprime,
    "series": cmd_series,
}


def _render(args, code, result, rows) -> str:
    if args.format == "csv" and rows is not None:
        buf = io.StringIO()
        csv.writer(buf, lineterminator="\n").writerows(rows)
        return buf.getvalue()
    if args.format == "plain" and rows is not None:
        return "".join(" ".join(str(x) for x in row) + "\n" for row in rows)
    doc = {"command": args.command, "version": __version__, "config": _config(args), "exit_code": code, "result": result}
    return json.dumps(doc, indent=2, default=str) + "\n"


def _join_negative_values(argv: list[str]) -> list[str]:
    """Rewrite ``--opt -1/3`` as ``--opt=-1/3``.

    argparse only accepts option values starting with '-' when they look like
    plain negative numbers, which rules out ``-1/3`` and ``-3000..-1``.
    """
    out: list[str] = []
    i = 0
    while i < len(argv):
        a = argv[i]
        nxt = argv[i + 1] if i + 1 < len(argv) else None
        if a.startswith("--") and "=" not in a and nxt is not None and NEGATIVE_VALUE.match(nxt):
            out.append(f"{a}={nxt}")
            i += 2
        else:
            out.append(a)
            i += 1
    return out


def main(argv: list[str] | None = None) -> int:
    argv = _join_negative_values(list(sys.argv[1:] if argv is None else argv))
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_OK if exc.code in (0, None) else EXIT_USAGE
    try:
        code, result, rows = COMMANDS[args.command](args)
    except UsageError as exc:
        print(f"padic-collatz: usage error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except DomainError as exc:
        print(f"padic-collatz: domain error: {exc}", file=sys.stderr)
        return EXIT_DOMAIN
    except Exception as exc:  # noqa: BLE001 - reported as exit 1
        print(f"padic-collatz: error: {exc}", file=sys.stderr)
        return EXIT_ERROR
    text = _render(args, code, result, rows)
    if args.output:
        with open(args.output, "w") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)
    return code


if __name__ == "__main__":
    raise SystemExit(main())
