"""Command-line entry point: ``dynirr <subcommand> [options]``.

Exit codes: 0 success, 2 usage or parse error, 3 oracle mismatch or
replication violation.

CSV outputs start with a ``#schema=1`` line; column orders:

  stability  p,kind,witness_n,witness_reason,depth_checked
  scan       p,kind,witness_n,witness_reason,depth_checked
  series     Q,primes,stable,ratio
  sieve      n,u,nu,u_mod_4,nu_mod_2,chosen
  squares    n1,n2,diagonal
  charsum    q,M,eta,sum,count,q_is_square        (with --eta)
             q,M,sum,grh_ref,ratio                (without --eta)
  heights    n,value,height,ratio
  resultant  n,resultant
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import sys
from dataclasses import dataclass
from fractions import Fraction
from typing import List, Optional, Sequence

try:
    import tomllib
except ModuleNotFoundError:  # Python < 3.11
    import tomli as tomllib

from . import poly as polymod
from . import rational_orbit, scan, sieve, stability
from .modp import check_prime

EXIT_OK, EXIT_USAGE, EXIT_MISMATCH = 0, 2, 3


@dataclass
class Config:
    seed: int = 0
    threads: int = 1
    degree_guard: int = polymod.DEFAULT_DEGREE_GUARD
    depth: Optional[int] = None
    out_format: str = "json"
    verbose: bool = False

    def validate(self):
        if self.threads < 1:
            raise ValueError("threads must be >= 1")
        if self.degree_guard > polymod.DEFAULT_DEGREE_GUARD:
            raise ValueError("degree guard may not exceed 2^20")
        if self.out_format not in ("csv", "json"):
            raise ValueError("out format must be csv or json")


class UsageError(Exception):
    pass


# -- output helpers --------------------------------------------------------

def _csv(header: Sequence[str], rows) -> str:
    buf = io.StringIO()
    buf.write("#schema=1\n")
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(header)
    for r in rows:
        w.writerow(r)
    return buf.getvalue()


def _json(obj) -> str:
    return json.dumps(obj, indent=2, default=str) + "\n"


def _verdict_row(p, v: stability.Verdict):
    wn = v.witness.n if v.witness else ""
    wr = v.witness.reason.value if v.witness else ""
    return (p, v.kind.value, wn, wr, v.depth_checked)


VERDICT_HEADER = ("p", "kind", "witness_n", "witness_reason", "depth_checked")


# -- subcommands -------------------------------------------------------------

def _poly(args, cfg) -> polymod.IntPoly:
    if not args.poly:
        raise UsageError("--poly is required")
    return polymod.parse_poly(args.poly, cfg.degree_guard)


def cmd_stability(args, cfg):
    f = _poly(args, cfg)
    if args.prime is None:
        raise UsageError("--prime is required")
    p = check_prime(args.prime)
    v = stability.stability_verdict(f, p, args.policy, cfg.depth, seed=cfg.seed,
                                     shape=_shape_or_none(f, args.strict_shape))
    if cfg.out_format == "csv":
        return _csv(VERDICT_HEADER, [_verdict_row(p, v)]), EXIT_OK
    out = {"poly": str(f), "coeffs": f.to_coeffs_str(), "p": p, "verdict": v.to_dict()}
    if args.conditions:
        rows = stability.symbol_conditions_report(f, p, args.conditions, cfg.degree_guard)
        out["conditions"] = [r.__dict__ for r in rows]
    return _json(out), EXIT_OK


def _shape_or_none(f, strict):
    if f.degree % 2 or f.degree < 2:
        return None
    return polymod.detect_shape(f, strict=strict)


def cmd_scan(args, cfg):
    f = _poly(args, cfg)
    if args.q is None:
        raise UsageError("--q is required")
    rep = scan.scan_density(f, args.q, args.policy, cfg.depth, cfg.threads, cfg.verbose, cfg.seed)
    if cfg.out_format == "csv":
        rows = [_verdict_row(p, v) for p, v in (rep.verdicts or [])]
        return _csv(VERDICT_HEADER, rows), EXIT_OK
    return _json(rep.to_dict(timestamp=not args.no_timestamp)), EXIT_OK


def cmd_series(args, cfg):
    f = _poly(args, cfg)
    if not args.qs:
        raise UsageError("--qs is required")
    qs = [int(x) for x in args.qs.split(",") if x.strip()]
    rows = scan.density_series(f, qs, args.policy, cfg.depth, cfg.threads)
    if cfg.out_format == "json":
        return _json([dict(zip(scan.SERIES_HEADER, r)) for r in rows]), EXIT_OK
    return _csv(scan.SERIES_HEADER, [(q, n, s, f"{r:.6f}") for q, n, s, r in rows]), EXIT_OK


def _certificate_dict(cert):
    if isinstance(cert, rational_orbit.Cycle):
        return {"kind": "Cycle", "enter": cert.enter, "length": cert.length}
    return {"kind": "Escape", "reason": cert.reason, "at": cert.at,
            "value": str(cert.value), "bound": str(cert.bound)}


def cmd_preperiodic(args, cfg):
    f = _poly(args, cfg)
    if args.point is None:
        raise UsageError("--point is required")
    x0 = Fraction(args.point)
    pre, cert = rational_orbit.is_preperiodic(f, x0)
    out = {"poly": str(f), "point": str(x0), "preperiodic": pre, "certificate": _certificate_dict(cert)}
    if cfg.out_format == "csv":
        c = out["certificate"]
        return _csv(("point", "preperiodic", "kind", "detail"),
                    [(out["point"], pre, c["kind"], json.dumps(c, sort_keys=True))]), EXIT_OK
    return _json(out), EXIT_OK


def cmd_shape(args, cfg):
    f = _poly(args, cfg)
    sh = polymod.detect_shape(f, strict=args.strict_shape)
    if sh is None:
        out = {"poly": str(f), "shape": None}
    else:
        out = {"poly": str(f), "shape": {"c": str(sh.c), "h": str(sh.h), "a": sh.a, "b": sh.b,
                                          "gamma": str(sh.gamma)}}
        pre, cert = rational_orbit.is_preperiodic(f, sh.gamma)
        out["gamma_preperiodic"] = pre
        out["gamma_certificate"] = _certificate_dict(cert)
    if cfg.out_format == "csv":
        s = out["shape"] or {}
        return _csv(("c", "h", "a", "b", "gamma"),
                    [(s.get("c", ""), s.get("h", ""), s.get("a", ""), s.get("b", ""), s.get("gamma", ""))]), EXIT_OK
    return _json(out), EXIT_OK


def cmd_sieve(args, cfg):
    f = _poly(args, cfg)
    if args.q is None:
        raise UsageError("--q is required")
    N, t = args.nmin, args.t
    if N is None or t is None:
        sN, st = sieve.suggested_window(args.q)
        N = sN if N is None else N
        t = st if t is None else int(t)
    rep = sieve.verify_pf_bound(f, args.q, N, int(t), args.policy, cfg.depth, cfg.threads)
    code = EXIT_OK
    if not rep.bound_holds and f.degree == 2 and args.policy in ("auto", "exact"):
        code = EXIT_MISMATCH
    if cfg.out_format == "csv":
        chosen = set(rep.chosen)
        rows = [(p.n, p.u, p.nu, p.u % 4, p.nu % 2, int(p.n in chosen)) for p in rep.pairs]
        text = _csv(("n", "u", "nu", "u_mod_4", "nu_mod_2", "chosen"), rows)
        text += f"#S={rep.S},P_f={rep.pf},bound={rep.bound},bound_holds={rep.bound_holds}\n"
        return text, code
    return _json(rep.to_dict()), code


def cmd_squares(args, cfg):
    f = _poly(args, cfg)
    N = args.nmin if args.nmin is not None else 2
    t = int(args.t) if args.t is not None else 6
    res = sieve.square_product_scan(f, N, t)
    if cfg.out_format == "csv":
        rows = [(a, b, 1) for a, b in res.diagonal] + [(a, b, 0) for a, b in res.off_diagonal]
        return _csv(("n1", "n2", "diagonal"), rows), EXIT_OK
    return _json({"N": N, "t": t, "diagonal": res.diagonal, "off_diagonal": res.off_diagonal}), EXIT_OK


def cmd_eta(args, cfg):
    if args.t is None:
        raise UsageError("--t is required")
    sol = sieve.eta_for_t(float(args.t))
    out = {"t": sol.t, "eta": sol.eta, "residual": sol.residual,
           "asymptotic_log_t_pow_minus_2": sol.asymptotic, "log_exponent": sol.log_exponent}
    if cfg.out_format == "csv":
        return _csv(("t", "eta", "residual", "asymptotic"),
                    [(sol.t, repr(sol.eta), repr(sol.residual), sol.asymptotic)]), EXIT_OK
    return _json(out), EXIT_OK


def cmd_charsum(args, cfg):
    if args.q is None or args.m is None:
        raise UsageError("--q (modulus list) and --m are required")
    qs = [int(x) for x in str(args.q).split(",")]
    rows = []
    if args.eta is not None:
        eta = float(Fraction(args.eta))
        for q in qs:
            cs = sieve.charsum_almost_primes(q, eta, args.m)
            rows.append({"q": q, "M": args.m, "eta": args.eta, "sum": cs.total,
                         "count": cs.count, "q_is_square": cs.q_is_square})
    else:
        for q in qs:
            total, ref = sieve.charsum_primes(q, args.m)
            rows.append({"q": q, "M": args.m, "sum": total, "grh_ref": ref, "ratio": abs(total) / ref})
    if cfg.out_format == "csv":
        header = tuple(rows[0].keys()) if rows else ("q",)
        return _csv(header, [tuple(r.values()) for r in rows]), EXIT_OK
    return _json(rows), EXIT_OK


def cmd_resultant(args, cfg):
    f = _poly(args, cfg)
    g = polymod.parse_poly(args.poly2, cfg.degree_guard) if args.poly2 else polymod.derivative(f)
    n = args.n if args.n is not None else 1
    value = polymod.resultant_of_iterate(f, n, g)
    out = {"poly": str(f), "g": str(g), "n": n, "resultant": str(value)}
    code = EXIT_OK
    if args.check:
        direct = polymod.sylvester_resultant(polymod.iterate(f, n, cfg.degree_guard), g)
        out["sylvester"] = str(direct)
        out["match"] = direct == value
        if direct != value:
            code = EXIT_MISMATCH
    if cfg.out_format == "csv":
        return _csv(("n", "resultant"), [(n, value)]), code
    return _json(out), code


def cmd_heights(args, cfg):
    f = _poly(args, cfg)
    n_max = args.n if args.n is not None else 8
    if args.resultants:
        rows = [(r.n, str(r.resultant), r.height, r.ratio)
                for r in rational_orbit.resultant_height_report(f, n_max, cfg.degree_guard)]
    else:
        x0 = Fraction(args.point) if args.point is not None else Fraction(0)
        rows = [(r.n, str(r.value), r.height, r.ratio)
                for r in rational_orbit.height_growth_report(f, x0, n_max)]
    header = ("n", "value", "height", "ratio")
    if cfg.out_format == "csv":
        return _csv(header, [(n, v, repr(h), repr(r)) for n, v, h, r in rows]), EXIT_OK
    return _json([dict(zip(header, r)) for r in rows]), EXIT_OK


def cmd_replicate(args, cfg):
    suites = ["jones", "progression", "cubic"] if args.suite == "all" else [args.suite]
    results = []
    for name in suites:
        if name == "jones":
            results.append(scan.replicate_jones(args.qmax or 10 ** 5))
        elif name == "progression":
            results.append(scan.replicate_progression(args.qmax or 10 ** 5))
        else:
            results.append(scan.replicate_cubic(args.qmax or 2000, cfg.depth or 6))
    code = EXIT_OK if all(r.ok for r in results) else EXIT_MISMATCH
    if cfg.out_format == "csv":
        rows = [(r.name, len(r.checked), len(r.violations), " ".join(map(str, r.violations)))
                for r in results]
        return _csv(("suite", "checked", "violations", "violating_primes"), rows), code
    return _json([r.to_dict() for r in results]), code


COMMANDS = {
    "stability": (cmd_stability, "per-prime stability verdict",
                  'dynirr stability --poly "x^2+1" --prime 3'),
    "scan": (cmd_scan, "verdicts for all primes in [Q, 2Q]",
             'dynirr scan --poly "x^2+1" --q 10 --no-timestamp'),
    "series": (cmd_series, "density series P_f(Q) for several Q",
               'dynirr series --poly "x^2+1" --qs 10,100 --out csv'),
    "preperiodic": (cmd_preperiodic, "decide whether a rational point is pre-periodic",
                    'dynirr preperiodic --poly "(x-2)^2+2" --point 2'),
    "shape": (cmd_shape, "detect f' = c h^2 (a x + b)",
              'dynirr shape --poly "x^4+x^3+1"'),
    "sieve": (cmd_sieve, "square-sieve pipeline and the bound P_f(Q) <= 16 S / t^2",
              'dynirr sieve --poly "x^2+1" --q 10 --nmin 2 --t 1'),
    "squares": (cmd_squares, "perfect-square products u_n1 u_n2",
                'dynirr squares --poly "x^2+1" --nmin 2 --t 4'),
    "eta": (cmd_eta, "solve eta^(eta^(-1/2)/4) = 1/t",
            "dynirr eta --t 10"),
    "charsum": (cmd_charsum, "character sums over primes or almost-primes",
                "dynirr charsum --q 3 --m 100"),
    "resultant": (cmd_resultant, "Res(f^(n), g), g = f' by default",
                  'dynirr resultant --poly "x^2+1" --n 3 --check'),
    "heights": (cmd_heights, "height growth of orbits or resultants",
                'dynirr heights --poly "x^2+1" --point 0 --n 5'),
    "replicate": (cmd_replicate, "replication suites (jones, progression, cubic)",
                  "dynirr replicate --suite progression --qmax 1000"),
}


def _common_parser() -> argparse.ArgumentParser:
    c = argparse.ArgumentParser(add_help=False)
    g = c.add_argument_group("common options")
    g.add_argument("--config", help="TOML file with defaults (flags win)")
    g.add_argument("--seed", type=int)
    g.add_argument("--threads", type=int)
    g.add_argument("--degree-guard", type=int)
    g.add_argument("--depth", type=int)
    g.add_argument("--out", choices=["csv", "json"])
    g.add_argument("--verbose", action="store_true", default=None)
    g.add_argument("--no-timestamp", action="store_true")
    g.add_argument("--strict-shape", action="store_true")
    g.add_argument("--policy", choices=[p.value for p in stability.Policy], default="auto")
    g.add_argument("--poly")
    g.add_argument("--prime", type=int)
    g.add_argument("--q")
    g.add_argument("--nmin", type=int)
    g.add_argument("--t")
    g.add_argument("--eta")
    g.add_argument("--m", type=int)
    return c


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="dynirr", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)
    common = _common_parser()
    for name, (_, help_text, example) in COMMANDS.items():
        sp = sub.add_parser(name, parents=[common], help=help_text, description=help_text,
                            epilog=f"example:\n  {example}",
                            formatter_class=argparse.RawDescriptionHelpFormatter)
        if name == "stability":
            sp.add_argument("--conditions", type=int, metavar="N_MAX",
                            help="also report the direct symbol conditions up to N_MAX")
        if name == "series":
            sp.add_argument("--qs", help="comma-separated ascending Q values")
        if name in ("preperiodic", "heights"):
            sp.add_argument("--point", help="rational starting point, e.g. 2 or -3/4")
        if name in ("resultant", "heights"):
            sp.add_argument("--n", type=int)
        if name == "resultant":
            sp.add_argument("--poly2", help="second polynomial (default: f')")
            sp.add_argument("--check", action="store_true",
                            help="cross-check against the Sylvester determinant")
        if name == "heights":
            sp.add_argument("--resultants", action="store_true")
        if name == "replicate":
            sp.add_argument("--suite", choices=["jones", "progression", "cubic", "all"], default="all")
            sp.add_argument("--qmax", type=int)
    return parser


def _load_config(args) -> Config:
    values = {}
    if args.config:
        with open(args.config, "rb") as fh:
            values = tomllib.load(fh)
    cfg = Config()
    for key in ("seed", "threads", "degree_guard", "depth", "verbose"):
        if key in values:
            setattr(cfg, key, values[key])
    if "out" in values:
        cfg.out_format = values["out"]
    for key, attr in (("seed", "seed"), ("threads", "threads"), ("degree_guard", "degree_guard"),
                      ("depth", "depth"), ("out", "out_format"), ("verbose", "verbose")):
        v = getattr(args, key)
        if v is not None:
            setattr(cfg, attr, v)
    cfg.validate()
    return cfg


def _coerce_numbers(args):
    if args.command != "charsum" and args.q is not None:
        args.q = int(args.q)
    if args.command != "eta" and args.t is not None:
        args.t = int(args.t)


def main(argv: Optional[List[str]] = None, stdout=None) -> int:
    stdout = stdout or sys.stdout
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    try:
        _coerce_numbers(args)
        cfg = _load_config(args)
        text, code = COMMANDS[args.command][0](args, cfg)
    except (UsageError, ValueError, polymod.PolySyntaxError, OSError, tomllib.TOMLDecodeError) as exc:
        print(f"dynirr {args.command}: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    stdout.write(text)
    return code


if __name__ == "__main__":
    sys.exit(main())
