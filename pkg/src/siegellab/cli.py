"""Command-line front end.

    siegellab chars enum --bound 8
    siegellab lfun eval --d -4 --s 1,0
    siegellab zeros scan --d 5 --height 30 [--cache]
    siegellab zeros hdelta --bound 300 --delta 0.1 --workers 4
    siegellab powersum run --pair 5,8 --eta 0.03 --ell 3
    siegellab lab identity --pair 5,8 --kl 4 --height 200 --series 1000000
    siegellab lab weil --pair 5,8 --B 2
    siegellab lab ledger --delta 0.1 --eps 1
    siegellab lab chain --delta 0.1 --eps 0.5 --loglogq1 1e8 --beta1 edge --beta2 edge --k 120

Reports go to stdout (or --out) as JSON with sorted keys.  Exit status is
2 for usage errors and 1 for computation errors, in which case the error
class name is printed on stderr.
"""
from __future__ import annotations

import argparse
import csv
import io
import json
import math
import os
import sys
from dataclasses import dataclass, fields, replace
from pathlib import Path

import mpmath

from . import __version__
from .characters import RealPrimitiveCharacter, enumerate_fundamental_discriminants
from .errors import SiegelLabError
from .lfunc import DOUBLE_CONTEXT, CharacterPair, EvaluationContext, evaluate_l
from .powersum import build_instance, compute_K, paper_K_bound, turan_select_k
from .siegel_lab import (PairContext, constants_ledger, contradiction_chain,
                         explicit_formula_check, verify_hadamard_derivative_identity,
                         verify_lemma1_inequality)
from .zeros import cached_scan, hdelta_family, scan_inventory

CONFIG_ENV = "SIEGELLAB_CONFIG"


@dataclass(frozen=True)
class RunConfig:
    precision_digits: int = 30
    T: float = 200.0
    N: int = 10**6
    M: int = 10**4
    cache_dir: str = ".siegellab-cache"
    workers: int = 1
    format: str = "json"

    @classmethod
    def load(cls, path: str | None) -> "RunConfig":
        path = path or os.environ.get(CONFIG_ENV)
        if not path:
            return cls()
        with open(path, encoding="utf-8") as fh:
            data = json.load(fh)
        known = {f.name for f in fields(cls)}
        unknown = set(data) - known
        if unknown:
            raise UsageError(f"unknown config keys: {sorted(unknown)}")
        return replace(cls(), **data)

    def override(self, args: argparse.Namespace) -> "RunConfig":
        changes = {}
        for name, flag in (("precision_digits", "precision"), ("workers", "workers"),
                           ("cache_dir", "cache_dir"), ("format", "format")):
            v = getattr(args, flag, None)
            if v is not None:
                changes[name] = v
        return replace(self, **changes)


class UsageError(Exception):
    pass


# ---------------------------------------------------------------------------
# argument types
# ---------------------------------------------------------------------------

def _pair(text: str) -> tuple[int, int]:
    try:
        a, b = (int(x) for x in text.split(","))
    except ValueError:
        raise argparse.ArgumentTypeError("expected D1,D2") from None
    return a, b


def _complex(text: str) -> complex:
    try:
        parts = [float(x) for x in text.split(",")]
    except ValueError:
        raise argparse.ArgumentTypeError("expected RE,IM") from None
    if len(parts) == 1:
        parts.append(0.0)
    if len(parts) != 2:
        raise argparse.ArgumentTypeError("expected RE,IM")
    return complex(parts[0], parts[1])


def _beta(text: str):
    """A float, 'edge' (beta = 1 - (log q)^-eps) or 'gap=<number>'."""
    if text == "edge":
        return ("edge", None)
    if text.startswith("gap="):
        try:
            return ("gap", mpmath.mpf(text[4:]))
        except (ValueError, TypeError):
            raise argparse.ArgumentTypeError("bad gap value") from None
    try:
        return ("beta", float(text))
    except ValueError:
        raise argparse.ArgumentTypeError("expected a number, 'edge' or 'gap=<x>'") from None


# ---------------------------------------------------------------------------
# output
# ---------------------------------------------------------------------------

def _jsonable(obj):
    if isinstance(obj, dict):
        return {str(k): _jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_jsonable(v) for v in obj]
    if isinstance(obj, (mpmath.mpf, mpmath.mpc)):
        return mpmath.nstr(obj, 20)
    if isinstance(obj, float) and not math.isfinite(obj):
        return str(obj)
    if hasattr(obj, "item"):
        return obj.item()
    return obj


def _emit(payload, args, cfg: RunConfig, rows: list[dict] | None = None):
    if cfg.format == "csv":
        if rows is None:
            raise UsageError("csv output is available for zero lists and scan summaries only")
        buf = io.StringIO()
        if rows:
            w = csv.DictWriter(buf, fieldnames=list(rows[0]), lineterminator="\n")
            w.writeheader()
            for r in rows:
                w.writerow(r)
        text = buf.getvalue()
    else:
        text = json.dumps(_jsonable(payload), sort_keys=True, indent=2) + "\n"
    out = getattr(args, "out", None)
    if out:
        Path(out).write_text(text, encoding="utf-8")
    else:
        sys.stdout.write(text)


def _zero_rows(inv, digits: int) -> list[dict]:
    d = min(digits, 30)
    return [{"target": inv.target,
             "beta": mpmath.nstr(z.location.real, d),
             "gamma": mpmath.nstr(z.location.imag, d),
             "error_radius": repr(z.error_radius), "kind": z.kind} for z in inv.zeros]


def _inventory_payload(inv, digits: int) -> dict:
    return {"target": inv.target, "T": inv.T, "T_certified": inv.T_certified,
            "argument_total": inv.argument_total, "listed_count": inv.listed_count,
            "certified": inv.certified, "precision_digits": inv.precision_digits,
            "unresolved": [list(u) for u in inv.unresolved],
            "zeros": _zero_rows(inv, digits)}


# ---------------------------------------------------------------------------
# commands
# ---------------------------------------------------------------------------

def cmd_chars_enum(args, cfg):
    ds = enumerate_fundamental_discriminants(args.bound)
    rows = [{"d": d, "conductor": abs(d), "parity": "even" if d > 0 else "odd"} for d in ds]
    _emit(rows, args, cfg, rows)


def cmd_lfun_eval(args, cfg):
    ctx = EvaluationContext(cfg.precision_digits)
    chi = None if args.d in (None, 1) else RealPrimitiveCharacter(args.d)
    v = evaluate_l(args.s, chi, ctx, derivative=args.derivative)
    out = {"d": args.d if chi else 1, "s": [args.s.real, args.s.imag],
           "precision_digits": ctx.precision_digits,
           "value": [mpmath.nstr(v.value.real, ctx.precision_digits),
                     mpmath.nstr(v.value.imag, ctx.precision_digits)],
           "error_bound": v.error}
    if args.derivative:
        out["derivative"] = [mpmath.nstr(v.derivative.real, ctx.precision_digits),
                             mpmath.nstr(v.derivative.imag, ctx.precision_digits)]
    _emit(out, args, cfg)


def cmd_zeros_scan(args, cfg):
    ctx = EvaluationContext(cfg.precision_digits)
    target = None if args.d in (None, 1) else RealPrimitiveCharacter(args.d)
    T = args.height if args.height is not None else cfg.T
    if args.cache:
        inv = cached_scan(target, T, ctx, Path(cfg.cache_dir), d_or_pair=args.d)
    else:
        inv = scan_inventory(target, T, ctx)
    _emit(_inventory_payload(inv, cfg.precision_digits), args, cfg,
          _zero_rows(inv, cfg.precision_digits))


def cmd_zeros_hdelta(args, cfg):
    reports = hdelta_family(args.bound, args.delta, DOUBLE_CONTEXT, workers=cfg.workers)
    rows = [r.to_dict() for r in reports]
    _emit(rows, args, cfg, rows)


def _pair_context(args, cfg, T, **kw) -> PairContext:
    d1, d2 = args.pair
    return PairContext.build(d1, d2, delta=args.delta, T=T,
                             cache_dir=cfg.cache_dir if getattr(args, "cache", False) else None,
                             **kw)


def cmd_powersum_run(args, cfg):
    T = args.height if args.height is not None else cfg.T
    kind, val = args.hypothetical_beta2 or ("beta", None)
    if kind != "beta":
        raise UsageError("--hypothetical-beta2 takes a number here")
    if val is None:
        val = 1 - args.delta / math.e + args.eta
    pctx = _pair_context(args, cfg, T, eta=args.eta)
    inst = build_instance(pctx.inventory, val, args.eta, args.ell, dps=cfg.precision_digits,
                          inventory_id=f"{pctx.pair.label()}@T={pctx.T}")
    res = turan_select_k(inst)
    K = compute_K(inst)
    out = {"pair": pctx.pair.label(), "eta": args.eta, "ell": args.ell, "beta2": val,
           "T": pctx.T, "terms": len(inst), "K": mpmath.nstr(K, 15), "result": res.to_dict()}
    if args.ell >= 3:
        out["paper_K_bound"] = paper_K_bound(pctx.inventory, args.delta, args.ell,
                                             pctx.pair.q1, pctx.pair.q2, pctx.pair.q_psi)
    _emit(out, args, cfg)


def cmd_lab_identity(args, cfg):
    T = args.height if args.height is not None else cfg.T
    N = args.series if args.series is not None else cfg.N
    pctx = _pair_context(args, cfg, T, eta=args.eta)
    ctx = EvaluationContext(cfg.precision_digits)
    rep = verify_hadamard_derivative_identity(pctx, args.kl, T=T, N=N, M=cfg.M, ctx=ctx)
    ineq = verify_lemma1_inequality(pctx, args.kl, T=T, M=cfg.M)
    _emit({"identity": rep.to_dict(), "inequality": ineq.to_dict()}, args, cfg)


def cmd_lab_weil(args, cfg):
    pctx = _pair_context(args, cfg, args.height)
    rep = explicit_formula_check(pctx, args.B, zero_height=args.height)
    _emit(rep.to_dict(), args, cfg)


def cmd_lab_ledger(args, cfg):
    _emit(constants_ledger(args.delta, args.eps).to_dict(), args, cfg)


def cmd_lab_chain(args, cfg):
    L1 = mpmath.mpf(args.loglogq1)
    L2 = L1 if args.loglogq2 is None else mpmath.mpf(args.loglogq2)
    kw = {}
    for name, spec, L in (("1", args.beta1, L1), ("2", args.beta2, L2)):
        kind, val = spec
        if kind == "edge":
            with mpmath.workdps(50):
                kw["gap" + name] = mpmath.exp(-mpmath.mpf(args.eps) * L)
        elif kind == "gap":
            kw["gap" + name] = val
        else:
            kw["beta" + name] = val
    rep = contradiction_chain(args.delta, args.eps, L1, k=args.k, loglog_q2=L2, **kw)
    _emit(rep.to_dict(), args, cfg)


# ---------------------------------------------------------------------------
# parser
# ---------------------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    # SUPPRESS keeps a flag given before the subcommand from being reset
    common = argparse.ArgumentParser(add_help=False, argument_default=argparse.SUPPRESS)
    common.add_argument("--config", help=f"JSON config file (default: ${CONFIG_ENV})")
    common.add_argument("--out", help="write the report here instead of stdout")
    common.add_argument("--format", choices=("json", "csv"))
    common.add_argument("--precision", type=int, help="significant digits")
    common.add_argument("--workers", type=int)
    common.add_argument("--cache-dir", dest="cache_dir")

    p = argparse.ArgumentParser(prog="siegellab", parents=[common],
                                description="Real Dirichlet L-functions, zeros and exceptional-zero tests.")
    p.add_argument("--version", action="version", version=__version__)
    top = p.add_subparsers(dest="group", required=True)

    chars = top.add_parser("chars").add_subparsers(dest="cmd", required=True)
    c = chars.add_parser("enum", parents=[common])
    c.add_argument("--bound", type=int, required=True)
    c.set_defaults(func=cmd_chars_enum)

    lfun = top.add_parser("lfun").add_subparsers(dest="cmd", required=True)
    c = lfun.add_parser("eval", parents=[common])
    c.add_argument("--d", type=int, help="fundamental discriminant (omit or 1 for zeta)")
    c.add_argument("--s", type=_complex, required=True)
    c.add_argument("--derivative", action="store_true")
    c.set_defaults(func=cmd_lfun_eval)

    zeros = top.add_parser("zeros").add_subparsers(dest="cmd", required=True)
    c = zeros.add_parser("scan", parents=[common])
    c.add_argument("--d", type=int, help="fundamental discriminant (omit or 1 for zeta)")
    c.add_argument("--height", type=float)
    c.add_argument("--cache", action="store_true")
    c.set_defaults(func=cmd_zeros_scan)
    c = zeros.add_parser("hdelta", parents=[common])
    c.add_argument("--bound", type=int, required=True)
    c.add_argument("--delta", type=float, default=0.1)
    c.set_defaults(func=cmd_zeros_hdelta)

    ps = top.add_parser("powersum").add_subparsers(dest="cmd", required=True)
    c = ps.add_parser("run", parents=[common])
    c.add_argument("--pair", type=_pair, required=True)
    c.add_argument("--eta", type=float, required=True)
    c.add_argument("--ell", type=int, required=True)
    c.add_argument("--delta", type=float, default=0.1)
    c.add_argument("--hypothetical-beta2", dest="hypothetical_beta2", type=_beta)
    c.add_argument("--height", type=float)
    c.add_argument("--cache", action="store_true")
    c.set_defaults(func=cmd_powersum_run)

    lab = top.add_parser("lab").add_subparsers(dest="cmd", required=True)
    c = lab.add_parser("identity", parents=[common])
    c.add_argument("--pair", type=_pair, required=True)
    c.add_argument("--kl", type=int, required=True)
    c.add_argument("--height", type=float)
    c.add_argument("--series", type=int)
    c.add_argument("--delta", type=float, default=0.1)
    c.add_argument("--eta", type=float)
    c.add_argument("--cache", action="store_true")
    c.set_defaults(func=cmd_lab_identity)
    c = lab.add_parser("weil", parents=[common])
    c.add_argument("--pair", type=_pair, required=True)
    c.add_argument("--B", type=float, default=2.0)
    c.add_argument("--height", type=float, default=100.0)
    c.add_argument("--delta", type=float, default=0.1)
    c.add_argument("--cache", action="store_true")
    c.set_defaults(func=cmd_lab_weil)
    c = lab.add_parser("ledger", parents=[common])
    c.add_argument("--delta", type=float, required=True)
    c.add_argument("--eps", type=float, required=True)
    c.set_defaults(func=cmd_lab_ledger)
    c = lab.add_parser("chain", parents=[common])
    c.add_argument("--delta", type=float, required=True)
    c.add_argument("--eps", type=float, required=True)
    c.add_argument("--loglogq1", required=True)
    c.add_argument("--loglogq2")
    c.add_argument("--beta1", type=_beta, required=True)
    c.add_argument("--beta2", type=_beta, required=True)
    c.add_argument("--k", type=int, default=120)
    c.set_defaults(func=cmd_lab_chain)
    return p


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        cfg = RunConfig.load(getattr(args, "config", None)).override(args)
        args.func(args, cfg)
    except UsageError as exc:
        parser.print_usage(sys.stderr)
        print(f"siegellab: error: {exc}", file=sys.stderr)
        return 2
    except SiegelLabError as exc:
        print(f"{type(exc).__name__}: {exc}", file=sys.stderr)
        return 1
    except (ValueError, ZeroDivisionError, ArithmeticError) as exc:
        print(f"{type(exc).__name__}: {exc}", file=sys.stderr)
        return 1
    return 0


if __name__ == "__main__":
    sys.exit(main())
