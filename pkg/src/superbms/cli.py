"""Command-line front end: ``superbms <subcommand> [options]``.

Exit codes: 0 success, 1 usage error, 2 verification failure.
"""
from __future__ import annotations

import argparse
import csv
import io
import json
import random
import sys
from fractions import Fraction
from typing import Sequence

from .algebra import HalfInt, M
from .exactnum import Poly, format_rational, parse_rational
from .freefield import (
    FfrParams,
    HcModuleSpec,
    bms_whittaker_simple,
    fock_simple,
    fock_violation,
    fock_whittaker_simple,
    hc_whittaker_simple,
    recover_central_charges,
    residual_suite,
    suite_generators,
    whittaker_action_table,
)
from .pbw import partition_count
from .verma import (
    WeightParams,
    det_identity_at,
    det_identity_symbolic,
    diagonal_report,
    format_level,
    gram_data,
    singular_vectors,
    vacuum_simple,
    verma_simple,
    violation_level,
)

DEFAULT_SEED = 20240917
EXIT_OK, EXIT_USAGE, EXIT_FAIL = 0, 1, 2


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def _rational(text: str) -> Fraction:
    try:
        return parse_rational(text)
    except (ValueError, ZeroDivisionError):
        raise argparse.ArgumentTypeError(f"not a rational number: {text!r}") from None


def _half_int(text: str) -> HalfInt:
    try:
        return HalfInt.of(parse_rational(text))
    except (ValueError, ZeroDivisionError):
        raise argparse.ArgumentTypeError(f"not a half-integer: {text!r}") from None


def _rational_or_symbol(text: str):
    if text == "symbolic":
        return None
    return _rational(text)


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--format", choices=("text", "json", "csv"), default="text")
    common.add_argument("--output", "-o", help="write the report here instead of stdout")
    common.add_argument("--seed", type=int, default=DEFAULT_SEED,
                        help=f"seed for randomized specializations (default {DEFAULT_SEED})")

    weights = argparse.ArgumentParser(add_help=False)
    for name in ("h1", "h2", "c1", "c2"):
        weights.add_argument(f"--{name}", type=_rational)

    p = _Parser(prog="superbms", description="Exact computations for the N=1 BMS superalgebra.")
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)

    g = sub.add_parser("gram", parents=[common, weights], help="Gram and D matrices at one level")
    g.add_argument("--level", type=_half_int, required=True)
    g.add_argument("--symbolic", action="store_true", help="keep h1, h2, c1, c2 symbolic (default if none given)")
    g.add_argument("--matrix", choices=("gram", "dmat"), default="gram", help="matrix written in csv format")
    g.add_argument("--no-det", action="store_true", help="skip the determinant")

    d = sub.add_parser("detcheck", parents=[common], help="det(G) = +-prod d_ii")
    d.add_argument("--max-level", type=_half_int, default=HalfInt(7))
    d.add_argument("--symbolic-max", type=_half_int, default=HalfInt(4))
    d.add_argument("--trials", type=int, default=5)

    s = sub.add_parser("simplicity", parents=[common], help="simplicity predicates")
    s.add_argument("--kind", choices=("verma", "vacuum", "fock", "hc-whittaker", "fock-whittaker", "bms-whittaker"),
                   default="verma")
    s.add_argument("--h2", type=_rational)
    s.add_argument("--c2", type=_rational)
    s.add_argument("--max-i", type=int, default=50)
    s.add_argument("--a", type=_rational, default=Fraction(0))
    s.add_argument("--b", type=_rational)
    s.add_argument("--rho", type=_rational)
    s.add_argument("--phi-k", type=_rational)
    s.add_argument("--phi-b1", type=_rational)
    s.add_argument("--k", type=int, help="index k of the universal Whittaker module")
    s.add_argument("--phi-m", type=_rational, nargs=2, metavar=("PHI_M2K_1", "PHI_M2K"),
                   help="phi(M_{2k-1}) and phi(M_{2k})")

    v = sub.add_parser("singular", parents=[common, weights], help="singular vectors at one level")
    v.add_argument("--level", type=_half_int, required=True)
    v.add_argument("--mode-cutoff", type=int)

    f = sub.add_parser("ffr-verify", parents=[common], help="commutator residuals of the free-field realization")
    f.add_argument("--max-mode", type=int, default=3)
    f.add_argument("--max-depth", type=_half_int, default=HalfInt(8))
    f.add_argument("--rho", type=_rational_or_symbol, default=None, help='"symbolic" or a rational')
    f.add_argument("--spec", choices=("verma", "whittaker", "both"), default="both")

    w = sub.add_parser("whittaker", parents=[common], help="action of positive modes on a Whittaker vector")
    w.add_argument("--rho", type=_rational_or_symbol, default=None)
    w.add_argument("--max-mode", type=int, default=5)
    for name in ("a0", "a1", "b0", "b1"):
        w.add_argument(f"--phi-{name}", type=_rational)

    n = sub.add_parser("partition", parents=[common], help="dim M(h1,h2,c1,c2)_n")
    n.add_argument("--n", type=_half_int, required=True)
    return p


# --- commands: each returns (payload, text lines, csv rows or None, ok) -------------------


def _weights(args) -> WeightParams:
    vals = [getattr(args, k) for k in ("h1", "h2", "c1", "c2")]
    if getattr(args, "symbolic", False) or all(x is None for x in vals):
        if any(x is not None for x in vals):
            raise UsageError("--symbolic cannot be combined with numeric weights")
        return WeightParams.symbolic()
    sym = WeightParams.symbolic().as_tuple()
    return WeightParams(*[Poly.const(x) if x is not None else s for x, s in zip(vals, sym)])


def cmd_gram(args):
    gd = gram_data(args.level, _weights(args))
    payload = gd.to_json(include_det=not args.no_det)
    lines = [f"level {payload['level']}  basis size {len(gd.basis)}"]
    for t, entry in zip(gd.basis, diagonal_report(args.level, gd.params)):
        lines.append(f"  d[{t}] = {entry.computed}")
    lines.append(f"  lower triangular: {gd.dmat.is_lower_triangular()}")
    if "det" in payload:
        lines.append(f"  det = {payload['det']}")
    mat = gd.gram if args.matrix == "gram" else gd.dmat
    header = [str(t) for t in gd.basis]
    rows = [[""] + header] + [[t] + row for t, row in zip(header, mat.to_strings())]
    return payload, lines, rows, True


def _random_point(rng: random.Random) -> dict[str, Fraction]:
    def q():
        num = rng.randint(-9, 9)
        return Fraction(num if num else 1, rng.randint(1, 5))
    return {k: q() for k in ("h1", "h2", "c1", "c2")}


def cmd_detcheck(args):
    rng = random.Random(args.seed)
    cells = []
    ok = True
    for t in range(0, args.max_level.twice + 1):
        n = HalfInt(t)
        if t <= args.symbolic_max.twice:
            good, det, prod = det_identity_symbolic(n)
            cells.append({"level": format_level(n), "mode": "symbolic", "ok": good,
                          "det": str(det), "signed_product": str(prod)})
            ok &= good
        for _ in range(args.trials):
            pt = _random_point(rng)
            good, det, prod = det_identity_at(n, pt)
            cells.append({"level": format_level(n), "mode": "point", "ok": good,
                          "point": {k: format_rational(v) for k, v in pt.items()},
                          "det": format_rational(det), "signed_product": format_rational(prod)})
            ok &= good
    payload = {"seed": args.seed, "ok": ok, "cells": cells}
    lines = [f"{c['level']:>4} {c['mode']:<8} {'ok' if c['ok'] else 'MISMATCH'}"
             + (f"  at {c['point']}" if c["mode"] == "point" else "") for c in cells]
    rows = [["level", "mode", "ok", "det", "signed_product"]]
    rows += [[c["level"], c["mode"], str(c["ok"]), c["det"], c["signed_product"]] for c in cells]
    return payload, lines, rows, ok


def _need(args, *names):
    missing = [n for n in names if getattr(args, n.replace("-", "_")) is None]
    if missing:
        raise UsageError(f"--kind {args.kind} needs " + ", ".join("--" + n for n in missing))


def cmd_simplicity(args):
    kind = args.kind
    if kind == "verma":
        _need(args, "h2", "c2")
        rep = verma_simple(args.h2, args.c2, args.max_i)
        payload = {"kind": kind, "h2": format_rational(args.h2), "c2": format_rational(args.c2),
                   "simple": rep.simple, "violations": list(rep.violations),
                   "first_levels": [format_level(violation_level(i)) for i in rep.violations]}
    elif kind == "vacuum":
        _need(args, "c2")
        payload = {"kind": kind, "c2": format_rational(args.c2), "simple": vacuum_simple(args.c2)}
    elif kind == "fock":
        _need(args, "b", "rho")
        n = fock_violation(args.b, args.rho)
        payload = {"kind": kind, "a": format_rational(args.a), "b": format_rational(args.b),
                   "rho": format_rational(args.rho), "simple": fock_simple(args.a, args.b, args.rho),
                   "violating_n": n}
    elif kind == "hc-whittaker":
        _need(args, "phi-k")
        from .algebra import K
        payload = {"kind": kind, "phi_k": format_rational(args.phi_k),
                   "simple": hc_whittaker_simple({K: args.phi_k})}
    elif kind == "fock-whittaker":
        _need(args, "phi-b1")
        from .algebra import b as b_
        payload = {"kind": kind, "phi_b1": format_rational(args.phi_b1),
                   "simple": fock_whittaker_simple({b_(1): args.phi_b1})}
    else:
        _need(args, "k", "phi-m")
        if args.k < 1:
            raise UsageError("--k must be a positive integer")
        lo, hi = args.phi_m
        phi = {M(2 * args.k - 1): lo, M(2 * args.k): hi}
        payload = {"kind": kind, "k": args.k, "phi": [format_rational(lo), format_rational(hi)],
                   "simple": bms_whittaker_simple(phi, args.k)}
    lines = [f"{kind}: {'simple' if payload['simple'] else 'not simple'}"]
    if payload.get("violations"):
        lines.append("  violating i: " + ", ".join(map(str, payload["violations"][:20])))
    if payload.get("violating_n") is not None:
        lines.append(f"  violating n: {payload['violating_n']}")
    rows = [list(payload), [str(x) for x in payload.values()]]
    return payload, lines, rows, True


def cmd_singular(args):
    params = _weights(args)
    if not params.is_numeric():
        raise UsageError("singular needs numeric --h1 --h2 --c1 --c2")
    try:
        vecs = singular_vectors(args.level, params, args.mode_cutoff)
    except ValueError as exc:
        raise UsageError(str(exc)) from None
    payload = {"level": format_level(args.level), "params": [str(x) for x in params.as_tuple()],
               "dimension": len(vecs),
               "vectors": [{str(t): str(c) for t, c in sorted(v.terms.items(), key=lambda kv: str(kv[0]))}
                           for v in vecs]}
    lines = [f"level {payload['level']}: singular space of dimension {len(vecs)}"]
    lines += [f"  {v}" for v in vecs]
    rows = [["vector", "monomial", "coeff"]]
    rows += [[str(n), t, c] for n, v in enumerate(payload["vectors"]) for t, c in v.items()]
    return payload, lines, rows, True


def _ffr_params(rho) -> FfrParams:
    return FfrParams("rho" if rho is None else Poly.const(rho))


def cmd_ffr_verify(args):
    if args.max_mode < 0:
        raise UsageError("--max-mode must be nonnegative")
    if args.max_depth.twice < 2 * args.max_mode:
        raise UsageError("--max-depth must be at least --max-mode")
    p = _ffr_params(args.rho)
    specs = ["verma", "whittaker"] if args.spec == "both" else [args.spec]
    gens = suite_generators(args.max_mode)
    results = []
    ok = True
    lines = []
    for kind in specs:
        spec = HcModuleSpec.verma() if kind == "verma" else HcModuleSpec.whittaker()
        reports = residual_suite(gens, spec, p, args.max_depth)
        c1, c2 = recover_central_charges(spec, p)
        bad = [r for r in reports if not r.ok]
        central_ok = (c1, c2) == p.central_charges
        ok &= not bad and central_ok
        results.append({"spec": kind, "pairs": len(reports), "failures": len(bad),
                        "recovered_central": [str(c1), str(c2)],
                        "reports": [r.to_json() for r in reports]})
        lines.append(f"{kind}: {len(reports)} pairs, depth <= {args.max_depth}, "
                     f"{len(bad)} nonzero residuals, central charges ({c1}, {c2})")
        lines += [f"  residual {r.pair}: {r.max_residual_terms} terms" for r in bad]
    payload = {"rho": str(p.rho), "max_mode": args.max_mode, "cutoff": format_level(args.max_depth),
               "ok": ok, "results": results}
    rows = [["spec", "x", "y", "cutoff", "max_residual_terms"]]
    rows += [[res["spec"], *r["pair"], r["cutoff"], str(r["max_residual_terms"])]
             for res in results for r in res["reports"]]
    return payload, lines, rows, ok


def cmd_whittaker(args):
    phi = {name: getattr(args, f"phi_{name}") for name in ("a0", "a1", "b0", "b1")}
    spec = HcModuleSpec.whittaker(**{f"phi_{k}": (v if v is not None else f"phi_{k}") for k, v in phi.items()})
    p = _ffr_params(args.rho)
    table = whittaker_action_table(spec, p.rho, args.max_mode)
    payload = {"rho": str(p.rho), "table": [{"generator": g, "image": v.to_json()} for g, v in table]}
    lines = [f"{g} w = {v}" for g, v in table]
    rows = [["generator", "monomial", "coeff"]]
    rows += [[g, t["monomial"], t["coeff"]] for g, v in table for t in v.to_json()]
    return payload, lines, rows, True


def cmd_partition(args):
    n = partition_count(args.n)
    payload = {"n": format_level(args.n), "count": n}
    return payload, [str(n)], [["n", "count"], [payload["n"], str(n)]], True


COMMANDS = {
    "gram": cmd_gram,
    "detcheck": cmd_detcheck,
    "simplicity": cmd_simplicity,
    "singular": cmd_singular,
    "ffr-verify": cmd_ffr_verify,
    "whittaker": cmd_whittaker,
    "partition": cmd_partition,
}


def _render(fmt: str, payload, lines, rows) -> str:
    if fmt == "json":
        return json.dumps(payload, indent=2) + "\n"
    if fmt == "csv":
        buf = io.StringIO()
        csv.writer(buf, lineterminator="\n").writerows(rows)
        return buf.getvalue()
    return "\n".join(lines) + "\n"


def run(argv: Sequence[str] | None = None, stdout=None) -> int:
    stdout = stdout or sys.stdout
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    try:
        payload, lines, rows, ok = COMMANDS[args.command](args)
    except UsageError as exc:
        print(f"superbms {args.command}: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    text = _render(args.format, payload, lines, rows)
    if args.output:
        with open(args.output, "w", encoding="utf-8") as fh:
            fh.write(text)
    else:
        stdout.write(text)
    return EXIT_OK if ok else EXIT_FAIL


def main() -> None:
    sys.exit(run())
