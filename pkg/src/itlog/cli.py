"""Command-line front-end.

Exit codes: 0 success, 1 computational error, 2 usage error.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
from fractions import Fraction

from .cache import SeriesCache, cache_key
from .errors import ItlogError
from .expr import ExpressionMap, eval_expression, normalized, parse
from .funceq import flow, itlog, julia_residual
from .guesser import SearchBounds, egf_ogf_transform, guess_ade, guess_linear_ode
from .poincare import find_repelling_fixed_point, poincare_eval, read_samples, write_reports
from .series import ParabolicGerm, PowerSeries
from .verify import SUITES, run_suite

SCHEMA = 1

# (max_order, max_total_degree, max_z_degree, margin)
ADE_DEFAULTS = (2, 3, 4, 20)
ODE_DEFAULTS = (2, 1, 2, 20)


class UsageError(Exception):
    pass


def _rational(text: str) -> Fraction:
    try:
        return Fraction(text.strip())
    except (ValueError, ZeroDivisionError):
        raise argparse.ArgumentTypeError(f"not a rational number: {text!r}") from None


def _param(text: str):
    name, sep, value = text.partition("=")
    if not sep or not name.strip().isidentifier():
        raise argparse.ArgumentTypeError(f"expected name=value, got {text!r}")
    return name.strip(), _rational(value)


def _complex_pair(text: str) -> complex:
    parts = text.split(",")
    try:
        if len(parts) == 1:
            return complex(float(parts[0]), 0.0)
        if len(parts) == 2:
            return complex(float(parts[0]), float(parts[1]))
    except ValueError:
        pass
    raise argparse.ArgumentTypeError(f"expected RE,IM, got {text!r}")


def _nonneg(text: str) -> int:
    try:
        v = int(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"not an integer: {text!r}") from None
    if v < 0:
        raise argparse.ArgumentTypeError("must be non-negative")
    return v


def _rat_str(c) -> str:
    c = Fraction(c)
    return f"{c.numerator}/{c.denominator}"


class Context:
    def __init__(self, args):
        self.args = args
        self.params = dict(args.param or [])
        self.cache = SeriesCache(args.cache_dir, enabled=not args.no_cache)
        self.json = args.json

    def parse(self, text):
        return parse(text, self.params)

    def key_text(self, ast) -> str:
        used = sorted((k, _rat_str(v)) for k, v in self.params.items())
        return normalized(ast) + (" | " + ",".join(f"{k}={v}" for k, v in used) if used else "")

    def germ(self, text: str, order: int):
        ast = self.parse(text)
        s = eval_expression(ast, order, self.params)
        return ast, ParabolicGerm.from_series(s)

    def itlog_phi(self, ast, f: ParabolicGerm, order: int) -> PowerSeries:
        key = cache_key(self.key_text(ast), "itlog", order)

        def check(phi):
            if phi.order != order:
                return False
            n = min(10, order)
            res = julia_residual(f.truncate(n), phi.truncate(n))
            return not any(res.coeffs)

        return self.cache.fetch(key, lambda: itlog(f, order).phi, check, {"operation": "itlog", "order": order})

    def emit(self, text: str = "", doc: dict | None = None):
        if self.json:
            out = {"schema": SCHEMA}
            out.update(doc or {})
            print(json.dumps(out, indent=2))
        else:
            sys.stdout.write(text if text.endswith("\n") or not text else text + "\n")


def _series_doc(s: PowerSeries) -> dict:
    return {"order": s.order, "coefficients": [_rat_str(c) for c in s.coeffs]}


# ---------------------------------------------------------------------------
# subcommands


def cmd_itlog(ctx: Context, a):
    ast, f = ctx.germ(a.f, a.order)
    phi = ctx.itlog_phi(ast, f, a.order)
    trailer = [
        f"# itlog of {a.f}",
        f"# p = {f.p}",
        f"# input truncation: {a.order}",
        f"# verified order: {a.order}",
    ]
    ctx.emit(
        phi.to_text() + "\n".join(trailer) + "\n",
        {
            "command": "itlog",
            "expression": a.f,
            "p": f.p,
            "input_truncation": a.order,
            "verified_order": a.order,
            "phi": _series_doc(phi),
        },
    )


def cmd_flow(ctx: Context, a):
    ast, f = ctx.germ(a.f, a.order)
    key = cache_key(ctx.key_text(ast), "flow", a.order, _rat_str(a.t))
    s = ctx.cache.fetch(key, lambda: flow(f, a.t, a.order), None, {"operation": "flow", "t": _rat_str(a.t)})
    trailer = [f"# flow of {a.f} at t = {a.t}", f"# input truncation: {a.order}"]
    ctx.emit(
        s.to_text() + "\n".join(trailer) + "\n",
        {
            "command": "flow",
            "expression": a.f,
            "t": _rat_str(a.t),
            "input_truncation": a.order,
            "series": _series_doc(s),
        },
    )


def cmd_scan(ctx: Context, a):
    ast, f = ctx.germ(a.f, a.kmax)
    phi = ctx.itlog_phi(ast, f, a.kmax)
    lo = f.p + 1
    zeros = [k for k in range(lo, a.kmax + 1) if phi[k] == 0]
    if zeros:
        text = f"vanishing coefficients at k = {', '.join(map(str, zeros))} (range {lo}..{a.kmax})"
    else:
        text = f"no vanishing coefficients in {lo}..{a.kmax}"
    ctx.emit(
        text + f"\n# input truncation: {a.kmax}\n",
        {"command": "scan", "expression": a.f, "range": [lo, a.kmax], "vanishing": zeros, "input_truncation": a.kmax},
    )


def _bounds(a) -> SearchBounds:
    d = ODE_DEFAULTS if a.mode == "ode" else ADE_DEFAULTS
    pick = lambda v, k: d[k] if v is None else v  # noqa: E731
    return SearchBounds(pick(a.max_order, 0), pick(a.max_degree, 1), pick(a.max_zdeg, 2), pick(a.margin, 3))


def _run_guess(y: PowerSeries, a):
    b = _bounds(a)
    if a.mode == "ode":
        return guess_linear_ode(y, b, affine=a.affine)
    return guess_ade(y, b)


def _guess_doc(out, truncation, command, expression):
    doc = {"command": command, "expression": expression, "input_truncation": truncation}
    doc.update(out.to_dict())
    return doc


def cmd_guess(ctx: Context, a):
    src = a.series
    if os.path.isfile(src):
        with open(src, encoding="utf-8") as fh:
            y = PowerSeries.from_text(fh.read())
        if a.order is not None:
            if a.order > y.order:
                raise UsageError(f"--order {a.order} exceeds the file's order {y.order}")
            y = y.truncate(a.order)
    else:
        if a.order is None:
            raise UsageError("--order is required when --series is an expression")
        y = eval_expression(ctx.parse(src), a.order, ctx.params)
    out = _run_guess(y, a)
    ctx.emit(out.report() + f"\n# input truncation: {y.order}\n", _guess_doc(out, y.order, "guess", src))


def cmd_ogf_probe(ctx: Context, a):
    ast, f = ctx.germ(a.f, a.order)
    phi = ctx.itlog_phi(ast, f, a.order)
    y = egf_ogf_transform(phi, "to_ogf")
    out = _run_guess(y, a)
    note = "# ogf probe: evidence only, the differential transcendence of the ogf is an open question"
    ctx.emit(
        out.report() + f"\n# input truncation: {a.order}\n{note}\n",
        _guess_doc(out, a.order, "ogf-probe", a.f) | {"note": note[2:]},
    )


def cmd_verify(ctx: Context, a):
    checks = run_suite(a.suite)
    ok = all(c.ok for c in checks)
    lines = [c.line() for c in checks]
    lines.append(f"suite {a.suite}: {sum(c.ok for c in checks)}/{len(checks)} passed")
    ctx.emit(
        "\n".join(lines) + "\n",
        {"command": "verify", "suite": a.suite, "passed": ok, "checks": [{"name": c.name, "ok": c.ok} for c in checks]},
    )
    return 0 if ok else 1


def cmd_poincare(ctx: Context, a):
    fmap = ExpressionMap(ctx.parse(a.f), ctx.params, a.f)
    fp = find_repelling_fixed_point(fmap, a.seed, a.period)
    samples = read_samples(a.at)
    reports = [poincare_eval(fmap, fp, z, a.tol) for z in samples]
    if ctx.json:
        ctx.emit(
            doc={
                "command": "poincare",
                "expression": a.f,
                "xi": [fp.xi.real, fp.xi.imag],
                "period": fp.period,
                "multiplier": [fp.multiplier.real, fp.multiplier.imag],
                "error_estimate": "successive difference (heuristic)",
                "reports": [
                    {
                        "z": [z.real, z.imag],
                        "value": [r.value.real, r.value.imag],
                        "n_used": r.n_used,
                        "err": r.error_estimate,
                        "converged": r.converged,
                    }
                    for z, r in zip(samples, reports)
                ],
            }
        )
    else:
        print(f"# xi = {fp.xi}, period {fp.period}, multiplier {fp.multiplier}", file=sys.stderr)
        text = write_reports(samples, reports)
        if a.out:
            with open(a.out, "w", encoding="utf-8", newline="") as fh:
                fh.write(text)
        else:
            sys.stdout.write(text)
    if not all(r.converged for r in reports):
        print("warning: some samples did not converge within n = 200", file=sys.stderr)


# ---------------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--param", action="append", type=_param, metavar="NAME=VALUE", help="bind a rational parameter")
    common.add_argument("--cache-dir", default=None, help="cache directory (default: $ITLOG_CACHE_DIR or ~/.cache/itlog)")
    common.add_argument("--no-cache", action="store_true", help="neither read nor write the cache")
    common.add_argument("--json", action="store_true", help="machine-readable output")

    p = argparse.ArgumentParser(prog="itlog", description="Iterative logarithms, differential polynomials and Poincare functions.")
    sub = p.add_subparsers(dest="command", metavar="COMMAND")
    sub.required = True

    s = sub.add_parser("itlog", parents=[common], help="iterative logarithm of a parabolic germ")
    s.add_argument("--f", required=True, metavar="EXPR")
    s.add_argument("--order", required=True, type=_nonneg)
    s.set_defaults(run=cmd_itlog)

    def guess_flags(s, order_required):
        s.add_argument("--mode", choices=("ade", "ode"), default="ade")
        s.add_argument("--order", type=_nonneg, required=order_required)
        s.add_argument("--max-order", type=_nonneg)
        s.add_argument("--max-degree", type=_nonneg)
        s.add_argument("--max-zdeg", type=_nonneg)
        s.add_argument("--margin", type=_nonneg)
        s.add_argument("--affine", action="store_true", help="ode mode: allow an inhomogeneous polynomial term")

    s = sub.add_parser("guess", parents=[common], help="search for a differential equation")
    s.add_argument("--series", required=True, metavar="EXPR|FILE")
    guess_flags(s, False)
    s.set_defaults(run=cmd_guess)

    s = sub.add_parser("scan", parents=[common], help="list vanishing itlog coefficients")
    s.add_argument("--f", required=True, metavar="EXPR")
    s.add_argument("--kmax", required=True, type=_nonneg)
    s.set_defaults(run=cmd_scan)

    s = sub.add_parser("ogf-probe", parents=[common], help="guess on the ogf of the itlog coefficients")
    s.add_argument("--f", required=True, metavar="EXPR")
    guess_flags(s, True)
    s.set_defaults(run=cmd_ogf_probe)

    s = sub.add_parser("verify", parents=[common], help="run an invariant suite")
    s.add_argument("--suite", required=True, choices=tuple(SUITES))
    s.set_defaults(run=cmd_verify)

    s = sub.add_parser("poincare", parents=[common], help="evaluate a Poincare function on CSV samples")
    s.add_argument("--f", required=True, metavar="EXPR")
    s.add_argument("--seed", required=True, type=_complex_pair, metavar="RE,IM")
    s.add_argument("--period", type=int, default=1)
    s.add_argument("--at", required=True, metavar="FILE.csv")
    s.add_argument("--tol", type=float, default=1e-12)
    s.add_argument("--out", default=None, metavar="FILE.csv")
    s.set_defaults(run=cmd_poincare)

    s = sub.add_parser("flow", parents=[common], help="time-t map of the itlog flow")
    s.add_argument("--f", required=True, metavar="EXPR")
    s.add_argument("--t", required=True, type=_rational)
    s.add_argument("--order", required=True, type=_nonneg)
    s.set_defaults(run=cmd_flow)
    return p


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    ctx = Context(args)
    try:
        rc = args.run(ctx, args)
    except UsageError as exc:
        parser.print_usage(sys.stderr)
        print(f"itlog: error: {exc}", file=sys.stderr)
        return 2
    except (ItlogError, ArithmeticError, ValueError, TypeError, OSError) as exc:
        kind = type(exc).__name__
        if ctx.json:
            print(json.dumps({"schema": SCHEMA, "error": {"type": kind, "message": str(exc)}}))
        print(f"itlog: {kind}: {exc}", file=sys.stderr)
        return 1
    return rc or 0


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
