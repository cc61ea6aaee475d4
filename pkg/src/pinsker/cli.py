"""Command-line interface: evaluate bounds, write CSV scans, run checks.

Exit codes: 0 success, 1 failed verification, 2 usage error, 3 I/O error.
"""

from __future__ import annotations

import argparse
import json
import math
import os
import sys
import tempfile

import numpy as np

from pinsker import analytic, engine, verify
from pinsker.divergences import (
    DivergenceSpec,
    Family,
    ParameterDomainError,
    catalog_list,
    eval_binary,
    parse_spec,
)
from pinsker.states import classicalize, eval_quantum, sample_pair, trace_distance

EXIT_OK, EXIT_FAIL, EXIT_USAGE, EXIT_IO = 0, 1, 2, 3


class UsageError(Exception):
    pass


def fmt(x: float) -> str:
    """17 significant digits; ``inf``/``-inf``/``nan`` literals."""
    x = float(x)
    if math.isnan(x):
        return "nan"
    if math.isinf(x):
        return "inf" if x > 0 else "-inf"
    return f"{x:.17g}"


def write_atomic(path: str, text: str) -> None:
    """Write ``text`` to ``path`` through a temporary file and a rename."""
    directory = os.path.dirname(os.path.abspath(path))
    fd, tmp = tempfile.mkstemp(dir=directory, prefix=".tmp-", suffix=os.path.basename(path))
    try:
        with os.fdopen(fd, "w", newline="\n") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def render_table(columns: list[str], rows, fmt_name: str) -> str:
    if fmt_name == "json":
        recs = [{c: (v if isinstance(v, str) else fmt(v)) for c, v in zip(columns, row)}
                for row in rows]
        return json.dumps(recs, indent=1) + "\n"
    lines = [",".join(columns)]
    lines += [",".join(v if isinstance(v, str) else fmt(v) for v in row) for row in rows]
    return "\n".join(lines) + "\n"


def emit(text: str, out: str | None) -> None:
    if out is None:
        sys.stdout.write(text)
    else:
        write_atomic(out, text)


def _spec(args) -> DivergenceSpec:
    if args.divergence is None:
        raise UsageError("--divergence is required")
    return parse_spec(args.divergence, args.alpha, args.epsilon)


def _check_unit(name: str, x: float) -> None:
    if not 0.0 <= x <= 1.0:
        raise UsageError(f"{name} must lie in [0, 1], got {x}")


# ---------------------------------------------------------------------------
# subcommands


def cmd_catalog(args) -> int:
    entries = catalog_list()
    cols = ["family", "parameters", "alpha", "linear_closed_form", "convex_closed_form"]
    rows = [[e.family.value, " ".join(e.parameters) or "-", e.alpha_range,
             e.linear_analytic, e.convex_analytic] for e in entries]
    if args.format == "json":
        emit(json.dumps([dict(zip(cols, r)) for r in rows], indent=1) + "\n", args.out)
    else:
        emit(render_table(cols, [[f'"{c}"' if "," in c else c for c in r] for r in rows],
                          "csv"), args.out)
    return EXIT_OK


def cmd_bound(args) -> int:
    spec = _spec(args)
    if args.t is None:
        raise UsageError("--t is required")
    _check_unit("--t", args.t)
    if args.method == "numeric":
        # at T = 1 the chain is finite and only a strict lower bound
        value, method = float(engine.numeric_bound(spec)(args.t)), "numeric"
    else:
        try:
            value, method = engine.convex_bound(spec, args.t, args.method)
        except engine.OutOfDomainError as exc:
            raise UsageError(str(exc)) from exc
    print(f"{fmt(value)}\t{method}")
    return EXIT_OK


def _scan_method(requested: str, available: bool) -> str:
    if requested == "auto":
        return "analytic" if available else "numeric"
    if requested == "analytic" and not available:
        raise UsageError("no closed form on the whole requested range; use --method numeric")
    return requested


def cmd_linear(args) -> int:
    spec = _spec(args)
    if args.lam is not None:
        lams = np.array([args.lam])
    else:
        if args.lambda_max is None:
            raise UsageError("give --lambda or --lambda-min/--lambda-max/--lambda-steps")
        if args.lambda_steps < 1 or not 0 <= args.lambda_min <= args.lambda_max:
            raise UsageError("need 0 <= lambda-min <= lambda-max and lambda-steps >= 1")
        lams = np.linspace(args.lambda_min, args.lambda_max, args.lambda_steps)
    if np.any(lams < 0):
        raise UsageError("lambda must be nonnegative")
    closed = [analytic.linear_bound_analytic(spec, lam) for lam in lams]
    method = _scan_method(args.method, all(v is not None for v in closed))
    rows = []
    for lam, cv in zip(lams, closed):
        value, pair = engine.linear_bound_numeric(spec, lam)
        if method == "analytic":
            value = cv
            if spec.canonical().family is Family.UMEGAKI:
                pair = analytic.umegaki_minimizer(lam)
        rows.append([lam, value, pair[0], pair[1]])
    print(f"method: {method}", file=sys.stderr)
    emit(render_table(["lambda", "L", "r_star", "s_star"], rows, args.format), args.out)
    return EXIT_OK


def cmd_scan(args) -> int:
    spec = _spec(args)
    _check_unit("--t-min", args.t_min)
    _check_unit("--t-max", args.t_max)
    if not args.t_min < args.t_max or args.steps < 2:
        raise UsageError("need t-min < t-max and steps >= 2")
    ts = np.linspace(args.t_min, args.t_max, args.steps)
    closed = [analytic.convex_bound_analytic(spec, t) for t in ts]
    method = _scan_method(args.method, all(v is not None for v in closed))
    if method == "analytic":
        vals = closed
    else:
        vals = list(np.asarray(engine.numeric_bound(spec)(ts), dtype=float))
    print(f"method: {method}", file=sys.stderr)
    emit(render_table(["T", "bound"], zip(ts, vals), args.format), args.out)
    return EXIT_OK


def cmd_curve(args) -> int:
    t_min = 1e-4 if args.t_min is None else args.t_min
    t_max = 50.0 if args.t_max is None else args.t_max
    if not 0 < t_min < t_max or args.steps < 2:
        raise UsageError("need 0 < t-min < t-max and steps >= 2")
    rows = []
    for t in np.geomspace(t_min, t_max, args.steps):
        p = analytic.umegaki_parametrized(t)
        rows.append([p.t, p.T, p.D])
    emit(render_table(["t", "T", "D"], rows, args.format), args.out)
    return EXIT_OK


def cmd_sample(args) -> int:
    spec = _spec(args)
    if args.dim < 2 or args.n < 1:
        raise UsageError("need --dim >= 2 and --n >= 1")
    rows = []
    for i in range(args.n):
        rho, sigma = sample_pair(args.seed, args.dim, i, diagonal=args.diagonal)
        t = trace_distance(rho, sigma)
        if spec.canonical().family is Family.SMOOTHED_MAX:
            if not args.diagonal or args.dim != 2:
                raise UsageError("smoothed-max samples need --diagonal --dim 2")
            d = eval_binary(spec, classicalize(rho, sigma))
        else:
            d = eval_quantum(spec, rho, sigma, args.variant)
        rows.append([t, d])
    emit(render_table(["T", "D"], rows, args.format), args.out)
    return EXIT_OK


def _parse_families(text: str) -> tuple[DivergenceSpec, ...]:
    specs = []
    for item in text.split(","):
        item = item.strip()
        if not item:
            continue
        name, _, param = item.partition(":")
        try:
            value = float(param) if param else None
        except ValueError as exc:
            raise UsageError(f"bad parameter in --families item {item!r}") from exc
        fam_key = name.lower().replace("_", "-")
        if fam_key in ("smoothed-max", "smax"):
            specs.append(parse_spec(name, epsilon=0.2 if value is None else value))
        else:
            specs.append(parse_spec(name, alpha=value))
    if not specs:
        raise UsageError("--families is empty")
    return tuple(specs)


def cmd_verify(args) -> int:
    kwargs = {"seed": args.seed, "pairs_per_dim": args.n}
    if args.families:
        kwargs["families"] = _parse_families(args.families)
    if args.checks:
        kwargs["checks"] = tuple(c.strip() for c in args.checks.split(",") if c.strip())
    if args.tol is not None:
        kwargs["tolerances"] = {k: args.tol for k in verify.default_tolerances()}
    try:
        cfg = verify.SuiteConfig(**kwargs)
    except ValueError as exc:
        raise UsageError(str(exc)) from exc
    report = verify.run_suite(cfg)
    text = report.to_json() + "\n" if args.format == "json" else report.to_text() + "\n"
    emit(text, args.out)
    return EXIT_OK if report.passed else EXIT_FAIL


# ---------------------------------------------------------------------------
# parser


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="pinsker",
                                description="Optimal trace-distance bounds on divergences.")
    sub = p.add_subparsers(dest="command", required=True)

    def family_flags(sp, required=True):
        sp.add_argument("--divergence", required=required,
                        help="family name, e.g. umegaki, renyi, max, smoothed-max")
        sp.add_argument("--alpha", type=float, help="order for renyi / hellinger")
        sp.add_argument("--epsilon", type=float, help="smoothing for smoothed-max")

    def output_flags(sp, formats=("csv", "json")):
        sp.add_argument("--out", help="output file (default: stdout)")
        sp.add_argument("--format", choices=formats, default=formats[0])

    sp = sub.add_parser("catalog", help="list supported divergence families")
    output_flags(sp)
    sp.set_defaults(func=cmd_catalog)

    sp = sub.add_parser("bound", help="evaluate the convex bound at one T")
    family_flags(sp)
    sp.add_argument("--t", type=float, required=True)
    sp.add_argument("--method", choices=("analytic", "numeric", "auto"), default="auto")
    sp.set_defaults(func=cmd_bound)

    sp = sub.add_parser("linear", help="optimal linear bound and minimizers")
    family_flags(sp)
    sp.add_argument("--lambda", dest="lam", type=float)
    sp.add_argument("--lambda-min", type=float, default=0.0)
    sp.add_argument("--lambda-max", type=float)
    sp.add_argument("--lambda-steps", type=int, default=50)
    sp.add_argument("--method", choices=("analytic", "numeric", "auto"), default="auto")
    output_flags(sp)
    sp.set_defaults(func=cmd_linear)

    sp = sub.add_parser("scan", help="convex bound on a T grid")
    family_flags(sp)
    sp.add_argument("--t-min", type=float, default=0.0)
    sp.add_argument("--t-max", type=float, default=0.99)
    sp.add_argument("--steps", type=int, default=100)
    sp.add_argument("--method", choices=("analytic", "numeric", "auto"), default="auto")
    output_flags(sp)
    sp.set_defaults(func=cmd_scan)

    sp = sub.add_parser("curve", help="parametrized relative-entropy bound curve")
    sp.add_argument("--t-min", type=float, help="smallest curve parameter (default 1e-4)")
    sp.add_argument("--t-max", type=float, help="largest curve parameter (default 50)")
    sp.add_argument("--steps", type=int, default=200)
    output_flags(sp)
    sp.set_defaults(func=cmd_curve)

    sp = sub.add_parser("sample", help="random (T, D) scatter")
    family_flags(sp)
    sp.add_argument("--dim", type=int, default=2)
    sp.add_argument("--n", type=int, default=1000)
    sp.add_argument("--seed", type=int, default=0)
    sp.add_argument("--variant", choices=("petz", "sandwiched"), default="petz")
    sp.add_argument("--diagonal", action="store_true",
                    help="draw commuting diagonal pairs only")
    output_flags(sp)
    sp.set_defaults(func=cmd_sample)

    sp = sub.add_parser("verify", help="run the property suite")
    sp.add_argument("--families", help="comma list, e.g. max,renyi:2,smoothed-max:0.2")
    sp.add_argument("--checks", help="comma list from: " + ",".join(verify.CHECKS))
    sp.add_argument("--n", type=int, default=2500, help="pairs per dimension")
    sp.add_argument("--seed", type=int, default=0)
    sp.add_argument("--tol", type=float, help="override every tolerance")
    output_flags(sp, formats=("text", "json"))
    sp.set_defaults(func=cmd_verify)
    return p


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except (UsageError, ParameterDomainError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except OSError as exc:
        print(f"I/O error: {exc}", file=sys.stderr)
        return EXIT_IO


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
