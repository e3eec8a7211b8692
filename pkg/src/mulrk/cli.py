"""Command-line front end.

Subcommands: solve, compare, convergence, bench, list-problems,
validate-tableau.  Tables go to stdout or --output as CSV (stable: %.17g
numbers, LF endings, no timestamps) or as JSON with a run manifest.
Exit codes: 0 success, 1 failed validation/comparison, 2 bad configuration,
3 solver breakdown (multiplicative derivative undefined).
"""

from __future__ import annotations

import argparse
import csv
import datetime
import io
import json
import os
import sys

import numpy as np

from . import __version__
from .analysis import bench_csv, estimate_order, global_error, time_error_sweep
from .errors import DomainError, ExprError, MulrkError, ShapeError, StepCountError
from .exprparse import Call, evaluate, parse
from .geomcalc import from_complex, from_log
from .hybrid import HybridConfig, solve_hybrid
from .problems import build, registry
from .solvers import MIvp, Trajectory, solve
from .tableau import MButcherTableau, validate_order2, validate_order4


def _fmt(v) -> str:
    if v is None:
        return ""
    if isinstance(v, str):
        return v
    if isinstance(v, int):
        return str(v)
    return f"{float(v):.17g}"


def _write_table(columns, rows, args, command):
    if args.format == "json":
        manifest = {
            "command": command,
            "config": {
                k: v for k, v in sorted(vars(args).items()) if k not in ("func",) and v is not None
            },
            "timestamp": datetime.datetime.now(datetime.timezone.utc).isoformat(),
            "artifact_version": __version__,
        }
        doc = {
            "manifest": manifest,
            "columns": list(columns),
            "rows": [dict(zip(columns, r)) for r in rows],
        }
        text = json.dumps(doc, indent=2, default=_fmt) + "\n"
    else:
        buf = io.StringIO()
        writer = csv.writer(buf, lineterminator="\n")
        writer.writerow(columns)
        for r in rows:
            writer.writerow([_fmt(v) for v in r])
        text = buf.getvalue()
    if args.output:
        with open(args.output, "w", newline="") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def _parse_y0(text: str) -> complex:
    parts = text.split(",")
    if len(parts) not in (1, 2):
        raise ValueError(f"y0 must be 're' or 're,im', got {text!r}")
    re = float(parts[0])
    im = float(parts[1]) if len(parts) == 2 else 0.0
    return complex(re, im)


def _parse_params(items) -> dict[str, float]:
    out = {}
    for item in items or []:
        if "=" not in item:
            raise ValueError(f"--param needs key=value, got {item!r}")
        k, v = item.split("=", 1)
        out[k.strip()] = float(v)
    return out


def _expression_problem(args) -> MIvp:
    y0 = _parse_y0(args.y0)
    x0 = args.x0
    if args.mrhs:
        tree = parse(args.mrhs)

        if isinstance(tree, Call) and tree.fn == "exp":
            # f = exp(w): keep the exponent, no branch cut to choose
            def f_mult(x, y):
                return (from_log(evaluate(tree.arg, x, y[0].to_complex())),)

        else:

            def f_mult(x, y):
                return (from_complex(evaluate(tree, x, y[0].to_complex())),)

        return MIvp("expr", 1, f_mult, x0, (from_complex(y0),))

    tree = parse(args.orhs)

    def g_ord(x, yc):
        return np.array([evaluate(tree, x, yc[0])])

    def f_mult(x, y):
        yc = y[0].to_complex()
        return (from_log(evaluate(tree, x, yc) / yc),)

    return MIvp("expr", 1, f_mult, x0, (from_complex(y0),), g_ord=g_ord)


def _resolve_problem(args) -> tuple[MIvp, object | None]:
    given = [bool(getattr(args, "problem", None)), bool(getattr(args, "mrhs", None)),
             bool(getattr(args, "orhs", None))]
    if sum(given) != 1:
        raise ValueError("give exactly one of --problem, --mrhs, --orhs")
    if args.problem:
        spec = build(args.problem, _parse_params(getattr(args, "param", None)))
        return spec.mivp, spec
    return _expression_problem(args), None


def _load_tableau(path: str | None) -> MButcherTableau | None:
    if not path:
        return None
    with open(path) as fh:
        return MButcherTableau.from_json(fh.read())


def _traj_rows(traj: Trajectory, exact):
    rows = []
    for x, state, meta in zip(traj.xs, traj.states, traj.meta):
        v = state[0].to_complex()
        if exact is not None:
            ex = complex(np.atleast_1d(np.asarray(exact(x), dtype=complex))[0])
            rel = abs(v / ex - 1.0) if ex != 0 else abs(v - ex)
            rows.append((x, v.real, v.imag, ex.real, ex.imag, rel, meta.method))
        else:
            rows.append((x, v.real, v.imag, None, None, None, meta.method))
    return rows


def _cmd_solve(args) -> int:
    p, spec = _resolve_problem(args)
    t = _load_tableau(args.tableau)
    h = args.h if args.h is not None else (spec.default_h if spec else None)
    x_end = args.x_end if args.x_end is not None else (spec.default_x_end if spec else None)
    if h is None or x_end is None:
        raise ValueError("--h and --x-end are required for expression problems")
    if args.hybrid:
        cfg = HybridConfig(
            zero_threshold=args.eps,
            min_ordinary_steps=args.min_steps,
            rearm_factor=args.rearm,
        )
        traj = solve_hybrid(p, h, x_end, cfg, t=t)
    else:
        traj = solve(p, args.method, h, x_end, t=t)
    columns = ("x", "re", "im", "exact_re", "exact_im", "rel_error", "method_tag")
    _write_table(columns, _traj_rows(traj, p.exact), args, "solve")
    return 0


def _cmd_compare(args) -> int:
    if args.from_csv:
        return _compare_csv(args)
    p, spec = _resolve_problem(args)
    t = _load_tableau(args.tableau)
    h = args.h if args.h is not None else (spec.default_h if spec else None)
    x_end = args.x_end if args.x_end is not None else (spec.default_x_end if spec else None)
    if h is None or x_end is None:
        raise ValueError("--h and --x-end are required for expression problems")
    if p.exact is None:
        raise ValueError(f"problem {p.name!r} has no exact solution to compare against")
    mrk = solve(p, "mrk4", h, x_end, t=t)
    baseline = spec.baseline() if spec else p
    rk = solve(baseline, "rk4", h, x_end)
    rows = []
    for i, x in enumerate(mrk.xs):
        ex = complex(np.atleast_1d(np.asarray(p.exact(x), dtype=complex))[0])
        vm = mrk.states[i][0].to_complex()
        vr = rk.states[i][0].to_complex()
        rows.append(
            (x, ex.real, vm.real, abs(vm / ex - 1.0), vr.real, abs(vr / ex - 1.0))
        )
    columns = ("x", "exact", "mrk4", "rel_err_mrk4", "rk4", "rel_err_rk4")
    _write_table(columns, rows, args, "compare")
    return 0


def _read_csv(path: str) -> tuple[list[str], list[list[str]]]:
    with open(path, newline="") as fh:
        reader = csv.reader(fh)
        rows = list(reader)
    if not rows:
        raise ValueError(f"{path}: empty table")
    return rows[0], rows[1:]


def _compare_csv(args) -> int:
    if not args.against:
        raise ValueError("--from-csv needs --against FILE to compare with")
    header_a, rows_a = _read_csv(args.from_csv)
    header_b, rows_b = _read_csv(args.against)
    ignore = set((args.ignore_cols or "").split(",")) - {""}
    if header_a != header_b:
        print(f"headers differ: {header_a} vs {header_b}")
        return 1
    if len(rows_a) != len(rows_b):
        print(f"row counts differ: {len(rows_a)} vs {len(rows_b)}")
        return 1
    worst = 0.0
    mismatches = 0
    for i, (ra, rb) in enumerate(zip(rows_a, rows_b)):
        for col, va, vb in zip(header_a, ra, rb):
            if col in ignore or va == vb:
                continue
            try:
                fa, fb = float(va), float(vb)
            except ValueError:
                mismatches += 1
                print(f"row {i} col {col}: {va!r} != {vb!r}")
                continue
            denom = max(abs(fa), abs(fb), 1e-300)
            rel = abs(fa - fb) / denom
            worst = max(worst, rel)
            if rel > args.rtol:
                mismatches += 1
                print(f"row {i} col {col}: {va} != {vb} (rel {rel:.3g})")
    if mismatches:
        print(f"{mismatches} mismatching cells (worst rel {worst:.3g})")
        return 1
    print(f"tables match ({len(rows_a)} rows, worst rel {worst:.3g})")
    return 0


def _cmd_convergence(args) -> int:
    p, spec = _resolve_problem(args)
    x_end = args.x_end if args.x_end is not None else (spec.default_x_end if spec else None)
    if x_end is None:
        raise ValueError("--x-end is required for expression problems")
    p_hat = estimate_order(p, args.method, args.h0, args.levels, x_end)
    rows = []
    for k in range(args.levels):
        h = args.h0 / 2**k
        traj = solve(p, args.method, h, x_end)
        rec = global_error(traj, p.exact)[-1]
        rows.append((h, rec.log_error, p_hat))
    _write_table(("h", "log_error", "fitted_order"), rows, args, "convergence")
    return 0


def _cmd_bench(args) -> int:
    p, spec = _resolve_problem(args)
    x_end = args.x_end if args.x_end is not None else (spec.default_x_end if spec else None)
    if x_end is None:
        raise ValueError("--x-end is required for expression problems")
    methods = [m.strip() for m in args.methods.split(",") if m.strip()]
    h_list = [float(v) for v in args.h_list.split(",") if v.strip()]
    workers = int(os.environ.get("MULRK_THREADS", "1"))
    samples = time_error_sweep(
        p, methods, h_list, x_end, repeats=args.repeats, max_workers=max(1, workers)
    )
    if args.format == "json":
        columns = ("problem", "method", "h", "steps", "wall_time_s", "final_rel_error")
        rows = [
            (s.problem, s.method, s.h, s.steps, s.wall_time, s.final_rel_error)
            for s in samples
        ]
        _write_table(columns, rows, args, "bench")
    else:
        text = bench_csv(samples)
        if args.output:
            with open(args.output, "w", newline="") as fh:
                fh.write(text)
        else:
            sys.stdout.write(text)
    return 0


def _cmd_list_problems(args) -> int:
    rows = []
    for spec in registry():
        params = ";".join(f"{k}={_fmt(v)}" for k, v in sorted(spec.params.items()))
        rows.append(
            (
                spec.name,
                spec.mivp.dim,
                spec.mivp.x0,
                spec.default_h,
                spec.default_x_end,
                "yes" if spec.mivp.exact is not None else "no",
                params,
            )
        )
    columns = ("name", "dim", "x0", "default_h", "default_x_end", "exact", "params")
    _write_table(columns, rows, args, "list-problems")
    return 0


def _cmd_validate_tableau(args) -> int:
    t = _load_tableau(args.tableau)
    if t is None:
        raise ValueError("--tableau FILE is required")
    if t.stages == 2:
        violations = validate_order2(t)
    elif t.stages == 4:
        violations = validate_order4(t)
    else:
        raise ShapeError(f"no validator for {t.stages}-stage tableaus")
    for v in violations:
        print(v)
    if violations:
        print(f"{len(violations)} violated condition(s)")
        return 1
    print("tableau satisfies all checked order conditions")
    return 0


def _add_problem_args(sub, with_method=True):
    sub.add_argument("--problem", help="registry problem name")
    sub.add_argument("--mrhs", help="multiplicative RHS f(x,y) as an expression")
    sub.add_argument("--orhs", help="ordinary RHS g(x,y) as an expression")
    sub.add_argument("--x0", type=float, default=0.0, help="start point (expression problems)")
    sub.add_argument("--y0", default="1", help="initial value as re or re,im")
    sub.add_argument("--param", action="append", metavar="KEY=VALUE",
                     help="override a named problem constant (repeatable)")
    sub.add_argument("--h", type=float, help="step size")
    sub.add_argument("--x-end", type=float, dest="x_end", help="end of the grid")
    if with_method:
        sub.add_argument("--method", choices=("mrk2", "mrk4", "rk4"), default="mrk4")
    sub.add_argument("--tableau", help="JSON tableau override file")


def _add_output_args(sub):
    sub.add_argument("--output", help="write the table here instead of stdout")
    sub.add_argument("--format", choices=("csv", "json"), default="csv")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="mulrk",
        description="Solvers for multiplicative initial value problems y* = f(x,y).",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    s = sub.add_parser("solve", help="integrate one problem and emit the trajectory")
    _add_problem_args(s)
    s.add_argument("--hybrid", action="store_true", help="bypass roots with ordinary steps")
    s.add_argument("--eps", type=float, help="hybrid handover threshold on |y|")
    s.add_argument("--min-steps", type=int, default=2, dest="min_steps",
                   help="minimum ordinary steps per bypass")
    s.add_argument("--rearm", type=float, default=1.5, help="hand-back hysteresis factor")
    _add_output_args(s)
    s.set_defaults(func=_cmd_solve)

    s = sub.add_parser("compare", help="mrk4 vs classical rk4, side by side")
    _add_problem_args(s, with_method=False)
    s.add_argument("--from-csv", dest="from_csv", help="re-parse an emitted table")
    s.add_argument("--against", help="second table to compare with")
    s.add_argument("--ignore-cols", dest="ignore_cols",
                   help="comma-separated columns to skip (e.g. wall_time_s)")
    s.add_argument("--rtol", type=float, default=0.0, help="relative tolerance per cell")
    _add_output_args(s)
    s.set_defaults(func=_cmd_compare)

    s = sub.add_parser("convergence", help="per-h error table and fitted order")
    _add_problem_args(s)
    s.add_argument("--h0", type=float, required=True, help="coarsest step size")
    s.add_argument("--levels", type=int, default=3, help="number of halvings")
    _add_output_args(s)
    s.set_defaults(func=_cmd_convergence)

    s = sub.add_parser("bench", help="wall time vs error sweep over step sizes")
    _add_problem_args(s, with_method=False)
    s.add_argument("--methods", default="mrk4,rk4", help="comma-separated methods")
    s.add_argument("--h-list", dest="h_list", required=True,
                   help="comma-separated step sizes")
    s.add_argument("--repeats", type=int, default=5)
    _add_output_args(s)
    s.set_defaults(func=_cmd_bench)

    s = sub.add_parser("list-problems", help="show the problem registry")
    _add_output_args(s)
    s.set_defaults(func=_cmd_list_problems)

    s = sub.add_parser("validate-tableau", help="check order conditions of a tableau file")
    s.add_argument("--tableau", required=True, help="JSON tableau file")
    s.set_defaults(func=_cmd_validate_tableau)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except DomainError as exc:
        where = f" at x={exc.x:.17g}" if exc.x is not None else ""
        print(
            f"error: multiplicative derivative broke down{where}: {exc}\n"
            "hint: the solution may cross zero there; try `solve --hybrid`",
            file=sys.stderr,
        )
        return 3
    except (ExprError, ShapeError, StepCountError, MulrkError, ValueError, KeyError,
            OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
