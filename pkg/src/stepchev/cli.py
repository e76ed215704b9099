"""Command-line front end: run constructions and oracles on a problem file and
write CSV or JSON tables of measured errors next to their certificates.

    stepchev stats --input problem.json
    stepchev sweep --input problem.json --degree-range 2:20 --out sweep.csv
    stepchev eps --input values.json --degree 6

Exit status: 0 success, 2 bad input, 3 precondition violated, 4 construction
failed, 5 a row broke ``oracle <= measured <= certificate``.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import sys

from .amplify import _pipeline, eps_general
from .bernstein import eps_two, equal_two_segment
from .errors import (
    ConstructionError,
    DegreeOverflowError,
    DisjointnessError,
    PreconditionError,
    ProblemFormatError,
)
from .intervals import StepFunction, inflate, load_problem
from .newton import eps_small_delta, small_delta_for_system
from .oracle import ORACLE_DEGREE_CAP, ORACLE_FLOOR, minimax_fit
from .poly import GridSpec, sup_error

COLUMNS = ["method", "degree", "m", "measured_error", "certificate", "hull_norm", "oracle_error", "converged"]
SLACK = 1e-12

EXIT_PARSE, EXIT_PRECONDITION, EXIT_CONSTRUCTION, EXIT_VIOLATION = 2, 3, 4, 5


def _fmt(v):
    if v is None:
        return ""
    if isinstance(v, bool):
        return str(v).lower()
    if isinstance(v, float):
        return "%.17g" % v
    return str(v)


def parse_degree_range(text: str) -> list:
    """``A:B`` or ``A:B:step``, inclusive of ``B``."""
    parts = text.split(":")
    if len(parts) not in (2, 3):
        raise argparse.ArgumentTypeError(f"degree range must be A:B or A:B:step, got {text!r}")
    try:
        a, b = int(parts[0]), int(parts[1])
        step = int(parts[2]) if len(parts) == 3 else 1
    except ValueError:
        raise argparse.ArgumentTypeError(f"non-integer degree range {text!r}") from None
    if step <= 0 or a < 0 or b < a:
        raise argparse.ArgumentTypeError(f"empty or invalid degree range {text!r}")
    return list(range(a, b + 1, step))


def _degrees(args) -> list:
    if args.degree_range is not None:
        return args.degree_range
    if args.degree is not None:
        return [args.degree]
    raise PreconditionError("give --degree or --degree-range")


def _row(method, degree, m=None, measured=None, cert=None, hull=None, oracle=None, converged=None, **extra):
    row = {
        "method": method,
        "degree": degree,
        "m": m,
        "measured_error": measured,
        "certificate": cert,
        "hull_norm": hull,
        "oracle_error": oracle,
        "converged": converged,
    }
    row.update(extra)
    return row


def _measured_row(method, f, poly, cert, grid, m=None, oracle=None, converged=None):
    rep = sup_error(poly, f, grid)
    return _row(
        method, poly.degree, m, rep.global_error, cert.value, rep.hull_norm, oracle, converged,
        params=cert.params, formula=cert.formula.value, polynomial=poly.to_dict(),
    )


def _flag(rows) -> bool:
    """Mark rows breaking the sandwich; True when any did. Oracle values at
    the double-precision noise floor say nothing about smaller errors and are
    not compared."""
    bad = False
    for r in rows:
        meas, cert, orc = r["measured_error"], r["certificate"], r["oracle_error"]
        floor = r.get("oracle_lower", orc)
        resolved = orc is not None and orc > ORACLE_FLOOR * r.get("oracle_scale", 1.0)
        broken = meas is not None and cert is not None and meas > cert + SLACK
        broken |= meas is not None and resolved and floor > meas
        if broken:
            r["method"] += ":VIOLATION"
            bad = True
    return bad


def _load(path):
    """Any invalid geometry in the file is reported as bad input."""
    try:
        return load_problem(path)
    except PreconditionError as exc:
        raise ProblemFormatError(str(exc)) from exc


def _step_problem(args):
    prob = _load(args.input)
    if not isinstance(prob, StepFunction):
        raise PreconditionError(f"'{args.command}' needs an interval problem, not a value set")
    return prob


# -- commands -------------------------------------------------------------------

def cmd_stats(args, grid):
    prob = _load(args.input)
    if isinstance(prob, StepFunction):
        s, delta, sigma, D = prob.system.stats()
        return f"s={s} delta={_fmt(delta)} sigma={_fmt(float(sigma))} D={_fmt(D)}\n", None
    Y, delta = prob
    s, d, sigma, D = inflate(Y, delta).stats()
    line = (
        f"s={s} delta={_fmt(d)} sigma={_fmt(float(sigma))} D={_fmt(D)} "
        f"sigma_hat={_fmt(Y.sigma_hat)} D_hat={_fmt(Y.D_hat)}\n"
    )
    return line, None


def cmd_bernstein(args, grid):
    f = _step_problem(args)
    return [
        _measured_row("bernstein", f, *equal_two_segment(f.system, f.values, n), grid)
        for n in _degrees(args)
    ]


def cmd_newton(args, grid):
    f = _step_problem(args)
    rows = []
    for n in _degrees(args):
        poly, cert = small_delta_for_system(f, n)
        rows.append(_measured_row("newton", f, poly, cert, grid, m=cert.params.get("m")))
    return rows


def _pipeline_row(f, grid, m=None, budget=None):
    built, n0, _, m = _pipeline(f, m, budget, grid)
    if built is None:
        return None
    poly, cert = built
    return _measured_row("pipeline", f, poly, cert, grid, m=m)


def cmd_pipeline(args, grid):
    f = _step_problem(args)
    if args.m is not None:
        if args.m < 1:
            raise PreconditionError("--m must be >= 1")
        return [_pipeline_row(f, grid, m=args.m)]
    rows = [_pipeline_row(f, grid, budget=n) for n in _degrees(args)]
    return [r for r in rows if r is not None]


def _oracle_row(f, n, bounded):
    res = minimax_fit(f, n, bounded=bounded)
    return _row(
        "oracle_bounded" if bounded else "oracle", n, oracle=res.best_error, converged=res.converged,
        lower_bound=res.lower_bound, iterations=res.iterations, polynomial=res.polynomial.to_dict(),
    )


def cmd_oracle(args, grid):
    f = _step_problem(args)
    return [_oracle_row(f, n, args.bounded) for n in _degrees(args)]


def cmd_sweep(args, grid):
    """Every applicable construction per degree budget, each paired with the
    unbounded oracle at that budget (``E_n`` lower-bounds every construction);
    ``--bounded`` adds a bounded-oracle row."""
    f = _step_problem(args)
    rows = []
    for n in _degrees(args):
        orc = minimax_fit(f, n) if n <= ORACLE_DEGREE_CAP else None
        leg = {} if orc is None else {
            "oracle_error": orc.best_error, "converged": orc.converged,
            "oracle_lower": orc.lower_bound, "oracle_scale": f.sup,
        }
        batch = []
        if f.s == 2 and n >= 1:
            batch.append(_measured_row("bernstein", f, *equal_two_segment(f.system, f.values, n), grid))
        if n >= 1:
            poly, cert = small_delta_for_system(f, n)
            batch.append(_measured_row("newton", f, poly, cert, grid, m=cert.params.get("m")))
        if f.s >= 2 and len(set(f.values)) > 1:
            row = _pipeline_row(f, grid, budget=n)
            if row is not None:
                batch.append(row)
        rows += [dict(r, **leg) for r in batch]
        if orc is not None:
            rows.append(_row("oracle", n, oracle=orc.best_error, converged=orc.converged,
                             lower_bound=orc.lower_bound))
            if args.bounded:
                rows.append(_oracle_row(f, n, True))
    return rows


def cmd_eps(args, grid):
    prob = _load(args.input)
    if isinstance(prob, StepFunction):
        raise PreconditionError("'eps' needs a value-set problem")
    Y, delta = prob
    f = StepFunction(inflate(Y, delta), list(Y.points))
    rows = []
    for n in _degrees(args):
        found = []
        if Y.s == 2 and n >= 1:
            found.append(("eps_two", *eps_two(Y, delta, n)))
        found.append(("eps_small_delta", *eps_small_delta(Y, delta, n)))
        found.append(("eps_general", *eps_general(Y, delta, n, grid)))
        batch = [_measured_row(tag, f, p, c, grid) for tag, p, c in found]
        best = min(batch, key=lambda r: (r["certificate"], r["degree"]))
        rows += batch
        rows.append(dict(best, method=f"min:{best['method']}"))
    return rows


COMMANDS = {
    "stats": cmd_stats,
    "bernstein": cmd_bernstein,
    "newton": cmd_newton,
    "pipeline": cmd_pipeline,
    "oracle": cmd_oracle,
    "sweep": cmd_sweep,
    "eps": cmd_eps,
}


def render(rows, fmt: str) -> str:
    if fmt == "json":
        return json.dumps(rows, indent=1) + "\n"
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(COLUMNS)
    for r in rows:
        w.writerow([_fmt(r[c]) for c in COLUMNS])
    return buf.getvalue()


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="stepchev", description=__doc__.split("\n\n")[0])
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--input", required=True, help="problem JSON file")
    common.add_argument("--degree", type=int)
    common.add_argument("--degree-range", type=parse_degree_range, metavar="A:B[:step]")
    common.add_argument("--m", type=int, help="amplifier degree for 'pipeline'")
    common.add_argument("--bounded", action="store_true", help="bounded oracle variant")
    common.add_argument("--grid-mult", type=float, default=1.0, help="verification grid multiplier")
    common.add_argument("--out", help="output file (default: stdout)")
    common.add_argument("--format", choices=("csv", "json"), default="csv")
    sub = ap.add_subparsers(dest="command", required=True)
    for name in COMMANDS:
        sub.add_parser(name, parents=[common])
    return ap


def run(args) -> int:
    if args.grid_mult <= 0:
        raise PreconditionError("--grid-mult must be positive")
    grid = GridSpec(multiplier=args.grid_mult)
    rows = COMMANDS[args.command](args, grid)
    if isinstance(rows, tuple):
        text, rows = rows
        status = 0
    else:
        status = EXIT_VIOLATION if _flag(rows) else 0
        text = render(rows, args.format)
    if args.out:
        with open(args.out, "w") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)
    if status:
        print("stepchev: sandwich VIOLATION in output", file=sys.stderr)
    return status


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return run(args)
    except (ProblemFormatError, DisjointnessError, OSError, json.JSONDecodeError) as exc:
        print(f"stepchev: input error: {exc}", file=sys.stderr)
        return EXIT_PARSE
    except PreconditionError as exc:
        print(f"stepchev: precondition violated: {exc}", file=sys.stderr)
        return EXIT_PRECONDITION
    except (ConstructionError, DegreeOverflowError) as exc:
        print(f"stepchev: construction failed: {exc}", file=sys.stderr)
        return EXIT_CONSTRUCTION


if __name__ == "__main__":
    sys.exit(main())
