"""
Command-line front end.

    k2hyper eval         --params a,b,c,e1,e2,e3,e4 --point x,y,z,t
    k2hyper pde-check    [--solution all|J] [--samples N] [--seed S]
    k2hyper independence [--seed S]
    k2hyper opcheck      --form {lemma1-3.4,lemma1-3.5,thm-3.7,thm-3.8} [--order N]
    k2hyper identity     --id {3.10,3.11,3.12,3.13} [--n N] [--m M]

Every run produces one JSON document with sorted keys (``--format json``,
the default) or a plain table (``--format table``); ``--output FILE`` also
writes the JSON document to a file.  Numbers may be given as decimals or as
rationals such as ``1/3``.  Wall time is only reported with ``--timing`` so
that repeated runs are byte-identical.

Exit codes: 0 every check passed, 1 a mathematical check failed, 2 bad input
or a domain/pole error, 3 inconclusive.
"""

from __future__ import annotations

import argparse
import dataclasses
import json
import math
import sys
import time
import warnings
from fractions import Fraction

import numpy as np

from .errors import DomainError, InconclusiveError, K2Error, PoleError
from .identities import matching_variants, verify_3_10, verify_3_11, verify_3_12, verify_3_13
from .opcalc import verify_lemma1, verify_theorem31
from .pde import (
    EXPONENT_PATTERN,
    constant_function,
    degenerate_slots,
    independence_check,
    pde_residual_2nd,
    sample_points,
    solution_function,
    solution_spec,
)
from .series import K2Params, Point4, TruncationPolicy, gauss_2f1, k2_eval

EXIT_PASS, EXIT_FAIL, EXIT_INPUT, EXIT_INCONCLUSIVE = 0, 1, 2, 3

MAX_DEGREE_CAP = 64
DEFAULT_SEED = 12345
# small-denominator rationals away from poles and integer degeneracies
DEFAULT_PARAMS = "1/3,1/5,1/7,3/2,5/2,7/2,9/2"
# e_i < 1 keeps every Frobenius prefactor bounded on the sampling box
PDE_PARAMS = "0.3,0.5,0.7,0.3,0.45,0.6,0.75"
IDENTITY_POINTS = {
    "3.10": "0.2,0.1,0.05,0.08",
    "3.11": "0.2,0.1,0.05,0.08",
    "3.12": "0.05,0.04,0.03,0.02",
    "3.13": "0.03,0.025,0.02,0.015",
}
DEFAULT_DEGREE = {"eval": 30, "pde-check": 24, "independence": 30, "opcheck": 4, "identity": 16}


class InputError(Exception):
    pass


# ---------------------------------------------------------------------------
# parsing
# ---------------------------------------------------------------------------


def parse_number(text: str) -> Fraction:
    try:
        return Fraction(text.strip())
    except (ValueError, ZeroDivisionError):
        raise InputError(f"not a number: {text!r}") from None


def parse_numbers(text: str, count: int, what: str) -> list:
    parts = text.split(",")
    if len(parts) != count:
        raise InputError(f"{what} needs {count} comma-separated values, got {len(parts)}")
    return [parse_number(p) for p in parts]


def parse_params(text: str, exact: bool = False) -> K2Params:
    values = parse_numbers(text, 7, "--params")
    return K2Params(*(values if exact else map(float, values)))


def parse_point(text: str) -> Point4:
    return Point4(*map(float, parse_numbers(text, 4, "--point")))


# ---------------------------------------------------------------------------
# serialization
# ---------------------------------------------------------------------------


def to_jsonable(obj):
    """Plain JSON values; Fractions become strings, non-finite floats strings."""
    if isinstance(obj, dict):
        return {str(k): to_jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [to_jsonable(v) for v in obj]
    if isinstance(obj, np.ndarray):
        return to_jsonable(obj.tolist())
    if isinstance(obj, (bool, np.bool_)):
        return bool(obj)
    if isinstance(obj, Fraction):
        return str(obj)
    if isinstance(obj, (int, np.integer)):
        return int(obj)
    if isinstance(obj, (float, np.floating)):
        v = float(obj)
        return v if math.isfinite(v) else repr(v)
    if dataclasses.is_dataclass(obj):
        return to_jsonable({f.name: getattr(obj, f.name) for f in dataclasses.fields(obj)})
    if obj is None or isinstance(obj, str):
        return obj
    return str(obj)


def dump_json(doc: dict) -> str:
    return json.dumps(to_jsonable(doc), sort_keys=True, indent=2)


def _cell(v) -> str:
    if isinstance(v, float):
        return f"{v:.6e}"
    if isinstance(v, list):
        return "[" + "; ".join(_cell(x) for x in v) + "]"
    return str(v)


def render_table(doc: dict) -> str:
    lines = [f"{doc['command']}: {doc['status']} (exit {doc['exit_code']})"]
    results = doc.get("results")
    rows = results.get("rows") if isinstance(results, dict) else None
    if isinstance(results, dict):
        for key in sorted(results):
            if key not in ("rows", "matrix"):
                lines.append(f"  {key}: {_cell(results[key])}")
    if rows:
        cols = [c for c in rows[0] if c != "notes"]
        cells = [[_cell(row.get(c)) for c in cols] for row in rows]
        widths = [max(len(c), *(len(r[i]) for r in cells)) for i, c in enumerate(cols)]
        lines.append("  " + "  ".join(c.ljust(w) for c, w in zip(cols, widths)))
        for r in cells:
            lines.append("  " + "  ".join(v.ljust(w) for v, w in zip(r, widths)))
    if doc.get("error"):
        lines.append(f"  error: {doc['error']}")
    for w in doc.get("warnings", []):
        lines.append(f"  warning: {w}")
    return "\n".join(lines)


def _policy_doc(policy: TruncationPolicy) -> dict:
    return dataclasses.asdict(policy)


# ---------------------------------------------------------------------------
# commands; each returns (exit_code, status, results, inputs, policy)
# ---------------------------------------------------------------------------


def _policy(args) -> TruncationPolicy:
    degree = args.max_degree
    if degree > MAX_DEGREE_CAP:
        raise InputError(f"--max-degree {degree} exceeds the cap {MAX_DEGREE_CAP}")
    if degree < 0:
        raise InputError("--max-degree must be >= 0")
    return TruncationPolicy(degree)


def _series_doc(v) -> dict:
    return {
        "value": v.value,
        "tail_estimate": v.tail_estimate,
        "terms_summed": v.terms_summed,
        "truncated_at_degree": v.truncated_at_degree,
        "diverging": v.diverging,
        "outside_domain": v.outside_domain,
    }


def cmd_eval(args):
    params = parse_params(args.params or DEFAULT_PARAMS)
    if args.point is None:
        raise InputError("eval needs --point")
    point = parse_point(args.point)
    policy = _policy(args)
    if args.tol is not None:
        policy = dataclasses.replace(policy, rel_tol=args.tol)
    value = k2_eval(params, point, policy)
    results = _series_doc(value)
    nonzero = [i for i, v in enumerate(point) if v != 0]
    if len(nonzero) == 1:
        # on an axis K2 collapses to a Gauss series
        slot = nonzero[0]
        second = params.c if slot == 2 else params.b
        g = gauss_2f1(params.a, second, params.e[slot], point.as_tuple()[slot], policy)
        diff = abs(g.value - value.value)
        results["axis_reduction"] = {
            "axis": "xyzt"[slot],
            "gauss_2f1": g.value,
            "rel_diff": diff / abs(g.value) if g.value else diff,
        }
    inputs = {"params": params.as_dict(), "point": point.as_tuple()}
    return EXIT_PASS, "pass", results, inputs, policy


def _degenerate_notes(params: K2Params) -> dict:
    """Solutions that coincide with another one when some ``e_i = 1``."""
    notes = {}
    slots = degenerate_slots(params)
    for j, pattern in enumerate(EXPONENT_PATTERN, start=1):
        hit = [s for s in slots if pattern[s - 1]]
        if hit:
            partner = list(pattern)
            for s in hit:
                partner[s - 1] = 0
            k = EXPONENT_PATTERN.index(tuple(partner)) + 1
            notes[j] = f"coincides with u_{k} (e_i = 1 in slot(s) {hit})"
    return notes


def cmd_pde_check(args):
    params = parse_params(args.params or PDE_PARAMS)
    policy = _policy(args)
    threshold = args.tol if args.tol is not None else 1e-7
    if args.solution == "all":
        solutions = list(range(1, 17))
    else:
        try:
            solutions = [int(args.solution)]
        except ValueError:
            raise InputError(f"--solution must be 'all' or 1..16, got {args.solution!r}") from None
        if not 1 <= solutions[0] <= 16:
            raise InputError(f"--solution must be 1..16, got {solutions[0]}")
    if args.samples < 1:
        raise InputError("--samples must be >= 1")
    points = sample_points(args.samples, args.seed)
    integer_e = [i + 1 for i, e in enumerate(params.e) if float(e) == int(e)]
    if integer_e:
        warnings.warn(f"integer e_i in slot(s) {integer_e}: parameters are not generic",
                      RuntimeWarning)
    degenerate = _degenerate_notes(params)
    rows = []
    errors = False
    for j in solutions:
        row = {"solution": j, "degenerate": degenerate.get(j)}
        try:
            row["exponents"] = list(solution_spec(j, params).exponents.as_tuple())
            worst = [0.0] * 4
            for pt in points:
                if args.probe_constant is not None:
                    f = constant_function(args.probe_constant)
                else:
                    f = solution_function(j, params, pt, policy)
                for eq in range(4):
                    worst[eq] = max(worst[eq], abs(pde_residual_2nd(eq + 1, f, params, pt)))
        except (PoleError, DomainError) as exc:
            errors = True
            row.update(residuals=None, max_residual=None, passed=False, error=str(exc))
            if row["degenerate"] is None:
                row["degenerate"] = "evaluation failed"
        else:
            row.update(residuals=worst, max_residual=max(worst),
                       passed=max(worst) <= threshold, error=None)
        rows.append(row)
    passed = all(r["passed"] for r in rows)
    results = {
        "threshold": threshold,
        "max_residual": max((r["max_residual"] for r in rows if r["max_residual"] is not None),
                            default=None),
        "probe_constant": args.probe_constant,
        "rows": rows,
    }
    inputs = {"params": params.as_dict(), "solutions": solutions, "samples": args.samples,
              "seed": args.seed, "points": [p.as_tuple() for p in points]}
    if errors:
        return EXIT_INPUT, "error", results, inputs, policy
    return (EXIT_PASS, "pass", results, inputs, policy) if passed else \
        (EXIT_FAIL, "fail", results, inputs, policy)


def cmd_independence(args):
    params = parse_params(args.params or PDE_PARAMS)
    policy = _policy(args)
    rank_tol = args.tol if args.tol is not None else 1e-8
    points = sample_points(16, args.seed)
    diag = independence_check(params, points, policy, rank_tol)
    results = {
        "singular_values": diag.singular_values,
        "smallest": diag.smallest,
        "largest": diag.largest,
        "ratio": diag.ratio,
        "raw_ratio": diag.raw_ratio,
        "full_rank": diag.full_rank,
        "rank_tol": diag.rank_tol,
        "notes": diag.notes,
        "matrix": diag.matrix,
    }
    inputs = {"params": params.as_dict(), "seed": args.seed,
              "points": [p.as_tuple() for p in points]}
    if diag.full_rank:
        return EXIT_PASS, "pass", results, inputs, policy
    return EXIT_FAIL, "fail", results, inputs, policy


def cmd_opcheck(args):
    if args.form is None:
        raise InputError("opcheck needs --form")
    order = args.order
    if not 0 <= order <= MAX_DEGREE_CAP:
        raise InputError(f"--order must be in 0..{MAX_DEGREE_CAP}")
    params = parse_params(args.params or DEFAULT_PARAMS, exact=True)
    kind, form = args.form.split("-", 1)
    if kind == "lemma1":
        if args.lemma_params:
            alpha, beta, gamma = parse_numbers(args.lemma_params, 3, "--lemma-params")
        else:
            alpha, beta, gamma = params.a, params.b, params.e1
        check = verify_lemma1(alpha, beta, gamma, order, form)
        inputs = {"alpha": alpha, "beta": beta, "gamma": gamma}
    else:
        check = verify_theorem31(params, order, form, printed_target=args.printed_target)
        inputs = {"params": params.as_dict(), "printed_target": args.printed_target}
    inputs.update(form=args.form, order=order)
    results = {
        "form": check.form,
        "order": check.order,
        "match": check.match,
        "max_deviation": check.max_deviation,
        "first_mismatch": check.first_mismatch,
        "checked": check.checked,
        "notes": check.notes,
    }
    policy = {"exact": True, "order": order}
    if check.match:
        return EXIT_PASS, "pass", results, inputs, policy
    return EXIT_FAIL, "fail", results, inputs, policy


def _report_doc(r) -> dict:
    return {
        "identity_id": r.identity_id,
        "variant": r.variant,
        "lhs": r.lhs,
        "rhs": r.rhs,
        "abs_diff": r.abs_diff,
        "rel_diff": r.rel_diff,
        "status": r.status,
        "tail_estimate": r.tail_estimate,
        "stability_delta": r.stability_delta,
        "notes": list(r.notes),
    }


def cmd_identity(args):
    ident = args.id
    if ident is None:
        raise InputError("identity needs --id")
    params = parse_params(args.params or DEFAULT_PARAMS)
    point = parse_point(args.point or IDENTITY_POINTS[ident])
    policy = _policy(args)
    a, b, c = params.a, params.b, params.c
    e = params.e
    inputs = {"id": ident, "params": params.as_dict(), "point": point.as_tuple()}
    if ident in ("3.10", "3.11") and point.x == 0:
        raise InputError("x must be nonzero for the finite sums")
    if ident == "3.10":
        inputs["n"] = args.n
        reports = verify_3_10(args.n, b, c, *e, point, policy)
    elif ident == "3.11":
        inputs.update(n=args.n, m=args.m)
        reports = verify_3_11(args.n, args.m, a, *e, point, policy)
    elif ident == "3.12":
        inputs["outer_bound"] = args.outer_bound
        reports = verify_3_12(a, b, *e, point, policy, args.outer_bound)
    else:
        inputs["total_bound"] = args.total_bound
        reports = verify_3_13(a, b, c, *e, point, policy, args.total_bound)
    return _identity_outcome(reports, inputs, policy)


def _identity_outcome(reports, inputs, policy):
    matches = matching_variants(reports)
    results = {"matching_variants": matches, "rows": [_report_doc(r) for r in reports]}
    if matches:
        return EXIT_PASS, "pass", results, inputs, policy
    if any(r.status == "inconclusive" for r in reports):
        return EXIT_INCONCLUSIVE, "inconclusive", results, inputs, policy
    return EXIT_FAIL, "fail", results, inputs, policy


COMMANDS = {
    "eval": cmd_eval,
    "pde-check": cmd_pde_check,
    "independence": cmd_independence,
    "opcheck": cmd_opcheck,
    "identity": cmd_identity,
}


# ---------------------------------------------------------------------------
# driver
# ---------------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--params", help="a,b,c,e1,e2,e3,e4 (decimals or rationals like 1/3)")
    common.add_argument("--point", help="x,y,z,t")
    common.add_argument("--max-degree", type=int, default=None,
                        help=f"truncation degree D (cap {MAX_DEGREE_CAP})")
    common.add_argument("--tol", type=float, default=None,
                        help="eval: series rel tolerance; pde-check: residual threshold; "
                             "independence: singular-value ratio threshold")
    common.add_argument("--seed", type=int, default=DEFAULT_SEED)
    common.add_argument("--format", choices=("json", "table"), default="json")
    common.add_argument("--output", help="also write the JSON document here")
    common.add_argument("--timing", action="store_true", help="add wall time to the output")

    parser = argparse.ArgumentParser(prog="k2hyper", description=__doc__.split("\n\n")[0].strip(),
                                     formatter_class=argparse.RawDescriptionHelpFormatter)
    sub = parser.add_subparsers(dest="command", required=True)
    sub.add_parser("eval", parents=[common], help="evaluate K2 at a point")

    p = sub.add_parser("pde-check", parents=[common], help="PDE residuals of the 16 solutions")
    p.add_argument("--solution", default="all", help="'all' or 1..16")
    p.add_argument("--samples", type=int, default=5)
    p.add_argument("--probe-constant", type=float, default=None,
                   help="replace every solution by this constant (fault injection)")

    sub.add_parser("independence", parents=[common], help="rank test of the 16 solutions")

    p = sub.add_parser("opcheck", parents=[common], help="exact operator-image checks")
    p.add_argument("--form", choices=("lemma1-3.4", "lemma1-3.5", "thm-3.7", "thm-3.8"))
    p.add_argument("--order", type=int, default=DEFAULT_DEGREE["opcheck"])
    p.add_argument("--lemma-params", help="alpha,beta,gamma for the lemma forms")
    p.add_argument("--printed-target", action="store_true",
                   help="thm-3.7: use the uncorrected target monomial t3^(e3-1)")

    p = sub.add_parser("identity", parents=[common], help="finite sums and decompositions")
    p.add_argument("--id", choices=tuple(IDENTITY_POINTS))
    p.add_argument("--n", type=int, default=1)
    p.add_argument("--m", type=int, default=0)
    p.add_argument("--outer-bound", type=int, default=6)
    p.add_argument("--total-bound", type=int, default=4)
    return parser


def run(argv=None) -> tuple:
    """Parse ``argv`` and execute; returns ``(exit_code, document, args)``."""
    args = build_parser().parse_args(argv)
    if args.max_degree is None:
        args.max_degree = DEFAULT_DEGREE[args.command]
    start = time.perf_counter()
    doc = {"command": args.command, "seed": args.seed}
    with warnings.catch_warnings(record=True) as caught:
        warnings.simplefilter("always")
        try:
            code, status, results, inputs, policy = COMMANDS[args.command](args)
        except InconclusiveError as exc:
            code, status = EXIT_INCONCLUSIVE, "inconclusive"
            results = {"rows": [_report_doc(r) for r in exc.reports]}
            inputs, policy, doc["error"] = {}, None, str(exc)
        except (InputError, K2Error, ValueError, ArithmeticError) as exc:
            code, status, results, inputs, policy = EXIT_INPUT, "error", None, {}, None
            doc["error"] = f"{type(exc).__name__}: {exc}"
    messages = []
    for w in caught:
        text = f"{w.category.__name__}: {w.message}"
        if text not in messages:
            messages.append(text)
    if isinstance(policy, TruncationPolicy):
        policy = _policy_doc(policy)
    doc.update(exit_code=code, status=status, results=results, inputs=inputs,
               policy=policy, warnings=messages)
    if args.timing:
        doc["wall_time_s"] = time.perf_counter() - start
    return code, doc, args


def main(argv=None) -> int:
    code, doc, args = run(argv)
    text = dump_json(doc)
    if args.output:
        with open(args.output, "w") as fh:
            fh.write(text + "\n")
    print(text if args.format == "json" else render_table(to_jsonable(doc)))
    return code


if __name__ == "__main__":
    sys.exit(main())
