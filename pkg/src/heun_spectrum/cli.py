"""Command-line interface: ``heun-spectrum <command> [options]``.

Exit codes: 0 ok, 1 a check failed, 2 usage error, 3 precision exhausted.
Global settings resolve as flag > ``HEUN_*`` environment variable > default.
"""
from __future__ import annotations

import argparse
import csv
import io
import json
import os
import sys
from dataclasses import dataclass
from fractions import Fraction
from typing import Callable, Optional

import mpmath

from heun_spectrum import analysis, oracle, ritz as ritz_mod
from heun_spectrum.frobenius import RootFindingError, truncation_solutions
from heun_spectrum.model import ScaledModel, alpha_from_token, effective_potential, potential_minimum

SCHEMA_VERSION = "1"
EXIT_OK, EXIT_CHECK, EXIT_USAGE, EXIT_PRECISION = 0, 1, 2, 3
ENV_PREFIX = "HEUN_"
DEFAULTS = {"digits": ritz_mod.DEFAULT_DIGITS, "jobs": 1, "full_precision": False, "format": "text"}
# options whose values may legitimately start with "-" (e.g. -sqrt6)
_SIGNED_OPTIONS = ("--alpha", "--alpha-exact", "--alphas", "--alpha-min", "--alpha-max")


class UsageError(ValueError):
    pass


class CheckFailure(Exception):
    """Raised after output is written when a command's own check did not pass."""


@dataclass
class Context:
    digits: int
    full_precision: bool
    jobs: int = 1

    def fmt(self, x) -> str:
        sig = self.digits if self.full_precision else min(self.digits, 10)
        if isinstance(x, float):
            sig = min(sig, 17)
        if isinstance(x, (int, Fraction)) and not isinstance(x, bool):
            return str(x)
        with mpmath.workdps(max(self.digits, sig) + 5):
            return mpmath.nstr(mpmath.mpf(x), sig, strip_zeros=False)


@dataclass
class Outcome:
    results: dict
    table: list  # rows for CSV / text, first row is the header
    ok: bool = True
    message: str = ""


# -- argument helpers -------------------------------------------------------------


def _parse_l(text) -> int | Fraction:
    try:
        q = Fraction(str(text))
    except ValueError:
        raise UsageError(f"cannot parse l={text!r}") from None
    return q.numerator if q.denominator == 1 else q


def _alpha(inputs: dict, digits: int):
    token = inputs["alpha"]
    try:
        return alpha_from_token(token, digits + 10)
    except ValueError as exc:
        raise UsageError(str(exc)) from None


def _alpha_input(args) -> str:
    exact_token = getattr(args, "alpha_exact", None)
    return exact_token if exact_token is not None else args.alpha


def _env(name: str):
    return os.environ.get(ENV_PREFIX + name.upper())


def _resolve(args, name: str, cast: Callable):
    value = getattr(args, name, None)
    if value is not None:
        return value
    raw = _env(name)
    if raw is not None:
        try:
            return cast(raw)
        except ValueError:
            raise UsageError(f"bad value {raw!r} for {ENV_PREFIX}{name.upper()}") from None
    return DEFAULTS[name]


def _truthy(raw: str) -> bool:
    value = raw.strip().lower()
    if value in ("1", "true", "yes", "on"):
        return True
    if value in ("0", "false", "no", "off", ""):
        return False
    raise ValueError(raw)


def _fmt_choice(raw: str) -> str:
    if raw not in ("text", "json", "csv"):
        raise ValueError(raw)
    return raw


# -- commands ---------------------------------------------------------------------


def cmd_truncate(inputs: dict, ctx: Context) -> Outcome:
    n, l = inputs["n"], _parse_l(inputs["l"])
    if n < 1:
        raise UsageError("n must be at least 1 (n = 0 gives no alpha-dependent solution)")
    sol = truncation_solutions(l, n, ctx.digits)
    roots = [ctx.fmt(r) for r in sol.alpha_roots]
    W = ctx.fmt(sol.W_fixed)
    table = [["n", "l", "root_index", "alpha", "W"]]
    table += [[n, str(l), i, r, W] for i, r in enumerate(roots, start=1)]
    return Outcome({"n": n, "l": str(l), "W": W, "roots": roots}, table)


def cmd_ritz(inputs: dict, ctx: Context) -> Outcome:
    l, alpha = _parse_l(inputs["l"]), _alpha(inputs, ctx.digits)
    nmin, nmax, count = inputs["nmin"], inputs["nmax"], inputs["count"]
    if not 1 <= nmin <= nmax:
        raise UsageError("need 1 <= nmin <= nmax")
    if count < 1:
        raise UsageError("count must be positive")
    try:
        runs = ritz_mod.convergence_study(l, alpha, range(nmin, nmax + 1), count, ctx.digits)
    except ValueError as exc:
        raise UsageError(str(exc)) from None
    header = ["N"] + [f"W{k}" for k in range(count)]
    table, rows = [header], []
    for run in runs:
        values = [ctx.fmt(w) for w in run.eigenvalues[:count]]
        rows.append({"N": run.N, "eigenvalues": values})
        table.append([run.N] + values + [""] * (count - len(values)))
    return Outcome({"rows": rows}, table)


def cmd_sweep(inputs: dict, ctx: Context) -> Outcome:
    l = _parse_l(inputs["l"])
    lo, hi = (float(alpha_from_token(inputs[k], 20)) for k in ("alpha_min", "alpha_max"))
    try:
        curves = analysis.spectrum_sweep(l, lo, hi, inputs["step"], inputs["levels"], inputs["basis_n"],
                                         ctx.digits, jobs=ctx.jobs)
    except analysis.CurveError as exc:
        raise CheckFailure(str(exc)) from None
    except ValueError as exc:
        raise UsageError(str(exc)) from None
    table = [["l", "level", "alpha", "W", "basis_N"]]
    out = []
    for c in curves:
        samples = [[ctx.fmt(a), ctx.fmt(w)] for a, w in c.samples]
        out.append({"level": c.level, "samples": samples})
        table += [[str(l), c.level, a, w, c.basis_N] for a, w in samples]
    onset = analysis.negative_onset(l, curves)
    results = {"l": str(l), "basis_N": inputs["basis_n"], "curves": out,
               "negative_onset": {"found": onset.found, "alpha_lo": ctx.fmt(onset.alpha_lo),
                                  "alpha_hi": ctx.fmt(onset.alpha_hi)}}
    return Outcome(results, table)


def _overlay_range(l, n_max: int, step: float, digits: int) -> float:
    reach = max(abs(float(r)) for n in range(1, n_max + 1) for r in truncation_solutions(l, n, digits).alpha_roots)
    steps = int(reach / step) + 2
    return float(Fraction(str(step)) * steps)


def cmd_overlay(inputs: dict, ctx: Context) -> Outcome:
    l, n_max, step = _parse_l(inputs["l"]), inputs["n_max"], inputs["step"]
    if n_max < 1:
        raise UsageError("n-max must be at least 1")
    span = _overlay_range(l, n_max, step, ctx.digits)
    try:
        curves = analysis.spectrum_sweep(l, -span, span, step, inputs["levels"], inputs["basis_n"], ctx.digits,
                                         jobs=ctx.jobs)
    except analysis.CurveError as exc:
        raise CheckFailure(str(exc)) from None
    report = analysis.truncation_overlay(l, n_max, curves, ctx.digits, inputs["tol"])
    table = [["n", "root_index", "alpha", "W", "level", "min_gap"]]
    points = []
    for p in report.points:
        level = "" if p.level is None else p.level
        table.append([p.n, p.root_index, ctx.fmt(p.alpha), ctx.fmt(p.W), level, f"{p.min_gap:.3e}"])
        points.append({"n": p.n, "root_index": p.root_index, "alpha": ctx.fmt(p.alpha), "W": ctx.fmt(p.W),
                       "level": p.level, "min_gap": f"{p.min_gap:.3e}"})
    results = {"l": str(l), "alpha_span": ctx.fmt(span), "points": points, "failures": report.failures,
               "ok": report.ok}
    return Outcome(results, table, report.ok, "; ".join(report.failures))


def cmd_oracle(inputs: dict, ctx: Context) -> Outcome:
    l, alpha = _parse_l(inputs["l"]), _alpha(inputs, ctx.digits)
    count = inputs["count"]
    model = ScaledModel(float(l), float(alpha))
    grid = oracle.GridSpec(inputs["xi_max"], inputs["npoints"], not inputs["no_richardson"])
    try:
        values = oracle.fd_spectrum(model, grid, count)
    except oracle.BoundaryError as exc:
        raise CheckFailure(str(exc)) from None
    except ValueError as exc:
        raise UsageError(str(exc)) from None
    header = ["level", "W", "error"]
    rows, ok, worst = [], True, 0.0
    reference = None
    if inputs["compare"]:
        header += ["ritz", "diff"]
        reference = ritz_mod.converged(l, alpha, count, ctx.digits).eigenvalues
    table = [header]
    for k, v in enumerate(values):
        row = {"level": k, "W": ctx.fmt(v.value), "error": "" if v.error is None else f"{v.error:.2e}"}
        line = [k, row["W"], row["error"]]
        if reference is not None:
            diff = abs(v.value - float(reference[k]))
            worst = max(worst, diff)
            row.update(ritz=ctx.fmt(reference[k]), diff=f"{diff:.2e}")
            line += [row["ritz"], row["diff"]]
        rows.append(row)
        table.append(line)
    results = {"levels": rows}
    if reference is not None:
        ok = worst < inputs["tol"]
        results["max_diff"] = f"{worst:.2e}"
    return Outcome(results, table, ok, f"max |oracle - ritz| = {worst:.2e} exceeds {inputs['tol']:g}")


def cmd_hf(inputs: dict, ctx: Context) -> Outcome:
    l, alpha = _parse_l(inputs["l"]), _alpha(inputs, ctx.digits)
    rep = analysis.hellmann_feynman_check(l, alpha, inputs["level"], inputs["h"], ctx.digits,
                                          richardson=inputs["richardson"])
    ok = rep.abs_diff < inputs["tol"] and rep.lhs < 0 and rep.rhs < 0
    results = {"level": rep.level, "lhs": ctx.fmt(rep.lhs), "rhs": ctx.fmt(rep.rhs),
               "abs_diff": f"{rep.abs_diff:.3e}", "basis_N": rep.basis_N, "ok": ok}
    table = [["alpha", "level", "lhs", "rhs", "abs_diff", "basis_N"],
             [ctx.fmt(alpha), rep.level, results["lhs"], results["rhs"], results["abs_diff"], rep.basis_N]]
    return Outcome(results, table, ok, f"|dW/dalpha + <1/xi>| = {rep.abs_diff:.3e} not below {inputs['tol']:g}")


def _grid(start: Fraction, stop: Fraction, step: Fraction) -> list[Fraction]:
    count = int((stop - start) / step)
    return [start + k * step for k in range(count + 1)]


def cmd_potential(inputs: dict, ctx: Context) -> Outcome:
    tokens = [t for t in inputs["alphas"].split(",") if t.strip()]
    if not tokens:
        raise UsageError("--alphas needs at least one value")
    step = Fraction(str(inputs["step"]))
    xi_max = Fraction(str(inputs["xi_max"]))
    xi_min = Fraction(str(inputs["xi_min"])) if inputs["xi_min"] is not None else step
    if step <= 0 or xi_min <= 0 or xi_max < xi_min:
        raise UsageError("need step > 0 and 0 < xi-min <= xi-max")
    l = _parse_l(inputs["l"])
    xs = _grid(xi_min, xi_max, step)
    table = [["alpha", "xi", "V"]]
    curves = []
    for token in tokens:
        try:
            a = float(alpha_from_token(token.strip(), 20))
        except ValueError as exc:
            raise UsageError(str(exc)) from None
        model = ScaledModel(float(l), a)
        samples = [[ctx.fmt(float(x)), ctx.fmt(effective_potential(model, float(x), inputs["centrifugal"]))]
                   for x in xs]
        minimum = None
        if a < 0:
            x_star, v_star = potential_minimum(a)
            minimum = {"xi": ctx.fmt(x_star), "V": ctx.fmt(v_star)}
        curves.append({"alpha": token.strip(), "value": ctx.fmt(a), "minimum": minimum, "samples": samples})
        table += [[ctx.fmt(a), x, v] for x, v in samples]
    return Outcome({"curves": curves}, table)


def cmd_table(inputs: dict, ctx: Context) -> Outcome:
    try:
        rep = analysis.reproduce_table(inputs["which"], ctx.digits)
    except ValueError as exc:
        raise UsageError(str(exc)) from None
    width = max(len(r.printed) for r in rep.rows)
    table = [["N"] + [f"W{k}" for k in range(width)] + ["match"]]
    rows = []
    for r in rep.rows:
        table.append([r.N] + r.computed + [""] * (width - len(r.computed)) + ["yes" if r.ok else "no"])
        rows.append({"N": r.N, "computed": r.computed, "printed": list(r.printed), "ok": r.ok})
    diffs = [{"N": N, "level": k, "printed": p, "computed": c} for N, k, p, c in rep.mismatches]
    results = {"which": rep.which, "l": rep.l, "alpha": rep.alpha, "rows": rows, "diffs": diffs,
               "passed": rep.passed}
    return Outcome(results, table, rep.passed, f"{len(diffs)} cell(s) differ from the printed table")


COMMANDS: dict[str, Callable[[dict, Context], Outcome]] = {
    "truncate": cmd_truncate,
    "ritz": cmd_ritz,
    "sweep": cmd_sweep,
    "overlay": cmd_overlay,
    "oracle": cmd_oracle,
    "hf": cmd_hf,
    "potential": cmd_potential,
    "table": cmd_table,
}


# -- parser -----------------------------------------------------------------------


def _common() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(add_help=False)
    g = p.add_argument_group("output")
    fmt = g.add_mutually_exclusive_group()
    fmt.add_argument("--json", dest="format", action="store_const", const="json", help="JSON record on stdout")
    fmt.add_argument("--csv", dest="format", action="store_const", const="csv", help="CSV table on stdout")
    g.add_argument("--output", "-o", help="write to this file instead of stdout")
    g.add_argument("--digits", type=int, help=f"working precision in decimal digits (default {DEFAULTS['digits']})")
    g.add_argument("--full-precision", action="store_const", const=True, default=None,
                   help="print every working digit instead of 10 significant digits")
    g.add_argument("--jobs", type=int, help="worker processes for sweeps (default 1)")
    return p


def _add_alpha(p: argparse.ArgumentParser, required: bool = True) -> None:
    g = p.add_mutually_exclusive_group(required=required)
    g.add_argument("--alpha", help="coupling as a decimal or rational")
    g.add_argument("--alpha-exact", help="exact coupling token: sqrtN, -sqrtN, k*sqrtN, p/q")


def build_parser() -> argparse.ArgumentParser:
    common = _common()
    parser = argparse.ArgumentParser(prog="heun-spectrum", description=__doc__.splitlines()[0])
    parser.add_argument("--replay", metavar="RECORD", help="rerun a saved JSON record and compare results")
    sub = parser.add_subparsers(dest="command", metavar="command")

    p = sub.add_parser("truncate", parents=[common], help="polynomial solutions for given n, l")
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--l", default="0")

    p = sub.add_parser("ritz", parents=[common], help="variational convergence table")
    p.add_argument("--l", default="0")
    _add_alpha(p)
    p.add_argument("--nmin", type=int, default=2)
    p.add_argument("--nmax", type=int, default=10)
    p.add_argument("--count", type=int, default=4)

    p = sub.add_parser("sweep", parents=[common], help="eigenvalue curves W_nu(alpha)")
    p.add_argument("--l", default="0")
    p.add_argument("--alpha-min", default="-3")
    p.add_argument("--alpha-max", default="3")
    p.add_argument("--step", type=float, default=analysis.DEFAULT_STEP)
    p.add_argument("--levels", type=int, default=4)
    p.add_argument("--basis-n", type=int, default=20)

    p = sub.add_parser("overlay", parents=[common], help="place truncation points on the swept curves")
    p.add_argument("--l", default="0")
    p.add_argument("--n-max", type=int, default=4)
    p.add_argument("--step", type=float, default=analysis.DEFAULT_STEP)
    p.add_argument("--levels", type=int, default=6)
    p.add_argument("--basis-n", type=int, default=20)
    p.add_argument("--tol", type=float, default=analysis.OVERLAY_TOL)

    p = sub.add_parser("oracle", parents=[common], help="finite-volume eigenvalues")
    p.add_argument("--l", default="0")
    _add_alpha(p)
    p.add_argument("--count", type=int, default=4)
    p.add_argument("--xi-max", type=float, default=oracle.GridSpec.xi_max)
    p.add_argument("--npoints", type=int, default=oracle.GridSpec.npoints)
    p.add_argument("--no-richardson", action="store_true")
    p.add_argument("--compare", action="store_true", help="compare with converged Ritz values")
    p.add_argument("--tol", type=float, default=1e-5)

    p = sub.add_parser("hf", parents=[common], help="Hellmann-Feynman consistency check")
    p.add_argument("--l", default="0")
    _add_alpha(p)
    p.add_argument("--level", type=int, default=0)
    p.add_argument("--h", type=float, default=1e-3)
    p.add_argument("--richardson", action="store_true")
    p.add_argument("--tol", type=float, default=1e-6)

    p = sub.add_parser("potential", parents=[common], help="effective potential samples")
    p.add_argument("--alphas", default="-sqrt2,1,sqrt2", help="comma-separated coupling tokens")
    p.add_argument("--l", default="0")
    p.add_argument("--xi-min", type=float)
    p.add_argument("--xi-max", type=float, default=4.0)
    p.add_argument("--step", type=float, default=0.01)
    p.add_argument("--centrifugal", action="store_true", help="include l^2/xi^2")

    p = sub.add_parser("table", parents=[common], help="recompute a printed reference table")
    p.add_argument("--which", type=int, choices=sorted(analysis.TABLES), required=True)
    return parser


_GLOBAL_KEYS = {"command", "format", "output", "digits", "full_precision", "jobs", "replay", "alpha_exact"}


def _inputs(args) -> dict:
    inputs = {k: v for k, v in vars(args).items() if k not in _GLOBAL_KEYS}
    if "alpha" in inputs:
        inputs["alpha"] = _alpha_input(args)
    return inputs


def _join_signed(argv: list[str]) -> list[str]:
    """Let ``--alpha-exact -sqrt6`` through argparse by gluing it into ``--alpha-exact=-sqrt6``."""
    out, i = [], 0
    while i < len(argv):
        arg = argv[i]
        if arg in _SIGNED_OPTIONS and i + 1 < len(argv) and argv[i + 1].startswith("-") and len(argv[i + 1]) > 1:
            out.append(f"{arg}={argv[i + 1]}")
            i += 2
        else:
            out.append(arg)
            i += 1
    return out


# -- output -----------------------------------------------------------------------


def _record(command: str, inputs: dict, ctx: Context, results: dict) -> dict:
    return {
        "schema_version": SCHEMA_VERSION,
        "command": command,
        "inputs": dict(inputs, full_precision=ctx.full_precision),
        "results": results,
        "precision_digits": ctx.digits,
    }


def _render(fmt: str, record: dict, table: list) -> str:
    if fmt == "json":
        return json.dumps(record, sort_keys=True, indent=2) + "\n"
    if fmt == "csv":
        buf = io.StringIO()
        csv.writer(buf).writerows(table)
        return buf.getvalue()
    widths = [max(len(str(row[c])) if c < len(row) else 0 for row in table) for c in range(len(table[0]))]
    return "".join("  ".join(str(v).rjust(w) for v, w in zip(row, widths)).rstrip() + "\n" for row in table)


def _emit(text: str, output: Optional[str]) -> None:
    if output:
        with open(output, "w", encoding="utf-8", newline="") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def _run(command: str, inputs: dict, ctx: Context) -> Outcome:
    with mpmath.workdps(ctx.digits):
        return COMMANDS[command](inputs, ctx)


def _replay(path: str, fmt: str, output: Optional[str], jobs: int) -> int:
    with open(path, encoding="utf-8") as fh:
        saved = json.load(fh)
    if saved.get("schema_version") != SCHEMA_VERSION or saved.get("command") not in COMMANDS:
        raise UsageError(f"{path} is not a replayable record")
    inputs = dict(saved["inputs"])
    ctx = Context(int(saved["precision_digits"]), bool(inputs.pop("full_precision", False)), jobs)
    outcome = _run(saved["command"], inputs, ctx)
    record = _record(saved["command"], inputs, ctx, outcome.results)
    _emit(_render("json" if fmt == "text" else fmt, record, outcome.table), output)
    if record["results"] != saved["results"]:
        print("replay: results differ from the saved record", file=sys.stderr)
        return EXIT_CHECK
    return EXIT_OK


def main(argv: Optional[list[str]] = None) -> int:
    parser = build_parser()
    args = parser.parse_args(_join_signed(list(sys.argv[1:] if argv is None else argv)))
    try:
        fmt = _resolve(args, "format", _fmt_choice)
        jobs = _resolve(args, "jobs", int)
        if args.replay:
            return _replay(args.replay, fmt, getattr(args, "output", None), jobs)
        if not args.command:
            parser.print_usage(sys.stderr)
            return EXIT_USAGE
        ctx = Context(_resolve(args, "digits", int), _resolve(args, "full_precision", _truthy), jobs)
        if ctx.digits < 15:
            raise UsageError("digits must be at least 15")
        if ctx.jobs < 1:
            raise UsageError("jobs must be positive")
        inputs = _inputs(args)
        outcome = _run(args.command, inputs, ctx)
        _emit(_render(fmt, _record(args.command, inputs, ctx, outcome.results), outcome.table), args.output)
    except UsageError as exc:
        print(f"{parser.prog}: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except CheckFailure as exc:
        print(f"check failed: {exc}", file=sys.stderr)
        return EXIT_CHECK
    except (ritz_mod.PrecisionError, RootFindingError) as exc:
        print(f"precision exhausted: {exc}", file=sys.stderr)
        return EXIT_PRECISION
    except OSError as exc:
        print(f"{parser.prog}: {exc}", file=sys.stderr)
        return EXIT_USAGE
    if not outcome.ok:
        print(f"check failed: {outcome.message}", file=sys.stderr)
        return EXIT_CHECK
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
