"""Spectrum curves W_nu(alpha), Hellmann-Feynman checks and the truncation-point audit."""
from __future__ import annotations

import bisect
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from decimal import ROUND_HALF_EVEN, Decimal
from fractions import Fraction
from typing import Optional, Sequence

import mpmath

from heun_spectrum import ritz as _ritz
from heun_spectrum.frobenius import truncation_solutions
from heun_spectrum.model import alpha_from_token
from heun_spectrum.reference_data import TABLES

DEFAULT_STEP = 0.05
OVERLAY_TOL = 1e-8


class CurveError(RuntimeError):
    """A sampled eigenvalue curve failed to decrease with alpha."""


@dataclass
class HFReport:
    alpha: float
    level: int
    lhs: float
    rhs: float
    abs_diff: float
    basis_N: int


@dataclass
class SpectrumCurve:
    l: float
    level: int
    samples: list  # (alpha, W) floats, alpha increasing
    basis_N: int

    @property
    def alphas(self) -> list[float]:
        return [a for a, _ in self.samples]

    def interpolate(self, alpha: float) -> float:
        xs = self.alphas
        if not xs[0] <= alpha <= xs[-1]:
            raise ValueError(f"alpha={alpha} outside the sampled range [{xs[0]}, {xs[-1]}]")
        k = min(max(bisect.bisect_left(xs, alpha), 1), len(xs) - 1)
        (a0, w0), (a1, w1) = self.samples[k - 1], self.samples[k]
        return w0 + (w1 - w0) * (alpha - a0) / (a1 - a0)


def hellmann_feynman_check(l, alpha, level: int = 0, h: float = 1e-3, digits: int = _ritz.DEFAULT_DIGITS,
                           basis_N: Optional[int] = None, richardson: bool = False) -> HFReport:
    """Compare the central difference of W_level(alpha) with -<1/xi>.

    All stencil points share one basis size, chosen so the centre is converged to
    1e-12 unless ``basis_N`` is given.
    """
    alpha_mp = alpha_from_token(alpha, digits + 10)
    if basis_N is None:
        basis_N = _ritz.converged(l, alpha_mp, level + 1, digits).N
    moments = _ritz.MomentTable(digits)

    def W(a):
        return _ritz.ritz(l, a, basis_N, digits, moments).eigenvalues[level]

    with mpmath.workdps(digits):
        def central(step):
            step = mpmath.mpf(step)
            return (W(alpha_mp + step) - W(alpha_mp - step)) / (2 * step)

        lhs = central(h)
        if richardson:
            lhs = (4 * central(mpmath.mpf(h) / 2) - lhs) / 3
        centre = _ritz.ritz(l, alpha_mp, basis_N, digits, moments)
        rhs = -_ritz.expectation_inverse_xi(centre, level)
        return HFReport(float(alpha_mp), level, float(lhs), float(rhs), float(abs(lhs - rhs)), basis_N)


def _alpha_grid(alpha_min: float, alpha_max: float, step: float) -> list[float]:
    if step <= 0:
        raise ValueError("step must be positive")
    lo, hi, st = (Fraction(str(x)) for x in (alpha_min, alpha_max, step))
    if hi < lo:
        raise ValueError("alpha_max must not be below alpha_min")
    count = int((hi - lo) / st)
    return [float(lo + k * st) for k in range(count + 1)]


def _sweep_point(args) -> list[float]:
    l, alpha, levels, basis_N, digits = args
    result = _ritz.ritz(l, alpha, basis_N, digits, vectors=False)
    return [float(w) for w in result.eigenvalues[:levels]]


def spectrum_sweep(l, alpha_min: float, alpha_max: float, step: float = DEFAULT_STEP, levels: int = 4,
                   basis_N: int = 20, digits: int = _ritz.DEFAULT_DIGITS, jobs: int = 1) -> list[SpectrumCurve]:
    """Sample the lowest ``levels`` curves on an alpha grid; levels are tracked by sorted index."""
    if levels > basis_N:
        raise ValueError("cannot track more levels than basis functions")
    alphas = _alpha_grid(alpha_min, alpha_max, step)
    tasks = [(l, a, levels, basis_N, digits) for a in alphas]
    if jobs > 1:
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            rows = list(pool.map(_sweep_point, tasks, chunksize=4))
    else:
        rows = [_sweep_point(t) for t in tasks]
    curves = [
        SpectrumCurve(l, nu, [(a, row[nu]) for a, row in zip(alphas, rows)], basis_N) for nu in range(levels)
    ]
    for curve in curves:
        for (a0, w0), (a1, w1) in zip(curve.samples, curve.samples[1:]):
            if not w1 < w0:
                raise CurveError(f"W_{curve.level} does not decrease between alpha={a0} and {a1}")
    return curves


@dataclass
class OverlayPoint:
    n: int
    root_index: int
    alpha: float
    W: float
    interpolated_level: Optional[int]
    matched_levels: list
    min_gap: float

    @property
    def level(self) -> Optional[int]:
        return self.matched_levels[0] if len(self.matched_levels) == 1 else None


@dataclass
class ColumnAudit:
    alpha: float
    points: list  # OverlayPoint
    ladder: bool  # alpha = 0 column


@dataclass
class OverlayReport:
    l: float
    n_max: int
    points: list = field(default_factory=list)
    columns: list = field(default_factory=list)
    failures: list = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return not self.failures


def truncation_overlay(l, n_max: int, sweep: Sequence[SpectrumCurve], digits: int = _ritz.DEFAULT_DIGITS,
                       tol: float = OVERLAY_TOL) -> OverlayReport:
    """Place every truncation point (alpha_root, 2n+2|l|+2) on the swept curves.

    A point is matched to a curve by interpolating the sweep, then confirmed by a
    direct Ritz solve at the exact root: exactly one level must reproduce the
    truncation value within ``tol``.
    """
    report = OverlayReport(l=l, n_max=n_max)
    basis_N = max(c.basis_N for c in sweep)
    for n in range(1, n_max + 1):
        sol = truncation_solutions(l, n, digits + 10)
        W_fixed = float(sol.W_fixed)
        for i, root in enumerate(sol.alpha_roots, start=1):
            a = float(root)
            try:
                gaps = [abs(c.interpolate(a) - W_fixed) for c in sweep]
            except ValueError as exc:
                report.failures.append(f"n={n} root {i}: {exc}")
                continue
            candidate = min(range(len(gaps)), key=gaps.__getitem__)
            result = _ritz.ritz(l, root, max(basis_N, n + 1), digits)
            with mpmath.workdps(digits):
                diffs = [abs(w - sol.W_fixed) for w in result.eigenvalues]
            matched = [k for k, d in enumerate(diffs) if d < tol]
            point = OverlayPoint(n, i, a, W_fixed, candidate, matched, float(min(diffs)))
            report.points.append(point)
            if len(matched) != 1:
                report.failures.append(f"n={n} root {i} (alpha={a:.10g}) matches {len(matched)} levels")
            elif matched[0] != candidate:
                report.failures.append(
                    f"n={n} root {i}: direct solve gives level {matched[0]}, sweep suggests {candidate}"
                )
    _audit_columns(report)
    return report


def _audit_columns(report: OverlayReport) -> None:
    columns: list[ColumnAudit] = []
    for p in sorted(report.points, key=lambda p: p.alpha):
        if columns and abs(columns[-1].alpha - p.alpha) < 1e-9:
            columns[-1].points.append(p)
        else:
            columns.append(ColumnAudit(p.alpha, [p], ladder=abs(p.alpha) < 1e-12))
    L = abs(float(report.l))
    for col in columns:
        if col.ladder:
            levels = sorted(p.level for p in col.points)
            expected = list(range(1, report.n_max // 2 + 1))
            if levels != expected:
                report.failures.append(f"alpha=0 column matches levels {levels}, expected ladder {expected}")
            for p in col.points:
                if p.level is not None and abs(p.W - 2 * (2 * p.level + L + 1)) > 1e-12:
                    report.failures.append(f"alpha=0 point n={p.n} is not an oscillator level")
        elif len(col.points) != 1:
            report.failures.append(f"alpha={col.alpha:.10g} carries {len(col.points)} truncation points")
    report.columns = columns


@dataclass
class OnsetResult:
    found: bool
    alpha_lo: float  # last sample with W_0 >= 0
    alpha_hi: float  # first sample with W_0 < 0

    @property
    def first_negative_alpha(self) -> Optional[float]:
        return self.alpha_hi if self.found else None


def negative_onset(l, sweep: Sequence[SpectrumCurve]) -> OnsetResult:
    """Grid interval where the ground curve changes sign (bounds are the sweep range if absent)."""
    ground = next(c for c in sweep if c.level == 0)
    previous = None
    for a, w in ground.samples:
        if w < 0:
            if previous is None:
                return OnsetResult(True, a, a)
            return OnsetResult(True, previous, a)
        previous = a
    return OnsetResult(False, ground.samples[0][0], ground.samples[-1][0])


# -- table reproduction -----------------------------------------------------------


def round_like(value, printed: str) -> str:
    """Round ``value`` to the number of decimals of ``printed``."""
    decimals = len(printed.split(".")[1]) if "." in printed else 0
    q = Decimal(mpmath.nstr(value, 40, strip_zeros=False)).quantize(Decimal(1).scaleb(-decimals), ROUND_HALF_EVEN)
    text = format(q, "f")
    return "0" + text[2:] if text.startswith("-0") and Decimal(text) == 0 else text


@dataclass
class TableRow:
    N: int
    printed: tuple
    computed: list
    matches: list

    @property
    def ok(self) -> bool:
        return all(self.matches)


@dataclass
class TableReport:
    which: int
    l: int
    alpha: str
    rows: list

    @property
    def passed(self) -> bool:
        return all(r.ok for r in self.rows)

    @property
    def mismatches(self) -> list:
        return [(r.N, k, r.printed[k], r.computed[k]) for r in self.rows for k, m in enumerate(r.matches) if not m]


def reproduce_table(which: int, digits: int = _ritz.DEFAULT_DIGITS, backend: Optional[str] = None) -> TableReport:
    try:
        table = TABLES[which]
    except KeyError:
        raise ValueError(f"unknown table {which}; choose from {sorted(TABLES)}") from None
    alpha = alpha_from_token(table.alpha, digits + 10)
    moments = _ritz.MomentTable(digits)
    rows = []
    previous = None
    with mpmath.workdps(digits):
        slack = _ritz.monotonicity_slack(digits)
        for N, printed in table.rows.items():
            result = _ritz.ritz(table.l, alpha, N, digits, moments, backend=backend)
            if previous is not None:
                _ritz._check_monotone(previous, result, len(printed), slack)
            previous = result
            computed = [round_like(w, p) for w, p in zip(result.eigenvalues, printed)]
            rows.append(TableRow(N, printed, computed, [c == p for c, p in zip(computed, printed)]))
    return TableReport(which, table.l, table.alpha, rows)
