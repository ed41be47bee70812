"""Power-series solutions and the polynomial (truncated) sector.

Writing R(xi) = xi^|l| exp(-xi^2/2) sum_j a_j xi^j turns the radial equation into
the three-term recurrence

    a_{j+2} = -[alpha a_{j+1} + (g - 2j) a_j] / [(j+2)(j+1+theta)],
    a_0 = 1, a_{-1} = 0, theta = 2|l| + 1, g = W - 2 - 2|l|.

The series collapses to a degree-n polynomial when g = 2n and a_{n+1}(alpha) = 0.
For fixed (n, l) this fixes W = 2n + 2|l| + 2 and leaves n+1 admissible values of
alpha, all of them real. Each (n, l) family therefore gives one eigenvalue of one
particular operator; it says nothing about the rest of that operator's spectrum.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from numbers import Rational
from typing import Any, Callable, Sequence

import mpmath

from heun_spectrum.model import ScaledModel

DEFAULT_DIGITS = 40


class RootFindingError(RuntimeError):
    def __init__(self, message: str, interval: tuple[Any, Any] | None = None):
        super().__init__(message if interval is None else f"{message} (interval {interval})")
        self.interval = interval


def exact(value: Any) -> Fraction:
    """Exact rational for an int, Fraction, float, decimal string or mpf."""
    if isinstance(value, Fraction):
        return value
    if isinstance(value, Rational):
        return Fraction(value.numerator, value.denominator)
    if isinstance(value, float):
        if not math.isfinite(value):
            raise ValueError(f"non-finite value {value!r}")
        return Fraction(value)
    if isinstance(value, str):
        return Fraction(value)
    if isinstance(value, mpmath.mpf):
        man, exp = value.man_exp
        return Fraction(man) * Fraction(2) ** exp
    raise TypeError(f"cannot convert {type(value).__name__} to an exact rational")


@dataclass(frozen=True)
class RecurrenceParams:
    l: Any
    g: Any

    @property
    def theta(self):
        return 2 * abs(self.l) + 1

    @classmethod
    def from_energy(cls, l, W) -> "RecurrenceParams":
        return cls(l=l, g=W - 2 - 2 * abs(l))


def coefficients(params: RecurrenceParams, alpha, J: int) -> list:
    """Series coefficients a_0..a_J in whatever arithmetic the inputs carry."""
    if J < 0:
        raise ValueError("J must be non-negative")
    theta = params.theta
    g = params.g
    prev, cur = 0, 1  # a_{-1}, a_0
    out = [cur]
    for j in range(-1, J - 1):
        nxt = -(alpha * cur + (g - 2 * j) * prev) / ((j + 2) * (j + 1 + theta))
        out.append(nxt)
        prev, cur = cur, nxt
    return out


# -- exact polynomials in alpha (coefficient lists, lowest degree first) ------------


def _trim(p: list[Fraction]) -> list[Fraction]:
    while len(p) > 1 and p[-1] == 0:
        p = p[:-1]
    return p


def _poly_eval(p: Sequence, x):
    acc = 0 * x
    for c in reversed(p):
        acc = acc * x + c
    return acc


def _poly_deriv(p: Sequence[Fraction]) -> list[Fraction]:
    return _trim([k * p[k] for k in range(1, len(p))] or [Fraction(0)])


def _poly_rem(a: list[Fraction], b: list[Fraction]) -> list[Fraction]:
    a = list(a)
    while len(a) >= len(b) and any(a):
        factor = a[-1] / b[-1]
        shift = len(a) - len(b)
        for k, c in enumerate(b):
            a[shift + k] -= factor * c
        a.pop()
    return _trim(a or [Fraction(0)])


def _sturm_chain(p: list[Fraction]) -> list[list[Fraction]]:
    chain = [p, _poly_deriv(p)]
    while len(chain[-1]) > 1:
        r = _poly_rem(chain[-2], chain[-1])
        if not any(r):
            break
        chain.append([-c for c in r])
    return chain


def _sign_changes(values) -> int:
    signs = [v > 0 for v in values if v != 0]
    return sum(1 for s, t in zip(signs, signs[1:]) if s != t)


def _variations_at(chain, x: Fraction) -> int:
    return _sign_changes([_poly_eval(q, x) for q in chain])


def _variations_at_infinity(chain, sign: int) -> int:
    return _sign_changes([q[-1] * (sign ** (len(q) - 1)) for q in chain])


@dataclass(frozen=True)
class CoefficientPolynomial:
    """a_{n+1}(alpha) at g = 2n, exact rational coefficients (lowest power first)."""

    n: int
    l: Fraction
    coeffs: tuple[Fraction, ...]

    @property
    def degree(self) -> int:
        return len(self.coeffs) - 1

    def __call__(self, alpha):
        return _poly_eval(self.coeffs, alpha)


def coefficient_polynomial(l, n: int) -> CoefficientPolynomial:
    if n < 1:
        raise ValueError("truncation order n must be >= 1")
    lq = exact(l)
    theta = 2 * abs(lq) + 1
    g = Fraction(2 * n)
    prev: list[Fraction] = [Fraction(0)]
    cur: list[Fraction] = [Fraction(1)]
    for j in range(-1, n):
        denom = (j + 2) * (j + 1 + theta)
        shifted = [Fraction(0)] + cur  # alpha * a_{j+1}
        nxt = [Fraction(0)] * len(shifted)
        for k, c in enumerate(shifted):
            nxt[k] -= c / denom
        for k, c in enumerate(prev):
            nxt[k] -= (g - 2 * j) * c / denom
        prev, cur = cur, _trim(nxt)
    return CoefficientPolynomial(n=n, l=lq, coeffs=tuple(cur))


@dataclass(frozen=True)
class TruncationSolution:
    n: int
    l: Fraction
    W_fixed: Fraction
    alpha_roots: tuple  # mpf, ascending
    digits: int = DEFAULT_DIGITS
    polynomial: CoefficientPolynomial | None = field(default=None, compare=False, repr=False)

    @property
    def theta(self) -> Fraction:
        return 2 * abs(self.l) + 1


def _isolate(chain, lo: Fraction, hi: Fraction, v_lo: int, v_hi: int, out: list) -> None:
    count = v_lo - v_hi
    if count == 0:
        return
    if count == 1:
        out.append((lo, hi))
        return
    mid = (lo + hi) / 2
    v_mid = _variations_at(chain, mid)
    _isolate(chain, lo, mid, v_lo, v_mid, out)
    _isolate(chain, mid, hi, v_mid, v_hi, out)


def _refine(p: list[Fraction], lo: Fraction, hi: Fraction, digits: int, max_steps: int = 4000) -> Fraction:
    """Bisect the single simple root of ``p`` in (lo, hi] to ``digits`` significant digits."""
    if _poly_eval(p, hi) == 0:
        return hi
    f_lo = _poly_eval(p, lo)
    if f_lo == 0:
        # lo belongs to the neighbouring interval; use the sign just to its right
        f_lo = _poly_eval(_poly_deriv(p), lo)
    left_positive = f_lo > 0
    scale = Fraction(1, 10 ** (digits + 3))
    for _ in range(max_steps):
        width = hi - lo
        if width <= scale * max(1, abs(lo), abs(hi)):
            return (lo + hi) / 2
        mid = (lo + hi) / 2
        f_mid = _poly_eval(p, mid)
        if f_mid == 0:
            return mid
        if (f_mid > 0) == left_positive:
            lo = mid
        else:
            hi = mid
    raise RootFindingError("bisection did not reach the requested precision", (lo, hi))


def real_roots(poly: CoefficientPolynomial, digits: int = DEFAULT_DIGITS) -> list[Fraction]:
    """All real roots of ``poly`` as rationals accurate to ``digits`` significant digits.

    Raises if the polynomial has fewer distinct real roots than its degree.
    """
    p = list(poly.coeffs)
    roots: list[Fraction] = []
    if p[0] == 0:
        roots.append(Fraction(0))
        p = _trim(p[1:])
    if len(p) == 1:
        return roots
    chain = _sturm_chain(p)
    n_real = _variations_at_infinity(chain, -1) - _variations_at_infinity(chain, 1)
    if n_real != len(p) - 1:
        raise RootFindingError(
            f"a_{poly.n + 1} has {n_real} distinct real roots, expected {len(p) - 1} "
            "(complex or repeated roots)"
        )
    bound = 1 + max(abs(c / p[-1]) for c in p[:-1])
    bound = Fraction(math.ceil(bound))
    intervals: list[tuple[Fraction, Fraction]] = []
    _isolate(chain, -bound, bound, _variations_at(chain, -bound), _variations_at(chain, bound), intervals)
    if len(intervals) != n_real:
        raise RootFindingError("root isolation lost a root", (-bound, bound))
    roots.extend(_refine(p, lo, hi, digits) for lo, hi in intervals)
    return sorted(roots)


def truncation_solutions(l, n: int, digits: int = DEFAULT_DIGITS) -> TruncationSolution:
    poly = coefficient_polynomial(l, n)
    roots = real_roots(poly, digits)
    if len(roots) != n + 1:
        raise RootFindingError(f"expected {n + 1} real roots, found {len(roots)}")
    with mpmath.workdps(digits + 5):
        alpha_roots = tuple(mpmath.mpf(r.numerator) / r.denominator for r in roots)
    return TruncationSolution(
        n=n,
        l=poly.l,
        W_fixed=2 * n + 2 * abs(poly.l) + 2,
        alpha_roots=alpha_roots,
        digits=digits,
        polynomial=poly,
    )


class PolynomialWavefunction:
    """R(xi) = xi^|l| exp(-xi^2/2) P(xi) for one truncation root, with exact derivatives."""

    def __init__(self, l, alpha, W, coeffs: Sequence, dps: int):
        self.l = l
        self.alpha = alpha
        self.W = W
        self.coeffs = list(coeffs)
        self.dps = dps

    def _parts(self, xi):
        s = mpmath.mpf(abs(self.l))
        p = self.coeffs
        P = _poly_eval(p, xi)
        dP = _poly_eval([k * p[k] for k in range(1, len(p))] or [0], xi)
        d2P = _poly_eval([k * (k - 1) * p[k] for k in range(2, len(p))] or [0], xi)
        xs = xi ** s
        f = xs * P
        f1 = s * xi ** (s - 1) * P + xs * dP
        f2 = s * (s - 1) * xi ** (s - 2) * P + 2 * s * xi ** (s - 1) * dP + xs * d2P
        return f, f1, f2, mpmath.exp(-xi * xi / 2)

    def __call__(self, xi):
        with mpmath.workdps(self.dps):
            xi = mpmath.mpf(xi)
            f, _, _, e = self._parts(xi)
            return f * e

    def derivatives(self, xi):
        """(R, R', R'') at ``xi``."""
        with mpmath.workdps(self.dps):
            xi = mpmath.mpf(xi)
            f, f1, f2, e = self._parts(xi)
            return f * e, (f1 - xi * f) * e, (f2 - 2 * xi * f1 - f + xi * xi * f) * e


def polynomial_wavefunction(sol: TruncationSolution, root_index: int) -> PolynomialWavefunction:
    """Wavefunction for the ``root_index``-th root (1-based, ascending alpha)."""
    if not 1 <= root_index <= sol.n + 1:
        raise IndexError(f"root_index must be in 1..{sol.n + 1}, got {root_index}")
    dps = sol.digits + 5
    with mpmath.workdps(dps):
        alpha = sol.alpha_roots[root_index - 1]
        l_mp = mpmath.mpf(sol.l.numerator) / sol.l.denominator
        params = RecurrenceParams(l=l_mp, g=mpmath.mpf(2 * sol.n))
        a = coefficients(params, alpha, sol.n + 2)
        scale = max(abs(c) for c in a[: sol.n + 1])
        tol = scale * mpmath.mpf(10) ** (-(sol.digits - 5))
        if abs(a[sol.n + 1]) > tol or abs(a[sol.n + 2]) > tol:
            raise RootFindingError(
                f"series does not terminate at alpha={mpmath.nstr(alpha, 15)}: "
                f"a_{sol.n + 1}={mpmath.nstr(a[sol.n + 1], 5)}"
            )
        W = mpmath.mpf(sol.W_fixed.numerator) / sol.W_fixed.denominator
        return PolynomialWavefunction(l_mp, alpha, W, a[: sol.n + 1], dps)


def ode_residual(R: Callable, W, model: ScaledModel, grid: Sequence, dps: int | None = None):
    """max |R'' + R'/xi - l^2/xi^2 R + alpha/xi R - xi^2 R + W R| over ``grid``.

    Polynomial wavefunctions are differentiated analytically; any other callable
    is differentiated numerically with mpmath. Pass ``model.alpha`` as an mpf
    (e.g. ``R.alpha``) to keep a truncation root at full precision.
    """
    if dps is None:
        dps = getattr(R, "dps", mpmath.mp.dps)
    worst = mpmath.mpf(0)
    with mpmath.workdps(dps):
        l2 = mpmath.mpf(model.l) ** 2
        alpha = mpmath.mpf(model.alpha)
        W = mpmath.mpf(W)
        for xi in grid:
            xi = mpmath.mpf(xi)
            if xi <= 0:
                raise ValueError("grid points must be strictly positive")
            if hasattr(R, "derivatives"):
                r0, r1, r2 = R.derivatives(xi)
            else:
                r0, r1, r2 = (mpmath.diff(R, xi, k) for k in range(3))
            res = r2 + r1 / xi - l2 / (xi * xi) * r0 + alpha / xi * r0 - xi * xi * r0 + W * r0
            worst = max(worst, abs(res))
    return worst
