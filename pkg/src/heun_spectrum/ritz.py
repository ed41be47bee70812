"""Rayleigh-Ritz diagonalization in the basis u_j(xi) = xi^(|l|+j) exp(-xi^2/2).

All matrix elements reduce to the Gamma moments

    M(p) = int_0^inf xi^p exp(-xi^2) dxi = Gamma((p+1)/2) / 2,

under the planar measure xi dxi. With a = |l|+i, b = |l|+j, s = a+b, integration by
parts of the kinetic term gives

    S_ij = M(s+1)
    H_ij = (a b + l^2) M(s-1) - s M(s+1) + 2 M(s+3) - alpha M(s).

The monomial-Gaussian Gram matrix loses roughly one decimal digit per basis
function, so everything runs in mpmath at a configurable number of digits.
"""
from __future__ import annotations

import functools
import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable, Sequence

import mpmath

from heun_spectrum import kernels
from heun_spectrum.frobenius import exact

DEFAULT_DIGITS = 50
MAX_BASIS = 40
DEFAULT_RESIDUAL_TOL = "1e-20"


class PrecisionError(ArithmeticError):
    """The working precision is too low for the requested basis."""

    def __init__(self, message: str, required_digits: int | None = None):
        if required_digits is not None:
            message = f"{message}; rerun with at least {required_digits} digits"
        super().__init__(message)
        self.required_digits = required_digits


def _to_mpf(x):
    if isinstance(x, Fraction):
        return mpmath.mpf(x.numerator) / x.denominator
    return mpmath.mpf(x)


class MomentTable:
    """Cache of M(p) at one precision. Keep one table per job."""

    def __init__(self, digits: int = DEFAULT_DIGITS):
        self.digits = digits
        self._cache: dict = {}

    def __getitem__(self, p):
        try:
            return self._cache[p]
        except KeyError:
            pass
        value = moment(p, self.digits)
        self._cache[p] = value
        return value


def moment(p, digits: int = DEFAULT_DIGITS):
    """int_0^inf xi^p exp(-xi^2) dxi for p > -1."""
    p = exact(p)
    if p <= -1:
        raise ValueError(f"moment diverges for p = {p} <= -1")
    with mpmath.workdps(digits + 5):
        if p.denominator == 1:
            k = int(p)
            value = mpmath.sqrt(mpmath.pi) / 2 if k % 2 == 0 else mpmath.mpf(1) / 2
            for q in range(k % 2 + 2, k + 1, 2):
                value *= mpmath.mpf(q - 1) / 2
        else:
            value = mpmath.gamma((_to_mpf(p) + 1) / 2) / 2
    return +value


@dataclass(frozen=True)
class BasisSpec:
    l: float
    N: int
    precision_digits: int = DEFAULT_DIGITS

    def __post_init__(self) -> None:
        if not 1 <= self.N <= MAX_BASIS:
            raise ValueError(f"basis size must be in 1..{MAX_BASIS}, got {self.N}")
        if self.precision_digits < 15:
            raise ValueError("precision_digits must be at least 15")

    @property
    def abs_l(self) -> Fraction:
        return abs(exact(self.l))


@dataclass
class RitzResult:
    N: int
    eigenvalues: list
    vectors: list  # vectors[k] is the coefficient column of eigenvalues[k], c^T S c = 1
    residual_norms: list
    l: float = 0.0
    alpha: object = 0.0
    digits: int = DEFAULT_DIGITS
    basis: BasisSpec | None = field(default=None, repr=False)

    def lowest(self, count: int) -> list:
        return self.eigenvalues[:count]


def _matrix(rows: int, cols: int) -> list[list]:
    return [[mpmath.mpf(0)] * cols for _ in range(rows)]


def overlap_matrix(basis: BasisSpec, moments: MomentTable | None = None) -> list[list]:
    M = moments or MomentTable(basis.precision_digits)
    two_l = 2 * basis.abs_l
    return [[M[two_l + i + j + 1] for j in range(basis.N)] for i in range(basis.N)]


def inverse_xi_matrix(basis: BasisSpec, moments: MomentTable | None = None) -> list[list]:
    """Matrix of 1/xi in the basis: X_ij = M(2|l| + i + j)."""
    M = moments or MomentTable(basis.precision_digits)
    two_l = 2 * basis.abs_l
    return [[M[two_l + i + j] for j in range(basis.N)] for i in range(basis.N)]


def hamiltonian_matrix(basis: BasisSpec, alpha, moments: MomentTable | None = None) -> list[list]:
    M = moments or MomentTable(basis.precision_digits)
    L = basis.abs_l
    l2 = L * L
    H = _matrix(basis.N, basis.N)
    with mpmath.workdps(basis.precision_digits + 5):
        alpha = _to_mpf(alpha)
        for i in range(basis.N):
            for j in range(i, basis.N):
                a, b = L + i, L + j
                s = a + b
                coef = a * b + l2
                # coef == 0 only for l = 0, i = j = 0, where M(-1) diverges
                kinetic = _to_mpf(coef) * M[s - 1] if coef else mpmath.mpf(0)
                value = kinetic - _to_mpf(s) * M[s + 1] + 2 * M[s + 3] - alpha * M[s]
                H[i][j] = H[j][i] = value
    return H


def cholesky(S: Sequence[Sequence]) -> list[list]:
    n = len(S)
    L = _matrix(n, n)
    for j in range(n):
        d = S[j][j] - mpmath.fsum(L[j][k] ** 2 for k in range(j))
        if d <= 0:
            raise PrecisionError(f"overlap matrix lost positive definiteness at column {j}")
        L[j][j] = mpmath.sqrt(d)
        for i in range(j + 1, n):
            L[i][j] = (S[i][j] - mpmath.fsum(L[i][k] * L[j][k] for k in range(j))) / L[j][j]
    return L


def _forward(L, b):
    n = len(L)
    y = [mpmath.mpf(0)] * n
    for i in range(n):
        y[i] = (b[i] - mpmath.fsum(L[i][k] * y[k] for k in range(i))) / L[i][i]
    return y


def _backward_transpose(L, y):
    # solve L^T x = y
    n = len(L)
    x = [mpmath.mpf(0)] * n
    for i in reversed(range(n)):
        x[i] = (y[i] - mpmath.fsum(L[k][i] * x[k] for k in range(i + 1, n))) / L[i][i]
    return x


def jacobi_eigh_python(A: Sequence[Sequence], want_vectors: bool = True, max_sweeps: int = 60):
    """Cyclic Jacobi in mpmath; pure-Python twin of the MPFR kernel.

    Returns (eigenvalues, eigenvector columns) in diagonal order.
    """
    n = len(A)
    a = [list(row) for row in A]
    v = [[mpmath.mpf(1) if i == j else mpmath.mpf(0) for j in range(n)] for i in range(n)]
    eps = mpmath.eps
    scale = mpmath.sqrt(mpmath.fsum(x * x for row in a for x in row)) or mpmath.mpf(1)
    for _ in range(max_sweeps):
        off = mpmath.sqrt(mpmath.fsum(a[p][q] ** 2 for p in range(n) for q in range(p + 1, n)))
        if off <= eps * scale:
            break
        for p in range(n - 1):
            for q in range(p + 1, n):
                apq = a[p][q]
                if abs(apq) <= eps * scale * mpmath.mpf("1e-3"):
                    continue
                theta = (a[q][q] - a[p][p]) / (2 * apq)
                t = 1 / (abs(theta) + mpmath.sqrt(theta * theta + 1))
                if theta < 0:
                    t = -t
                c = 1 / mpmath.sqrt(t * t + 1)
                s = t * c
                tau = s / (1 + c)
                a[p][p] -= t * apq
                a[q][q] += t * apq
                a[p][q] = a[q][p] = mpmath.mpf(0)
                for r in range(n):
                    if r != p and r != q:
                        arp, arq = a[r][p], a[r][q]
                        a[r][p] = a[p][r] = arp - s * (arq + tau * arp)
                        a[r][q] = a[q][r] = arq + s * (arp - tau * arq)
                    if want_vectors:
                        vrp, vrq = v[r][p], v[r][q]
                        v[r][p] = vrp - s * (vrq + tau * vrp)
                        v[r][q] = vrq + s * (vrp - tau * vrq)
    else:
        raise RuntimeError("Jacobi iteration did not converge")
    values = [a[k][k] for k in range(n)]
    vectors = [[v[r][k] for r in range(n)] for k in range(n)] if want_vectors else None
    return values, vectors


def _matvec(A, x):
    return [mpmath.fdot(row, x) for row in A]


def _norm(x):
    return mpmath.sqrt(mpmath.fsum(t * t for t in x))


def _digits_lost(L) -> int:
    diag = [abs(L[i][i]) for i in range(len(L))]
    ratio = max(diag) / min(diag)
    return int(math.ceil(2 * float(mpmath.log10(ratio))))


def _factor(S, digits: int):
    n = len(S)
    try:
        L = cholesky(S)
    except PrecisionError as exc:
        raise PrecisionError(str(exc), required_digits=digits + 10 + n) from None
    lost = _digits_lost(L)
    if lost > digits - 10:
        raise PrecisionError(
            f"overlap matrix condition ~1e{lost} consumes the {digits}-digit working precision",
            required_digits=lost + 20,
        )
    return L


def _reduce(L, H):
    """L^-1 H L^-T for symmetric H, symmetrized."""
    n = len(H)
    Y = [_forward(L, [H[r][c] for r in range(n)]) for c in range(n)]  # Y[c] = column c of L^-1 H
    A_cols = [_forward(L, [Y[r][c] for r in range(n)]) for c in range(n)]
    return [[(A_cols[c][r] + A_cols[r][c]) / 2 for c in range(n)] for r in range(n)]


def _eigensolve(A, digits: int, want_vectors: bool, backend: str | None):
    try:
        return kernels.jacobi_eigh(A, want_vectors=want_vectors, backend=backend)
    except RuntimeError as exc:
        raise PrecisionError(str(exc), required_digits=digits + 20) from None


def _back_transform(H, S, L, values, ys, tol, digits: int):
    vectors, residuals = [], []
    for W, y in zip(values, ys):
        c = _backward_transpose(L, y)
        Hc, Sc = _matvec(H, c), _matvec(S, c)
        num = _norm([h - W * s for h, s in zip(Hc, Sc)])
        den = _norm(Hc) + abs(W) * _norm(Sc)
        rel = num / den if den else num
        if rel > tol:
            raise PrecisionError(
                f"eigenpair W={mpmath.nstr(W, 12)} has relative residual {mpmath.nstr(rel, 3)}",
                required_digits=digits + 20,
            )
        vectors.append(c)
        residuals.append(rel)
    return vectors, residuals


def solve_generalized(H, S, tolerance=None, digits: int | None = None, backend: str | None = None) -> RitzResult:
    """Solve H c = W S c through S = L L^T and a Jacobi eigensolve of L^-1 H L^-T.

    ``tolerance`` bounds the relative residual |Hc - WSc| / (|Hc| + |W||Sc|) of every
    pair; it defaults to 1e-20, so whatever the conditioning of S eats, twenty
    significant digits survive.
    """
    digits = digits or mpmath.mp.dps
    with mpmath.workdps(digits):
        tol = mpmath.mpf(tolerance if tolerance is not None else DEFAULT_RESIDUAL_TOL)
        L = _factor(S, digits)
        values, ys = _eigensolve(_reduce(L, H), digits, True, backend)
        vectors, residuals = _back_transform(H, S, L, values, ys, tol, digits)
    return RitzResult(N=len(H), eigenvalues=values, vectors=vectors, residual_norms=residuals, digits=digits)


class ReducedPencil:
    """Basis-dependent work shared by every alpha.

    H(alpha) = H0 - alpha X, so after one Cholesky factorization of S the reduced
    matrix is A0 - alpha B and each new alpha costs a single eigensolve.
    """

    def __init__(self, basis: BasisSpec, moments: MomentTable | None = None):
        self.basis = basis
        digits = basis.precision_digits
        moments = moments or MomentTable(digits)
        with mpmath.workdps(digits):
            self.H0 = hamiltonian_matrix(basis, 0, moments)
            self.X = inverse_xi_matrix(basis, moments)
            self.S = overlap_matrix(basis, moments)
            self.L = _factor(self.S, digits)
            self.A0 = _reduce(self.L, self.H0)
            self.B = _reduce(self.L, self.X)

    def solve(self, alpha, vectors: bool = True, tolerance=None, backend: str | None = None) -> RitzResult:
        digits = self.basis.precision_digits
        n = self.basis.N
        with mpmath.workdps(digits):
            a = _to_mpf(alpha)
            A = [[self.A0[r][c] - a * self.B[r][c] for c in range(n)] for r in range(n)]
            values, ys = _eigensolve(A, digits, vectors, backend)
            vecs, residuals = [], []
            if vectors:
                tol = mpmath.mpf(tolerance if tolerance is not None else DEFAULT_RESIDUAL_TOL)
                H = [[self.H0[r][c] - a * self.X[r][c] for c in range(n)] for r in range(n)]
                vecs, residuals = _back_transform(H, self.S, self.L, values, ys, tol, digits)
        return RitzResult(N=n, eigenvalues=values, vectors=vecs, residual_norms=residuals, l=self.basis.l,
                          alpha=alpha, digits=digits, basis=self.basis)


@functools.lru_cache(maxsize=128)
def pencil(l, N: int, digits: int = DEFAULT_DIGITS) -> ReducedPencil:
    """Cached ReducedPencil; read-only after construction."""
    return ReducedPencil(BasisSpec(l=l, N=N, precision_digits=digits))


def ritz(l, alpha, N: int, digits: int = DEFAULT_DIGITS, moments: MomentTable | None = None,
         backend: str | None = None, vectors: bool = True) -> RitzResult:
    """Ritz eigenpairs for (l, alpha) with the first N basis functions."""
    return pencil(l, N, digits).solve(alpha, vectors=vectors, backend=backend)


def monotonicity_slack(digits: int):
    return mpmath.mpf(10) ** (-(digits - 20))


def convergence_study(l, alpha, N_range: Iterable[int], count: int, digits: int = DEFAULT_DIGITS) -> list[RitzResult]:
    """Ritz runs over ``N_range``; asserts eigenvalues never increase with N."""
    Ns = list(N_range)
    if any(b <= a for a, b in zip(Ns, Ns[1:])):
        raise ValueError("N_range must be strictly ascending")
    moments = MomentTable(digits)
    results = [ritz(l, alpha, N, digits, moments) for N in Ns]
    with mpmath.workdps(digits):
        slack = monotonicity_slack(digits)
        for prev, cur in zip(results, results[1:]):
            _check_monotone(prev, cur, count, slack)
    return results


def _check_monotone(prev: RitzResult, cur: RitzResult, count: int, slack) -> None:
    for k in range(min(count, prev.N)):
        if cur.eigenvalues[k] > prev.eigenvalues[k] + slack:
            raise PrecisionError(
                f"W_{k} increased from N={prev.N} to N={cur.N} "
                f"({mpmath.nstr(prev.eigenvalues[k], 15)} -> {mpmath.nstr(cur.eigenvalues[k], 15)})",
                required_digits=cur.digits + 20,
            )


def converged(l, alpha, count: int, digits: int = DEFAULT_DIGITS, tol: float = 1e-12,
              N_start: int | None = None, N_max: int = 30, step: int = 2) -> RitzResult:
    """Grow the basis until the lowest ``count`` eigenvalues move by less than ``tol``."""
    moments = MomentTable(digits)
    N = N_start or max(count + 2, 8)
    prev = ritz(l, alpha, N, digits, moments)
    while True:
        N += step
        if N > N_max:
            raise PrecisionError(f"lowest {count} levels not converged to {tol} by N={N_max}")
        cur = ritz(l, alpha, N, digits, moments)
        with mpmath.workdps(digits):
            change = max(abs(a - b) for a, b in zip(prev.eigenvalues[:count], cur.eigenvalues[:count]))
        if change < tol:
            return cur
        prev = cur


def expectation_inverse_xi(result: RitzResult, level: int, basis: BasisSpec | None = None):
    """<1/xi> in the ``level``-th Ritz state; equals -dW/dalpha for the fixed basis."""
    basis = basis or result.basis
    if not 0 <= level < result.N:
        raise IndexError(f"level must be in 0..{result.N - 1}")
    with mpmath.workdps(result.digits):
        moments = MomentTable(result.digits)
        X = inverse_xi_matrix(basis, moments)
        S = overlap_matrix(basis, moments)
        c = result.vectors[level]
        return mpmath.fdot(c, _matvec(X, c)) / mpmath.fdot(c, _matvec(S, c))
