"""Time the compiled kernels against their pure-Python fallbacks.

    python3 benchmarks/bench_kernels.py [--npoints 20000] [--basis 20] [--repeat 3]

Both backends are run on identical inputs and their outputs compared, so the
benchmark doubles as an equivalence check.
"""
from __future__ import annotations

import argparse
import statistics
import time

import mpmath
import numpy as np

from heun_spectrum import kernels, oracle, ritz
from heun_spectrum.model import ScaledModel, alpha_from_token


def _time(fn, repeat: int) -> tuple[float, object]:
    times, out = [], None
    for _ in range(repeat):
        t0 = time.perf_counter()
        out = fn()
        times.append(time.perf_counter() - t0)
    return statistics.median(times), out


def bench_sturm(npoints: int, count: int, repeat: int) -> None:
    model = ScaledModel(0, float(alpha_from_token("-sqrt2")))
    d, e = oracle.tridiagonal_system(model, oracle.GridSpec(npoints=npoints))
    rows = {}
    for backend in ("cython", "python"):
        if backend == "cython" and kernels.STURM_BACKEND != "cython":
            print("sturm: compiled kernel not built, skipping")
            continue
        rows[backend] = _time(lambda: kernels.tridiagonal_eigenvalues(d, e, 0, count - 1, backend=backend), repeat)
    _report(f"sturm bisection ({npoints} nodes, {count} levels)", rows,
            lambda a, b: float(np.max(np.abs(a - b))))


def bench_jacobi(N: int, digits: int, repeat: int) -> None:
    p = ritz.pencil(0, N, digits)
    alpha = alpha_from_token("sqrt2", digits)
    with mpmath.workdps(digits):
        A = [[p.A0[r][c] - alpha * p.B[r][c] for c in range(N)] for r in range(N)]
    rows = {}
    for backend in ("mpfr", "python"):
        if backend == "mpfr" and kernels.JACOBI_BACKEND != "mpfr":
            print("jacobi: compiled kernel not built, skipping")
            continue
        with mpmath.workdps(digits):
            rows[backend] = _time(lambda: kernels.jacobi_eigh(A, backend=backend)[0], repeat)

    def spread(a, b):
        with mpmath.workdps(digits):
            return float(max(abs(x - y) for x, y in zip(a, b)))

    _report(f"jacobi eigensolve (N={N}, {digits} digits)", rows, spread)


def _report(title: str, rows: dict, spread) -> None:
    print(title)
    for backend, (t, _) in rows.items():
        print(f"  {backend:>7}: {t * 1e3:9.1f} ms")
    if len(rows) == 2:
        (fast, (tf, a)), (slow, (ts, b)) = rows.items()
        print(f"  speedup {ts / tf:.1f}x, max |difference| {spread(a, b):.2e}")


def main() -> None:
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--npoints", type=int, default=20000)
    ap.add_argument("--count", type=int, default=4)
    ap.add_argument("--basis", type=int, default=20)
    ap.add_argument("--digits", type=int, default=ritz.DEFAULT_DIGITS)
    ap.add_argument("--repeat", type=int, default=3)
    args = ap.parse_args()
    bench_sturm(args.npoints, args.count, args.repeat)
    bench_jacobi(args.basis, args.digits, args.repeat)


if __name__ == "__main__":
    main()
