"""Pure-Python twin of the compiled Sturm-count bisection kernel."""
from __future__ import annotations

import sys

import numpy as np

_EPS = sys.float_info.epsilon
_TINY = sys.float_info.min


def _count(d: list[float], e2: list[float], x: float, pivmin: float) -> int:
    q = d[0] - x
    if abs(q) < pivmin:
        q = -pivmin
    neg = 1 if q < 0 else 0
    for i in range(1, len(d)):
        q = d[i] - x - e2[i - 1] / q
        if abs(q) < pivmin:
            q = -pivmin
        if q < 0:
            neg += 1
    return neg


def _pivmin(e2: list[float]) -> float:
    return _TINY * max(1.0, max(e2) if e2 else 1.0)


def sturm_count(d, e, x: float) -> int:
    """Number of eigenvalues strictly below ``x``."""
    e2 = [float(v) * float(v) for v in e]
    return _count([float(v) for v in d], e2, float(x), _pivmin(e2))


def tridiagonal_eigenvalues(d, e, k_lo: int, k_hi: int, abstol: float = 0.0) -> np.ndarray:
    d = [float(v) for v in d]
    e = [float(v) for v in e]
    e2 = [v * v for v in e]
    pivmin = _pivmin(e2)
    n = len(d)
    glo, ghi = d[0], d[0]
    for i in range(n):
        r = (abs(e[i - 1]) if i > 0 else 0.0) + (abs(e[i]) if i < n - 1 else 0.0)
        glo = min(glo, d[i] - r)
        ghi = max(ghi, d[i] + r)
    out: list[float] = []
    for k in range(k_lo, k_hi + 1):
        lo, hi = (out[-1] - abstol if out else glo), ghi
        while True:
            if hi - lo <= abstol + 2.0 * _EPS * max(abs(lo), abs(hi)):
                break
            mid = 0.5 * (lo + hi)
            if mid <= lo or mid >= hi:
                break
            if _count(d, e2, mid, pivmin) > k:
                hi = mid
            else:
                lo = mid
        out.append(0.5 * (lo + hi))
    return np.array(out)
