"""Selects the compiled hot kernels when available, else their pure-Python twins.

Set ``HEUN_PURE_PYTHON=1`` to force the fallbacks.
"""
from __future__ import annotations

import os

import mpmath

from heun_spectrum import _sturm_py

_force_python = os.environ.get("HEUN_PURE_PYTHON", "").strip() not in ("", "0")

_sturm_c = None
_jacobi_c = None
if not _force_python:
    try:
        from heun_spectrum import _sturm as _sturm_c
    except ImportError:
        _sturm_c = None
    try:
        from heun_spectrum import _mpjacobi as _jacobi_c
    except ImportError:
        _jacobi_c = None

STURM_BACKEND = "cython" if _sturm_c is not None else "python"
JACOBI_BACKEND = "mpfr" if _jacobi_c is not None else "python"


def tridiagonal_eigenvalues(d, e, k_lo: int, k_hi: int, abstol: float = 0.0, backend: str | None = None):
    """Eigenvalues k_lo..k_hi (0-based, ascending) of the symmetric tridiagonal (d, e)."""
    impl = _pick(backend, _sturm_c, _sturm_py, "cython")
    return impl.tridiagonal_eigenvalues(d, e, k_lo, k_hi, abstol)


def sturm_count(d, e, x: float, backend: str | None = None) -> int:
    impl = _pick(backend, _sturm_c, _sturm_py, "cython")
    return impl.sturm_count(d, e, x)


def jacobi_eigh(A, want_vectors: bool = True, backend: str | None = None):
    """Symmetric eigensolve of a list-of-lists mpf matrix at the current mpmath precision.

    Returns ascending eigenvalues and matching eigenvector columns (``None`` if
    not requested).
    """
    n = len(A)
    use_c = _pick(backend, _jacobi_c, None, "mpfr") is not None
    if use_c:
        entries = [_man_exp(x) for row in A for x in row]
        raw_values, raw_vectors = _jacobi_c.jacobi_eigh(entries, n, mpmath.mp.prec, want_vectors)
        values = [mpmath.mpf(v) for v in raw_values]
        vectors = [[mpmath.mpf(x) for x in col] for col in raw_vectors] if want_vectors else None
    else:
        from heun_spectrum.ritz import jacobi_eigh_python

        values, vectors = jacobi_eigh_python(A, want_vectors)
    order = sorted(range(n), key=values.__getitem__)
    return [values[k] for k in order], ([vectors[k] for k in order] if want_vectors else None)


def _man_exp(x) -> tuple[int, int]:
    x = mpmath.mpf(x)
    if not mpmath.isfinite(x):
        raise ValueError("matrix entries must be finite")
    sign, man, exp, _ = x._mpf_
    return (-int(man) if sign else int(man)), int(exp)


def _pick(backend, compiled, fallback, compiled_name):
    if backend is None:
        return compiled if compiled is not None else fallback
    if backend == "python":
        return fallback
    if backend == compiled_name:
        if compiled is None:
            raise RuntimeError(f"compiled {compiled_name} kernel is not built")
        return compiled
    raise ValueError(f"unknown backend {backend!r}")
