import numpy as np
import pytest

from heun_spectrum import oracle, ritz
from heun_spectrum.model import ScaledModel, alpha_from_token


def test_oscillator_levels():
    vals = oracle.fd_spectrum(ScaledModel(0, 0.0), count=4)
    for k, v in enumerate(vals):
        assert v.value == pytest.approx(4 * k + 2, abs=1e-6)
        assert v.error < 1e-5


def test_angular_momentum_levels():
    vals = oracle.fd_spectrum(ScaledModel(2, 0.0), count=3)
    assert [v.value for v in vals] == pytest.approx([6, 10, 14], abs=1e-5)


def test_second_order_contraction():
    ratios = oracle.grid_convergence(ScaledModel(1, 1.0), oracle.GridSpec(npoints=4000), count=3)
    assert np.all((ratios > 3) & (ratios < 5))


def test_richardson_error_bar_covers_truth():
    vals = oracle.fd_spectrum(ScaledModel(0, 0.0), oracle.GridSpec(npoints=2000), count=2)
    for k, v in enumerate(vals):
        assert abs(v.value - (4 * k + 2)) <= v.error
        assert v.fine is not None


def test_plain_grid_without_richardson():
    vals = oracle.fd_spectrum(ScaledModel(0, 0.0), oracle.GridSpec(npoints=2000, richardson=False), count=1)
    assert vals[0].error is None and vals[0].value == vals[0].coarse


def test_small_box_detected():
    with pytest.raises(oracle.BoundaryError):
        oracle.fd_spectrum(ScaledModel(0, 0.0), oracle.GridSpec(xi_max=2.5, npoints=2000), count=2)


def test_count_limited_by_resolution():
    with pytest.raises(ValueError):
        oracle.fd_spectrum(ScaledModel(0, 0.0), oracle.GridSpec(npoints=200), count=3)


def test_symmetric_operator_is_consistent_with_dense_solver():
    grid = oracle.GridSpec(npoints=300, richardson=False)
    d, e = oracle.tridiagonal_system(ScaledModel(1, -1.0), grid)
    dense = np.linalg.eigvalsh(np.diag(d) + np.diag(e, 1) + np.diag(e, -1))[:3]
    vals = oracle.fd_spectrum(ScaledModel(1, -1.0), grid, count=3, check_boundary=False)
    assert [v.value for v in vals] == pytest.approx(dense, rel=1e-12)


@pytest.mark.parametrize("kwargs", [dict(xi_max=0), dict(npoints=5)])
def test_grid_validation(kwargs):
    with pytest.raises(ValueError):
        oracle.GridSpec(**kwargs)


@pytest.mark.parametrize("token", ["-sqrt2", "0", "1", "sqrt2"])
@pytest.mark.parametrize("l", [0, 1])
def test_ritz_within_oracle_error_bar(l, token):
    alpha = alpha_from_token(token, 60)
    model = ScaledModel(l, float(alpha))
    fd = oracle.fd_spectrum(model, count=4)
    converged = ritz.converged(l, alpha, 4)
    small = ritz.ritz(l, alpha, 6, vectors=False)
    for k, v in enumerate(fd):
        assert abs(float(converged.eigenvalues[k]) - v.value) <= v.error
        # variational upper bound holds for every basis size
        assert float(small.eigenvalues[k]) >= v.value - v.error
