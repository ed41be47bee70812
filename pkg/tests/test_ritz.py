import mpmath
import pytest
from hypothesis import given, settings, strategies as st

from heun_spectrum import ritz
from heun_spectrum.model import alpha_from_token

DIGITS = 50


def _tight(digits=DIGITS):
    return mpmath.mpf(10) ** -(digits - 10)


@pytest.mark.parametrize("p", [0, 1, 2, 5, 0.5, -0.5, 7.25])
def test_moments_against_quadrature(p):
    with mpmath.workdps(30):
        # x = t^2 removes the endpoint singularity for p < 0
        direct = mpmath.quad(lambda t: 2 * t ** (2 * p + 1) * mpmath.exp(-t ** 4), [0, 1, mpmath.inf])
        assert abs(ritz.moment(p, 30) - direct) < mpmath.mpf(10) ** -25


def test_moment_domain():
    with pytest.raises(ValueError):
        ritz.moment(-1)


def _basis_fn(l, j):
    s = abs(l) + j
    return (lambda x: x ** s * mpmath.exp(-x * x / 2),
            lambda x: (s * x ** (s - 1) - x ** (s + 1)) * mpmath.exp(-x * x / 2))


@pytest.mark.parametrize("l", [0, 1, 2])
def test_matrix_elements_against_quadrature(l):
    alpha = mpmath.mpf("0.7")
    basis = ritz.BasisSpec(l=l, N=3, precision_digits=30)
    with mpmath.workdps(30):
        H = ritz.hamiltonian_matrix(basis, alpha)
        S = ritz.overlap_matrix(basis)
        for i in range(3):
            for j in range(3):
                ui, dui = _basis_fn(l, i)
                uj, duj = _basis_fn(l, j)
                # quadratic form of -(1/xi)(xi R')' + V R with measure xi dxi
                h = mpmath.quad(lambda x: (dui(x) * duj(x) + (l * l / x ** 2 - alpha / x + x * x) * ui(x) * uj(x)) * x,
                                [0, 1, 3, mpmath.inf])
                s = mpmath.quad(lambda x: ui(x) * uj(x) * x, [0, 1, 3, mpmath.inf])
                assert abs(H[i][j] - h) < mpmath.mpf(10) ** -20
                assert abs(S[i][j] - s) < mpmath.mpf(10) ** -20


@pytest.mark.parametrize("l", [0, 1, 3])
def test_oscillator_limit(l):
    res = ritz.ritz(l, 0, 12)
    for k in range(4):
        assert abs(res.eigenvalues[k] - 2 * (2 * k + l + 1)) < _tight()


def test_ground_state_inverse_radius_at_zero_coupling():
    res = ritz.ritz(0, 0, 6)
    with mpmath.workdps(DIGITS):
        assert abs(ritz.expectation_inverse_xi(res, 0) - mpmath.sqrt(mpmath.pi)) < _tight()


def test_pencil_matches_direct_generalized_solve():
    basis = ritz.BasisSpec(l=1, N=8)
    alpha = alpha_from_token("sqrt6", 60)
    with mpmath.workdps(DIGITS):
        direct = ritz.solve_generalized(ritz.hamiltonian_matrix(basis, alpha), ritz.overlap_matrix(basis))
        pencil = ritz.ritz(1, alpha, 8)
        for a, b in zip(direct.eigenvalues, pencil.eigenvalues):
            assert abs(a - b) < _tight()


def test_eigenvalue_only_solve_agrees():
    a = ritz.ritz(0, 1, 10)
    b = ritz.ritz(0, 1, 10, vectors=False)
    assert b.vectors == [] and a.eigenvalues == b.eigenvalues


def test_residuals_small():
    res = ritz.ritz(0, alpha_from_token("-sqrt2", 60), 15)
    assert max(res.residual_norms) < mpmath.mpf(ritz.DEFAULT_RESIDUAL_TOL)


def test_vectors_are_s_normalized():
    res = ritz.ritz(0, 1, 6)
    with mpmath.workdps(DIGITS):
        S = ritz.overlap_matrix(res.basis)
        for c in res.vectors:
            assert abs(mpmath.fdot(c, ritz._matvec(S, c)) - 1) < _tight()


@pytest.mark.parametrize("alpha", ["-sqrt2", "0", "1", "sqrt2", "-3", "3"])
@pytest.mark.parametrize("l", [0, 1])
def test_hylleraas_undheim(alpha, l):
    # raises PrecisionError on any increase beyond the rounding slack
    runs = ritz.convergence_study(l, alpha_from_token(alpha, 60), range(2, 21), count=4)
    assert len(runs) == 19


def test_precision_exhaustion_reports_required_digits():
    with pytest.raises(ritz.PrecisionError) as info:
        ritz.ritz(0, 1, 30, digits=20)
    assert info.value.required_digits > 20
    assert "rerun with at least" in str(info.value)


def test_large_basis_with_more_digits():
    res = ritz.ritz(0, 1, 30, digits=80)
    assert abs(res.eigenvalues[0] - mpmath.mpf("-0.2085695649")) < 1e-10


@pytest.mark.parametrize("N", [0, 41])
def test_basis_size_limits(N):
    with pytest.raises(ValueError):
        ritz.BasisSpec(l=0, N=N)


def test_converged_stops_when_stable():
    res = ritz.converged(0, 1, 3)
    assert 8 <= res.N <= 30


def test_python_and_compiled_backends_agree():
    alpha = alpha_from_token("sqrt2", 60)
    basis = ritz.BasisSpec(l=0, N=10)
    with mpmath.workdps(DIGITS):
        H, S = ritz.hamiltonian_matrix(basis, alpha), ritz.overlap_matrix(basis)
        a = ritz.solve_generalized(H, S, backend="python")
        b = ritz.solve_generalized(H, S)
        for x, y in zip(a.eigenvalues, b.eigenvalues):
            assert abs(x - y) < _tight()


@settings(max_examples=15, deadline=None)
@given(st.floats(min_value=1e-3, max_value=4), st.booleans(), st.integers(min_value=0, max_value=3))
def test_ground_level_shifts_opposite_to_coupling(magnitude, negative, l):
    alpha = -magnitude if negative else magnitude
    ev = ritz.ritz(l, alpha, 8, vectors=False).eigenvalues
    assert all(a < b for a, b in zip(ev, ev[1:]))
    # the basis holds the alpha = 0 ground state, so W_0 < 2(l+1) for alpha > 0;
    # for alpha < 0 the exact level already lies above it and Ritz only adds
    if negative:
        assert ev[0] > 2 * (l + 1)
    else:
        assert ev[0] < 2 * (l + 1)
