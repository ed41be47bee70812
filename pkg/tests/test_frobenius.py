from fractions import Fraction

import mpmath
import pytest
import sympy as sp
from hypothesis import given, settings, strategies as st

from heun_spectrum.frobenius import (
    RecurrenceParams,
    RootFindingError,
    coefficient_polynomial,
    coefficients,
    exact,
    ode_residual,
    polynomial_wavefunction,
    real_roots,
    truncation_solutions,
)
from heun_spectrum.model import ScaledModel


def _sympy_roots(n: int, l: int) -> list:
    """Truncation couplings by direct substitution of the polynomial ansatz into the ODE."""
    xi, alpha = sp.symbols("xi alpha")
    c = sp.symbols(f"c1:{n + 1}")
    P = 1 + sum(ck * xi ** (k + 1) for k, ck in enumerate(c))
    R = xi ** l * sp.exp(-xi ** 2 / 2) * P
    W = 2 * n + 2 * l + 2
    ode = sp.diff(R, xi, 2) + sp.diff(R, xi) / xi - l ** 2 / xi ** 2 * R + alpha / xi * R - xi ** 2 * R + W * R
    # strip the common factor xi^(l-2) exp(-xi^2/2); what remains is a polynomial in xi
    poly = sp.Poly(sp.expand(sp.simplify(ode * sp.exp(xi ** 2 / 2) * xi ** (2 - l))), xi)
    sols = sp.solve(poly.coeffs(), list(c) + [alpha], dict=True)
    return sorted(float(s[alpha]) for s in sols)


@pytest.mark.parametrize("n, l", [(1, 0), (2, 0), (3, 0), (1, 1), (2, 1), (2, 3)])
def test_roots_match_direct_substitution(n, l):
    sol = truncation_solutions(l, n, 30)
    assert [float(r) for r in sol.alpha_roots] == pytest.approx(_sympy_roots(n, l), abs=1e-12)


def test_hand_derived_low_orders():
    # l = 0: a_2 = (alpha^2 - 2)/4 at n = 1, a_3 = -alpha(alpha^2 - 12)/36 at n = 2
    assert coefficient_polynomial(0, 1).coeffs == (Fraction(-1, 2), 0, Fraction(1, 4))
    p2 = coefficient_polynomial(0, 2).coeffs
    assert [x / p2[3] for x in p2] == [0, -12, 0, 1]


@pytest.mark.parametrize("l", range(6))
def test_first_order_roots_closed_form(l):
    sol = truncation_solutions(l, 1, 45)
    with mpmath.workdps(45):
        r = mpmath.sqrt(4 * l + 2)
        assert abs(sol.alpha_roots[0] + r) < mpmath.mpf(10) ** -40
        assert abs(sol.alpha_roots[1] - r) < mpmath.mpf(10) ** -40
    assert sol.W_fixed == 4 + 2 * l


@pytest.mark.parametrize("n", range(1, 9))
def test_root_count_and_symmetry(n):
    sol = truncation_solutions(0, n, 30)
    roots = sol.alpha_roots
    assert len(roots) == n + 1
    assert all(a < b for a, b in zip(roots, roots[1:]))
    for a, b in zip(roots, reversed(roots)):
        assert abs(a + b) < 1e-25
    assert sol.W_fixed == 2 * n + 2


def test_negative_l_equals_positive():
    assert truncation_solutions(-2, 3, 30).alpha_roots == truncation_solutions(2, 3, 30).alpha_roots


def test_fractional_l_is_exact():
    sol = truncation_solutions(0.5, 1, 30)
    assert sol.l == Fraction(1, 2)
    assert float(sol.alpha_roots[1]) == pytest.approx(2.0)


def test_order_zero_rejected():
    with pytest.raises(ValueError):
        coefficient_polynomial(0, 0)


def test_coefficients_generic_arithmetic():
    params = RecurrenceParams(l=Fraction(0), g=Fraction(2))
    a = coefficients(params, Fraction(3), 4)
    assert a[:3] == [1, -3, Fraction(7, 4)]
    assert all(isinstance(x, Fraction) for x in a[1:])


def test_recurrence_params_from_energy():
    p = RecurrenceParams.from_energy(1, 8)
    assert p.g == 4 and p.theta == 3


@pytest.mark.parametrize("n, l", [(1, 0), (2, 0), (3, 1), (4, 2)])
def test_polynomial_wavefunctions_solve_the_ode(n, l):
    sol = truncation_solutions(l, n, 40)
    grid = [mpmath.mpf(k) / 4 for k in range(1, 21)]
    for i in range(1, n + 2):
        R = polynomial_wavefunction(sol, i)
        model = ScaledModel(l, R.alpha)
        assert ode_residual(R, R.W, model, grid) < mpmath.mpf(10) ** -30


def test_residual_detects_non_solution():
    def gaussian(xi):
        return mpmath.exp(-xi * xi / 2) * (1 + xi)

    res = ode_residual(gaussian, 4, ScaledModel(0, 1.0), [0.5, 1.0, 1.5], dps=30)
    assert res > 0.1


def test_wavefunction_index_checked():
    sol = truncation_solutions(0, 2, 30)
    with pytest.raises(IndexError):
        polynomial_wavefunction(sol, 4)


def test_exact_conversions():
    assert exact(0.5) == Fraction(1, 2)
    assert exact("1/3") == Fraction(1, 3)
    with mpmath.workdps(30):
        assert exact(mpmath.mpf("0.25")) == Fraction(1, 4)


@settings(max_examples=25, deadline=None)
@given(st.integers(min_value=1, max_value=6), st.fractions(min_value=0, max_value=4, max_denominator=4))
def test_roots_are_zeros_of_the_polynomial(n, l):
    poly = coefficient_polynomial(l, n)
    roots = real_roots(poly, 25)
    assert len(roots) == n + 1
    scale = max(abs(c) for c in poly.coeffs)
    for r in roots:
        # a sign change brackets each root within the refinement width
        h = Fraction(1, 10 ** 20) * max(1, abs(r))
        assert poly(r - h) * poly(r + h) <= 0 or abs(poly(r)) < scale * Fraction(1, 10 ** 15)


def test_residual_on_fifty_point_grid():
    sol = truncation_solutions(1, 3, 40)
    grid = [mpmath.mpf(6) * k / 50 for k in range(1, 51)]
    for i in range(1, 5):
        R = polynomial_wavefunction(sol, i)
        assert ode_residual(R, R.W, ScaledModel(1, R.alpha), grid) < mpmath.mpf(10) ** -30


def test_residual_linear_in_energy_error():
    sol = truncation_solutions(0, 2, 40)
    R = polynomial_wavefunction(sol, 3)
    model = ScaledModel(0, R.alpha)
    with mpmath.workdps(40):
        dW = mpmath.mpf("1e-3")
        for xi in (mpmath.mpf("0.5"), mpmath.mpf(1), mpmath.mpf(2)):
            res = ode_residual(R, R.W + dW, model, [xi])
            assert abs(res / (dW * abs(R(xi))) - 1) < mpmath.mpf(10) ** -25
