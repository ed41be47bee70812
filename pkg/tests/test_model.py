import math

import mpmath
import pytest
from hypothesis import given, strategies as st

from heun_spectrum.model import (
    AsymptoticClass,
    PhysicalParams,
    ScaledModel,
    ThresholdError,
    alpha_from_token,
    classify_asymptotics,
    effective_potential,
    potential_minimum,
    scale,
    unscale_energy,
)


def test_scale_maps_coupling():
    p = PhysicalParams(m=2.0, omega=0.5, Q=0.25, E0=3.0)
    model = scale(p, l=1)
    # alpha = 2 m Q E0 / sqrt(m omega)
    assert model.alpha == pytest.approx(2 * 2.0 * 0.25 * 3.0 / 1.0)
    assert model.l == 1


def test_zero_field_gives_zero_coupling():
    assert scale(PhysicalParams(m=1.0, omega=1.0)).alpha == 0.0


@pytest.mark.parametrize("kwargs", [dict(m=0.0, omega=1.0), dict(m=1.0, omega=-1.0), dict(m=1.0, omega=math.nan)])
def test_invalid_physical_params(kwargs):
    with pytest.raises(ValueError):
        PhysicalParams(**kwargs)


def test_unscale_energy_adds_free_motion():
    p = PhysicalParams(m=2.0, omega=3.0, k=4.0)
    assert unscale_energy(2.0, p) == pytest.approx(0.5 * 3.0 * 2.0 + 16.0 / 4.0)


def test_effective_potential_values():
    model = ScaledModel(l=2, alpha=1.5)
    assert effective_potential(model, 1.0) == pytest.approx(-1.5 + 1.0)
    assert effective_potential(model, 1.0, include_centrifugal=True) == pytest.approx(-1.5 + 1.0 + 4.0)
    with pytest.raises(ValueError):
        effective_potential(model, 0.0)


@given(st.floats(min_value=-50, max_value=-1e-3))
def test_potential_minimum_is_stationary(alpha):
    xi, value = potential_minimum(alpha)
    model = ScaledModel(0, alpha)
    assert effective_potential(model, xi) == pytest.approx(value, rel=1e-12)
    h = 1e-4 * xi
    assert effective_potential(model, xi - h) >= value
    assert effective_potential(model, xi + h) >= value


@pytest.mark.parametrize("alpha", [0.0, 1.0, math.sqrt(2)])
def test_no_minimum_for_nonnegative_alpha(alpha):
    with pytest.raises(ValueError):
        potential_minimum(alpha)


def test_potential_minimum_at_minus_sqrt2():
    xi, value = potential_minimum(-math.sqrt(2))
    assert xi == pytest.approx(2 ** (-1 / 6))
    assert value == pytest.approx(3 * 2 ** (-1 / 3))


def test_classify_asymptotics():
    assert classify_asymptotics(2.0).kind == AsymptoticClass.SCATTERING
    bound = classify_asymptotics(-4.0)
    assert bound.kind == AsymptoticClass.BOUND_CANDIDATE and bound.tau == pytest.approx(2.0)
    with pytest.raises(ThresholdError):
        classify_asymptotics(0.0)


@pytest.mark.parametrize(
    "token, expected",
    [("sqrt2", mpmath.sqrt(2)), ("-sqrt6", -mpmath.sqrt(6)), ("2*sqrt3", 2 * mpmath.sqrt(3)),
     ("1/3", mpmath.mpf(1) / 3), ("-1.25", mpmath.mpf("-1.25")), ("sqrt(1/2)", mpmath.sqrt(0.5))],
)
def test_alpha_tokens(token, expected):
    value = alpha_from_token(token, 60)
    assert abs(value - expected) < mpmath.mpf(10) ** -14


def test_alpha_token_full_precision():
    with mpmath.workdps(60):
        assert abs(alpha_from_token("-sqrt2", 60) + mpmath.sqrt(2)) < mpmath.mpf(10) ** -58


def test_alpha_token_rejects_garbage():
    with pytest.raises(ValueError):
        alpha_from_token("pi")
