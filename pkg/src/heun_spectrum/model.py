"""Physical and scaled parameters of the quadrupole + oscillator radial problem.

The dimensionless radial equation is

    R'' + R'/xi - l^2/xi^2 R + alpha/xi R - xi^2 R + W R = 0,

with xi = sqrt(m*omega)*rho, alpha = 2*m*Q*E0/sqrt(m*omega) and W = zeta^2/(m*omega).
Units follow hbar = c = 1 throughout.

The full three-dimensional problem has no normalizable states: the Hamiltonian
commutes with p_z, so the factor exp(i*k*z) is never square integrable and the
motion is unbounded along the z axis. Only motion in the x-y plane is bound.
"""
from __future__ import annotations

import math
import re
from dataclasses import dataclass
from fractions import Fraction
from typing import Optional

import mpmath


class ThresholdError(ValueError):
    """zeta^2 == 0: neither a scattering state nor a bound candidate."""


def _require_finite(**values: float) -> None:
    for name, value in values.items():
        if not math.isfinite(value):
            raise ValueError(f"{name} must be finite, got {value!r}")


@dataclass(frozen=True)
class PhysicalParams:
    m: float
    omega: float
    Q: float = 0.0
    E0: float = 0.0
    k: float = 0.0

    def __post_init__(self) -> None:
        _require_finite(m=self.m, omega=self.omega, Q=self.Q, E0=self.E0, k=self.k)
        if self.m <= 0:
            raise ValueError(f"mass must be positive, got {self.m}")
        if self.omega <= 0:
            raise ValueError(f"omega must be positive, got {self.omega}")

    @property
    def Q_tilde(self) -> float:
        return 2.0 * self.m * self.Q


@dataclass(frozen=True)
class ScaledModel:
    """Dimensionless problem defined by the angular index ``l`` and coupling ``alpha``.

    ``l`` may be any real number; only ``|l|`` and ``l**2`` enter. ``alpha`` is a
    free signed real (no sign convention is attached to Q).
    """

    l: float
    alpha: float

    def __post_init__(self) -> None:
        _require_finite(l=float(self.l), alpha=float(self.alpha))

    @property
    def abs_l(self) -> float:
        return abs(self.l)


@dataclass(frozen=True)
class AsymptoticClass:
    kind: str
    tau: Optional[float] = None

    SCATTERING = "Scattering"
    BOUND_CANDIDATE = "BoundCandidate"


def scale(params: PhysicalParams, l: float = 0.0) -> ScaledModel:
    """Map physical parameters onto the dimensionless model."""
    alpha = params.Q_tilde * params.E0 / math.sqrt(params.m * params.omega)
    return ScaledModel(l=l, alpha=alpha)


def unscale_energy(W: float, params: PhysicalParams) -> float:
    """Total energy ``(omega/2) W + k^2/(2m)`` from a dimensionless eigenvalue."""
    _require_finite(W=W)
    return 0.5 * params.omega * W + params.k ** 2 / (2.0 * params.m)


def effective_potential(model: ScaledModel, xi: float, include_centrifugal: bool = False) -> float:
    """``-alpha/xi + xi^2``, optionally with the centrifugal ``l^2/xi^2``."""
    if not xi > 0:
        raise ValueError(f"xi must be positive, got {xi}")
    value = -model.alpha / xi + xi * xi
    if include_centrifugal:
        value += model.l ** 2 / (xi * xi)
    return value


def potential_minimum(alpha: float) -> tuple[float, float]:
    """Location and value of the minimum of ``-alpha/xi + xi^2``.

    The derivative ``alpha/xi^2 + 2 xi`` vanishes only for ``alpha < 0`` (repulsive
    Coulomb term); for ``alpha >= 0`` the potential increases monotonically.
    """
    if alpha >= 0:
        raise ValueError("the potential has an interior minimum only for alpha < 0")
    c = -alpha / 2.0
    return c ** (1.0 / 3.0), 3.0 * c ** (2.0 / 3.0)


def classify_asymptotics(zeta_squared: float) -> AsymptoticClass:
    """Classify the large-rho behaviour of the Coulomb-only radial equation.

    zeta^2 > 0 gives oscillating (scattering) solutions exp(i*zeta*rho);
    zeta^2 = -tau^2 < 0 gives decaying candidates exp(-tau*rho). Even then the
    full state is not normalizable, because the motion is unbounded along the
    z axis; only the planar factor can be bound.
    """
    _require_finite(zeta_squared=zeta_squared)
    if zeta_squared > 0:
        return AsymptoticClass(AsymptoticClass.SCATTERING)
    if zeta_squared < 0:
        return AsymptoticClass(AsymptoticClass.BOUND_CANDIDATE, tau=math.sqrt(-zeta_squared))
    raise ThresholdError("zeta^2 = 0 is the threshold between scattering and bound behaviour")


def alpha_from_token(token, digits: int = 50):
    """Parse an exact coupling token to an mpf at ``digits`` digits.

    Accepts ``sqrtN``, ``-sqrtN``, ``k*sqrtN``, rationals ``p/q`` and decimals, so
    truncation roots such as -sqrt2 are not rounded through a binary float.
    """
    if not isinstance(token, str):
        with mpmath.workdps(digits):
            return +mpmath.mpf(token)
    text = token.strip().replace(" ", "")
    m = re.fullmatch(r"([+-]?)(?:(\d+(?:/\d+)?|\d*\.\d+)\*?)?sqrt\(?(\d+(?:/\d+)?)\)?", text)
    with mpmath.workdps(digits + 5):
        if m:
            sign, coef, radicand = m.groups()
            c = Fraction(coef) if coef else Fraction(1)
            r = Fraction(radicand)
            value = mpmath.mpf(c.numerator) / c.denominator * mpmath.sqrt(mpmath.mpf(r.numerator) / r.denominator)
            if sign == "-":
                value = -value
        else:
            try:
                q = Fraction(text)
            except ValueError:
                raise ValueError(f"cannot parse alpha token {token!r}") from None
            value = mpmath.mpf(q.numerator) / q.denominator
    with mpmath.workdps(digits):
        return +value
