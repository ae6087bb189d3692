"""Bath spectral densities, decoherence functions and dephasing phases.

Everything is dimensionless: times are measured in units of the inverse
cutoff frequency (omega_c = 1), temperatures enter through theta = omega_c * beta.

The decoherence function of a bath with spectral density J(w) = A w^n e^{-w} is

    Gamma(tau) = int_0^inf (J(w)/w^2) (1 - cos(w tau)) coth(theta w / 2) dw,

and the dephasing phase accumulated between detection times t1 <= t2 is

    Lambda(t1, t2) = int_0^inf (J(w)/w^2)
                     (w tau + 2 sin(w t1) - 2 sin(w t2) + sin(w tau)) dw,

with tau = t2 - t1.  Both are evaluated here by adaptive quadrature; for the
ohmic (n=1), superohmic (n=3) and Markovian cases exact closed forms are
provided as well.

Closed-form note: the commonly quoted ohmic form A ln(1 + tau^2) overstates
the vacuum contribution of the integral above by a factor of two; the correct
value is (A/2) ln(1 + tau^2).  Likewise the familiar thermal terms
A ln(sinh(pi tau/theta)/(pi tau/theta)) (ohmic) and A pi^2/(3 theta^2)
(superohmic, long-time) are theta >> 1 limits that ignore the exponential
cutoff inside the thermal integrand.  The closed forms implemented here keep
the cutoff exactly, via the log-gamma function (ohmic) and a cutoff-shifted
Matsubara-like sum (superohmic), and agree with the quadrature to machine
precision at all temperatures.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field

import numpy as np
from scipy import integrate, special

__all__ = [
    "BathFamily",
    "BathSpec",
    "DecoherenceValue",
    "GammaMethod",
    "GammaTable",
    "QuadratureError",
    "gamma_closed",
    "gamma_closed_array",
    "gamma_quadrature",
    "gamma_value",
    "lambda_phase",
    "lambda_phase_closed",
    "phi_phase",
    "spectral_density",
]

# Frequency beyond which the e^{-w} tail contributes < 1e-25.
_OMEGA_MAX = 60.0
_QUAD_OPTS = {"limit": 400, "epsabs": 1e-12, "epsrel": 1e-12}
# gamma_quadrature must reach this bound or report failure.
_ERR_CEILING = 1e-9


class QuadratureError(RuntimeError):
    """Adaptive integration did not reach the requested error bound."""

    def __init__(self, message: str, est_abs_error: float = math.nan):
        super().__init__(message)
        self.est_abs_error = est_abs_error


class BathFamily(str, enum.Enum):
    OHMIC = "ohmic"
    SUPEROHMIC = "superohmic"
    MARKOVIAN = "markovian"
    POWER_LAW = "powerlaw"


@dataclass(frozen=True)
class BathSpec:
    """Dephasing environment: spectral family, coupling A, theta = omega_c * beta.

    ``n`` is the spectral exponent and is only free for POWER_LAW baths;
    it is pinned to 1 (ohmic), 3 (superohmic) or None (Markovian) otherwise.
    A = 0 is allowed and means no dephasing at all.
    """

    family: BathFamily
    A: float
    theta: float
    n: float | None = None

    def __post_init__(self):
        if self.A < 0:
            raise ValueError(f"coupling A must be >= 0, got {self.A}")
        if not self.theta > 0:
            raise ValueError(f"theta must be > 0, got {self.theta}")
        family = BathFamily(self.family)
        object.__setattr__(self, "family", family)
        pinned = {BathFamily.OHMIC: 1.0, BathFamily.SUPEROHMIC: 3.0,
                  BathFamily.MARKOVIAN: None}
        if family in pinned:
            object.__setattr__(self, "n", pinned[family])
        else:
            if self.n is None or not self.n > 0:
                raise ValueError("PowerLaw bath needs a positive exponent n")
            object.__setattr__(self, "n", float(self.n))


class GammaMethod(str, enum.Enum):
    CLOSED_FORM = "closed_form"
    QUADRATURE = "quadrature"


@dataclass(frozen=True)
class DecoherenceValue:
    gamma_big: float
    method: GammaMethod
    est_abs_error: float = 0.0

    def __post_init__(self):
        if self.gamma_big < 0:
            raise ValueError(f"Gamma must be >= 0, got {self.gamma_big}")


def spectral_density(bath: BathSpec, omega):
    """J(omega) = A omega^n e^{-omega} (omega_c = 1 units)."""
    if bath.family is BathFamily.MARKOVIAN:
        raise ValueError("Markovian bath is a rate law; it has no spectral density")
    omega = np.asarray(omega, dtype=float)
    if np.any(omega < 0):
        raise ValueError("omega must be >= 0")
    out = bath.A * omega ** bath.n * np.exp(-omega)
    return float(out) if out.ndim == 0 else out


def _coth(x):
    return 1.0 / np.tanh(x)


def _require_integrable(bath: BathSpec, op: str):
    if bath.family is BathFamily.MARKOVIAN:
        raise ValueError(f"{op}: Markovian bath has no spectral-density integral")
    if bath.n < 1:
        raise ValueError(
            f"{op}: integral diverges for spectral exponent n = {bath.n} < 1")


def gamma_quadrature(bath: BathSpec, tau: float) -> DecoherenceValue:
    """Decoherence function by adaptive quadrature over (0, inf).

    The integrand (J/w^2)(1-cos w tau) coth(theta w/2) has a removable
    w -> 0 singularity (it behaves as A tau^2 w^{n-1} / theta); the
    oscillatory tail is handled with a cosine-weighted rule.
    """
    _require_integrable(bath, "gamma_quadrature")
    if tau < 0:
        raise ValueError("tau must be >= 0")
    if tau == 0 or bath.A == 0:
        return DecoherenceValue(0.0, GammaMethod.QUADRATURE, 0.0)

    A, n, theta = bath.A, bath.n, bath.theta

    def full(w):
        # 2 sin^2(w tau / 2) = 1 - cos(w tau), stable for small w tau
        return A * w ** (n - 2) * math.exp(-w) \
            * 2.0 * math.sin(0.5 * w * tau) ** 2 * _coth(0.5 * theta * w)

    def envelope(w):
        return A * w ** (n - 2) * math.exp(-w) * _coth(0.5 * theta * w)

    # Keep at most a couple of oscillations in the directly-integrated head.
    cut = min(1.0, 10.0 / max(tau, 1.0))
    head, e1 = integrate.quad(full, 0.0, cut, **_QUAD_OPTS)
    flat, e2 = integrate.quad(envelope, cut, _OMEGA_MAX, **_QUAD_OPTS)
    osc, e3 = integrate.quad(envelope, cut, _OMEGA_MAX,
                             weight="cos", wvar=tau, **_QUAD_OPTS)
    err = e1 + e2 + e3
    if not err <= _ERR_CEILING:
        raise QuadratureError(
            f"gamma quadrature reached only {err:.3e} absolute error", err)
    value = head + flat - osc
    return DecoherenceValue(max(value, 0.0), GammaMethod.QUADRATURE, err)


def _ohmic_gamma(A, theta, tau):
    a = 1.0 / theta
    vacuum = 0.5 * A * np.log1p(tau * tau)
    thermal = 2.0 * A * (special.loggamma(1.0 + a).real
                         - special.loggamma(1.0 + a + 1j * tau / theta).real)
    return vacuum + thermal


def _superohmic_tail_terms(theta, tau_max):
    # Truncation M with analytic tail correction sum_{m>M} 3 tau^2/a^4;
    # residual after the correction is far below 1e-12.
    t2 = tau_max * tau_max
    m_needed = max(2000.0, 20.0 * tau_max / theta,
                   (t2 / (theta ** 4 * 1e-13)) ** (1.0 / 3.0))
    return int(m_needed) + 1


def _superohmic_gamma(A, theta, tau):
    t2 = tau * tau
    vacuum = A * t2 * (3.0 + t2) / (1.0 + t2) ** 2
    M = _superohmic_tail_terms(theta, tau)
    a = 1.0 + theta * np.arange(1, M + 1)
    a2 = a * a
    s = np.sum(1.0 / a2 - (a2 - t2) / (a2 + t2) ** 2)
    s += t2 / (theta * (1.0 + M * theta) ** 3)
    return vacuum + 2.0 * A * s


def gamma_closed(bath: BathSpec, tau: float) -> DecoherenceValue:
    """Exact closed form of the decoherence function (no quadrature).

    Available for the Markovian (A pi tau / theta), ohmic and superohmic
    families; see the module docstring for the finite-cutoff forms used.
    """
    if tau < 0:
        raise ValueError("tau must be >= 0")
    A, theta = bath.A, bath.theta
    if bath.family is BathFamily.MARKOVIAN:
        value = A * math.pi * tau / theta
    elif tau == 0.0 or A == 0.0:
        value = 0.0
    elif bath.family is BathFamily.OHMIC:
        value = _ohmic_gamma(A, theta, tau)
    elif bath.family is BathFamily.SUPEROHMIC:
        value = _superohmic_gamma(A, theta, tau)
    else:
        raise ValueError("no closed form for PowerLaw baths; use gamma_quadrature")
    return DecoherenceValue(max(float(value), 0.0), GammaMethod.CLOSED_FORM, 0.0)


def gamma_closed_array(bath: BathSpec, taus) -> np.ndarray:
    """Vectorized gamma_closed over an array of click separations."""
    taus = np.asarray(taus, dtype=float)
    if np.any(taus < 0):
        raise ValueError("tau must be >= 0")
    A, theta = bath.A, bath.theta
    if bath.family is BathFamily.MARKOVIAN:
        return A * np.pi * taus / theta
    if A == 0.0:
        return np.zeros_like(taus)
    if bath.family is BathFamily.OHMIC:
        out = _ohmic_gamma(A, theta, taus)
        return np.where(taus == 0.0, 0.0, np.maximum(out, 0.0))
    if bath.family is BathFamily.SUPEROHMIC:
        out = np.array([_superohmic_gamma(A, theta, t) for t in np.ravel(taus)])
        return np.maximum(out.reshape(taus.shape), 0.0)
    raise ValueError("no closed form for PowerLaw baths")


def gamma_value(bath: BathSpec, tau: float) -> float:
    """Gamma(tau), closed form when available, quadrature otherwise."""
    if bath.family is BathFamily.POWER_LAW:
        return gamma_quadrature(bath, tau).gamma_big
    return gamma_closed(bath, tau).gamma_big


class GammaTable:
    """Cubic-spline table of Gamma(tau) for high-throughput sampling.

    The grid is dense on [0, 64] where the non-Markovian functions have all
    their structure, and log-spaced beyond; interpolation error is well below
    the 1e-7 target (checked by the test suite against direct evaluation).
    """

    def __init__(self, bath: BathSpec, tau_cap: float, dense_points: int = 8193):
        from scipy.interpolate import CubicSpline

        self.bath = bath
        self.tau_cap = float(tau_cap)
        dense_cap = min(64.0, self.tau_cap)
        grid = np.linspace(0.0, dense_cap, dense_points)
        if self.tau_cap > dense_cap:
            tail = np.geomspace(dense_cap * 1.001, self.tau_cap, 513)
            grid = np.concatenate([grid, tail])
        values = gamma_closed_array(bath, grid)
        self._spline = CubicSpline(grid, values)

    def __call__(self, taus):
        taus = np.asarray(taus, dtype=float)
        clipped = np.minimum(taus, self.tau_cap)
        return np.maximum(self._spline(clipped), 0.0)


def _sine_transform(A, n, t):
    """int_0^inf A w^{n-2} e^{-w} sin(w t) dw, adaptive, t >= 0."""
    if t == 0.0 or A == 0.0:
        return 0.0, 0.0

    def head_f(w):
        return A * w ** (n - 2) * math.exp(-w) * math.sin(w * t)

    def envelope(w):
        return A * w ** (n - 2) * math.exp(-w)

    cut = min(1.0, 10.0 / max(t, 1.0))
    head, e1 = integrate.quad(head_f, 0.0, cut, **_QUAD_OPTS)
    osc, e2 = integrate.quad(envelope, cut, _OMEGA_MAX,
                             weight="sin", wvar=t, **_QUAD_OPTS)
    return head + osc, e1 + e2


def lambda_phase(bath: BathSpec, t1: float, t2: float) -> float:
    """Phase function Lambda(t1, t2) by adaptive quadrature.

    Decomposed as A tau Gamma(n) + 2 S(t1) - 2 S(t2) + S(tau) with
    S(t) the sine transform of J/w^2; each piece converges for n >= 1.
    """
    _require_integrable(bath, "lambda_phase")
    if t1 < 0:
        raise ValueError("t1 must be >= 0")
    if t2 < t1:
        raise ValueError("need t1 <= t2")
    if t2 == t1 or bath.A == 0.0:
        return 0.0
    A, n = bath.A, bath.n
    tau = t2 - t1
    total = A * tau * special.gamma(n)
    err = 0.0
    for coeff, t in ((2.0, t1), (-2.0, t2), (1.0, tau)):
        value, e = _sine_transform(A, n, t)
        total += coeff * value
        err += abs(coeff) * e
    if not err <= _ERR_CEILING:
        raise QuadratureError(
            f"lambda quadrature reached only {err:.3e} absolute error", err)
    return total


def lambda_phase_closed(bath: BathSpec, t1, t2):
    """Closed-form Lambda for ohmic / superohmic baths (vectorizes over t1, t2).

    Ohmic:      A (tau + 2 atan t1 - 2 atan t2 + atan tau)
    Superohmic: A (2 tau + 2 f(t1) - 2 f(t2) + f(tau)), f(t) = 2t/(1+t^2)^2
    """
    t1 = np.asarray(t1, dtype=float)
    t2 = np.asarray(t2, dtype=float)
    if np.any(t1 < 0) or np.any(t2 < t1):
        raise ValueError("need 0 <= t1 <= t2")
    tau = t2 - t1
    A = bath.A
    if bath.family is BathFamily.OHMIC:
        out = A * (tau + 2 * np.arctan(t1) - 2 * np.arctan(t2) + np.arctan(tau))
    elif bath.family is BathFamily.SUPEROHMIC:
        def f(t):
            return 2.0 * t / (1.0 + t * t) ** 2
        out = A * (2.0 * tau + 2 * f(t1) - 2 * f(t2) + f(tau))
    else:
        raise ValueError("closed-form Lambda only for ohmic/superohmic baths")
    return float(out) if out.ndim == 0 else out


def phi_phase(bath1: BathSpec, bath2: BathSpec, t1: float, t2: float) -> float:
    """Relative phase phi(t1, t2) = Lambda_2 - Lambda_1.

    Identical bath specs short-circuit to exactly 0 without quadrature.
    """
    if bath1 == bath2:
        if t1 < 0 or t2 < t1:
            raise ValueError("need 0 <= t1 <= t2")
        return 0.0
    return lambda_phase(bath2, t1, t2) - lambda_phase(bath1, t1, t2)
