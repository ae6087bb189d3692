"""Independent operator-level oracle for the click-statistics formulas.

Everything in dynamics.py is a scalar formula. This module rebuilds the same
quantities from explicit 4x4 matrices for two two-level emitters (basis
|ee>, |eg>, |ge>, |gg>) with collapse operators c_pm = (c_1 pm c_2)/sqrt(2),
treating the decoherence and phase functions as black-box scalars, and checks
the formulas element by element at machine precision.
"""

import math

import numpy as np
import pytest

from homsim.bath import BathFamily, BathSpec, gamma_value, phi_phase
from homsim.dynamics import (Detector, SourceConfig, conditional_state,
                             first_click_density, second_click_density)

TOL = 1e-12

OHMIC = BathSpec(BathFamily.OHMIC, 0.5, 10.0)
WEAK = BathSpec(BathFamily.OHMIC, 0.25, 10.0)
SUPER = BathSpec(BathFamily.SUPEROHMIC, 0.5, 10.0)

SRC_ID = SourceConfig.identical_sources(0.01, OHMIC)
SRC_NONID = SourceConfig(g=0.01, bath1=WEAK, bath2=OHMIC, identical=False)
SRC_MIXED = SourceConfig(g=0.05, bath1=WEAK, bath2=SUPER, identical=False)

LOWER = np.array([[0.0, 0.0], [1.0, 0.0]])  # |g><e| in the (e, g) basis
EYE = np.eye(2)


def collapse_ops(g):
    c1 = math.sqrt(g) * np.kron(LOWER, EYE)
    c2 = math.sqrt(g) * np.kron(EYE, LOWER)
    return (c1 + c2) / math.sqrt(2), (c1 - c2) / math.sqrt(2)


def propagate(src, rho, t1, tau):
    """No-jump evolution from t1 to t1 + tau, with bath dephasing applied
    to the inter-emitter coherence as black-box scalars."""
    g = src.g
    decay = np.diag([math.exp(-g * tau), math.exp(-g * tau / 2),
                     math.exp(-g * tau / 2), 1.0])
    out = decay @ rho @ decay
    gam = gamma_value(src.bath1, tau) + gamma_value(src.bath2, tau)
    phi = phi_phase(src.bath1, src.bath2, t1, t1 + tau)
    deph = math.exp(-gam) * complex(math.cos(phi), math.sin(phi))
    out = out.astype(complex)
    out[1, 2] *= deph
    out[2, 1] *= deph.conjugate()
    return out


def first_jump_state(src, detector):
    c_plus, c_minus = collapse_ops(src.g)
    c = c_plus if detector is Detector.PLUS else c_minus
    rho_ee = np.zeros((4, 4))
    rho_ee[0, 0] = 1.0
    raw = c @ rho_ee @ c.T
    return raw / np.trace(raw)


@pytest.mark.parametrize("src", [SRC_ID, SRC_NONID, SRC_MIXED],
                         ids=["identical", "nonidentical", "mixed"])
class TestAgainstOperators:
    def test_first_click_density_and_split(self, src):
        c_plus, c_minus = collapse_ops(src.g)
        for t1 in (0.0, 3.0, 40.0):
            rho = math.exp(-2 * src.g * t1) * np.diag([1.0, 0, 0, 0])
            rate_plus = np.trace(c_plus @ rho @ c_plus.T).real
            rate_minus = np.trace(c_minus @ rho @ c_minus.T).real
            density, p_plus = first_click_density(src, t1)
            assert density == pytest.approx(rate_plus + rate_minus, abs=TOL)
            assert p_plus == pytest.approx(
                rate_plus / (rate_plus + rate_minus), abs=TOL)

    def test_post_jump_state_is_symmetric_bell_pair(self, src):
        rho = first_jump_state(src, Detector.PLUS)
        psi = np.array([0.0, 1.0, 1.0, 0.0]) / math.sqrt(2)
        np.testing.assert_allclose(rho, np.outer(psi, psi), atol=TOL)
        rho = first_jump_state(src, Detector.MINUS)
        psi = np.array([0.0, 1.0, -1.0, 0.0]) / math.sqrt(2)
        np.testing.assert_allclose(rho, np.outer(psi, psi), atol=TOL)

    @pytest.mark.parametrize("t1,tau", [(0.0, 0.7), (2.5, 1.3), (10.0, 6.0)])
    def test_conditional_state_scalars(self, src, t1, tau):
        rho = propagate(src, first_jump_state(src, Detector.PLUS), t1, tau)
        state = conditional_state(src, t1, tau, Detector.PLUS)
        weight = (rho[1, 1] + rho[2, 2]).real
        assert state.weight == pytest.approx(weight, abs=TOL)
        coh = rho[1, 2] / math.sqrt(rho[1, 1].real * rho[2, 2].real)
        assert state.coherence_mag == pytest.approx(abs(coh), abs=TOL)
        assert math.cos(state.phase) == pytest.approx(
            coh.real / abs(coh) if abs(coh) else 1.0, abs=TOL)

    @pytest.mark.parametrize("t1,tau", [(0.0, 0.7), (2.5, 1.3), (10.0, 6.0)])
    def test_second_click_densities(self, src, t1, tau):
        c_plus, c_minus = collapse_ops(src.g)
        for first in (Detector.PLUS, Detector.MINUS):
            rho = propagate(src, first_jump_state(src, first), t1, tau)
            rate = {Detector.PLUS: np.trace(c_plus @ rho @ c_plus.T).real,
                    Detector.MINUS: np.trace(c_minus @ rho @ c_minus.T).real}
            other = Detector.MINUS if first is Detector.PLUS else Detector.PLUS
            assert second_click_density(src, t1, tau, True) == \
                pytest.approx(rate[first], abs=TOL)
            assert second_click_density(src, t1, tau, False) == \
                pytest.approx(rate[other], abs=TOL)

    def test_minus_conditioning_swaps_rates_only(self, src):
        # observables depend on the parity of (d1, d2), not on d1 itself
        c_plus, c_minus = collapse_ops(src.g)
        t1, tau = 1.0, 2.0
        rho_p = propagate(src, first_jump_state(src, Detector.PLUS), t1, tau)
        rho_m = propagate(src, first_jump_state(src, Detector.MINUS), t1, tau)
        same_p = np.trace(c_plus @ rho_p @ c_plus.T).real
        same_m = np.trace(c_minus @ rho_m @ c_minus.T).real
        assert same_p == pytest.approx(same_m, abs=TOL)
        diff_p = np.trace(c_minus @ rho_p @ c_minus.T).real
        diff_m = np.trace(c_plus @ rho_m @ c_plus.T).real
        assert diff_p == pytest.approx(diff_m, abs=TOL)
