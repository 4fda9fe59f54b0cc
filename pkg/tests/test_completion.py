"""Tests for E, R, the Mordell integral and the completed functions."""

import cmath
import math

import numpy as np
import pytest
import scipy.integrate

from mu_lab.qcore import QContext, TruncationPolicy, e2pi
from mu_lab.completion import (
    HN_vector,
    HtildeN,
    MN_completed,
    RN_vector,
    gauss_E,
    hN_combination,
    mordell_h,
    mu_completed,
    muN_completed,
    r_function,
)
from mu_lab.mu import MN_vector, muN_eval, mu_zwegers

CTX = QContext(0.05 + 1.03j)


class TestGaussE:
    def test_zero(self):
        assert gauss_E(0.0) == 0.0

    def test_odd(self):
        for x in (0.3, 0.7, 2.1):
            assert gauss_E(-x) == -gauss_E(x)

    def test_limits(self):
        assert gauss_E(20.0) == pytest.approx(1.0)

    def test_value_against_quadrature(self):
        want = 2 * scipy.integrate.quad(
            lambda z: math.exp(-math.pi * z * z), 0.0, 1.0, epsabs=1e-15
        )[0]
        assert gauss_E(1.0) == pytest.approx(want, abs=1e-14)


class TestRFunction:
    def test_shift_one(self):
        u = 0.21 + 0.13j
        assert r_function(u + 1, CTX) == pytest.approx(-r_function(u, CTX))

    def test_even(self):
        u = 0.21 + 0.13j
        assert r_function(-u, CTX) == pytest.approx(r_function(u, CTX))

    def test_large_imaginary_part_does_not_overflow(self):
        # the erfcx form keeps terms finite even when q^{-nu^2/2} explodes
        val = r_function(0.1 + 3.7j, CTX)
        assert np.isfinite(val.real) and np.isfinite(val.imag)


class TestMordellH:
    def test_frozen_value(self):
        got = mordell_h(0.15 + 0.1j, QContext(1j))
        assert got == pytest.approx(0.6814946405688354 + 0.0322137902682042j,
                                    abs=1e-12)

    def test_even_in_u(self):
        # x -> -x symmetry of the integrand
        u = 0.23 - 0.08j
        assert mordell_h(-u, CTX) == pytest.approx(mordell_h(u, CTX))

    def test_panel_doubling_stability(self):
        u = 0.3 + 0.2j
        v1 = mordell_h(u, CTX)
        tight = QContext(CTX.tau, TruncationPolicy(eps_term=1e-18))
        v2 = mordell_h(u, tight)
        assert abs(v1 - v2) <= 1e-10 * abs(v1)


class TestCompleted:
    def test_mu_tilde_definition(self):
        u, v = 0.21 + 0.12j, 0.37 - 0.06j
        got = mu_completed(u, v, CTX)
        want = mu_zwegers(u, v, CTX) + 0.5j * r_function(u - v, CTX)
        assert got == want

    def test_RN_rank_one_entry(self):
        u = 0.2 + 0.1j
        v = RN_vector(u, 1, CTX)
        # R(u + 1; tau) = -R(u; tau)
        assert v[0] == pytest.approx(-r_function(u, CTX))

    def test_MN_completed_shape(self):
        us = [0.23 + 0.11j, 0.17 - 0.06j, -0.15 + 0.04j]
        assert MN_completed(us, CTX).shape == (2,)
        assert HN_vector(sum(us), 2, CTX).shape == (2,)

    def test_muN_completed_definition(self):
        us = [0.23 + 0.11j, 0.17 - 0.06j]
        ctxN = CTX.with_tau(1 * CTX.tau)
        want = muN_eval(us, CTX) + 0.5j * r_function(sum(us) + 1.0, ctxN)
        assert muN_completed(us, CTX) == want

    def test_htilde_depends_only_on_the_sum(self):
        # redistribute u between slots: the modular defect must not move
        us_a = [0.23 + 0.11j, 0.17 - 0.06j, -0.15 + 0.04j]
        shift = 0.07 - 0.02j
        us_b = [us_a[0] - shift, us_a[1] + shift, us_a[2]]
        a = HtildeN(us_a, CTX)
        b = HtildeN(us_b, CTX)
        assert np.abs(a - b).max() <= 1e-10 * np.abs(a).max()

    def test_hN_combination_is_finite_sum_of_h(self):
        u = 0.2 + 0.05j
        got = hN_combination(u, 2, 1, CTX)
        ctxm = CTX.with_tau(2 * CTX.tau - 1.0)
        want = -cmath.exp(1j * math.pi / 4) * mordell_h(u, ctxm)
        assert got == pytest.approx(want)
