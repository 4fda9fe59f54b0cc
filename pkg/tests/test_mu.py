"""Tests for the Appell-Lerch family: brute-force lattice oracles and the
adjudicated display readings."""

import cmath
import itertools
import math

import numpy as np
import pytest

from mu_lab.errors import PoleProximity
from mu_lab.qcore import QContext, SymMatrix, cexp, e2pi, jacobi_theta, theta_q
from mu_lab.mu import (
    MN_vector,
    f1_eval,
    fN_eval,
    hat_muN_display,
    hat_muN_eval,
    mu_generalized,
    mu_zwegers,
    muN_eval,
    nu_closed,
    nu_eval,
    phiN_eval,
)
from mu_lab.qcore import qpoch_ratio

CTX = QContext(0.08 + 1.02j)
US2 = [0.23 + 0.11j, 0.37 - 0.06j, -0.15 + 0.04j]
ALPHA = 0.6 + 0.12j


def brute_muN(us, ctx, radius=12):
    """Plain box sum over Z^N straight from the definition."""
    N = len(us) - 1
    total = 0j
    for n in itertools.product(range(-radius, radius + 1), repeat=N):
        s = sum(n)
        g = cexp(1j * math.pi * us[0]) / (1 - e2pi(us[0]) * ctx.q_pow(s))
        w = 1.0 + 0j
        for j, nj in enumerate(n):
            w *= (-1) ** nj * e2pi(-nj * us[j + 1]) \
                * ctx.q_pow(nj * (nj + 1) / 2) / jacobi_theta(us[j + 1], ctx)
        total += g * w
    return total


def brute_fN(xs, a, ctx, radius=12):
    N = len(xs) - 1
    total = 0j
    for n in itertools.product(range(-radius, radius + 1), repeat=N):
        base = -xs[0] * ctx.q_pow(sum(n))
        g = qpoch_ratio(a * base, base, ctx)
        w = 1.0 + 0j
        for j, nj in enumerate(n):
            w *= xs[j + 1] ** (-nj) * ctx.q_pow(nj * (nj + 1) / 2) \
                / theta_q(xs[j + 1], ctx)
        total += g * w
    return total


class TestMuZwegers:
    def test_frozen_value(self):
        # direct sum |n| <= 60 at tau = i
        got = mu_zwegers(0.2 + 0.1j, 0.35 - 0.05j, QContext(1j))
        assert got == pytest.approx(-0.2818058660468264 - 0.8591577643458876j,
                                    abs=1e-13)

    def test_pole_guard(self):
        with pytest.raises(PoleProximity):
            mu_zwegers(0.0, 0.3, CTX)
        with pytest.raises(PoleProximity):
            mu_zwegers(0.2, CTX.tau, CTX)

    def test_swap_symmetry(self):
        u, v = 0.21 + 0.12j, 0.33 - 0.08j
        assert mu_zwegers(u, v, CTX) == pytest.approx(mu_zwegers(v, u, CTX))


class TestGeneralizedMu:
    def test_alpha_endpoints(self):
        u, v = 0.2 + 0.1j, 0.31 - 0.04j
        assert mu_generalized(u, v, 0.0, CTX) == pytest.approx(
            -1j * CTX.q_pow(-1 / 8))
        assert mu_generalized(u, v, 1.0, CTX) == pytest.approx(
            mu_zwegers(u, v, CTX))


class TestLatticeOracles:
    def test_muN_matches_brute_force(self):
        got = muN_eval(US2, CTX)
        want = brute_muN(US2, CTX)
        assert got == pytest.approx(want, rel=1e-12)

    def test_fN_matches_brute_force(self):
        xs = [-e2pi(u) for u in US2]
        a = CTX.q_pow(ALPHA)
        got = fN_eval(xs, a, CTX)
        want = brute_fN(xs, a, CTX)
        assert got == pytest.approx(want, rel=1e-12)

    def test_f1_is_fN_rank_one(self):
        x0, x1 = 0.52 + 0.23j, -0.61j
        a = CTX.q_pow(ALPHA)
        assert f1_eval(x0, x1, a, CTX) == pytest.approx(
            fN_eval([x0, x1], a, CTX))

    def test_nu_brute_vs_closed(self):
        us3 = US2 + [0.31 + 0.02j]
        for k in range(3):
            assert nu_eval(us3, k, CTX) == pytest.approx(
                nu_closed(us3, k, CTX), rel=1e-12)

    def test_nu_rank_one_is_one(self):
        assert nu_eval(US2[:2], 0, CTX) == 1.0

    def test_nu_k_zero_is_plain_lattice_theta(self):
        from mu_lab.qcore import lattice_theta
        S = SymMatrix.coupling(1)
        v = [US2[0] + US2[1] - US2[2]]
        assert nu_eval(US2, 0, CTX) == pytest.approx(
            lattice_theta(S, v, CTX))


class TestHatMu:
    def test_alpha_one_is_muN(self):
        assert hat_muN_eval(US2, 1.0, CTX) == pytest.approx(
            muN_eval(US2, CTX))

    def test_corrected_display_matches_canonical(self):
        got = hat_muN_display(US2, ALPHA, CTX, reading="corrected")
        want = hat_muN_eval(US2, ALPHA, CTX)
        assert got == pytest.approx(want, rel=1e-12)

    def test_literal_display_fails(self):
        # the printed exponent does not reproduce the function; kept as the
        # failing side of the adjudication pair
        got = hat_muN_display(US2, ALPHA, CTX, reading="literal")
        want = hat_muN_eval(US2, ALPHA, CTX)
        assert abs(got - want) > 1e-3 * abs(want)


class TestVectors:
    def test_MN_component_zero(self):
        Mv = MN_vector(US2, CTX)
        assert Mv[0] == muN_eval(US2, CTX)

    def test_phi_vanishes_at_z_zero(self):
        assert np.abs(phiN_eval(US2, 0.0, CTX)).max() == 0.0

    def test_phi_pole_guard(self):
        with pytest.raises(PoleProximity):
            phiN_eval(US2, US2[0], CTX)  # theta(z - u_0) = theta(0) = 0
