"""Tests for the formal series container and the q-Borel / q-Laplace pair."""

import math

import pytest

from mu_lab.errors import KernelPole, NonConvergent
from mu_lab.qcore import QContext, e2pi
from mu_lab.borel import (
    borel_transform,
    divergent_solution,
    geometric_flat,
    laplace_eval,
    laplace_n_eval,
    monomial,
    polynomial,
    q_shift,
    resum,
    series_evaluator,
    shift_mul,
)

CTX = QContext(0.08 + 1.02j)


class TestFormalSeries:
    def test_monomial_coefficients(self):
        g = monomial(3)
        assert [g(n) for n in range(5)] == [0, 0, 0, 1, 0]
        assert g(-1) == 0

    def test_borel_transform_is_coefficientwise(self):
        b = borel_transform(monomial(3), CTX)
        assert b(3) == pytest.approx(CTX.q_pow(3))

    def test_iterated_borel_weight(self):
        b = borel_transform(monomial(4), CTX, 3)
        assert b(4) == pytest.approx(CTX.q_pow(3 * 4 * 3 / 2))

    def test_flat_series_borel_is_geometric(self):
        # coefficients (-1)^n q^{-n(n+1)/2} become (-1)^n q^{-n}
        g = borel_transform(geometric_flat(CTX), CTX)
        for n in range(6):
            want = (-1) ** n * CTX.q_pow(-n)
            assert abs(g(n) - want) <= 1e-13 * abs(want)

    def test_operator_helpers(self):
        g = polynomial([1.0, 2.0])
        assert shift_mul(g, 2)(3) == 2.0
        assert q_shift(g, 2, CTX)(1) == pytest.approx(2.0 * CTX.q**2)

    def test_series_evaluator_flags_divergence(self):
        ev = series_evaluator(borel_transform(geometric_flat(CTX), CTX), CTX)
        with pytest.raises(NonConvergent):
            ev(10.0)  # outside the radius |q|, no analytic continuation


class TestLaplace:
    def test_kernel_pole(self):
        x = 0.4 + 0.1j
        g = series_evaluator(polynomial([1.0]), CTX)
        with pytest.raises(KernelPole):
            laplace_eval(g, x, -x, CTX)  # lambda/x = -1 is a theta zero

    def test_resum_of_zero_series(self):
        assert resum(polynomial([0.0]), 1, [0.7j, 0.4], CTX) == 0

    def test_resum_arity_check(self):
        with pytest.raises(ValueError):
            resum(monomial(1), 2, [0.7j, 0.4], CTX)

    def test_mono_summation_lambda_free(self):
        # L_q(B_q(x^m)) = x^m regardless of the spiral parameter
        x = 0.4 + 0.1j
        for m in (0, 1, 3):
            for lam in (0.7j, 0.3 - 0.4j, 1.1 + 0.2j):
                got = resum(monomial(m), 1, [lam, x], CTX)
                assert got == pytest.approx(x**m, rel=1e-12)

    def test_order_one_reduction(self):
        g = series_evaluator(polynomial([0.2, 0.5, -0.3j]), CTX)
        lam, x = 0.6 - 0.3j, 0.4 + 0.1j
        growth = 2 * 2 * math.pi * CTX.tau.imag + 0.5
        a = laplace_n_eval(g, [lam, x], CTX, growth=growth)
        b = laplace_eval(g, x, lam, CTX)
        assert a == pytest.approx(b, rel=1e-12)

    def test_resum_recovers_fN(self):
        from mu_lab.mu import fN_eval
        a = CTX.q_pow(0.6 + 0.12j)
        ls = [0.3 + 0.2j, 0.5j, -0.2 + 0.1j]
        ft = divergent_solution(a, 2, CTX)
        got = resum(ft, 2, ls, CTX)
        xs = [ls[0], ls[1] / ls[0], ls[2] / ls[1]]
        assert got == pytest.approx(fN_eval(xs, a, CTX), rel=1e-11)

    def test_resum_recovers_mu(self):
        from mu_lab.mu import mu_zwegers
        u, v = 0.23 + 0.11j, 0.37 - 0.06j
        val = resum(geometric_flat(CTX), 1, [-e2pi(u), e2pi(u - v)], CTX)
        got = -1j * e2pi((u - v) / 2) * CTX.q_pow(-1 / 8) * val
        assert got == pytest.approx(mu_zwegers(u, v, CTX), rel=1e-12)
