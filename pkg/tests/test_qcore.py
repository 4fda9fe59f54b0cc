"""Unit tests for the scalar building blocks."""

import cmath
import math

import numpy as np
import pytest

from mu_lab.errors import (
    DivergentSeries,
    NonConvergent,
    PoleError,
    PoleInDenominator,
    ZeroArgument,
)
from mu_lab.qcore import (
    QContext,
    SymMatrix,
    TruncationPolicy,
    dedekind_eta,
    jacobi_theta,
    jacobi_theta_series,
    lattice_theta,
    lattice_theta_dual,
    q_hypergeometric,
    qpoch_inf,
    qpoch_order,
    theta_q,
    theta_q_series,
)

CTX_I = QContext(1j)
CTX = QContext(0.13 + 1.07j)


def qpoch_oracle(x, q, cutoff=1e-18):
    # direct product from the definition, independent truncation rule
    acc = 1.0 + 0j
    xq = complex(x)
    while abs(xq) >= cutoff:
        acc *= 1 - xq
        xq *= q
    return acc


class TestContext:
    def test_q_derived_from_tau(self):
        assert CTX.q == cmath.exp(2j * math.pi * CTX.tau)

    def test_rejects_lower_half_plane(self):
        with pytest.raises(ValueError):
            QContext(0.3 - 0.2j)

    def test_policy_validation(self):
        with pytest.raises(ValueError):
            TruncationPolicy(eps_term=0.0)
        with pytest.raises(ValueError):
            TruncationPolicy(max_index=4)

    def test_q_pow_uses_tau(self):
        c = 1 / 24
        assert CTX.q_pow(c) == pytest.approx(
            cmath.exp(2j * math.pi * CTX.tau * c)
        )


class TestQPochhammer:
    def test_at_zero_is_one(self):
        assert qpoch_inf(0, CTX) == 1

    def test_at_one_is_zero(self):
        assert qpoch_inf(1, CTX) == 0

    def test_half_matches_direct_product(self):
        # frozen from the direct product at doubled cutoff
        assert qpoch_inf(0.5, CTX_I) == pytest.approx(
            0.49953226666591216, abs=1e-15
        )
        assert qpoch_inf(0.5, CTX_I) == pytest.approx(
            qpoch_oracle(0.5, CTX_I.q, 1e-30), abs=1e-15
        )

    def test_order_zero_is_one(self):
        assert qpoch_order(0.3 + 0.4j, 0, CTX) == pytest.approx(1.0)

    def test_order_one_telescopes(self):
        x = 0.3 + 0.4j
        assert qpoch_order(x, 1, CTX) == pytest.approx(1 - x)

    def test_order_half_matches_product_ratio(self):
        got = qpoch_order(0.3, 0.5, CTX_I)
        assert got == pytest.approx(0.7088132526003115, abs=1e-14)

    def test_order_integer_matches_finite_product(self):
        x = 0.41 - 0.2j
        want = (1 - x) * (1 - x * CTX.q) * (1 - x * CTX.q**2)
        assert qpoch_order(x, 3, CTX) == pytest.approx(want)

    def test_pole_raises(self):
        # denominator factor 1 - q^alpha x q^j vanishes for x = q^{-alpha}
        with pytest.raises(PoleError):
            qpoch_order(1 / CTX.q_pow(0.5), 0.5, CTX)


class TestThetaQ:
    def test_zero_argument(self):
        with pytest.raises(ZeroArgument):
            theta_q(0, CTX)

    def test_minus_one_vanishes(self):
        assert theta_q(-1, CTX) == 0

    def test_at_one_matches_bilateral(self):
        # frozen bilateral sum cut at |n| <= 40
        assert theta_q(1, CTX_I) == pytest.approx(2.00373489848824, abs=1e-13)

    def test_series_vs_product(self):
        rng = np.random.default_rng(7)
        for _ in range(100):
            r = rng.uniform(0.2, 5.0)
            x = r * cmath.exp(2j * math.pi * rng.uniform(0, 1))
            tau = complex(rng.uniform(-0.3, 0.3), rng.uniform(0.8, 1.4))
            ctx = QContext(tau)
            a, b = theta_q_series(x, ctx), theta_q(x, ctx)
            assert abs(a - b) <= 1e-12 * abs(b)


class TestJacobiTheta:
    def test_lattice_zero(self):
        assert jacobi_theta(0, CTX) == 0
        assert abs(jacobi_theta(1 + CTX.tau, CTX)) < 1e-14

    def test_odd(self):
        u = 0.23 + 0.07j
        assert jacobi_theta(-u, CTX) == pytest.approx(-jacobi_theta(u, CTX))

    def test_series_vs_product(self):
        rng = np.random.default_rng(11)
        for _ in range(100):
            u = complex(rng.uniform(-0.45, 0.45), rng.uniform(-0.3, 0.3))
            ctx = QContext(complex(rng.uniform(-0.3, 0.3),
                                   rng.uniform(0.8, 1.4)))
            a, b = jacobi_theta_series(u, ctx), jacobi_theta(u, ctx)
            assert abs(a - b) <= 1e-12 * max(abs(b), 1e-3)


class TestEta:
    def test_value_at_i(self):
        # eta(i) = Gamma(1/4) / (2 pi^(3/4))
        want = math.gamma(0.25) / (2 * math.pi**0.75)
        assert dedekind_eta(CTX_I) == pytest.approx(want, abs=1e-14)


class TestLatticeTheta:
    def test_integer_periodicity(self):
        S = SymMatrix.coupling(2)
        u = np.array([0.3 + 0.1j, -0.2])
        a = lattice_theta(S, u + np.array([2, -1]), CTX)
        assert a == pytest.approx(lattice_theta(S, u, CTX))

    def test_rank_one_value(self):
        got = lattice_theta(SymMatrix(((2,),)), [0.1], CTX_I)
        assert got == pytest.approx(1.0030215858194635, abs=1e-14)

    def test_rank_two_value(self):
        got = lattice_theta(SymMatrix.coupling(2), [0.1, 0.2], CTX_I)
        assert got == pytest.approx(1.0071973196745292, abs=1e-13)

    def test_dual_equals_primal_for_identity_matrix(self):
        S = SymMatrix(((1, 0), (0, 1)))
        u = [0.17 + 0.05j, -0.23]
        assert lattice_theta_dual(S, u, CTX) == pytest.approx(
            lattice_theta(S, u, CTX)
        )

    def test_matrix_validation(self):
        with pytest.raises(ValueError):
            SymMatrix(((1, 2), (3, 4)))  # not symmetric
        with pytest.raises(ValueError):
            SymMatrix(((1, 2), (2, 1)))  # not positive definite

    def test_coupling_det(self):
        assert SymMatrix.coupling(3).det() == pytest.approx(4.0)


class TestQHypergeometric:
    def test_empty_argument(self):
        assert q_hypergeometric([0.3], [0.2], 0, CTX) == 1

    def test_terminating_is_polynomial(self):
        # upper parameter q^{-2} kills every term with n >= 3
        a = CTX.q_pow(-2)
        x = 0.37 + 0.1j
        got = q_hypergeometric([a], [0], x, CTX)
        want = 0j
        poch, qfac = 1.0 + 0j, 1.0 + 0j
        for n in range(3):
            want += poch / qfac * (-1) ** n * CTX.q_pow(n * (n - 1) / 2) * x**n
            poch *= 1 - a * CTX.q**n
            qfac *= 1 - CTX.q ** (n + 1)
        assert got == pytest.approx(want, rel=1e-13)

    def test_value_against_direct_sum(self):
        got = q_hypergeometric([CTX_I.q_pow(0.5)], [0], 0.1, CTX_I)
        assert got == pytest.approx(0.904160282689199, abs=1e-14)

    def test_divergent_raises(self):
        with pytest.raises(DivergentSeries):
            q_hypergeometric([0.3, 0.4], [], 1.7, CTX)  # s - r + 1 = -1

    def test_denominator_pole_raises(self):
        with pytest.raises(PoleInDenominator):
            q_hypergeometric([0.3], [1 / CTX.q**2], 0.2, CTX)
