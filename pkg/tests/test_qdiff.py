"""Tests for the connection problem of the higher-order difference equation."""

import cmath
import math

import numpy as np
import pytest

from mu_lab.errors import ParameterDegeneracy
from mu_lab.qcore import QContext, cexp, q_hypergeometric
from mu_lab.qdiff import (
    QDiffProblem,
    connection_residual,
    convergent_solution,
    divergent_solution_general,
    hyper_ratio_continued,
    n_tilde_phi_M,
    resummed_solution,
    riemann_theta_relation,
)

CTX = QContext(0.08 + 1.02j)


def make_problem(N, M, ctx=CTX):
    a = tuple((0.7 + 0.31 * j) * cexp(2j * math.pi * (0.13 + 0.17 * j))
              for j in range(N + 1))
    b = tuple([1.0 + 0j] + [(0.8 + 0.27 * s) * cexp(2j * math.pi * (0.05 - 0.11 * s))
                            for s in range(1, M + 1)])
    return QDiffProblem(a, b, ctx)


class TestProblem:
    def test_shape_validation(self):
        with pytest.raises(ValueError):
            QDiffProblem((1.0, 2.0), (1.0, 0.5), CTX)  # M == N

    def test_degenerate_parameters_detected(self):
        prob = QDiffProblem((0.5, 0.5 * CTX.q), (1.0,), CTX)
        with pytest.raises(ParameterDegeneracy):
            prob.require_generic()


class TestContinuation:
    def test_matches_series_inside_radius(self):
        prob = make_problem(2, 0)
        A = [ar / prob.b_params[0] for ar in prob.a_params]
        c = (prob.b_params[0] / CTX.q) ** 2
        F = hyper_ratio_continued(A, [], c, CTX)
        xi = 0.2 / abs(c)
        want = q_hypergeometric(A, [0.0, 0.0], c * xi, CTX)
        assert F(xi) == pytest.approx(want, rel=1e-13)

    def test_continuation_consistent_down_the_spiral(self):
        # F at a far point, computed independently: run the recurrence once
        # by hand from two adjacent spiral points
        prob = make_problem(1, 0)
        A = [ar for ar in prob.a_params]
        c = 1.0 / CTX.q
        F = hyper_ratio_continued(A, [], c, CTX)
        xi = 3.7 + 1.2j
        # recurrence: (1 - c xi) F(xi) = c xi (r1 F(q xi) + r2 F(q^2 xi))
        #             - l1 F(q xi), with r from prod(1 - A_j T), l from (1-T)
        r1 = -(A[0] + A[1])
        r2 = A[0] * A[1]
        lhs = (1 - c * xi) * F(xi)
        rhs = c * xi * (r1 * F(xi * CTX.q) + r2 * F(xi * CTX.q**2)) \
            + F(xi * CTX.q)
        assert lhs == pytest.approx(rhs, rel=1e-12)


class TestSolutions:
    @pytest.mark.parametrize("N,M", [(1, 0), (2, 0), (2, 1)])
    def test_convergent_solutions_satisfy_operator(self, N, M):
        prob = make_problem(N, M)
        x = 3.1 + 1.7j
        for j in range(N + 1):
            res = prob.operator_residual(
                lambda t, j=j: convergent_solution(prob, j, t), x)
            assert res < 1e-9

    @pytest.mark.parametrize("N,M", [(1, 0), (2, 0), (2, 1)])
    def test_resummation_equals_connection_target(self, N, M):
        prob = make_problem(N, M)
        order = N - M
        ls = [0.52 + 0.23j, 0.71j, -0.33 + 0.12j][: order + 1]
        lhs = resummed_solution(prob, 0, ls)
        xs = [ls[0]] + [-ls[l] / ls[l - 1] for l in range(1, order + 1)]
        assert lhs == pytest.approx(n_tilde_phi_M(prob, xs), rel=1e-11)

    @pytest.mark.parametrize("N,M,k", [(1, 0, 0), (2, 0, 0), (2, 1, 1)])
    def test_connection_formula(self, N, M, k):
        prob = make_problem(N, M)
        ls = [0.52 + 0.23j, 0.71j, -0.33 + 0.12j][: N - M + 1]
        assert connection_residual(prob, k, ls) < 1e-10

    def test_divergent_series_coefficients(self):
        # k = 0, b_0 = 1, M = 0: the canonical flat series with (-x)^n signs
        prob = make_problem(2, 0)
        g = divergent_solution_general(prob, 0)
        from mu_lab.borel import divergent_solution
        # product of upper parameters plays the role of (a)_n here
        a0, a1, a2 = prob.a_params
        n = 3
        num = 1.0 + 0j
        qk = 1.0 + 0j
        den = 1.0 + 0j
        for i in range(n):
            num *= (1 - a0 * qk) * (1 - a1 * qk) * (1 - a2 * qk)
            qk *= CTX.q
            den *= 1 - qk
        want = num / den * CTX.q_pow(-2 * n * (n + 1) / 2)
        assert g(n) == pytest.approx(want, rel=1e-12)


class TestRiemannRelation:
    def test_many_random_points(self):
        rng = np.random.default_rng(5)
        worst = 0.0
        for _ in range(50):
            vals = [
                rng.uniform(0.5, 1.6)
                * cexp(2j * math.pi * rng.uniform(-0.5, 0.5))
                for _ in range(4)
            ]
            worst = max(worst, riemann_theta_relation(*vals, CTX))
        assert worst < 1e-11
