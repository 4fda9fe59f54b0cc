"""Formal series container and the q-Borel / q-Laplace transformation pair.

A FormalSeries is a coefficient closure n -> A_n (n >= 0), so divergent
series are represented without ever being summed.  The q-Borel transform
multiplies A_n by q^{n(n-1)/2}; the q-Laplace transform is a bilateral
theta-kernel sum over a geometric spiral.  Their composition resums
divergent series: applied to the canonical divergent solutions of the
mu-type difference equations it produces the Appell-Lerch sums.

Because the q-Laplace sum needs its integrand far outside the radius of
convergence of the transformed power series, a FormalSeries may carry
closed-form analytic summations of its Borel transforms (borel_sums),
keyed by iteration order.  The canonical divergent solution carries the
q-binomial product form; generic convergent inputs (polynomials) are
summed directly.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass, field
from typing import Callable, Mapping, Sequence

import numpy as np

from .errors import KernelPole, NonConvergent
from .mu import convolve_coefficients, grouped_bilateral, theta_coefficients
from .qcore import (
    PI_I,
    TWO_PI_I,
    QContext,
    bilateral_sum,
    cexp,
    qpoch_ratio,
    require_theta_q,
)

Evaluator = Callable[[complex], complex]


@dataclass(frozen=True)
class BorelSum:
    """Closed-form analytic summation of an iterated Borel transform.

    make produces the evaluator valid on the whole lambda-spiral; growth
    bounds the log-magnitude gained per backward spiral step, which sizes
    the q-Laplace kernel windows.
    """

    make: Callable[[QContext], Evaluator]
    growth: Callable[[QContext], float] = lambda ctx: 0.0


@dataclass(frozen=True)
class FormalSeries:
    """Coefficient sequence {A_n}, n >= 0, supplied as a pure closure.

    borel_sums maps an iteration order N to the closed-form analytic
    summation of B_q^N(self), valid on the whole spiral (not just inside
    the radius of convergence).  degree, when known and finite, lets the
    resummation bound the spiral growth of a directly-summed transform.
    """

    coeff: Callable[[int], complex]
    borel_sums: Mapping[int, BorelSum] = field(default_factory=dict)
    degree: int | None = None

    def __call__(self, n: int) -> complex:
        if n < 0:
            return 0j
        return complex(self.coeff(n))


def monomial(m: int) -> FormalSeries:
    """The single-term series x^m."""
    if m < 0:
        raise ValueError("monomial degree must be >= 0")
    return FormalSeries(lambda n: 1.0 + 0j if n == m else 0j, degree=m)


def polynomial(coeffs: Sequence[complex]) -> FormalSeries:
    """Finite series with the given coefficients A_0, A_1, ..."""
    cs = [complex(c) for c in coeffs]
    return FormalSeries(
        lambda n: cs[n] if n < len(cs) else 0j, degree=max(len(cs) - 1, 0)
    )


def shift_mul(g: FormalSeries, m: int) -> FormalSeries:
    """x^m * g(x): coefficient shift by m."""
    deg = None if g.degree is None else g.degree + m
    return FormalSeries(lambda n: g(n - m), degree=deg)


def q_shift(g: FormalSeries, n_shift: int, ctx: QContext) -> FormalSeries:
    """T_x^k g = g(q^k x): coefficient n multiplied by q^{k n}."""
    return FormalSeries(
        lambda n: g(n) * ctx.q_pow(n_shift * n), degree=g.degree
    )


def divergent_solution(a: complex, order: int, ctx: QContext) -> FormalSeries:
    """The canonical divergent series around x = 0 of the mu-type
    difference equation of the given order:

        sum_n (a; q)_n / (q; q)_n * q^{-order*n(n+1)/2} * (-x)^n.

    Its order-fold Borel transform sums in closed q-binomial form to
        (-a x q^{-order})_inf / (-x q^{-order})_inf,
    which is the analytic continuation used by the q-Laplace stage.
    """
    q = ctx.q

    def coeff(n: int) -> complex:
        num = 1.0 + 0j
        den = 1.0 + 0j
        qk = 1.0 + 0j
        for k in range(n):
            num *= 1.0 - a * qk
            qk *= q
            den *= 1.0 - qk
        return num / den * (-1) ** (n % 2) * ctx.q_pow(-order * n * (n + 1) / 2.0)

    def closed(c: QContext) -> Evaluator:
        scale = c.q_pow(-order)

        def ev(x: complex) -> complex:
            base = -x * scale
            return qpoch_ratio(a * base, base, c)

        return ev

    # the q-binomial ratio gains one factor of a per backward spiral step
    growth = abs(cmath.log(a).real) if a != 0 else 0.0
    return FormalSeries(
        coeff, {order: BorelSum(closed, lambda c, g=growth: g)}
    )


def geometric_flat(ctx: QContext) -> FormalSeries:
    """The order-1 divergent solution with a = q:
    sum_n (-x)^n q^{-n(n+1)/2}; resummation target of the classical mu."""
    return divergent_solution(ctx.q, 1, ctx)


def borel_transform(g: FormalSeries, ctx: QContext, order: int = 1) -> FormalSeries:
    """B_q^order(g): coefficient n multiplied by q^{order*n(n-1)/2}."""
    if order < 1:
        raise ValueError("order must be >= 1")
    return FormalSeries(
        lambda n: g(n) * ctx.q_pow(order * n * (n - 1) / 2.0)
    )


def series_evaluator(g: FormalSeries, ctx: QContext) -> Evaluator:
    """Direct partial summation of a FormalSeries.

    Only valid where the series converges; growth without settling raises
    NonConvergent, which signals that a closed-form borel_sums entry is
    required instead.
    """

    eps = ctx.trunc.eps_term

    def ev(x: complex) -> complex:
        total = 0j
        small = 0
        xe = 1.0 + 0j
        for n in range(ctx.trunc.max_index):
            gn = g(n)
            if gn == 0:
                t = 0j  # never touch xe, which may already have overflowed
            else:
                if not cmath.isfinite(xe):
                    break
                t = gn * xe
            total += t
            if cmath.isfinite(x * xe):
                xe *= x
            else:
                xe = complex("inf")
            mag = abs(t)
            if mag <= eps * max(abs(total), 1e-300):
                small += 1
                if small >= 4 and n >= 4:
                    return total
            else:
                small = 0
        raise NonConvergent(
            f"direct series summation diverges at x={x}; "
            "supply a closed-form Borel summation"
        )

    return ev


def laplace_eval(
    g: Evaluator, x: complex, lam: complex, ctx: QContext
) -> complex:
    """L_q(g)(x; lambda) = sum_{n in Z} g(lambda q^n) / theta_q(lambda q^n / x).

    The kernel is reduced once through theta_q(w q^n) =
    w^{-n} q^{-n(n-1)/2} theta_q(w), so each term carries a single
    explicit exponential and the sum never overflows.
    """
    w = lam / x
    try:
        tw = require_theta_q(w, ctx, "lambda/x")
    except Exception as exc:  # noqa: BLE001 - rebrand to the kernel error
        raise KernelPole(str(exc)) from exc
    tau = ctx.tau
    logw = cmath.log(w)
    eps_skip = -740.0

    def term(n: int) -> complex:
        # 1/theta_q(w q^n) = w^n q^{n(n-1)/2} / theta_q(w)
        expo = n * logw + PI_I * tau * n * (n - 1)
        if expo.real < eps_skip:
            return 0j
        return g(lam * cexp(TWO_PI_I * tau * n)) * cexp(expo) / tw

    return bilateral_sum(term, ctx.trunc)


def laplace_n_eval(
    g: Evaluator,
    lambdas: Sequence[complex],
    ctx: QContext,
    *,
    growth: float = 0.0,
) -> complex:
    """Order-N q-Laplace transform

        L_q^N(g)(l_0..l_N) = sum over Z^N of g(l_0 q^{|n|})
            * prod_j (l_{j-1}/l_j)^{n_j} q^{n_j(n_j-1)/2} / theta_q(l_{j-1}/l_j).

    The lattice couples to g only through |n|, so the kernel collapses to
    a 1-D convolution exactly as in the mu-type sums.  growth bounds the
    log-magnitude g gains per backward step down the spiral, which keeps
    the kernel window wide enough when g is unbounded there.
    """
    ls = [complex(t) for t in lambdas]
    if len(ls) < 2:
        raise ValueError("need at least (lambda_0, lambda_1)")
    lam0 = ls[0]
    parts = []
    for j in range(1, len(ls)):
        w = ls[j - 1] / ls[j]
        try:
            tw = require_theta_q(w, ctx, f"lambda_{j-1}/lambda_{j}")
        except Exception as exc:  # noqa: BLE001
            raise KernelPole(str(exc)) from exc
        off, arr = theta_coefficients(w, ctx, offset=-0.5, growth=growth)
        parts.append((off, arr / tw))
    conv = convolve_coefficients(parts)
    tau = ctx.tau

    def slow(s: int) -> complex:
        return g(lam0 * cexp(TWO_PI_I * tau * s))

    return grouped_bilateral(slow, conv, ctx, growth=growth)


def resum(
    g: FormalSeries,
    order: int,
    lambdas: Sequence[complex],
    ctx: QContext,
) -> complex:
    """Evaluate L_q^order(B_q^order(g)) at the lambda tuple.

    Uses the closed-form Borel summation registered on g when available;
    otherwise sums B_q^order(g) directly (valid for polynomial-like
    inputs, whose Borel transform is entire).
    """
    ls = [complex(t) for t in lambdas]
    if len(ls) != order + 1:
        raise ValueError(f"need {order + 1} lambdas for order {order}")
    closed = g.borel_sums.get(order)
    if closed is not None:
        ev = closed.make(ctx)
        growth = closed.growth(ctx)
    else:
        ev = series_evaluator(borel_transform(g, ctx, order), ctx)
        if g.degree is None:
            growth = 0.0
        else:
            # |x^d| gains |q|^{-d} per backward step
            growth = g.degree * 2.0 * math.pi * ctx.tau.imag
    if order == 1:
        return laplace_eval(ev, ls[1], ls[0], ctx)
    return laplace_n_eval(ev, ls, ctx, growth=growth + 0.5)
