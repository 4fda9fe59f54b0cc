"""Solution bases and connection formulas for the higher-order q-difference
equation

    [ T^{N-M} (1 - b_0 T) ... (1 - b_M T) - x (1 - a_0 T) ... (1 - a_N T) ] f = 0

with 0 <= M < N.  The equation has M+1 divergent series solutions around
x = 0 (resummed through the borel module) and N+1 convergent solutions
around x = infinity; the Watson-type connection formula expresses one
basis in the other with theta-quotient coefficients.

The resummation needs the Borel-transformed divergent series far outside
its radius of convergence.  Rather than citing the connection formula
itself (which would make the check circular), the series is continued
down the spiral through the q-difference recurrence its coefficients
satisfy, which only uses values closer to the origin.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass, field
from typing import Callable, Sequence

import numpy as np

from .borel import BorelSum, FormalSeries, resum
from .errors import ParameterDegeneracy, PoleProximity
from .qcore import (
    QContext,
    cexp,
    q_hypergeometric,
    qpoch_inf,
    qpoch_list,
    require_theta_q,
    theta_q,
)


def _omit(vals: Sequence[complex], j: int) -> list[complex]:
    return [v for i, v in enumerate(vals) if i != j]


def _root_poly(roots: Sequence[complex]) -> np.ndarray:
    """Coefficients of prod (1 - r*T) in increasing powers of T."""
    coeffs = np.array([1.0 + 0j])
    for r in roots:
        coeffs = np.convolve(coeffs, np.array([1.0, -r], dtype=complex))
    return coeffs


@dataclass(frozen=True)
class QDiffProblem:
    """Parameters of the difference equation: upper a_0..a_N, lower b_0..b_M."""

    a_params: tuple
    b_params: tuple
    ctx: QContext
    N: int = field(init=False)
    M: int = field(init=False)

    def __post_init__(self) -> None:
        a = tuple(complex(v) for v in self.a_params)
        b = tuple(complex(v) for v in self.b_params)
        object.__setattr__(self, "a_params", a)
        object.__setattr__(self, "b_params", b)
        object.__setattr__(self, "N", len(a) - 1)
        object.__setattr__(self, "M", len(b) - 1)
        if not 0 <= self.M < self.N:
            raise ValueError("need 0 <= M < N (counts are len-1)")

    def require_generic(self) -> None:
        """a_r / a_j off the q-power grid for r != j (else the connection
        coefficients blow up)."""
        ctx = self.ctx
        for j, aj in enumerate(self.a_params):
            if aj == 0:
                continue
            for r, ar in enumerate(self.a_params):
                if r == j or ar == 0:
                    continue
                if abs(qpoch_inf(ar / aj, ctx)) < 1e-8:
                    raise ParameterDegeneracy(
                        f"a_{r}/a_{j} lies on the q-power grid"
                    )

    def operator_residual(self, y: Callable[[complex], complex], x: complex) -> float:
        """Relative residual of the difference operator applied to y at x,
        evaluated through shifted re-evaluations of y (never through series
        manipulation)."""
        q = self.ctx.q
        lb = _root_poly(self.b_params)
        la = _root_poly(self.a_params)
        shift = self.N - self.M
        vals = {}

        def yv(p: int) -> complex:
            if p not in vals:
                vals[p] = y(x * q**p)
            return vals[p]

        part1 = sum(lb[p] * yv(shift + p) for p in range(len(lb)))
        part2 = x * sum(la[p] * yv(p) for p in range(len(la)))
        scale = max(max(abs(v) for v in vals.values()), 1e-30)
        return abs(part1 - part2) / scale


def convergent_solution(problem: QDiffProblem, j: int, x: complex) -> complex:
    """The j-th solution convergent around x = infinity:

        theta_q(a_j x)/theta_q(x) * phi(upper; lower; q; z),

    upper = {a_j/b_s, s=0..M} padded with N-M zeros, lower = {a_j q / a_r,
    r != j}, z = (-1)^{N-M} b_0...b_M q^{N+1} / (a_0...a_N x).
    """
    ctx = problem.ctx
    a, b = problem.a_params, problem.b_params
    N, M = problem.N, problem.M
    aj = a[j]
    if aj == 0:
        raise ParameterDegeneracy("convergent solution needs a_j != 0")
    prod_a = np.prod(a)
    if prod_a == 0:
        raise ParameterDegeneracy(
            "convergent solutions degenerate when some a_r = 0"
        )
    upper = [aj / bs for bs in b] + [0.0] * (N - M)
    lower = [aj * ctx.q / ar for ar in _omit(a, j)]
    z = (-1) ** (N - M) * np.prod(b) * ctx.q_pow(N + 1) / (prod_a * x)
    pref = theta_q(aj * x, ctx) / require_theta_q(x, ctx, "x")
    return pref * q_hypergeometric(upper, lower, z, ctx)


# ---------------------------------------------------------------------------
# continued ratio-hypergeometric series (the Borel-transformed divergent
# solutions, valid on the whole spiral)
# ---------------------------------------------------------------------------


def hyper_ratio_continued(
    upper: Sequence[complex],
    lower: Sequence[complex],
    c: complex,
    ctx: QContext,
    *,
    base_radius: float = 0.35,
) -> Callable[[complex], complex]:
    """Evaluator for F(xi) = sum_n (upper)_n / ((lower)_n (q)_n) (c xi)^n
    anywhere on a q-spiral.

    Inside |c xi| <= base_radius the series is summed directly.  Outside,
    F is continued backwards through the recurrence its coefficients
    satisfy,

        (1 - c xi) F(xi) = c xi sum_{p>=1} r_p F(q^p xi)
                           - sum_{p>=1} l_p F(q^p xi),

    where sum r_p T^p = prod_j (1 - upper_j T) and
    sum l_p T^p = (1 - T) prod_s (1 - (lower_s/q) T).  The denominator
    vanishes exactly on the pole set of F.
    """
    up = [complex(v) for v in upper]
    lo = [complex(v) for v in lower]
    rp = _root_poly(up)
    lp = _root_poly([v / ctx.q for v in lo] + [1.0])
    q = ctx.q
    pad = [0.0] * max(0, len(up) - len(lo) - 1)

    def series_val(xi: complex) -> complex:
        return q_hypergeometric(up, lo + pad, c * xi, ctx)

    def make(xi0: complex) -> dict:
        return {"xi0": xi0, "cache": {}}

    state: dict = {}

    def F(xi: complex) -> complex:
        # memoize along the spiral of the first base point seen
        key = None
        if state:
            ratio = xi / state["xi0"]
            p = cmath.log(ratio) / cmath.log(q)
            if abs(p.imag) < 1e-9 and abs(p.real - round(p.real)) < 1e-9:
                key = int(round(p.real))
                if key in state["cache"]:
                    return state["cache"][key]
        else:
            state.update(make(xi))
            key = 0
        val = _eval(xi)
        if key is not None:
            state["cache"][key] = val
        return val

    def _eval(xi: complex) -> complex:
        if abs(c * xi) <= base_radius:
            return series_val(xi)
        den = 1.0 - c * xi
        if abs(den) < 1e-9:
            raise PoleProximity(f"continuation pole at c*xi = {c * xi}")
        acc = 0j
        for p in range(1, len(rp)):
            acc += c * xi * rp[p] * F(xi * q**p)
        for p in range(1, len(lp)):
            acc -= lp[p] * F(xi * q**p)
        return acc / den

    return F


def divergent_solution_general(
    problem: QDiffProblem, k: int
) -> FormalSeries:
    """The k-th divergent series solution (k = 0..M) around x = 0, as a
    formal series in x with the theta prefactor stripped:

        phi(A; B; q; w x),  A = {a_r/b_k}, B = {b_s q / b_k (s != k)},
        w = (-b_k/q)^{N-M}.

    Its (N-M)-fold Borel transform is the ratio series
    sum (A)_n / ((B)_n (q)_n) ((b_k/q)^{N-M} xi)^n, continued down the
    spiral by hyper_ratio_continued.
    """
    ctx = problem.ctx
    a, b = problem.a_params, problem.b_params
    N, M = problem.N, problem.M
    if not 0 <= k <= M:
        raise ValueError("divergent solutions exist for k = 0..M")
    bk = b[k]
    if bk == 0:
        raise ParameterDegeneracy("divergent solution needs b_k != 0")
    A = [ar / bk for ar in a]
    B = [bs * ctx.q / bk for bs in _omit(list(b), k)]
    order = N - M
    w = (-bk / ctx.q) ** order
    q = ctx.q

    def coeff(n: int) -> complex:
        num = 1.0 + 0j
        den = 1.0 + 0j
        qk = 1.0 + 0j
        for i in range(n):
            for av in A:
                num *= 1.0 - av * qk
            for bv in B:
                den *= 1.0 - bv * qk
            qk *= q
            den *= 1.0 - qk
        val = num / den * w**n
        # the r_phi_s convention factor ((-1)^n q^{n(n-1)/2})^{M-N}
        return val * (-1) ** ((n * (M - N)) % 2) * ctx.q_pow(
            (M - N) * n * (n - 1) / 2.0
        )

    cval = (bk / ctx.q) ** order
    growth = max((abs(cmath.log(abs(av))) for av in A if av != 0), default=0.0)

    def closed(c2: QContext) -> Callable[[complex], complex]:
        return hyper_ratio_continued(A, B, cval, c2)

    return FormalSeries(
        coeff, {order: BorelSum(closed, lambda _c, g=growth: g + 0.5)}
    )


# ---------------------------------------------------------------------------
# the Watson-type connection target
# ---------------------------------------------------------------------------


def n_tilde_phi_M(problem: QDiffProblem, xs: Sequence[complex]) -> complex:
    """The resummed-solution closed form: a finite sum over j of Pochhammer
    ratios, theta quotients over all x_l, and a convergent inner series in

        z = b_1...b_M q^{N+1} / (a_0...a_N x_0...x_{N-M}).
    """
    ctx = problem.ctx
    a, b1 = problem.a_params, list(problem.b_params[1:])
    N, M = problem.N, problem.M
    xs = [complex(v) for v in xs]
    if len(xs) != N - M + 1:
        raise ValueError(f"need {N - M + 1} x arguments")
    problem.require_generic()
    prod_a = np.prod(a)
    if prod_a == 0:
        raise ParameterDegeneracy("needs all a_r != 0")
    z = np.prod(b1) * ctx.q_pow(N + 1) / (prod_a * np.prod(xs)) if b1 else (
        ctx.q_pow(N + 1) / (prod_a * np.prod(xs))
    )
    den_b = qpoch_list([bs * ctx.q for bs in b1], ctx)
    total = 0j
    for j, aj in enumerate(a):
        num = qpoch_list([bs * ctx.q / aj for bs in b1], ctx) * qpoch_list(
            _omit(a, j), ctx
        )
        den = den_b * qpoch_list([ar / aj for ar in _omit(a, j)], ctx)
        if abs(den) < 1e-12:
            raise ParameterDegeneracy("connection coefficient denominator ~ 0")
        theta_part = 1.0 + 0j
        for x in xs:
            theta_part *= theta_q(-aj * x, ctx) / require_theta_q(
                -x, ctx, "-x_l"
            )
        upper = [aj] + [aj / bs for bs in b1] + [0.0] * (N - M)
        lower = [aj * ctx.q / ar for ar in _omit(a, j)]
        inner = q_hypergeometric(upper, lower, z, ctx)
        total += num / den * theta_part * inner
    return total


def resummed_solution(
    problem: QDiffProblem, k: int, lambdas: Sequence[complex]
) -> complex:
    """L_q^{N-M} o B_q^{N-M} of the k-th divergent series (the series part
    alone; the solution's theta_q(b_k x)/theta_q(x) prefactor is not
    transformed)."""
    ctx = problem.ctx
    order = problem.N - problem.M
    ls = [complex(v) for v in lambdas]
    if len(ls) != order + 1:
        raise ValueError(f"need {order + 1} lambdas")
    series = divergent_solution_general(problem, k)
    return resum(series, order, ls, ctx)


def connection_rhs(
    problem: QDiffProblem, k: int, lambdas: Sequence[complex]
) -> complex:
    """The connection formula's right-hand side for the k-th resummed
    divergent solution, as printed (general k and b)."""
    ctx = problem.ctx
    a, b = problem.a_params, problem.b_params
    N, M = problem.N, problem.M
    ls = [complex(v) for v in lambdas]
    order = N - M
    problem.require_generic()
    bk = b[k]
    prod_a = np.prod(a)
    z = (-1) ** order * np.prod(b) * ctx.q_pow(N + 1) / (prod_a * ls[-1])
    den_b = qpoch_list([bs * ctx.q / bk for bs in _omit(list(b), k)], ctx)
    total = 0j
    for j, aj in enumerate(a):
        num = qpoch_list(
            [bs * ctx.q / aj for bs in _omit(list(b), k)], ctx
        ) * qpoch_list([ar / bk for ar in _omit(list(a), j)], ctx)
        den = den_b * qpoch_list([ar / aj for ar in _omit(list(a), j)], ctx)
        if abs(den) < 1e-12:
            raise ParameterDegeneracy("connection coefficient denominator ~ 0")
        theta_part = theta_q(
            -aj * bk ** (order - 1) * ls[0], ctx
        ) / require_theta_q(-(bk**order) * ls[0], ctx, "-b_k^{N-M} lambda_0")
        for l in range(1, order + 1):
            theta_part *= theta_q(aj * ls[l] / (bk * ls[l - 1]), ctx) / (
                require_theta_q(ls[l] / ls[l - 1], ctx, "lambda ratio")
            )
        upper = [aj / bs for bs in b] + [0.0] * (N - M)
        lower = [aj * ctx.q / ar for ar in _omit(list(a), j)]
        inner = q_hypergeometric(upper, lower, z, ctx)
        total += num / den * theta_part * inner
    return total


def connection_residual(
    problem: QDiffProblem, k: int, lambdas: Sequence[complex]
) -> float:
    """|LHS - RHS| / |LHS| of the connection formula, LHS the resummed
    divergent solution and RHS the theta-quotient expansion over the
    convergent basis."""
    lhs = resummed_solution(problem, k, lambdas)
    rhs = connection_rhs(problem, k, lambdas)
    return abs(lhs - rhs) / max(abs(lhs), 1e-30)


def riemann_theta_relation(
    a: complex, x0: complex, x1: complex, y: complex, ctx: QContext
) -> float:
    """Relative residual of the three-term theta relation

        T(a x_0) T(a x_1) / (T(x_0) T(x_1))
          - T(a x_0/y) T(a x_1 y) / (T(x_0/y) T(x_1 y))
        = T(a) T(y) T(a x_0 x_1) T(x_1 y/x_0)
          / (T(x_0) T(x_1) T(y/x_0) T(x_1 y)),

    where T(v) = theta_q(-v).
    """

    def T(v: complex) -> complex:
        return theta_q(-v, ctx)

    lhs = T(a * x0) * T(a * x1) / (T(x0) * T(x1)) - T(a * x0 / y) * T(
        a * x1 * y
    ) / (T(x0 / y) * T(x1 * y))
    rhs = (
        T(a)
        * T(y)
        * T(a * x0 * x1)
        * T(x1 * y / x0)
        / (T(x0) * T(x1) * T(y / x0) * T(x1 * y))
    )
    return abs(lhs - rhs) / max(abs(lhs), abs(rhs), 1e-30)
