"""Scalar building blocks: q-Pochhammer symbols, theta functions, eta,
lattice theta functions and basic hypergeometric series.

Conventions
-----------
The modular parameter tau lies in the upper half plane and

    q = exp(2*pi*i*tau),   so |q| < 1.

Every fractional power of q (q**alpha, q**(1/8), q**(k^2/2N), ...) is
computed as exp(2*pi*i*tau*exponent) with the exponent kept exact.  Square
roots such as sqrt(-i*tau) use the principal branch, which is safe because
Re(-i*tau) = Im(tau) > 0.  These two rules pin all branch choices so that
quasi-periodicity and modular identities hold to full precision.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass, field
from functools import lru_cache
from typing import Callable, Sequence

import numpy as np

from .errors import (
    NonConvergent,
    PoleError,
    PoleInDenominator,
    DivergentSeries,
    PoleProximity,
    ZeroArgument,
)

TWO_PI_I = 2j * math.pi
PI_I = 1j * math.pi

# exp() underflows to 0 below this real part; near the top of the double
# range we refuse to continue rather than produce inf silently.
_EXP_UNDERFLOW = -745.0
_EXP_OVERFLOW = 709.0


def cexp(z: complex) -> complex:
    """exp(z) with graceful underflow to 0 and a loud overflow guard."""
    x = z.real
    if x < _EXP_UNDERFLOW:
        return 0j
    if x > _EXP_OVERFLOW:
        raise NonConvergent(f"exponent overflow in cexp: Re(z)={x:.3g}")
    return cmath.exp(z)


def e2pi(z: complex) -> complex:
    """exp(2*pi*i*z)."""
    return cexp(TWO_PI_I * z)


@dataclass(frozen=True)
class TruncationPolicy:
    """Stopping rules shared by all truncated sums and products.

    eps_term: stop once a term is this small relative to the partial sum.
    max_index: hard cap on any single summation index.
    lattice_shell_eps: stop expanding a lattice box once a full sup-norm
        shell contributes relatively less than this.
    """

    eps_term: float = 1e-16
    max_index: int = 512
    lattice_shell_eps: float = 1e-16

    def __post_init__(self) -> None:
        if not self.eps_term > 0:
            raise ValueError("eps_term must be positive")
        if self.max_index < 8:
            raise ValueError("max_index must be at least 8")
        if not self.lattice_shell_eps > 0:
            raise ValueError("lattice_shell_eps must be positive")


@dataclass(frozen=True)
class QContext:
    """Modular parameter tau (Im tau > 0) plus truncation policy.

    q is always derived from tau, never supplied independently.
    """

    tau: complex
    trunc: TruncationPolicy = field(default_factory=TruncationPolicy)
    q: complex = field(init=False)

    def __post_init__(self) -> None:
        tau = complex(self.tau)
        if not tau.imag > 0:
            raise ValueError(f"Im(tau) must be positive, got tau={tau}")
        object.__setattr__(self, "tau", tau)
        object.__setattr__(self, "q", cmath.exp(TWO_PI_I * tau))

    def q_pow(self, c: complex) -> complex:
        """q**c computed as exp(2*pi*i*tau*c); never via log(q)."""
        return cexp(TWO_PI_I * self.tau * c)

    def with_tau(self, tau: complex) -> "QContext":
        """Same truncation policy at a different modular parameter."""
        return QContext(tau, self.trunc)


def sqrt_right_half(z: complex) -> complex:
    """Principal sqrt, asserting Re(z) > 0 so the branch cut is never hit."""
    if z.real <= 0:
        raise ValueError(f"sqrt argument left the right half plane: {z}")
    return cmath.sqrt(z)


def minus_i_tau_pow(tau: complex, expo: float) -> complex:
    """(-i*tau)**expo on the principal branch (Re(-i*tau) = Im(tau) > 0)."""
    w = -1j * tau
    if w.real <= 0:
        raise ValueError(f"Im(tau) must be positive, got tau={tau}")
    return cexp(expo * cmath.log(w))


@dataclass(frozen=True)
class SymMatrix:
    """Positive definite symmetric integer (or rational) matrix."""

    entries: tuple

    def __post_init__(self) -> None:
        m = np.asarray(self.entries, dtype=float)
        if m.ndim != 2 or m.shape[0] != m.shape[1]:
            raise ValueError("matrix must be square")
        if not np.allclose(m, m.T):
            raise ValueError("matrix must be symmetric")
        # positive definiteness via leading principal minors
        for k in range(1, m.shape[0] + 1):
            if np.linalg.det(m[:k, :k]) <= 0:
                raise ValueError("matrix must be positive definite")
        object.__setattr__(self, "entries", tuple(map(tuple, self.entries)))

    @property
    def dim(self) -> int:
        return len(self.entries)

    def array(self) -> np.ndarray:
        return np.asarray(self.entries, dtype=float)

    def inverse(self) -> np.ndarray:
        return np.linalg.inv(self.array())

    def det(self) -> float:
        return float(np.linalg.det(self.array()))

    @staticmethod
    def coupling(dim: int) -> "SymMatrix":
        """The (1 + delta_jk) matrix: 2 on the diagonal, 1 elsewhere.

        Its determinant is dim + 1 and its inverse is I - J/(dim+1).
        """
        m = np.ones((dim, dim), dtype=int) + np.eye(dim, dtype=int)
        return SymMatrix(tuple(map(tuple, m.tolist())))


# ---------------------------------------------------------------------------
# q-Pochhammer symbols
# ---------------------------------------------------------------------------

def qpoch_inf(x: complex, ctx: QContext) -> complex:
    """(x; q)_infinity = prod_{j>=0} (1 - x q^j).

    Converges for every x since |q| < 1.  Returns exactly 0 when a factor
    vanishes within floating-point tolerance.
    """
    q = ctx.q
    eps = ctx.trunc.eps_term
    acc = 1.0 + 0j
    xq = complex(x)
    for _ in range(ctx.trunc.max_index * 4):
        f = 1.0 - xq
        if abs(f) <= 1e-15 * (1.0 + abs(xq)):
            return 0j
        acc *= f
        xq *= q
        if abs(xq) < eps:
            break
    else:
        raise NonConvergent(f"qpoch_inf did not converge for x={x}")
    return acc


def qpoch_ratio(num: complex, den: complex, ctx: QContext) -> complex:
    """(num; q)_inf / (den; q)_inf as a single termwise product.

    Never forms the two infinite products separately, so intermediate
    magnitudes stay bounded even when |num|, |den| are huge (needed deep
    in the negative cone of the mu-type lattice sums).
    """
    q = ctx.q
    eps = ctx.trunc.eps_term
    acc = 1.0 + 0j
    a = complex(num)
    b = complex(den)
    for _ in range(ctx.trunc.max_index * 4):
        fb = 1.0 - b
        if abs(fb) <= 1e-12 * (1.0 + abs(b)):
            raise PoleProximity(
                f"qpoch_ratio denominator factor vanished (den={den})"
            )
        acc *= (1.0 - a) / fb
        a *= q
        b *= q
        if abs(a) < eps and abs(b) < eps:
            break
    else:
        raise NonConvergent(f"qpoch_ratio did not converge (num={num})")
    return acc


def qpoch_order(x: complex, alpha: complex, ctx: QContext) -> complex:
    """(x; q)_alpha = (x; q)_inf / (q^alpha x; q)_inf for complex alpha.

    q^alpha is exp(2*pi*i*tau*alpha).  Raises PoleError when the
    denominator vanishes.  For nonnegative integer alpha this telescopes
    to the finite product.
    """
    qa = ctx.q_pow(alpha)
    try:
        return qpoch_ratio(x, qa * x, ctx)
    except PoleProximity as exc:
        raise PoleError(str(exc)) from exc


def qpoch_list(xs: Sequence[complex], ctx: QContext) -> complex:
    """prod_j (x_j; q)_inf over a parameter list."""
    acc = 1.0 + 0j
    for x in xs:
        acc *= qpoch_inf(x, ctx)
    return acc


@lru_cache(maxsize=256)
def _euler_qpoch(ctx: QContext) -> complex:
    """(q; q)_inf, cached per context."""
    return qpoch_inf(ctx.q, ctx)


# ---------------------------------------------------------------------------
# theta functions and eta
# ---------------------------------------------------------------------------

def theta_q(x: complex, ctx: QContext) -> complex:
    """Multiplicative theta sum_{n in Z} x^n q^{n(n-1)/2}.

    Evaluated through the triple product (q, -x, -q/x)_inf, whose factors
    are uniformly small; the bilateral series cancels badly for |x| near
    |q|^(1/2) and is kept only as a test oracle (theta_q_series).
    """
    if x == 0:
        raise ZeroArgument("theta_q(0) is undefined")
    return _euler_qpoch(ctx) * qpoch_inf(-x, ctx) * qpoch_inf(-ctx.q / x, ctx)


def theta_q_series(x: complex, ctx: QContext) -> complex:
    """Bilateral series form of theta_q; test oracle for the product form."""
    if x == 0:
        raise ZeroArgument("theta_q(0) is undefined")
    tau = ctx.tau
    logx = cmath.log(x)

    def term(n: int) -> complex:
        return cexp(n * logx + PI_I * tau * n * (n - 1))

    return bilateral_sum(term, ctx.trunc)


def jacobi_theta(u: complex, ctx: QContext) -> complex:
    """Odd Jacobi theta, vanishing exactly on Z + tau*Z.

    Product form: -i e^{-pi i u} q^{1/8} (q, e^{2 pi i u}, q e^{-2 pi i u})_inf.
    """
    pref = -1j * cexp(-PI_I * u) * ctx.q_pow(0.125)
    return (
        pref
        * _euler_qpoch(ctx)
        * qpoch_inf(e2pi(u), ctx)
        * qpoch_inf(ctx.q * e2pi(-u), ctx)
    )


def jacobi_theta_series(u: complex, ctx: QContext) -> complex:
    """Half-integer-index series form of the odd theta; test oracle."""
    tau = ctx.tau

    def term(n: int) -> complex:
        nu = n + 0.5
        return cexp(TWO_PI_I * nu * (u + 0.5) + PI_I * tau * nu * nu)

    return bilateral_sum(term, ctx.trunc)


def dedekind_eta(ctx: QContext) -> complex:
    """eta(tau) = q^{1/24} (q; q)_inf."""
    return ctx.q_pow(1.0 / 24.0) * _euler_qpoch(ctx)


THETA_POLE_GUARD = 1e-10


def require_theta(u: complex, ctx: QContext, what: str = "u") -> complex:
    """jacobi_theta(u) with the quantitative pole guard for division."""
    v = jacobi_theta(u, ctx)
    if abs(v) < THETA_POLE_GUARD * abs(ctx.q_pow(0.125)):
        raise PoleProximity(f"theta({what}) ~ 0 at {what}={u}: lattice pole")
    return v


def require_theta_q(x: complex, ctx: QContext, what: str = "x") -> complex:
    """theta_q(x) with a pole guard for use in denominators."""
    v = theta_q(x, ctx)
    if abs(v) < THETA_POLE_GUARD * (1.0 + abs(x)):
        raise KernelPoleGuard(f"theta_q({what}) ~ 0 at {what}={x}")
    return v


class KernelPoleGuard(PoleProximity):
    """theta_q denominator too small; subclass so callers may rebrand."""


# ---------------------------------------------------------------------------
# bilateral and lattice summation engines
# ---------------------------------------------------------------------------

def bilateral_sum(
    term: Callable[[int], complex],
    policy: TruncationPolicy,
    *,
    consecutive: int = 4,
) -> complex:
    """Sum term(n) over n in Z, interleaving n = 0, +1, -1, +2, -2, ...

    Terms are not monotone in |n|, so the sum stops only after
    `consecutive` shells {+r, -r} in a row fall below eps_term relative
    to the running partial sum.
    """
    eps = policy.eps_term
    total = term(0)
    small = 0
    for r in range(1, policy.max_index + 1):
        shell = term(r) + term(-r)
        total += shell
        if abs(shell) <= eps * max(abs(total), 1e-300):
            small += 1
            if small >= consecutive:
                return total
        else:
            small = 0
    raise NonConvergent("bilateral sum did not settle within max_index")


@lru_cache(maxsize=1024)
def _shell_points(dim: int, r: int) -> np.ndarray:
    """Integer points of sup-norm exactly r in Z^dim, fixed order."""
    if dim == 0:
        return np.zeros((1, 0), dtype=np.int64)
    if r == 0:
        return np.zeros((1, dim), dtype=np.int64)
    rng = np.arange(-r, r + 1, dtype=np.int64)
    grids = np.meshgrid(*([rng] * dim), indexing="ij")
    pts = np.stack([g.ravel() for g in grids], axis=1)
    mask = np.abs(pts).max(axis=1) == r
    return pts[mask]


def lattice_sum(
    dim: int,
    shell_term: Callable[[np.ndarray], np.ndarray],
    policy: TruncationPolicy,
    *,
    consecutive: int = 2,
) -> complex:
    """Sum a vectorized term over Z^dim by expanding sup-norm shells.

    shell_term maps an (k, dim) integer array to k complex terms.  Each
    shell is combined with compensated ordering (numpy sum over the fixed
    enumeration), shells are added in increasing radius, and the sum stops
    after `consecutive` relatively negligible full shells.

    The empty lattice Z^0 sums to exactly 1 (one empty point).
    """
    if dim == 0:
        return complex(np.asarray(shell_term(_shell_points(0, 0))).sum())
    eps = policy.lattice_shell_eps
    total = 0j
    small = 0
    for r in range(0, policy.max_index + 1):
        vals = np.asarray(shell_term(_shell_points(dim, r)))
        shell = complex(vals.sum())
        total += shell
        if r >= 1 and abs(shell) <= eps * max(abs(total), 1e-300):
            small += 1
            if small >= consecutive:
                return total
        else:
            small = 0
    raise NonConvergent("lattice sum exhausted max_index shells")


def _quad_exp_terms(
    pts: np.ndarray, smat: np.ndarray, tau: complex, phase_vec: np.ndarray
) -> np.ndarray:
    """exp(pi i n^t S n tau + 2 pi i phase.n) for rows n of pts."""
    quad = np.einsum("ij,jk,ik->i", pts, smat, pts)
    expo = PI_I * tau * quad + TWO_PI_I * (pts @ phase_vec)
    re = expo.real
    out = np.zeros(len(pts), dtype=complex)
    ok = re >= _EXP_UNDERFLOW
    if np.any(re > _EXP_OVERFLOW):
        raise NonConvergent("lattice term overflow")
    out[ok] = np.exp(expo[ok])
    return out


def lattice_theta(S: SymMatrix, u: Sequence[complex], ctx: QContext) -> complex:
    """theta_S(u; tau) = sum over Z^N of exp(pi i n^t S n tau + 2 pi i (u, n))."""
    uv = np.asarray(u, dtype=complex)
    if S.dim != len(uv) or S.dim < 1:
        raise ValueError("dim(S) must equal len(u) >= 1")
    smat = S.array()

    def shell(pts: np.ndarray) -> np.ndarray:
        return _quad_exp_terms(pts, smat, ctx.tau, uv)

    return lattice_sum(S.dim, shell, ctx.trunc)


def lattice_theta_dual(
    S: SymMatrix, u: Sequence[complex], ctx: QContext
) -> complex:
    """Like lattice_theta but with S^{-1} in both the form and the pairing."""
    uv = np.asarray(u, dtype=complex)
    if S.dim != len(uv) or S.dim < 1:
        raise ValueError("dim(S) must equal len(u) >= 1")
    sinv = S.inverse()
    phase = sinv @ uv  # t(u) S^{-1} n == (S^{-1} u, n) by symmetry

    def shell(pts: np.ndarray) -> np.ndarray:
        return _quad_exp_terms(pts, sinv, ctx.tau, phase)

    return lattice_sum(S.dim, shell, ctx.trunc)


# ---------------------------------------------------------------------------
# basic hypergeometric series
# ---------------------------------------------------------------------------

def q_hypergeometric(
    a_list: Sequence[complex],
    b_list: Sequence[complex],
    x: complex,
    ctx: QContext,
) -> complex:
    """r_phi_s(a_1..a_r; b_1..b_s; q; x) with the ((-1)^n q^C(n,2))^{s-r+1}
    convention.

    Terminates exactly when some upper parameter is q^{-m}; raises
    PoleInDenominator when a lower parameter hits q^{-m} first, and
    DivergentSeries when s - r + 1 < 0 without termination.
    """
    q = ctx.q
    eps = ctx.trunc.eps_term
    x = complex(x)
    a_list = [complex(a) for a in a_list]
    b_list = [complex(b) for b in b_list]
    p = len(b_list) - len(a_list) + 1
    term = 1.0 + 0j
    total = term
    qn = 1.0 + 0j  # q^n
    small = 0
    grow = 0
    for n in range(ctx.trunc.max_index):
        num = 1.0 + 0j
        for a in a_list:
            num *= 1.0 - a * qn
        if abs(num) <= 1e-15 * (1.0 + sum(abs(a) for a in a_list)):
            return total  # terminating series: all later terms vanish
        den = 1.0 + 0j
        for b in b_list:
            den *= 1.0 - b * qn
        if abs(den) <= 1e-13:
            raise PoleInDenominator(
                f"lower parameter hit the q-grid at index {n}"
            )
        factor = num / den * x / (1.0 - q * qn)
        if p != 0:
            factor *= (-qn) ** p
        term = term * factor
        qn *= q
        total += term
        if abs(term) <= eps * max(abs(total), 1e-300):
            small += 1
            if small >= 3:
                return total
        else:
            small = 0
        if p <= 0:
            grow = grow + 1 if abs(factor) > 1.0 else 0
            if (grow >= 8 and abs(term) > 1e8) or abs(term) > 1e200:
                raise DivergentSeries(
                    "q-hypergeometric series diverges "
                    f"(s-r+1={p}, |x|={abs(x):.3g}) and does not terminate"
                )
    raise NonConvergent("q-hypergeometric series did not settle")
