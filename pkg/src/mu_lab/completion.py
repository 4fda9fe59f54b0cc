"""Non-holomorphic completion machinery: the Gaussian odd error function E,
the unary series R, the Mordell integral h, and the completed functions
built from them (mu-tilde, R_N, M_N-tilde, H_N, h_N, mu_N-tilde).

Numerical notes
---------------
* R mixes sgn(nu) - E(...) differences against q^{-nu^2/2} blowup.  Each
  term is assembled in a single exponential so nothing overflows, and the
  difference is computed through erfcx whenever sgn(nu) matches the sign
  of the E argument (the cancellation-free complementary form).
* h is an entire-integrand Gaussian integral; composite Gauss-Legendre
  panels with a tail cutoff from the integrand envelope give spectral
  accuracy, and the panel count is doubled until the value stabilizes.
"""

from __future__ import annotations

import cmath
import math
from functools import lru_cache
from typing import Sequence

import numpy as np
from scipy.special import erf, erfcx

from .errors import NonConvergent, QuadratureFailure
from .mu import MN_vector, dft_matrix, mu_zwegers, muN_eval
from .qcore import PI_I, TWO_PI_I, QContext, cexp, e2pi, minus_i_tau_pow

_SQRT_PI = math.sqrt(math.pi)


def gauss_E(x: float) -> float:
    """E(x) = 2 * integral_0^x exp(-pi z^2) dz = erf(sqrt(pi) x).

    Odd, strictly increasing, with limits +-1 at +-infinity.
    """
    return float(erf(_SQRT_PI * x))


def r_function(u: complex, ctx: QContext) -> complex:
    """R(u; tau) = sum over nu in Z + 1/2 of
        {sgn(nu) - E((nu + a) sqrt(2t))} (-1)^{nu - 1/2} e^{-2 pi i nu u}
        q^{-nu^2 / 2},
    with t = Im(tau) and a = Im(u)/Im(tau).

    When sgn(nu) agrees with the sign of (nu + a) the brace is an erfc
    tail; it is folded into the term's exponential through erfcx so the
    Gaussian decay e^{-pi t ((nu+a)^2 + a^2)} appears explicitly and no
    intermediate overflows.
    """
    u = complex(u)
    t = ctx.tau.imag
    x_re = ctx.tau.real
    a = u.imag / t
    eps = ctx.trunc.eps_term

    def term(nu: float, sign_exp: int) -> complex:
        s = 1.0 if nu > 0 else -1.0
        beta = (nu + a) * math.sqrt(2.0 * t)
        # imaginary part of -2 pi i nu u - pi i nu^2 tau
        im = -2.0 * math.pi * nu * u.real - math.pi * nu * nu * x_re
        if s * beta >= 0.0:
            mag = -math.pi * t * ((nu + a) ** 2 + a * a)
            if mag < -745.0:
                return 0j
            val = s * erfcx(_SQRT_PI * abs(beta)) * math.exp(mag)
            return val * sign_exp * cmath.exp(1j * im)
        brace = s - gauss_E(beta)
        re = 2.0 * math.pi * nu * u.imag + math.pi * nu * nu * t
        return brace * sign_exp * cexp(re + 1j * im)

    total = 0j
    small = 0
    for k in range(ctx.trunc.max_index):
        nu = k + 0.5
        sign_exp = -1 if k % 2 else 1  # (-1)^{nu - 1/2} at nu = k + 1/2
        # at -nu the exponent is -k - 1, so the sign flips
        shell = term(nu, sign_exp) + term(-nu, -sign_exp)
        total += shell
        if abs(shell) <= eps * max(abs(total), 1e-300):
            small += 1
            if small >= 4 and k >= max(4, abs(a) + 2):
                return total
        else:
            small = 0
    raise NonConvergent("R series did not settle within max_index")


@lru_cache(maxsize=8)
def _gl_nodes(n: int) -> tuple[np.ndarray, np.ndarray]:
    return np.polynomial.legendre.leggauss(n)


def mordell_h(u: complex, ctx: QContext) -> complex:
    """Mordell integral h(u; tau) = integral over R of
        exp(pi i x^2 tau - 2 pi x u) / cosh(pi x) dx.

    The integrand is entire in x and falls off like
    exp(-pi t x^2 + 2 pi |Re u| |x| - pi |x|); the cutoff X is chosen so
    the neglected tail is below eps relative to the envelope peak, and
    composite 32-node Gauss-Legendre panels are doubled until the result
    is stable to 1e-12.
    """
    u = complex(u)
    tau = ctx.tau
    t = tau.imag
    b = abs(u.real)
    # envelope exp(-pi t x^2 + 2 pi b x): peak exp(pi b^2 / t) at x = b/t
    log_eps = math.log(ctx.trunc.eps_term) - 5.0
    peak = math.pi * b * b / t
    disc = b + math.sqrt(max(b * b + t * (peak - log_eps) / math.pi, 0.0))
    X = max(8.0 / math.sqrt(min(t, 1.0)), disc / t)

    nodes, weights = _gl_nodes(32)

    def integrate(panels: int) -> complex:
        edges = np.linspace(-X, X, panels + 1)
        mids = 0.5 * (edges[1:] + edges[:-1])
        half = 0.5 * (edges[1] - edges[0])
        xs = (mids[:, None] + half * nodes[None, :]).ravel()
        ws = np.tile(weights, panels) * half
        expo = PI_I * tau * xs * xs - 2.0 * math.pi * xs * u
        vals = np.exp(expo) / np.cosh(math.pi * xs)
        return complex(np.sum(vals * ws))

    panels = max(8, int(math.ceil(X)))
    prev = integrate(panels)
    for _ in range(6):
        panels *= 2
        cur = integrate(panels)
        if abs(cur - prev) <= 1e-12 * max(abs(cur), 1.0):
            return cur
        prev = cur
    raise QuadratureFailure(
        f"h(u={u}, tau={tau}) did not stabilize under panel doubling"
    )


# ---------------------------------------------------------------------------
# completed functions
# ---------------------------------------------------------------------------


def mu_completed(u: complex, v: complex, ctx: QContext) -> complex:
    """mu-tilde(u, v) = mu(u, v) + (i/2) R(u - v)."""
    return mu_zwegers(u, v, ctx) + 0.5j * r_function(u - v, ctx)


def RN_vector(u: complex, N: int, ctx: QContext) -> np.ndarray:
    """R_N(u; tau)[k] = (-1)^k e^{-2 pi i k u / N} q^{-k^2/2N}
    R(u + k tau + (N+1)/2; N tau), k = 0..N-1."""
    if N < 1:
        raise ValueError("N must be >= 1")
    ctxN = ctx.with_tau(N * ctx.tau)
    out = np.empty(N, dtype=complex)
    for k in range(N):
        pref = (-1) ** k * e2pi(-k * u / N) * ctx.q_pow(-k * k / (2.0 * N))
        out[k] = pref * r_function(u + k * ctx.tau + (N + 1) / 2.0, ctxN)
    return out


def MN_completed(us: Sequence[complex], ctx: QContext) -> np.ndarray:
    """M_N-tilde = M_N + (i/2) R_N(u), u = u_0 + ... + u_N."""
    us = [complex(x) for x in us]
    N = len(us) - 1
    return MN_vector(us, ctx) + 0.5j * RN_vector(sum(us), N, ctx)


def HN_vector(u: complex, N: int, ctx: QContext) -> np.ndarray:
    """H_N(u; tau)[k] = (-1)^k e^{-2 pi i k u / N} q^{-k^2/2N}
    h(u + k tau - (N-1)/2; N tau), k = 0..N-1."""
    if N < 1:
        raise ValueError("N must be >= 1")
    ctxN = ctx.with_tau(N * ctx.tau)
    out = np.empty(N, dtype=complex)
    for k in range(N):
        pref = (-1) ** k * e2pi(-k * u / N) * ctx.q_pow(-k * k / (2.0 * N))
        out[k] = pref * mordell_h(u + k * ctx.tau - (N - 1) / 2.0, ctxN)
    return out


def hN_combination(u: complex, N: int, m: int, ctx: QContext) -> complex:
    """h_N(u; tau) = sum_{j=1}^m (-1)^j e^{pi i (2j-1)^2 / 4m}
    h(u + (2j-1)/(2m) - 1/2; N tau - 1/m)."""
    if N < 1 or m < 1:
        raise ValueError("N and m must be >= 1")
    ctxm = ctx.with_tau(N * ctx.tau - 1.0 / m)
    total = 0j
    for j in range(1, m + 1):
        pref = (-1) ** j * cexp(PI_I * (2 * j - 1) ** 2 / (4.0 * m))
        total += pref * mordell_h(u + (2 * j - 1) / (2.0 * m) - 0.5, ctxm)
    return total


def muN_completed(us: Sequence[complex], ctx: QContext) -> complex:
    """mu_N-tilde = mu_N + (i/2) R(u + (N+1)/2; N tau)."""
    us = [complex(x) for x in us]
    N = len(us) - 1
    u = sum(us)
    ctxN = ctx.with_tau(N * ctx.tau)
    return muN_eval(us, ctx) + 0.5j * r_function(u + (N + 1) / 2.0, ctxN)


def HtildeN(us: Sequence[complex], ctx: QContext) -> np.ndarray:
    """The modular defect of M_N:

        (-i)^{N+1} e^{pi i u^2 / N tau} / (sqrt(N) sqrt(-i tau))
        * [zeta_N^{-jk}] M_N(u_0/tau, ..., u_N/tau; -1/tau)
        - M_N(u_0, ..., u_N; tau),

    a function of u = u_0 + ... + u_N alone.
    """
    us = [complex(x) for x in us]
    N = len(us) - 1
    u = sum(us)
    tau = ctx.tau
    ctx_inv = ctx.with_tau(-1.0 / tau)
    pref = (
        (-1j) ** (N + 1)
        * cexp(PI_I * u * u / (N * tau))
        / (math.sqrt(N) * cmath.sqrt(-1j * tau))
    )
    M_inv = MN_vector([x / tau for x in us], ctx_inv)
    return pref * (dft_matrix(N, -1) @ M_inv) - MN_vector(us, ctx)
