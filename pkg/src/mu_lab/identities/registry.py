"""Identity registry machinery: parameter sampling, residual evaluation,
suite runs and verification reports.

Every identity is registered declaratively (see catalog.py) with a
deterministic parameter sampler and a residual evaluator.  Reports are
pure functions of (suite, seed, n_samples) up to wall time.
"""

from __future__ import annotations

import math
import os
import time
import zlib
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field, asdict
from typing import Callable, Iterable, Sequence

import numpy as np

from ..errors import MuLabError, SamplingExhausted
from ..qcore import QContext, cexp, e2pi, jacobi_theta, theta_q

TOL_CLASSES = {
    "EXACT": 1e-12,
    "FOUNDATION": 1e-10,
    "OPERATOR": 1e-10,
    "SERIES": 1e-9,
    "MODULAR": 1e-8,
    "LATTICE": 1e-7,
    "QUADRATURE": 1e-6,
}

SUITES = (
    "theta",
    "mu",
    "genmu",
    "mulmu",
    "MN",
    "completion",
    "modular",
    "borel",
    "appendix",
    "all",
)


@dataclass(frozen=True)
class DomainSpec:
    """Sampling boxes and pole guards for identity parameters."""

    tau_re: tuple = (-0.3, 0.3)
    tau_im: tuple = (0.8, 1.4)
    u_re: tuple = (-0.45, 0.45)
    u_im: tuple = (-0.3, 0.3)
    alpha_re: tuple = (0.25, 0.75)
    alpha_im: tuple = (-0.2, 0.2)
    lam_mod: tuple = (0.4, 1.3)
    theta_guard: float = 0.02
    kernel_guard: float = 0.02
    max_resamples: int = 100
    # "modular": keep Im(-1/tau) comfortable too.
    # ("mobius", c): tau near (1+i)/c so tau and -tau/(c*tau - 1) both work.
    tau_mode: object = "default"


DEFAULT_DOMAIN = DomainSpec()
MODULAR_DOMAIN = DomainSpec(tau_re=(-0.15, 0.15), tau_im=(0.85, 1.2),
                            tau_mode="modular")


@dataclass(frozen=True)
class ParamPoint:
    """One sampled evaluation point; all identity evaluators read from it."""

    ctx: QContext
    us: tuple = ()
    alpha: complex | None = None
    z: complex | None = None
    y: complex | None = None
    lambdas: tuple = ()
    N: int | None = None
    m: int | None = None
    index: int = 0

    @property
    def tau(self) -> complex:
        return self.ctx.tau


@dataclass(frozen=True)
class IdentitySpec:
    """One registered identity (or one reading of an ambiguous display)."""

    id: str
    tag: str
    suite: str
    tol_class: str
    evaluate: Callable[[ParamPoint], float]
    n_u: object = 0  # int, or "N+1" for families
    Ns: tuple = ()
    ms: tuple = ()
    needs_alpha: bool = False
    needs_z: bool = False
    needs_y: bool = False
    n_lambda: object = 0  # int, or "N+1"
    domain: DomainSpec = DEFAULT_DOMAIN
    guard: Callable[[ParamPoint], bool] | None = None
    modular: bool = False
    gating: bool = True
    adjudication: str | None = None
    note: str = ""

    @property
    def tol(self) -> float:
        return TOL_CLASSES[self.tol_class]


REGISTRY: dict[str, IdentitySpec] = {}


def register(spec: IdentitySpec) -> IdentitySpec:
    if spec.id in REGISTRY:
        raise ValueError(f"duplicate identity id {spec.id}")
    if spec.suite not in SUITES:
        raise ValueError(f"unknown suite {spec.suite}")
    if spec.tol_class not in TOL_CLASSES:
        raise ValueError(f"unknown tolerance class {spec.tol_class}")
    REGISTRY[spec.id] = spec
    return spec


def rel_residual(lhs, rhs) -> float:
    """|LHS - RHS| / max(|LHS|, |RHS|, floor); vectors use the sup norm."""
    a = np.atleast_1d(np.asarray(lhs, dtype=complex))
    b = np.atleast_1d(np.asarray(rhs, dtype=complex))
    scale = max(float(np.abs(a).max()), float(np.abs(b).max()), 1e-30)
    return float(np.abs(a - b).max() / scale)


def _draw_tau(rng: np.random.Generator, dom: DomainSpec, c: int) -> complex:
    mode = dom.tau_mode
    if isinstance(mode, tuple) and mode[0] == "mobius":
        s_re = rng.uniform(-0.15, 0.15)
        s_im = rng.uniform(0.9, 1.25)
        return complex(1.0 + s_re, s_im) / c
    re = rng.uniform(*dom.tau_re)
    im = rng.uniform(*dom.tau_im)
    return complex(re, im)


def _mobius_c(spec: IdentitySpec, N: int, m: int) -> int:
    mode = spec.domain.tau_mode
    if isinstance(mode, tuple) and mode[0] == "mobius":
        if mode[1] == "mN":
            return max(1, m * N)
        if mode[1] == "2mN":
            return max(1, 2 * m * N)
        return int(mode[1])
    return 1


def sample_point(spec: IdentitySpec, seed: int, index: int) -> ParamPoint:
    """Deterministic function of (identity, seed, index); rejection-samples
    until all pole guards pass or SamplingExhausted."""
    dom = spec.domain
    salt = zlib.crc32(spec.id.encode())
    rng = np.random.default_rng([seed & 0x7FFFFFFF, index, salt])
    N = spec.Ns[index % len(spec.Ns)] if spec.Ns else None
    if spec.ms:
        step = max(len(spec.Ns), 1)
        m = spec.ms[(index // step) % len(spec.ms)]
    else:
        m = None

    def _count(raw) -> int:
        if raw == "N+1":
            return N + 1
        if raw == "N":
            return N
        if raw == "N-1":
            return N - 1
        return int(raw)

    n_u = _count(spec.n_u)
    n_lam = _count(spec.n_lambda)

    for _ in range(dom.max_resamples):
        tau = _draw_tau(rng, dom, _mobius_c(spec, N or 1, m or 1))
        ctx = QContext(tau)
        scale_u = 1.0 / _mobius_c(spec, N or 1, m or 1)
        us = tuple(
            complex(rng.uniform(*dom.u_re), rng.uniform(*dom.u_im)) * scale_u
            for _ in range(n_u)
        )
        alpha = (
            complex(rng.uniform(*dom.alpha_re), rng.uniform(*dom.alpha_im))
            if spec.needs_alpha
            else None
        )
        z = (
            complex(rng.uniform(*dom.u_re), rng.uniform(*dom.u_im)) * scale_u
            if spec.needs_z
            else None
        )
        y = (
            rng.uniform(0.5, 1.5) * e2pi(rng.uniform(-0.5, 0.5))
            if spec.needs_y
            else None
        )
        lams = tuple(
            rng.uniform(*dom.lam_mod) * e2pi(rng.uniform(-0.5, 0.5))
            for _ in range(n_lam)
        )
        point = ParamPoint(
            ctx=ctx, us=us, alpha=alpha, z=z, y=y, lambdas=lams,
            N=N, m=m, index=index,
        )
        if _passes_guards(spec, point):
            return point
    raise SamplingExhausted(
        f"no admissible point for {spec.id} (seed={seed}, index={index})"
    )


def _passes_guards(spec: IdentitySpec, p: ParamPoint) -> bool:
    dom = spec.domain
    qs = abs(p.ctx.q_pow(0.125))
    for u in p.us:
        if abs(jacobi_theta(u, p.ctx)) < dom.theta_guard * qs:
            return False
    for i in range(1, len(p.lambdas)):
        w = p.lambdas[i - 1] / p.lambdas[i]
        if abs(theta_q(w, p.ctx)) < dom.kernel_guard:
            return False
    if spec.guard is not None and not spec.guard(p):
        return False
    return True


def evaluate_identity(identity_id: str, point: ParamPoint) -> float:
    """Relative residual of the identity at the point; evaluation errors
    propagate annotated with the id and point."""
    spec = REGISTRY.get(identity_id)
    if spec is None:
        raise KeyError(f"unknown identity id {identity_id!r}")
    try:
        return float(spec.evaluate(point))
    except MuLabError as exc:
        raise type(exc)(
            f"[{identity_id} @ tau={point.tau}, us={point.us}] {exc}"
        ) from exc


@dataclass
class VerificationReport:
    """Aggregated residual statistics for one identity."""

    id: str
    tag: str
    suite: str
    seed: int
    n_samples: int
    max_rel_residual: float
    mean_rel_residual: float
    tol: float
    passed: bool
    wall_time: float
    gating: bool = True
    adjudication: str | None = None
    note: str = ""

    def to_json(self) -> dict:
        return {
            "id": self.id,
            "paper_tag": self.tag,
            "suite": self.suite,
            "max_rel_residual": self.max_rel_residual,
            "mean_rel_residual": self.mean_rel_residual,
            "tol": self.tol,
            "pass": self.passed,
            "gating": self.gating,
            "note": self.note,
        }


def suite_members(suite: str) -> list[IdentitySpec]:
    if suite == "all":
        return list(REGISTRY.values())
    if suite == "modular":
        return [s for s in REGISTRY.values() if s.modular]
    if suite not in SUITES:
        raise KeyError(f"unknown suite {suite!r}")
    return [s for s in REGISTRY.values() if s.suite == suite]


def _max_threads() -> int:
    try:
        return max(1, int(os.environ.get("MU_LAB_MAX_THREADS", "1")))
    except ValueError:
        return 1


def run_identity(
    spec: IdentitySpec, seed: int, n_samples: int, tol_override: float | None = None
) -> VerificationReport:
    tol = tol_override if tol_override is not None else spec.tol
    t0 = time.perf_counter()
    note = ""
    residuals: list[float] = []
    if n_samples <= 0:
        note = "no samples"
        return VerificationReport(
            id=spec.id, tag=spec.tag, suite=spec.suite, seed=seed,
            n_samples=0, max_rel_residual=0.0, mean_rel_residual=0.0,
            tol=tol, passed=True, wall_time=time.perf_counter() - t0,
            gating=spec.gating, adjudication=spec.adjudication, note=note,
        )

    def one(index: int) -> float:
        point = sample_point(spec, seed, index)
        return evaluate_identity(spec.id, point)

    threads = min(_max_threads(), n_samples)
    try:
        if threads > 1:
            with ThreadPoolExecutor(max_workers=threads) as pool:
                residuals = list(pool.map(one, range(n_samples)))
        else:
            residuals = [one(i) for i in range(n_samples)]
        passed = max(residuals) <= tol
    except MuLabError as exc:
        residuals = residuals or [math.inf]
        residuals.append(math.inf)
        passed = False
        note = f"{type(exc).__name__}: {exc}"
    return VerificationReport(
        id=spec.id, tag=spec.tag, suite=spec.suite, seed=seed,
        n_samples=n_samples,
        max_rel_residual=max(residuals),
        mean_rel_residual=float(np.mean([r for r in residuals if r != math.inf] or [math.inf])),
        tol=tol, passed=passed, wall_time=time.perf_counter() - t0,
        gating=spec.gating, adjudication=spec.adjudication, note=note,
    )


def run_suite(
    suite: str,
    seed: int = 1,
    n_samples: int = 20,
    tol_override: float | None = None,
) -> list[VerificationReport]:
    """Evaluate every member identity of the suite at n_samples points.

    Individual identity errors are recorded as failing reports with a
    diagnostic note; they never abort the suite.
    """
    members = sorted(suite_members(suite), key=lambda s: s.id)
    return [run_identity(s, seed, n_samples, tol_override) for s in members]


def adjudications(reports: Iterable[VerificationReport]) -> dict[str, dict]:
    """Group reading-pair reports and say which readings pass."""
    groups: dict[str, dict] = {}
    for r in reports:
        if r.adjudication is None:
            continue
        g = groups.setdefault(
            r.adjudication, {"readings": [], "passing": [], "resolved": False}
        )
        g["readings"].append(r.id)
        if r.passed:
            g["passing"].append(r.id)
    for g in groups.values():
        g["resolved"] = len(g["passing"]) == 1
    return groups
