"""Declarative registry of all displayed identities, with samplers,
residual evaluation and suite execution."""

from . import catalog  # noqa: F401  (registers everything on import)
from .registry import (
    DEFAULT_DOMAIN,
    MODULAR_DOMAIN,
    REGISTRY,
    SUITES,
    TOL_CLASSES,
    DomainSpec,
    IdentitySpec,
    ParamPoint,
    VerificationReport,
    adjudications,
    evaluate_identity,
    rel_residual,
    run_identity,
    run_suite,
    sample_point,
    suite_members,
)

__all__ = [
    "DEFAULT_DOMAIN",
    "MODULAR_DOMAIN",
    "REGISTRY",
    "SUITES",
    "TOL_CLASSES",
    "DomainSpec",
    "IdentitySpec",
    "ParamPoint",
    "VerificationReport",
    "adjudications",
    "evaluate_identity",
    "rel_residual",
    "run_identity",
    "run_suite",
    "sample_point",
    "suite_members",
]
