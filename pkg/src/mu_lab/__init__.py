"""mu-lab: special functions around Appell-Lerch sums, q-Borel resummation
and mock modular completions, with a property-based identity verifier.
"""

from .qcore import (
    QContext,
    TruncationPolicy,
    SymMatrix,
    qpoch_inf,
    qpoch_order,
    theta_q,
    jacobi_theta,
    dedekind_eta,
    lattice_theta,
    lattice_theta_dual,
    q_hypergeometric,
)

__all__ = [
    "QContext",
    "TruncationPolicy",
    "SymMatrix",
    "qpoch_inf",
    "qpoch_order",
    "theta_q",
    "jacobi_theta",
    "dedekind_eta",
    "lattice_theta",
    "lattice_theta_dual",
    "q_hypergeometric",
]

__version__ = "0.1.0"
