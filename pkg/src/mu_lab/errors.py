"""Exception hierarchy for numerical evaluation failures.

Every error carries enough context (argument values) to reproduce the
failing evaluation from the message alone.
"""


class MuLabError(Exception):
    """Base class for all evaluation errors raised by this package."""


class ZeroArgument(MuLabError):
    """An argument sits exactly on a forbidden value (e.g. theta_q(0))."""


class PoleError(MuLabError):
    """A q-Pochhammer denominator vanishes (order-alpha symbol undefined)."""


class PoleProximity(MuLabError):
    """An evaluation point is too close to a pole of the target function."""


class KernelPole(MuLabError):
    """A q-Laplace kernel theta_q(...) vanishes along the summed spiral."""


class NonConvergent(MuLabError):
    """A truncated sum failed to converge within the index budget."""


class DivergentSeries(MuLabError):
    """A q-hypergeometric series diverges and does not terminate."""


class PoleInDenominator(MuLabError):
    """A lower q-hypergeometric parameter makes a denominator vanish."""


class QuadratureFailure(MuLabError):
    """Numerical quadrature could not reach the requested accuracy."""


class ParameterDegeneracy(MuLabError):
    """Connection coefficients blow up (a_r/a_j on the q-power grid)."""


class SamplingExhausted(MuLabError):
    """Rejection sampling failed to find a point satisfying all guards."""
