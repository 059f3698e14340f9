"""Exception types shared across the package."""


class McarmaError(Exception):
    """Base class for all errors raised by this package."""


class BadOrders(McarmaError):
    """Order constraint violated (the MA order must satisfy q < p)."""


class BadCovariance(McarmaError):
    """Driving-noise covariance is asymmetric beyond tolerance or indefinite."""


class Unstable(McarmaError):
    """A characteristic root has non-negative real part.

    The offending root is available as ``.root``.
    """

    def __init__(self, root, message=None):
        self.root = complex(root)
        super().__init__(message or f"characteristic root {self.root} has real part >= -1e-10")


class RootClusterAmbiguous(McarmaError):
    """Two root clusters are too close to assign multiplicities reliably."""


class PoleEvaluation(McarmaError):
    """Evaluation point is too close to a pole of the rational spectrum."""


class OmegaZero(McarmaError):
    """The frequency omega = 0 is excluded for this evaluator."""


class SeriesDomain(McarmaError):
    """(delta, omega) lie outside the guaranteed convergence region of the series."""


class BudgetExceeded(McarmaError):
    """The requested tolerance needs more summation terms than the budget allows."""


class DegreeReductionFailed(McarmaError):
    """The trigonometric-polynomial coefficient that must vanish did not."""


class NotPD(McarmaError):
    """A matrix required to be positive definite is singular or indefinite."""


class NoConvergence(McarmaError):
    """Iteration budget exhausted before the requested tolerance was met.

    The last reconstruction residual is available as ``.residual``.
    """

    def __init__(self, residual, message=None):
        self.residual = float(residual)
        super().__init__(message or f"no convergence; last residual {self.residual:.3e}")


class RootOnCircle(McarmaError):
    """A root of the autocovariance generating polynomial lies on the unit circle."""


class UnitModulusEta(McarmaError):
    """Both candidate roots of the unit-disc map have modulus 1."""


class LyapunovIllConditioned(McarmaError):
    """The Lyapunov solve left a residual above tolerance."""


class NotPSD(McarmaError):
    """A matrix required to be positive semidefinite has an eigenvalue below tolerance."""
