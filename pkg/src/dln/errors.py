"""Exception hierarchy. Everything raised on bad input derives from DlnError
so the CLI can map domain failures to a single exit code."""


class DlnError(ValueError):
    """Base class for all domain errors."""


class NonFinite(DlnError):
    """Matrix or vector contains NaN/Inf entries."""


class NotOrthogonal(DlnError):
    """Matrix fails the orthogonality tolerance."""


class RankDeficient(DlnError):
    """Smallest singular value is below the full-rank floor."""


class NonPositive(DlnError):
    """A quantity that must be strictly positive is not."""


class DegenerateSpectrum(DlnError):
    """Singular values too close for an operation that needs distinct ones."""


class DegenerateWidth(DlnError):
    """Operation undefined at width d = 1."""


class DomainViolation(DlnError):
    """Spectral-energy convexity/monotonicity spot check failed."""


class NoBracket(DlnError):
    """Bisection could not bracket a sign change."""


class OutOfDomain(DlnError):
    """Argument outside the supported domain (e.g. |z| >= 1 for 2F1)."""


class NoConvergence(DlnError):
    """Series failed to converge within the term cap."""


class StepFailure(DlnError):
    """ODE step size underflowed."""
