"""Exception hierarchy shared across the package."""


class FgsosError(Exception):
    """Base class for all errors raised by fgsos."""


class MalformedInputError(FgsosError, ValueError):
    """Bad letters, mismatched generator counts or dimensions, invalid JSON."""


class NotHermitianError(FgsosError):
    """A matrix required to be Hermitian is not, beyond tolerance."""


class NotPsdError(FgsosError):
    """A matrix required to be positive semidefinite has a significantly negative eigenvalue."""


class BasisTooSmallError(FgsosError):
    """The word basis cannot reach the support of the target polynomial."""


class ContractionViolationError(FgsosError):
    """A compressed generator exceeds operator norm 1 beyond tolerance."""


class DegenerateNumericsError(FgsosError):
    """An internal numerical identity failed beyond its tolerance."""


class WitnessExtractionError(FgsosError):
    """The constructed representation did not reproduce a negative value."""


class CertificateError(FgsosError):
    """A certificate violates one of its structural invariants."""


class BudgetExceededError(FgsosError):
    """An exhaustive evaluation would exceed the configured budget."""
