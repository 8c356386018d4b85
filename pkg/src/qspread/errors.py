"""Exception types shared across the package."""


class QspreadError(Exception):
    """Base class for all package-specific errors."""


class NotAPrimePower(QspreadError):
    """Raised when a field order is not a prime power."""


class OrderTooLarge(QspreadError):
    """Raised when a requested field order exceeds the supported cap."""


class BudgetExceeded(QspreadError):
    """Raised when an enumeration would exceed the configured point budget."""


class ParameterMismatch(QspreadError):
    """Raised when construction parameters are out of the supported range."""


class NotNested(QspreadError):
    """Raised when a pair of subspaces is required to be nested but is not."""


class DivisorMismatch(QspreadError):
    """Raised when two divisible sets are combined with incompatible divisors."""


class BadPetalCount(QspreadError):
    """Raised when a sunflower union gets the wrong number of petals."""


class RangeError(QspreadError):
    """Raised when a numeric argument falls outside its admissible range."""


class CongruenceViolated(QspreadError):
    """Raised when a required congruence condition fails."""


class WrongResidue(QspreadError):
    """Raised when a requested value has an inadmissible residue."""


class NotApplicable(QspreadError):
    """Raised when a bound or formula does not apply to the given parameters."""


class DepthExceeded(QspreadError):
    """Raised when an iterated reduction is pushed beyond its admissible depth."""


class InconsistentInput(QspreadError):
    """Raised when supplied data fails an internal consistency check."""
