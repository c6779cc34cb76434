"""Exception hierarchy shared across the package."""


class MSRError(Exception):
    """Base class for all errors raised by msrcodes."""


class FieldError(MSRError, ValueError):
    """Invalid field description or element."""


class ParameterError(MSRError, ValueError):
    """A code parameter tuple violates a construction constraint.

    ``constraint`` names the violated condition so callers (and the CLI) can
    tell the cases apart without parsing the message.
    """

    def __init__(self, constraint: str, message: str):
        super().__init__(message)
        self.constraint = constraint


class SingularMatrixError(MSRError, ArithmeticError):
    """A linear system that should be invertible was singular."""


class IntegrityError(MSRError):
    """Repair could not produce data consistent with the code.

    Raised when more helpers lied than the error budget allows.  ``group``
    and ``slot`` locate the failing sub-repair when known; ``transcript``
    is attached by the harness.
    """

    def __init__(self, message: str, group=None, slot=None):
        super().__init__(message)
        self.group = group
        self.slot = slot
        self.transcript = None


class DecodingAmbiguityError(IntegrityError):
    """Two different codewords were consistent with the observation.

    Cannot happen within the error budget; seeing it means either the
    budget was exceeded or the parameters are broken.
    """
