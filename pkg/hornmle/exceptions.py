class HornMLEError(Exception):
    """Base class of every error raised by hornmle."""


class InputError(HornMLEError, ValueError):
    """Malformed or inadmissible input; the command line maps it to exit code 2."""


# exactalg
class DivisionByZero(HornMLEError, ZeroDivisionError):
    pass


class NotDivisible(HornMLEError, ArithmeticError):
    """Exact polynomial division left a remainder."""


class NotHomogeneous(InputError):
    pass


# horn
class InvalidHornMatrix(InputError):
    pass


class PoleAtInput(HornMLEError, ZeroDivisionError):
    """A linear form raised to a negative power vanishes at the input point."""


class SearchBudgetExceeded(HornMLEError):
    pass


# stagedtree
class InvalidTree(InputError):
    def __init__(self, violations):
        if isinstance(violations, str):
            violations = [violations]
        self.violations = list(violations)
        super().__init__('; '.join(self.violations))


class InvalidParameter(InputError):
    pass


class ZeroDenominator(HornMLEError, ZeroDivisionError):
    pass


class SizeMismatch(InputError):
    pass


class CyclicGraph(InputError):
    pass


class NotChordal(InputError):
    pass


# disctriple
class MarkedTermAbsent(InputError):
    pass


class InvalidToricMatrix(InputError):
    pass


class OnesNotInRowSpan(InvalidToricMatrix):
    """The all-ones vector is not in the row span, so no toric matrix can carry the pair."""
