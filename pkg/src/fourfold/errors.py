"""Exception hierarchy for the calculus engine."""


class FourfoldError(Exception):
    """Base class for all engine errors."""


class UnknownGenerator(FourfoldError, KeyError):
    pass


class InvalidHomeoType(FourfoldError, ValueError):
    pass


class NonIntegralDimension(FourfoldError, ArithmeticError):
    """(c1^2 - sigma) is not divisible by 4; the class was not characteristic."""


class UnsupportedManifold(FourfoldError, ValueError):
    pass


class UnsupportedMultiplicity(FourfoldError, ValueError):
    pass


class UnknownNucleus(FourfoldError, KeyError):
    pass


class NucleusConsumed(FourfoldError):
    pass


class SymplecticRequired(FourfoldError):
    pass


class PositivityRequired(FourfoldError):
    """Operation needs b+ > 1 on the host."""


class NoRewrite(FourfoldError):
    pass


class InvalidIndex(FourfoldError, ValueError):
    pass


class NoStableContraction(FourfoldError):
    pass


class RecursionObstructed(FourfoldError):
    pass


class IncompatibleFamilies(FourfoldError):
    pass


class NotAnIsometry(FourfoldError):
    pass


class DimensionMismatch(FourfoldError):
    pass


class NotTransverse(FourfoldError):
    pass


class NotACycle(FourfoldError):
    pass


class SchemaError(FourfoldError, ValueError):
    """Malformed JSON document."""
