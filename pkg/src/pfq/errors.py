"""Exception hierarchy shared by every pfq module."""


class PfqError(Exception):
    """Base class for all pfq errors."""


# field tower
class NonPrimeError(PfqError, ValueError):
    pass


class EvenCharacteristicError(PfqError, ValueError):
    pass


class IrreducibleSearchFailure(PfqError, RuntimeError):
    """No irreducible modulus found; reaching this is a bug."""


class NotInBaseFieldError(PfqError, ValueError):
    pass


class ZeroInputError(PfqError, ValueError):
    pass


class ParseError(PfqError, ValueError):
    pass


# polynomials, rational functions, Mobius maps
class ZeroPolynomialError(PfqError, ValueError):
    pass


class ShapeViolation(PfqError, ValueError):
    pass


class BothZeroError(PfqError, ValueError):
    pass


class DegenerateParameters(PfqError, ValueError):
    pass


class GammaNotInMuError(PfqError, ValueError):
    pass


class DeltaInBaseFieldError(PfqError, ValueError):
    pass


class CoefficientsNotInBaseField(PfqError, ArithmeticError):
    pass


# quadrinomial data and geometry
class AllZeroCoefficients(PfqError, ValueError):
    pass


class ConstantFunctionError(PfqError, ValueError):
    pass


class PreimageOutsideWorkingField(PfqError, ArithmeticError):
    pass


class ConstantGError(PfqError, ValueError):
    pass


class BothUVZeroError(PfqError, ValueError):
    pass


class NonSeparableError(PfqError, ValueError):
    pass


# classifier
class PreconditionViolated(PfqError, ValueError):
    pass


class WitnessVerificationFailed(PfqError, AssertionError):
    """The constructed equivalence did not check out pointwise. Always a bug."""


class KDoesNotDivideL(PfqError, ValueError):
    pass


# oracle
class EpsilonConstraintViolated(PfqError, ValueError):
    pass


class ZetaInBaseFieldError(PfqError, ValueError):
    pass


class SingularLinearMap(PfqError, ValueError):
    pass


# character sums
class IsDthPowerError(PfqError, ValueError):
    pass


class ZeroFunctionError(PfqError, ValueError):
    pass


class KDividesL(PfqError, ValueError):
    pass


class EpsilonInMuError(PfqError, ValueError):
    pass


class XiInBaseFieldError(PfqError, ValueError):
    pass


class EpsilonIsMinusOne(PfqError, ValueError):
    pass


class TOutOfRangeError(PfqError, ValueError):
    pass


# cli
class BudgetExceeded(PfqError, RuntimeError):
    pass
