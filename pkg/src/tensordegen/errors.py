"""Exception types shared across the package."""


class TensorDegenError(Exception):
    """Base class for all package errors."""


class ParseError(TensorDegenError, ValueError):
    pass


class DivisionByZero(TensorDegenError, ZeroDivisionError):
    pass


class NotRegularAtZero(TensorDegenError, ValueError):
    """A rational function with a pole at 0 was evaluated at 0."""


class DimensionMismatch(TensorDegenError, ValueError):
    pass


class DimensionOverflow(TensorDegenError):
    """A Kronecker product or power would exceed the size budget."""


class BudgetExceeded(TensorDegenError):
    pass


class InvalidParameter(TensorDegenError, ValueError):
    pass


class InfiniteDimensional(TensorDegenError, ValueError):
    pass


class SingularMatrix(TensorDegenError, ValueError):
    pass


class NotBindingWitness(TensorDegenError, ValueError):
    pass


class NotInvertibleElement(TensorDegenError, ValueError):
    pass


class NotUnital(TensorDegenError, ValueError):
    pass


class NotADegeneration(TensorDegenError, ValueError):
    pass


class PipelineAssertionFailed(TensorDegenError, AssertionError):
    pass


class ZeroVector(TensorDegenError, ValueError):
    pass


class BadPrime(TensorDegenError, ValueError):
    pass


class RuleNotApplicable(TensorDegenError, ValueError):
    pass


class CertificateInvalid(TensorDegenError, ValueError):
    pass


class DependentBasis(TensorDegenError, ValueError):
    pass
