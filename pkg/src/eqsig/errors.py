"""Exception hierarchy shared by all modules."""


class EqsigError(Exception):
    """Base class for every error raised by the package."""


class NonSymmetric(EqsigError):
    pass


class NotNormal(EqsigError):
    pass


class BadTransversal(EqsigError):
    pass


class CharacterNormNotIntegral(EqsigError):
    pass


class IncompleteIrrepList(EqsigError):
    pass


class ConjugationLeavesSubgroup(EqsigError):
    pass


class SchurDimensionAnomaly(EqsigError):
    pass


class SectionMismatch(EqsigError):
    pass


class NotLiftable(EqsigError):
    pass


class NotPureTensor(EqsigError):
    pass


class NotRegular(EqsigError):
    pass


class NotMaximal(EqsigError):
    pass


class NotClosed(EqsigError):
    def __init__(self, message, witness=None):
        super().__init__(message)
        self.witness = witness


class NotOrientable(EqsigError):
    def __init__(self, message, witness=None):
        super().__init__(message)
        self.witness = witness


class ApcPropertyFailure(EqsigError):
    def __init__(self, prop, degree, message=""):
        super().__init__(f"APC property ({prop}) fails in degree {degree}" + (f": {message}" if message else ""))
        self.prop = prop
        self.degree = degree


class OrientationReversed(EqsigError):
    pass


class DualityFailure(EqsigError):
    def __init__(self, degree, message=""):
        super().__init__(f"Poincare duality fails in degree {degree}" + (f": {message}" if message else ""))
        self.degree = degree


class NonFreeAction(EqsigError):
    pass


class UnknownFixture(EqsigError):
    pass


class ParseError(EqsigError):
    def __init__(self, message, field=None):
        super().__init__(f"{field}: {message}" if field else message)
        self.field = field


class ValidationError(EqsigError):
    pass


class TaskError(EqsigError):
    pass
