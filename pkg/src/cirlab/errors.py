"""Exception hierarchy for cirlab."""


class CirlabError(Exception):
    """Base class for every error raised by this package."""


class NonPositiveParameter(CirlabError, ValueError):
    def __init__(self, field, value):
        self.field = field
        self.value = value
        super().__init__(f"{field} must be positive, got {value!r}")


class DegenerateTime(CirlabError, ValueError):
    """The marginal law at t = 0 is a point mass at x0."""


class InvalidTruncation(CirlabError, ValueError):
    pass


class DomainTooSmall(CirlabError, ValueError):
    pass


class QuadratureFailure(CirlabError, ArithmeticError):
    pass


class OrderingViolation(CirlabError, ValueError):
    pass


class PositivityNotGuaranteed(CirlabError, ValueError):
    pass


class NegativeStateEncountered(CirlabError, ArithmeticError):
    def __init__(self, step, value):
        self.step = step
        self.value = value
        super().__init__(f"state became negative before step {step}: {value!r}")


class GridMismatch(CirlabError, ValueError):
    pass


class OutOfDomain(CirlabError, ValueError):
    pass


class NonPositiveFactor(CirlabError, ArithmeticError):
    def __init__(self, step, factor):
        self.step = step
        self.factor = factor
        super().__init__(f"1 + Q_{step} = {factor!r} is not positive")


class SeriesNotConverged(CirlabError, ArithmeticError):
    pass


class ConfigInvalid(CirlabError, ValueError):
    pass


class IoFailure(CirlabError, OSError):
    pass
