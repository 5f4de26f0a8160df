"""Exception hierarchy for ssdkit."""


class SSDError(Exception):
    """Base class for all ssdkit errors."""


class AsymmetricForm(SSDError):
    pass


class NotBanach(SSDError):
    pass


class NotBanachSpace(SSDError):
    pass


class DimensionMismatch(SSDError, ValueError):
    pass


class EmptySet(SSDError, ValueError):
    pass


class UnknownBuiltin(SSDError, KeyError):
    def __str__(self):
        return Exception.__str__(self)


class InvalidParams(SSDError, ValueError):
    pass


class OffGridPoint(SSDError, ValueError):
    pass


class DegenerateQuadratic(SSDError):
    pass


class ImproperFunction(SSDError, ValueError):
    pass


class EmptySearchGrid(SSDError, ValueError):
    pass


class FBelowQ(SSDError):
    """Raised when f < q - tol at some candidate; ``witness`` holds the point."""

    def __init__(self, message, witness=None, value=None):
        super().__init__(message)
        self.witness = witness
        self.value = value


class LPNumericalFailure(SSDError):
    def __init__(self, message, condition=None):
        super().__init__(message)
        self.condition = condition


class EmptyPqSet(SSDError):
    pass


class SingularForm(SSDError):
    pass


class NoDualStructure(SSDError):
    pass


class NotBanachDual(SSDError):
    pass


class ConfigError(SSDError):
    def __init__(self, message, key=None, line=None):
        where = []
        if key is not None:
            where.append(f"key '{key}'")
        if line is not None:
            where.append(f"line {line}")
        full = f"{message} ({', '.join(where)})" if where else message
        super().__init__(full)
        self.key = key
        self.line = line


class NotQPositive(SSDError):
    def __init__(self, message, violation=None):
        super().__init__(message)
        self.violation = violation
