# \file    errors.py
# \brief   Exception hierarchy shared by every engine and the command line.
#          InputError subclasses map to exit code 2, the
#          MathematicalInconsistency family to exit code 3.


class ToolkitError(Exception):
    exit_code = 1

    def __init__(self, message: str, **context):
        super().__init__(message)
        self.message = message
        self.context = context

    def as_dict(self) -> dict:
        return {
            "error": type(self).__name__,
            "message": self.message,
            "context": self.context,
        }


class InputError(ToolkitError, ValueError):
    exit_code = 2


class SchemaError(InputError):
    pass


class DuplicatePoint(InputError):
    pass


class DimensionUnsupported(InputError):
    pass


class NotFullDimensional(InputError):
    pass


class NotCoplanar(InputError):
    pass


class InvalidSupport(InputError):
    pass


class NotInjective(InputError):
    pass


class ExceptionalCase(InputError):
    pass


class AssumptionViolated(InputError):
    pass


class InfiniteIndex(InputError):
    pass


class NonStabilizing(InputError):
    pass


class NotASummand(InputError):
    pass


class ZeroEntry(InputError):
    pass


class MathematicalInconsistency(ToolkitError):
    """The computation contradicts a claim it was checking."""
    exit_code = 3


class InconsistencyDetected(MathematicalInconsistency):
    pass


class NegativeNodeCount(MathematicalInconsistency):
    pass


class ParityViolation(MathematicalInconsistency):
    pass


class DivisionFailure(MathematicalInconsistency):
    pass
