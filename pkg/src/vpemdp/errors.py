"""Exception hierarchy shared by all solver modules."""


class VpeError(Exception):
    """Base class for every error raised by this package."""


class InputError(VpeError):
    """Malformed or invalid user input (CLI exit code 2)."""


class ParseError(InputError):
    def __init__(self, message, line=None):
        self.line = line
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)


class ZeroDenominator(ParseError):
    pass


class ValidationError(InputError):
    def __init__(self, message, line=None, state=None):
        self.line = line
        self.state = state
        prefix = []
        if line is not None:
            prefix.append(f"line {line}")
        if state is not None:
            prefix.append(f"state {state!r}")
        if prefix:
            message = ", ".join(prefix) + ": " + message
        super().__init__(message)


class SingularMatrix(VpeError):
    pass


class UnsupportedStructure(VpeError):
    """Model structure outside the supported class (CLI exit code 3)."""


class ZeroEcPresent(UnsupportedStructure):
    pass


class InfiniteExpectation(UnsupportedStructure):
    pass


class EndComponentPresent(UnsupportedStructure):
    pass


class NegativeWeight(UnsupportedStructure):
    pass


class NonPositiveLambda(InputError):
    pass


class EpsOutOfRange(InputError):
    pass


class TailMismatch(InputError):
    pass


class MissingTailValue(InputError):
    pass


class ZeroVisitDivision(VpeError):
    pass


class BoundTooLarge(VpeError):
    pass


class StepLimitExceeded(VpeError):
    pass
