"""Exception classes raised across the package."""


class VPCalcError(Exception):
    pass


class SingularEvaluation(VPCalcError):
    """A pole or log argument vanished at the evaluation point."""


class DeltaNotEvaluable(VPCalcError):
    pass


class IdenticalCenters(VPCalcError):
    pass


class PoleAtEndpoint(VPCalcError):
    def __init__(self, msg, step=None):
        super().__init__(msg if step is None else f"step {step}: {msg}")
        self.step = step


class DeltaAtEndpoint(VPCalcError):
    def __init__(self, msg, step=None):
        super().__init__(msg if step is None else f"step {step}: {msg}")
        self.step = step


class MissingDerivatives(VPCalcError):
    pass


class NotSeparable(VPCalcError):
    pass


class UnsupportedIntegrand(VPCalcError):
    """The integrand falls outside what the engine can integrate."""


class PoleOutsideInterval(VPCalcError):
    pass


class NonConvergent(VPCalcError):
    pass


class DomainError(VPCalcError, ValueError):
    pass


class ThresholdUndefined(VPCalcError):
    pass


class ParseError(VPCalcError):
    def __init__(self, msg, line, column, expected=()):
        self.line = line
        self.column = column
        self.expected = tuple(expected)
        detail = f" (expected one of: {', '.join(self.expected)})" if self.expected else ""
        super().__init__(f"line {line}, column {column}: {msg}{detail}")
