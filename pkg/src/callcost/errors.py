"""Exception types raised across the package."""


class CallCostError(Exception):
    """Base class for every error raised by callcost."""


class DomainError(CallCostError, ValueError):
    """An argument lies outside the domain of a weighting formula or metric."""


class CorpusError(CallCostError, ValueError):
    """A document collection cannot be indexed (empty, duplicate ids, ...)."""


class IndexFormatError(CallCostError, ValueError):
    """An index file is malformed, has the wrong version, or breaks an invariant.

    ``line`` and ``column`` are 1-based and set when the failure has a
    position in the source text.
    """

    def __init__(self, message, line=None, column=None):
        if line is not None:
            message = f"{message} (line {line}, column {column})"
        super().__init__(message)
        self.line = line
        self.column = column


class EquivalenceError(CallCostError):
    """Inline and call kernels disagree, so a comparison would be meaningless."""

    def __init__(self, message, inline_outcome=None, call_outcome=None):
        super().__init__(message)
        self.inline_outcome = inline_outcome
        self.call_outcome = call_outcome


class ClockError(CallCostError, RuntimeError):
    """The timing clock went backwards during a measurement."""


class DegenerateFitError(CallCostError, ValueError):
    """A least-squares line cannot be fitted (fewer than two distinct x)."""


class ScalingError(CallCostError):
    """A scaling study aborted; ``partial`` holds the points measured so far."""

    def __init__(self, message, partial=None):
        super().__init__(message)
        self.partial = partial if partial is not None else []
