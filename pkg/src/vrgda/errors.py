"""Shared exception types used across the library."""


class InvalidArgument(ValueError):
    """Caller passed a value outside an operation's documented domain."""


class NumericFailure(RuntimeError):
    """A numeric invariant broke mid-computation (non-finite value, divergence).

    Carries enough context to locate the failure: the epoch, the inner-loop
    index within the epoch, and the sample index, when known.
    """

    def __init__(self, message, *, epoch=None, inner_index=None, sample=None):
        self.epoch = epoch
        self.inner_index = inner_index
        self.sample = sample
        parts = [message]
        if epoch is not None:
            parts.append(f"epoch={epoch}")
        if inner_index is not None:
            parts.append(f"inner_index={inner_index}")
        if sample is not None:
            parts.append(f"sample={sample}")
        super().__init__(" | ".join(parts))


class ParseError(ValueError):
    """Malformed text input; carries 1-based line and column of the offender."""

    def __init__(self, message, *, line, column=None):
        self.line = line
        self.column = column
        loc = f"line {line}" if column is None else f"line {line}, column {column}"
        super().__init__(f"{message} ({loc})")


class ConstructionFailure(RuntimeError):
    """A problem generator exhausted its resampling budget or the target is infeasible."""


class ResourceExhausted(RuntimeError):
    """An allocation failed; the caller may fall back to a cheaper mode."""
