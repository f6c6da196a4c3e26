"""Exception taxonomy shared across the package.

Every error raised on a user-facing path carries enough context to act on:
validation errors name the offending argument and the legal values, script
errors carry the call index or line, translation errors keep the last raw
completion for the audit log.
"""

from __future__ import annotations


class Nl2MpcError(Exception):
    """Base class for all package errors."""


class ValidationError(Nl2MpcError):
    """An argument failed a range or membership check."""


class FeatureError(Nl2MpcError):
    """A residual referenced a feature the embodiment did not provide."""

    def __init__(self, term_id: str, feature: str):
        self.term_id = term_id
        self.feature = feature
        super().__init__(
            f"term '{term_id}' requires feature '{feature}' which is not present"
        )


class NumericError(Nl2MpcError):
    """A NaN or non-finite value surfaced during evaluation or planning."""


class ConditioningError(Nl2MpcError):
    """The iLQG backward pass could not be regularized to positive definite."""


class ScriptError(Nl2MpcError):
    """Base class for reward-script problems; carries a location when known."""

    def __init__(self, message: str, line: int | None = None, call_index: int | None = None):
        self.line = line
        self.call_index = call_index
        where = ""
        if line is not None:
            where = f" (line {line})"
        elif call_index is not None:
            where = f" (call {call_index})"
        super().__init__(message + where)


class ParseError(ScriptError):
    """The text could not be parsed into the restricted script form."""


class WhitelistError(ScriptError):
    """A call used a function name outside the allowed API."""


class StructureError(ScriptError):
    """The script parsed but violates a structural rule."""


class TranslationError(Nl2MpcError):
    """Both translation stages kept failing after the configured retries."""

    def __init__(self, message: str, last_completion: str = "", attempts: int = 0):
        self.last_completion = last_completion
        self.attempts = attempts
        super().__init__(message)


class BusyError(Nl2MpcError):
    """The session is already executing an instruction."""


class ChecksumError(Nl2MpcError):
    """A persisted artifact failed integrity verification."""


class VersionError(Nl2MpcError):
    """A persisted artifact was written by an incompatible format version."""


class ConfigError(Nl2MpcError):
    """A configuration file or flag set is invalid."""


class UnknownTaskError(Nl2MpcError):
    """A benchmark task name is not in the registry."""
