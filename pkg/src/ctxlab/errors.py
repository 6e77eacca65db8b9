"""Exception hierarchy shared across subpackages."""


class CtxlabError(Exception):
    """Base class for all errors raised by ctxlab."""


class ConfigError(CtxlabError):
    """Invalid configuration; maps to CLI exit code 1."""


class PatchParseError(CtxlabError):
    def __init__(self, message: str, line_number: int, line: str):
        super().__init__(f"line {line_number}: {message}: {line!r}")
        self.line_number = line_number
        self.line = line


class EmptyGoldError(CtxlabError):
    """Raised when scoring against an empty gold set."""


class UndefinedCorrelationError(CtxlabError):
    """Raised when a correlation input vector is constant or too short."""


class PolicyTransportError(CtxlabError):
    """The policy backend could not be reached or returned garbage."""
