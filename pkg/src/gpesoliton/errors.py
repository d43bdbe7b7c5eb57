"""Exception hierarchy shared by all gpesoliton modules."""


class GpeError(Exception):
    """Base class for all toolkit errors."""


class DomainError(GpeError):
    """Invalid physical or numerical input (bad sign, bad range, bad shape)."""


class UnsupportedRegimeError(DomainError):
    """Parameters outside the attractive-condensate regime the toolkit models."""


class GridMismatchError(DomainError):
    """Two fields that must share a grid do not."""


class StepSizeError(GpeError):
    """Time or pseudo-time step too large for stable/accurate integration."""

    def __init__(self, message, tau=None):
        super().__init__(message)
        self.tau = tau


class BlowupError(GpeError):
    """Non-finite values appeared during propagation (collapse in supercritical runs)."""

    def __init__(self, message, tau=None):
        super().__init__(message)
        self.tau = tau


class ParseError(GpeError):
    """Syntax error in a potential expression, with byte offset and expectations."""

    def __init__(self, message, offset, expected=()):
        self.offset = offset
        self.expected = tuple(expected)
        detail = f"at byte {offset}: {message}"
        if self.expected:
            detail += " (expected " + " or ".join(self.expected) + ")"
        super().__init__(detail)


class UnknownIdentifierError(ParseError):
    """An identifier was used as a function but is not a known function name."""

    def __init__(self, name, offset, allowed):
        self.name = name
        super().__init__(
            f"unknown function '{name}'; allowed: {', '.join(sorted(allowed))}",
            offset,
        )


class UnboundParameterError(GpeError):
    """A potential expression was evaluated with parameters left unbound."""

    def __init__(self, missing):
        self.missing = tuple(sorted(missing))
        super().__init__("unbound parameters: " + ", ".join(self.missing))
