"""Exception types raised across the toolkit."""


class ProcDampError(Exception):
    """Base class for all toolkit errors."""


class DomainError(ProcDampError, ValueError):
    """An argument lies outside the domain of the operation."""


class ConfigurationError(ProcDampError, ValueError):
    """Run or grid configuration is invalid (e.g. grid too coarse)."""


class FitError(ProcDampError):
    """Least-squares design is rank deficient or underdetermined."""


class UndefinedPhaseError(ProcDampError):
    """Phase requested for a fit with zero fundamental amplitude."""


class AlignmentError(ProcDampError):
    """Two traces share no common abscissa range."""


class DegenerateLoopError(ProcDampError):
    """Loop has too few distinct points to define an orientation."""


class SearchWindowError(ProcDampError):
    """No root was bracketed inside the search window."""


class ParseError(ProcDampError):
    """Input file could not be parsed."""

    def __init__(self, message: str, line: int | None = None):
        self.line = line
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)
