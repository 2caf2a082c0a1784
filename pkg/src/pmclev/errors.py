"""Exception hierarchy shared by the library and the CLI exit codes."""


class PmclevError(Exception):
    """Base class for all library errors."""

    exit_code = 1


class ConfigError(PmclevError, ValueError):
    """Invalid or unknown configuration (CLI exit status 2)."""

    exit_code = 2


class DomainError(PmclevError, ValueError):
    """Argument outside the supported physical/numerical domain (exit 3)."""

    exit_code = 3


class NoLevitationError(DomainError):
    """F(z) - mg has no sign change inside the search bracket."""


class ConvergenceError(PmclevError, ArithmeticError):
    """A quadrature, series or root search failed to converge (exit 4)."""

    exit_code = 4
