"""Exception hierarchy shared by all isqreg modules."""


class IsqregError(Exception):
    """Base class for all errors raised by this package."""


class ParameterError(IsqregError, ValueError):
    """A parameter guard was violated (bad coupling, domain, or branch)."""


class GammaPoleError(ParameterError):
    """Gamma function evaluated at a nonpositive integer."""


class ConvergenceError(IsqregError, RuntimeError):
    """A series or iteration failed to reach its stated tolerance."""


class MatchingError(IsqregError, RuntimeError):
    """Root bracketing / wavefunction matching failed."""
