# errors.py
"""
Exception types shared by the optics core, the analysis layer and the CLI
"""
from typing import Iterable


class CfcLabError(Exception):
    """Base class for every error raised by the laboratory."""


class ConfigurationError(CfcLabError, ValueError):
    """Bad user-facing parameters: unknown modes, missing angles, size guards, grids."""


class StructuralError(CfcLabError, ValueError):
    """A circuit that cannot be an isometry onto its detector bins."""


class NumericalInconsistencyError(CfcLabError, ArithmeticError):
    """Probabilities and derivatives that contradict each other."""


class UndefinedConditioningError(CfcLabError, ArithmeticError):
    """Post-selection on a set of outcomes that never occurs."""


class NonConvergedLimitError(CfcLabError, ArithmeticError):
    """One or more θ→0 extrapolations did not reach the residual tolerance."""

    def __init__(self, sites: Iterable[str]):
        self.sites = tuple(sites)
        super().__init__(f"extrapolation did not converge for sites: {', '.join(self.sites)}")


class RegimeWarning(UserWarning):
    """The asymptotic violation formula was evaluated outside M >> N >> 1."""
