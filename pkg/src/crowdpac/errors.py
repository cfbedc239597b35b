"""Typed errors raised across the package."""


class CrowdPacError(Exception):
    """Base class for all package errors."""


class ParameterError(CrowdPacError, ValueError):
    """A parameter is outside its documented range."""


class InstanceSpaceError(CrowdPacError, TypeError):
    """An instance does not belong to the hypothesis's instance space."""


class TieError(CrowdPacError, ValueError):
    """A majority vote was requested over an even-sized committee."""


class UnknownLabelerError(CrowdPacError, KeyError):
    """A labeler id was queried that no draw operation produced."""


class RejectionBudgetError(CrowdPacError, RuntimeError):
    """A conditioned labeler draw exhausted its candidate budget.

    Only reachable when essentially no labeler mass agrees with the
    current conditioning (adversarial misconfiguration).
    """


class InconsistentLabelsError(CrowdPacError, RuntimeError):
    """The consistency oracle failed on a labeled sample that was expected
    to be realizable. Carries the offending sample for inspection."""

    def __init__(self, message: str, sample=None):
        super().__init__(message)
        self.sample = sample


class OracleFailure(CrowdPacError, RuntimeError):
    """A learning phase produced a sample with no consistent hypothesis."""

    def __init__(self, phase: str, sample=None):
        super().__init__(f"consistency oracle returned no hypothesis in {phase}")
        self.phase = phase
        self.sample = sample


class RestartBudgetError(CrowdPacError, RuntimeError):
    """Pruning restarted the robust learner more often than its safety
    envelope allows; indicates a defect in the pruning logic."""


class EmptyResultsError(CrowdPacError, ValueError):
    """Aggregation was requested over an empty result list."""


class ConfigError(CrowdPacError, ValueError):
    """An experiment configuration failed validation."""
