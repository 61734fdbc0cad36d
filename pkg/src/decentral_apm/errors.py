from __future__ import annotations


class ApmError(Exception):
    """Base class for every error raised by the simulator."""


class NotConnected(ApmError):
    """Random graph stayed disconnected after all resampling attempts."""


class DegenerateGap(ApmError):
    """Mixing matrix has (numerically) no spectral gap."""


class InvalidGap(ApmError):
    """A consensus formula was given sigma2 >= 1."""


class IndivisibleData(ApmError):
    """Sample count N is not a multiple of the agent count m."""


class SingularSystem(ApmError):
    """Normal equations of the centralized problem have no solution."""


class NoCheapProx(ApmError):
    """The problem does not declare a closed-form proximal mapping."""


class TraceFormatError(ApmError):
    """A trace CSV could not be parsed back."""


class ConfigError(ApmError):
    def __init__(self, errors: list[str]):
        self.errors = list(errors)
        super().__init__("invalid config: " + "; ".join(self.errors))
