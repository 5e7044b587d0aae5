"""Exception types shared across the package.

The CLI maps these to exit codes: configuration problems exit with 2,
numerical/estimation failures with 3.
"""

from __future__ import annotations


class ConfigError(ValueError):
    """Invalid configuration: bad field value, unknown key, broken constraint."""


class EstimationError(RuntimeError):
    """A statistic cannot be formed from the available data (empty cell, missing baseline)."""


class IntegrationDiverged(RuntimeError):
    """Non-finite state encountered during integration.

    Carries the step index at which the state stopped being finite, and
    optionally which system in a batch went bad.
    """

    def __init__(self, step: int, system_index: int | None = None, detail: str = ""):
        self.step = step
        self.system_index = system_index
        msg = f"non-finite state at step {step}"
        if system_index is not None:
            msg += f" (system {system_index})"
        if detail:
            msg += f": {detail}"
        super().__init__(msg)
