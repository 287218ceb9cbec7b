"""
Exception hierarchy for robustkit.

Library code raises these; only the command-line entry point turns them into
exit codes.
"""


class RobustkitError(ValueError):
    """Base class for every error raised by robustkit."""

    exit_code = 1


class ValidationError(RobustkitError):
    """Input failed a structural or numerical validity check."""

    exit_code = 2


class StateFileError(ValidationError):
    """A state file could not be parsed."""


class MixerError(ValidationError):
    """A mixer is suboptimal or belongs to a different state."""


class UnsupportedInputError(RobustkitError):
    """Input is valid but outside what the requested computation supports."""

    exit_code = 3


class NumericalError(RobustkitError):
    """Eigensolver failure or an internal cross-check diverged."""

    exit_code = 1
