"""Exception hierarchy shared across the package.

Each class carries the process exit code the CLI maps it to:
2 input/validation, 3 verification violation, 4 numerical non-convergence.
"""


class StabradError(Exception):
    """Base class for all errors raised by this package."""

    exit_code = 1


class InputError(StabradError, ValueError):
    """Invalid user input: bad matrices, shapes, flags or file contents."""

    exit_code = 2


class SingularityError(InputError):
    """Transfer-function evaluation requested too close to a pole.

    Carries the distance from the evaluation point to the spectrum.
    """

    def __init__(self, message, distance):
        super().__init__(message)
        self.distance = distance


class DegenerateError(InputError):
    """No destabilizing construction exists (coupled spectral radius is zero)."""

    exit_code = 2


class VerificationError(StabradError):
    """A verification run found a stability violation it should not have."""

    exit_code = 3


class ConvergenceError(StabradError):
    """An iterative numerical procedure failed to converge."""

    exit_code = 4
