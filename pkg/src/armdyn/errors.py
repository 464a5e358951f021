"""Exception types shared across the package."""

from __future__ import annotations


class ArmdynError(Exception):
    """Base class for package-specific failures."""


class ConvergenceError(ArmdynError):
    """An iterative solve did not reach its residual target.

    Carries the best residual seen so the caller can judge how close it got.
    """

    def __init__(self, message: str, best_residual: float | None = None) -> None:
        super().__init__(message)
        self.best_residual = best_residual


class SingularJacobianError(ConvergenceError):
    """A linear solve inside an iteration met a (numerically) singular matrix."""


class NumericalError(ArmdynError):
    """A numerical routine produced results that fail its own validity checks."""


class ClassificationError(ArmdynError):
    """An operation required a fixed point of a different stability class."""


class SpectrumInconsistencyError(ArmdynError):
    """An eigenvalue set violates the plus/minus pairing of Hamiltonian spectra."""


class StepFailureError(ArmdynError):
    """An implicit integration step failed to converge.

    Attributes
    ----------
    time : float
        Simulation time at which the step failed.
    """

    def __init__(self, message: str, time: float) -> None:
        super().__init__(message)
        self.time = time


class TruncationError(ArmdynError):
    """Integration hit its step budget; carries the partial trajectory."""

    def __init__(self, message: str, trajectory: object) -> None:
        super().__init__(message)
        self.trajectory = trajectory
