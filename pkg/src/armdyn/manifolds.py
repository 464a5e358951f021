"""The two candidate invariant sheets and the reduced pendulum dynamics.

M1 is the sheet (theta2 = 0, p2 = (p1/2) cos(theta1)); M2 is
(theta2 = pi, p2 = -(p1/2) cos(theta1)). On both sheets the full vector
field reduces to the pendulum (theta1_dot, p1_dot) = (p1/(2mL^2),
-2mgL sin(theta1)) in the (theta1, p1) components, and theta2_dot vanishes
identically. Whether the flow actually remains on the sheets is what
:func:`invariance_check` measures; it reports the honest answer rather than
assuming one.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass
from typing import NamedTuple

import numpy as np

from .integrators import IntegratorSpec, Trajectory, integrate
from .model import ArmParams, State, Torques, hamiltonian

TWO_PI = 2.0 * math.pi


class ManifoldId(enum.Enum):
    M1 = "M1"
    M2 = "M2"

    @property
    def theta2_value(self) -> float:
        return 0.0 if self is ManifoldId.M1 else math.pi

    @property
    def p2_sign(self) -> float:
        return 1.0 if self is ManifoldId.M1 else -1.0


class ReducedState(NamedTuple):
    """Point of the reduced pendulum plane (theta1, p1)."""

    theta1: float
    p1: float


def embed(mid: ManifoldId, r: ReducedState) -> State:
    """Lift a reduced point to the 4-D state on the named sheet."""
    theta1, p1 = r
    return State(theta1, p1, mid.theta2_value,
                 mid.p2_sign * 0.5 * p1 * math.cos(theta1))


def project(mid: ManifoldId, s: State) -> ReducedState:
    """Drop a 4-D state to its (theta1, p1) reduced coordinates."""
    del mid  # both sheets share the reduced coordinates
    return ReducedState(s.theta1, s.p1)


def residual(mid: ManifoldId, s: State) -> tuple[float, float]:
    """Distance of `s` from the sheet: (angular, momentum) components.

    The angular part uses wrapped distance so windings of theta2 do not
    register as departures.
    """
    r_theta = abs(math.remainder(s.theta2 - mid.theta2_value, TWO_PI))
    r_p = abs(s.p2 - mid.p2_sign * 0.5 * s.p1 * math.cos(s.theta1))
    return r_theta, r_p


def reduced_vector_field(params: ArmParams, r: ReducedState) -> tuple[float, float]:
    """(theta1_dot, p1_dot) of the reduced pendulum; identical on both sheets.

    Equals the (theta1, p1) components of the full vector field at the
    embedded point (an algebraic identity of the kinetic form).
    """
    return r.p1 / (2.0 * params.ml2), -2.0 * params.mgl * math.sin(r.theta1)


def reduced_energy(params: ArmParams, mid: ManifoldId, r: ReducedState) -> float:
    """Torque-free Hamiltonian at the embedded point.

    Closed form: p1^2/(4mL^2) - 2mgL cos(theta1) - mgL on M1 (+mgL on M2).
    """
    return hamiltonian(params, Torques(0.0, 0.0), embed(mid, r))


def separatrix_energy(params: ArmParams, mid: ManifoldId) -> float:
    """Energy of the reduced saddle (theta1 = pi, p1 = 0) on the named sheet.

    Reduced orbits below it librate, above it rotate.
    """
    return reduced_energy(params, mid, ReducedState(math.pi, 0.0))


@dataclass(frozen=True)
class InvarianceReport:
    """Measured departure from a sheet under the full 4-D flow."""

    manifold: ManifoldId
    r0: ReducedState
    T: float
    tol: float
    max_r_theta: float
    max_r_p: float
    passed: bool
    exploratory: bool
    n_steps: int


def invariance_check(params: ArmParams, mid: ManifoldId, r0: ReducedState,
                     T: float, tol: float,
                     torques: Torques | None = None,
                     spec: IntegratorSpec | None = None) -> InvarianceReport:
    """Integrate the full system from embed(mid, r0) and track the residual.

    Pass verdict: both residual maxima over every accepted step stay <= tol.
    Runs with nonzero torques are flagged exploratory (the sheets are defined
    for the torque-free system).
    """
    if tol <= 0.0:
        raise ValueError("tol must be positive")
    if torques is None:
        torques = Torques(0.0, 0.0)
    if spec is None:
        spec = IntegratorSpec()
    traj = integrate(params, torques, embed(mid, r0), T, spec)
    max_r_theta, max_r_p = trajectory_residuals(mid, traj)
    return InvarianceReport(manifold=mid, r0=r0, T=T, tol=tol,
                            max_r_theta=max_r_theta, max_r_p=max_r_p,
                            passed=(max_r_theta <= tol and max_r_p <= tol),
                            exploratory=not torques.is_zero,
                            n_steps=int(traj.times.size - 1))


def residual_series(mid: ManifoldId, traj: Trajectory) -> tuple[np.ndarray, np.ndarray]:
    """Per-row (angular, momentum) sheet residuals of a trajectory."""
    t1 = traj.states[:, 0]
    p1 = traj.states[:, 1]
    t2 = traj.states[:, 2]
    p2 = traj.states[:, 3]
    d = t2 - mid.theta2_value
    r_theta = np.abs(np.remainder(d + math.pi, TWO_PI) - math.pi)
    r_p = np.abs(p2 - mid.p2_sign * 0.5 * p1 * np.cos(t1))
    return r_theta, r_p


def trajectory_residuals(mid: ManifoldId, traj: Trajectory) -> tuple[float, float]:
    """Max (angular, momentum) sheet residuals over all rows of a trajectory."""
    r_theta, r_p = residual_series(mid, traj)
    return float(np.max(r_theta)), float(np.max(r_p))
