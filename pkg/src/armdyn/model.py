"""Hamiltonian core of a two-link planar arm under constant joint torques.

The arm is an equal-mass, equal-length double pendulum. theta1 is the upper
link angle measured from the downward vertical, theta2 the lower one; p1, p2
are the conjugate momenta. Constant torques beta1, beta2 enter the Hamiltonian
through the non-periodic potential term -theta1*beta1 - theta2*beta2.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import NamedTuple

TWO_PI = 2.0 * math.pi


@dataclass(frozen=True)
class ArmParams:
    """Physical constants of the arm.

    Parameters
    ----------
    m : float
        Mass of each link's endpoint bob (kg), m > 0.
    L : float
        Length of each link (m), L > 0.
    g : float
        Gravitational acceleration (m/s^2), g > 0.
    """

    m: float
    L: float
    g: float

    def __post_init__(self) -> None:
        for name in ("m", "L", "g"):
            value = getattr(self, name)
            if not (math.isfinite(value) and value > 0.0):
                raise ValueError(f"ArmParams.{name} must be finite and > 0, got {value!r}")

    @property
    def omega0(self) -> float:
        """Natural small-oscillation frequency sqrt(g/L) (rad/s)."""
        return math.sqrt(self.g / self.L)

    @property
    def mgl(self) -> float:
        """Characteristic energy scale m*g*L (J)."""
        return self.m * self.g * self.L

    @property
    def ml2(self) -> float:
        """Characteristic inertia m*L^2 (kg*m^2)."""
        return self.m * self.L * self.L


@dataclass(frozen=True)
class Torques:
    """Constant external joint torques (N*m). Time-varying torques are out of scope."""

    beta1: float = 0.0
    beta2: float = 0.0

    def __post_init__(self) -> None:
        for name in ("beta1", "beta2"):
            value = getattr(self, name)
            if not math.isfinite(value):
                raise ValueError(f"Torques.{name} must be finite, got {value!r}")

    @property
    def is_zero(self) -> bool:
        return self.beta1 == 0.0 and self.beta2 == 0.0


class State(NamedTuple):
    """Phase-space point (theta1, p1, theta2, p2).

    Angles are stored unwrapped (no implicit modular reduction); use
    :func:`canonicalize_angles` to reduce them into [0, 2*pi).
    """

    theta1: float
    p1: float
    theta2: float
    p2: float


def _require_finite(s: State) -> None:
    for value in s:
        if not math.isfinite(value):
            raise ValueError(f"state must be finite, got {tuple(s)!r}")


def _energy(k: float, mgl: float, b1: float, b2: float,
            t1: float, p1: float, t2: float, p2: float) -> float:
    # k = 1/(m L^2). sin(t1-t2) is evaluated once and shared with _rhs's
    # convention so hamiltonian and vector_field stay bit-consistent.
    d = t1 - t2
    sd = math.sin(d)
    den = 1.0 + sd * sd
    kin = k * (0.5 * p1 * p1 + p2 * p2 - math.cos(d) * p1 * p2) / den
    pot = -mgl * (2.0 * math.cos(t1) + math.cos(t2))
    return kin + pot - t1 * b1 - t2 * b2


def _rhs(k: float, mgl: float, b1: float, b2: float,
         t1: float, p1: float, t2: float, p2: float) -> tuple[float, float, float, float]:
    # Right-hand side of the canonical equations in (theta1, p1, theta2, p2) order.
    d = t1 - t2
    cd = math.cos(d)
    sd = math.sin(d)
    den = 1.0 + sd * sd
    den2 = den * den
    w = p1 * p1 + 2.0 * p2 * p2 - 2.0 * cd * p1 * p2
    a = k * w * cd * sd / den2
    b = k * sd * p1 * p2 / den
    dt1 = k * (p1 - cd * p2) / den
    dt2 = k * (2.0 * p2 - cd * p1) / den
    dp1 = a - b - 2.0 * mgl * math.sin(t1) + b1
    dp2 = -a + b - mgl * math.sin(t2) + b2
    return dt1, dp1, dt2, dp2


def hamiltonian(params: ArmParams, torques: Torques, s: State) -> float:
    """Total energy H at state `s` (J).

    H = [p1^2/2 + p2^2 - cos(theta1-theta2) p1 p2] / (m L^2 (1 + sin^2(theta1-theta2)))
        - m g L (2 cos(theta1) + cos(theta2)) - theta1*beta1 - theta2*beta2
    """
    _require_finite(s)
    return _energy(1.0 / params.ml2, params.mgl, torques.beta1, torques.beta2, *s)


def vector_field(params: ArmParams, torques: Torques, s: State) -> State:
    """Phase-space velocity (theta1_dot, p1_dot, theta2_dot, p2_dot) at `s`.

    Equals the symplectic gradient of :func:`hamiltonian`:
    theta_dot = dH/dp, p_dot = -dH/dtheta (the constant torques enter p_dot
    additively).
    """
    _require_finite(s)
    return State(*_rhs(1.0 / params.ml2, params.mgl, torques.beta1, torques.beta2, *s))


def canonicalize_angles(s: State) -> tuple[State, tuple[int, int]]:
    """Reduce both angles mod 2*pi into [0, 2*pi); momenta unchanged.

    Returns the reduced state and the applied winding counts (w1, w2) with
    theta_reduced = theta - 2*pi*w. Because the torque potential -theta*beta
    is not 2*pi-periodic, H changes under the reduction; the shift is
    recoverable via :func:`winding_energy_shift`.
    """
    _require_finite(s)

    def reduce(theta: float) -> tuple[float, int]:
        w = math.floor(theta / TWO_PI)
        r = theta - w * TWO_PI
        # guard rounding at the interval ends
        while r >= TWO_PI:
            r -= TWO_PI
            w += 1
        while r < 0.0:
            r += TWO_PI
            w -= 1
        return r, w

    r1, w1 = reduce(s.theta1)
    r2, w2 = reduce(s.theta2)
    return State(r1, s.p1, r2, s.p2), (w1, w2)


def winding_energy_shift(torques: Torques, winding: tuple[int, int]) -> float:
    """Energy added by a winding reduction: H(canonical) - H(original)."""
    return TWO_PI * (winding[0] * torques.beta1 + winding[1] * torques.beta2)
