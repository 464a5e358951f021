"""Time integration of the full 4-D flow and the reduced 2-D pendulum.

The workhorse is the implicit midpoint rule: the Hamiltonian is non-separable
(momentum cross term and a momentum-dependent denominator), which rules out
explicit splitting methods, and midpoint is symplectic for general smooth
Hamiltonians, so its energy error stays bounded instead of drifting. An
adaptive high-order explicit pair (DOP853) is available as a cross-check
reference.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.integrate import solve_ivp

from .errors import NumericalError, StepFailureError, TruncationError
from .model import ArmParams, State, Torques, _energy, _rhs
from .stability import jacobian

IMPLICIT_MIDPOINT = "ImplicitMidpoint"
EXPLICIT_ADAPTIVE = "ExplicitAdaptive"

_SOLVE_TOL = 1e-14          # per-step implicit solve: max-abs update target
_FP_MAX_ITER = 50
_FP_NONCONTRACT_LIMIT = 10  # switch to Newton after this many non-contracting sweeps
_NEWTON_MAX_ITER = 25


@dataclass(frozen=True)
class IntegratorSpec:
    """Integration method and its control parameters.

    ImplicitMidpoint uses `step` (fixed, > 0); ExplicitAdaptive uses
    `tolerance` (per-step relative error target in (0, 1e-2]).
    """

    method: str = IMPLICIT_MIDPOINT
    step: float | None = 1e-3
    tolerance: float | None = None
    max_steps: int = 20_000_000

    def __post_init__(self) -> None:
        if self.method == IMPLICIT_MIDPOINT:
            if self.step is None or not (math.isfinite(self.step) and self.step > 0.0):
                raise ValueError("ImplicitMidpoint requires step > 0")
        elif self.method == EXPLICIT_ADAPTIVE:
            if self.tolerance is None or not (0.0 < self.tolerance <= 1e-2):
                raise ValueError("ExplicitAdaptive requires tolerance in (0, 1e-2]")
        else:
            raise ValueError(f"unknown integration method {self.method!r}")
        if self.max_steps <= 0:
            raise ValueError("max_steps must be positive")


@dataclass(frozen=True)
class Trajectory:
    """Accepted integration steps with per-step energies.

    `energy_drift` is max |H(t) - H(0)|; for the fixed-step midpoint rule
    `drift_coefficient` reports energy_drift / step^2 (the bounded-error
    constant of the second-order method), None for the adaptive method.
    """

    times: np.ndarray
    states: np.ndarray
    energies: np.ndarray
    energy_drift: float
    drift_coefficient: float | None = None


def _step_plan(T: float, h: float) -> tuple[int, float]:
    # whole steps of size h, plus one trailing short step when T is not a
    # near-exact multiple of h
    n_whole = int(math.floor(T / h + 1e-9))
    tail = T - n_whole * h
    if tail <= 1e-9 * h:
        tail = 0.0
    return n_whole, tail


def _midpoint_step_4d(params: ArmParams, torques: Torques,
                      k: float, mgl: float, b1: float, b2: float,
                      t1: float, p1: float, t2: float, p2: float,
                      h: float, time: float) -> tuple[float, float, float, float]:
    # solve m = z + (h/2) f(m), then z_next = 2m - z
    hh = 0.5 * h
    f = _rhs(k, mgl, b1, b2, t1, p1, t2, p2)
    m1 = t1 + hh * f[0]
    m2 = p1 + hh * f[1]
    m3 = t2 + hh * f[2]
    m4 = p2 + hh * f[3]
    prev_delta = math.inf
    non_contract = 0
    for _ in range(_FP_MAX_ITER):
        g = _rhs(k, mgl, b1, b2, m1, m2, m3, m4)
        n1 = t1 + hh * g[0]
        n2 = p1 + hh * g[1]
        n3 = t2 + hh * g[2]
        n4 = p2 + hh * g[3]
        delta = max(abs(n1 - m1), abs(n2 - m2), abs(n3 - m3), abs(n4 - m4))
        m1, m2, m3, m4 = n1, n2, n3, n4
        scale = 1.0 + max(abs(m1), abs(m2), abs(m3), abs(m4))
        if delta <= _SOLVE_TOL * scale:
            return 2.0 * m1 - t1, 2.0 * m2 - p1, 2.0 * m3 - t2, 2.0 * m4 - p2
        if delta >= prev_delta:
            non_contract += 1
            if non_contract >= _FP_NONCONTRACT_LIMIT:
                break
        prev_delta = delta

    # Newton fallback on G(m) = m - z - (h/2) f(m)
    z = np.array([t1, p1, t2, p2])
    m = np.array([m1, m2, m3, m4])
    eye = np.eye(4)
    for _ in range(_NEWTON_MAX_ITER):
        g = np.array(_rhs(k, mgl, b1, b2, m[0], m[1], m[2], m[3]))
        G = m - z - hh * g
        scale = 1.0 + float(np.max(np.abs(m)))
        if float(np.max(np.abs(G))) <= _SOLVE_TOL * scale:
            out = 2.0 * m - z
            return out[0], out[1], out[2], out[3]
        A = eye - hh * jacobian(params, torques, State(*m))
        try:
            m = m - np.linalg.solve(A, G)
        except np.linalg.LinAlgError as exc:
            raise StepFailureError(f"implicit step solve singular at t = {time:.6g}",
                                   time=time) from exc
        if not np.all(np.isfinite(m)):
            raise StepFailureError(f"implicit step diverged at t = {time:.6g}", time=time)
    raise StepFailureError(f"implicit step did not converge at t = {time:.6g}", time=time)


def integrate(params: ArmParams, torques: Torques, s0: State, T: float,
              spec: IntegratorSpec) -> Trajectory:
    """Integrate the full system over [0, T], recording every accepted step.

    Raises
    ------
    StepFailureError
        If an implicit midpoint step does not converge.
    TruncationError
        If more than spec.max_steps steps would be needed (carries the
        partial trajectory).
    NumericalError
        If the adaptive solver reports failure.
    """
    if not (math.isfinite(T) and T > 0.0):
        raise ValueError("T must be finite and positive")
    for value in s0:
        if not math.isfinite(value):
            raise ValueError(f"initial state must be finite, got {tuple(s0)!r}")

    k = 1.0 / params.ml2
    mgl = params.mgl
    b1 = torques.beta1
    b2 = torques.beta2

    if spec.method == EXPLICIT_ADAPTIVE:
        sol = solve_ivp(lambda t, y: _rhs(k, mgl, b1, b2, y[0], y[1], y[2], y[3]),
                        (0.0, T), tuple(s0), method="DOP853",
                        rtol=spec.tolerance, atol=1e-12)
        if not sol.success:
            raise NumericalError(f"adaptive integration failed: {sol.message}")
        times = sol.t
        states = sol.y.T.copy()
        energies = np.array([_energy(k, mgl, b1, b2, *row) for row in states])
        drift = float(np.max(np.abs(energies - energies[0])))
        traj = Trajectory(times=times, states=states, energies=energies,
                          energy_drift=drift, drift_coefficient=None)
        if times.size - 1 > spec.max_steps:
            raise TruncationError(
                f"adaptive run took {times.size - 1} steps > max_steps={spec.max_steps}",
                trajectory=traj)
        return traj

    h = spec.step
    n_whole, tail = _step_plan(T, h)
    total = n_whole + (1 if tail else 0)
    z = (float(s0.theta1), float(s0.p1), float(s0.theta2), float(s0.p2))
    rows = [z]
    times = [0.0]
    e0 = _energy(k, mgl, b1, b2, *z)
    energies = [e0]
    drift = 0.0
    for i in range(total):
        if i >= spec.max_steps:
            traj = _finish_midpoint(times, rows, energies, drift, h)
            raise TruncationError(
                f"step budget max_steps={spec.max_steps} exhausted at t = {times[-1]:.6g}",
                trajectory=traj)
        hi = h if i < n_whole else tail
        z = _midpoint_step_4d(params, torques, k, mgl, b1, b2, *z, hi, time=i * h)
        rows.append(z)
        times.append((i + 1) * h if i + 1 <= n_whole else T)
        e = _energy(k, mgl, b1, b2, *z)
        energies.append(e)
        err = abs(e - e0)
        if err > drift:
            drift = err
    return _finish_midpoint(times, rows, energies, drift, h)


def _finish_midpoint(times: list[float], rows: list[tuple[float, ...]],
                     energies: list[float], drift: float, h: float) -> Trajectory:
    return Trajectory(times=np.array(times), states=np.array(rows),
                      energies=np.array(energies), energy_drift=drift,
                      drift_coefficient=drift / (h * h))


def integrate_reduced(params: ArmParams, r0, T: float, spec: IntegratorSpec,
                      manifold=None) -> Trajectory:
    """Integrate the reduced (theta1, p1) pendulum over [0, T].

    `manifold` selects the energy bookkeeping offset (defaults to M1); the
    reduced vector field itself is the same on both sheets.
    """
    # local import: manifolds drives this module for its invariance check
    from . import manifolds as _mf

    if manifold is None:
        manifold = _mf.ManifoldId.M1
    if not (math.isfinite(T) and T > 0.0):
        raise ValueError("T must be finite and positive")
    if spec.method == EXPLICIT_ADAPTIVE:
        sol = solve_ivp(lambda t, y: _mf.reduced_vector_field(params, _mf.ReducedState(*y)),
                        (0.0, T), tuple(r0), method="DOP853",
                        rtol=spec.tolerance, atol=1e-12)
        if not sol.success:
            raise NumericalError(f"adaptive integration failed: {sol.message}")
        times = sol.t
        states = sol.y.T.copy()
        energies = np.array([_mf.reduced_energy(params, manifold, _mf.ReducedState(*row))
                             for row in states])
        drift = float(np.max(np.abs(energies - energies[0])))
        traj = Trajectory(times=times, states=states, energies=energies,
                          energy_drift=drift, drift_coefficient=None)
        if times.size - 1 > spec.max_steps:
            raise TruncationError(
                f"adaptive run took {times.size - 1} steps > max_steps={spec.max_steps}",
                trajectory=traj)
        return traj

    half_k = 0.5 / params.ml2
    two_mgl = 2.0 * params.mgl
    offset = -params.mgl if manifold == _mf.ManifoldId.M1 else params.mgl
    h = spec.step
    hh = 0.5 * h
    n_whole, tail = _step_plan(T, h)
    total = n_whole + (1 if tail else 0)

    def energy(t1: float, p1: float) -> float:
        return half_k * 0.5 * p1 * p1 - two_mgl * math.cos(t1) + offset

    t1, p1 = float(r0[0]), float(r0[1])
    rows = [(t1, p1)]
    times = [0.0]
    e0 = energy(t1, p1)
    energies = [e0]
    drift = 0.0
    for i in range(total):
        if i >= spec.max_steps:
            traj = Trajectory(times=np.array(times), states=np.array(rows),
                              energies=np.array(energies), energy_drift=drift,
                              drift_coefficient=drift / (h * h))
            raise TruncationError(
                f"step budget max_steps={spec.max_steps} exhausted at t = {times[-1]:.6g}",
                trajectory=traj)
        hi = h if i < n_whole else tail
        hhi = 0.5 * hi
        m1 = t1 + hhi * (half_k * p1)
        m2 = p1 - hhi * two_mgl * math.sin(t1)
        prev_delta = math.inf
        non_contract = 0
        solved = False
        for _ in range(_FP_MAX_ITER):
            n1 = t1 + hhi * (half_k * m2)
            n2 = p1 - hhi * two_mgl * math.sin(m1)
            delta = max(abs(n1 - m1), abs(n2 - m2))
            m1, m2 = n1, n2
            scale = 1.0 + max(abs(m1), abs(m2))
            if delta <= _SOLVE_TOL * scale:
                solved = True
                break
            if delta >= prev_delta:
                non_contract += 1
                if non_contract >= _FP_NONCONTRACT_LIMIT:
                    break
            prev_delta = delta
        if not solved:
            # Newton fallback on the 2x2 midpoint equations
            for _ in range(_NEWTON_MAX_ITER):
                g1 = m1 - t1 - hhi * (half_k * m2)
                g2 = m2 - p1 + hhi * two_mgl * math.sin(m1)
                scale = 1.0 + max(abs(m1), abs(m2))
                if max(abs(g1), abs(g2)) <= _SOLVE_TOL * scale:
                    solved = True
                    break
                a = hhi * two_mgl * math.cos(m1)   # dG2/dm1
                b = -hhi * half_k                  # dG1/dm2
                det = 1.0 - a * b
                if det == 0.0 or not math.isfinite(det):
                    raise StepFailureError(
                        f"implicit step solve singular at t = {i * h:.6g}", time=i * h)
                m1 -= (g1 - b * g2) / det
                m2 -= (g2 - a * g1) / det
            if not solved:
                raise StepFailureError(
                    f"implicit step did not converge at t = {i * h:.6g}", time=i * h)
        t1 = 2.0 * m1 - t1
        p1 = 2.0 * m2 - p1
        rows.append((t1, p1))
        times.append((i + 1) * h if i + 1 <= n_whole else T)
        e = energy(t1, p1)
        energies.append(e)
        err = abs(e - e0)
        if err > drift:
            drift = err
    return Trajectory(times=np.array(times), states=np.array(rows),
                      energies=np.array(energies), energy_drift=drift,
                      drift_coefficient=drift / (h * h))
