"""Fixed points of the torqued arm: closed-form location, Newton refinement, energies.

Every equilibrium has p1 = p2 = 0 and sin(theta1) = beta1/(2mgL),
sin(theta2) = beta2/(mgL); the four candidates are labeled by the pair of
cosine signs, ordered (+,+), (+,-), (-,+), (-,-).
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import ConvergenceError, SingularJacobianError
from .model import ArmParams, State, Torques, hamiltonian, vector_field
from .stability import jacobian

BRANCHES: tuple[tuple[str, str], ...] = (("+", "+"), ("+", "-"), ("-", "+"), ("-", "-"))

_BOUNDARY_REL_TOL = 1e-12
_NEWTON_MAX_ITER = 100
_NEWTON_MAX_HALVINGS = 30
_NEWTON_RESIDUAL_REL = 1e-12


@dataclass(frozen=True)
class FixedPoint:
    """An equilibrium candidate on one cosine-sign branch.

    `state` and `energy` are None when the existence conditions
    |beta1| <= 2mgL, |beta2| <= mgL fail for this torque pair.
    `newton_iterations` is set only by :func:`refine_fixed_point`.
    """

    branch: tuple[str, str]
    exists: bool
    on_boundary: bool
    state: State | None
    energy: float | None
    newton_iterations: int | None = None


def _boundary_flags(params: ArmParams, torques: Torques) -> tuple[bool, bool]:
    lim1 = 2.0 * params.mgl
    lim2 = params.mgl
    b1 = abs(abs(torques.beta1) - lim1) <= _BOUNDARY_REL_TOL * lim1
    b2 = abs(abs(torques.beta2) - lim2) <= _BOUNDARY_REL_TOL * lim2
    return b1, b2


def analytic_fixed_points(params: ArmParams, torques: Torques) -> list[FixedPoint]:
    """The four closed-form equilibrium candidates in branch order.

    Angles come from arcsin on the principal branch (cos > 0) and its
    pi-reflection (cos < 0), so the zero-torque limit lands on {0, pi}
    bit-exactly. Energies are direct Hamiltonian evaluations; the printed
    closed forms live in :func:`fixed_point_energies_closed_form` for
    cross-checking only.
    """
    sin1 = torques.beta1 / (2.0 * params.mgl)
    sin2 = torques.beta2 / params.mgl
    exists = abs(sin1) <= 1.0 and abs(sin2) <= 1.0
    on_boundary = any(_boundary_flags(params, torques))

    points: list[FixedPoint] = []
    for s1, s2 in BRANCHES:
        if not exists:
            points.append(FixedPoint(branch=(s1, s2), exists=False,
                                     on_boundary=on_boundary, state=None, energy=None))
            continue
        t1 = math.asin(sin1) if s1 == "+" else math.pi - math.asin(sin1)
        t2 = math.asin(sin2) if s2 == "+" else math.pi - math.asin(sin2)
        state = State(t1, 0.0, t2, 0.0)
        points.append(FixedPoint(branch=(s1, s2), exists=True, on_boundary=on_boundary,
                                 state=state, energy=hamiltonian(params, torques, state)))
    return points


def refine_fixed_point(params: ArmParams, torques: Torques, guess: State) -> FixedPoint:
    """Damped Newton iteration on vector_field = 0 starting from `guess`.

    The step is halved (up to 30 times) until the max-norm residual decreases.
    Convergence target: ||vector_field||_inf <= 1e-12 * mgL.

    Raises
    ------
    SingularJacobianError
        If the Jacobian at an iterate is numerically singular.
    ConvergenceError
        If 100 iterations do not reach the target (carries the best residual).
    """
    target = _NEWTON_RESIDUAL_REL * params.mgl
    z = np.array(guess, dtype=float)
    f = np.array(vector_field(params, torques, State(*z)))
    res = float(np.max(np.abs(f)))
    best = res
    iterations = 0
    while res > target:
        if iterations >= _NEWTON_MAX_ITER:
            raise ConvergenceError(
                f"no convergence in {_NEWTON_MAX_ITER} iterations; best residual {best:.3e}",
                best_residual=best)
        J = jacobian(params, torques, State(*z))
        try:
            step = np.linalg.solve(J, f)
        except np.linalg.LinAlgError as exc:
            raise SingularJacobianError(
                f"singular Jacobian at iterate {tuple(z)}", best_residual=best) from exc
        alpha = 1.0
        for _ in range(_NEWTON_MAX_HALVINGS + 1):
            z_new = z - alpha * step
            f_new = np.array(vector_field(params, torques, State(*z_new)))
            res_new = float(np.max(np.abs(f_new)))
            if res_new < res:
                break
            alpha *= 0.5
        else:
            raise ConvergenceError(
                f"Newton step stalled at residual {res:.3e} after "
                f"{_NEWTON_MAX_HALVINGS} halvings", best_residual=best)
        z, f, res = z_new, f_new, res_new
        best = min(best, res)
        iterations += 1

    state = State(*z)
    branch = ("+" if math.cos(state.theta1) >= 0.0 else "-",
              "+" if math.cos(state.theta2) >= 0.0 else "-")
    return FixedPoint(branch=branch, exists=True,
                      on_boundary=any(_boundary_flags(params, torques)),
                      state=state, energy=hamiltonian(params, torques, state),
                      newton_iterations=iterations)


def fixed_point_energies_closed_form(params: ArmParams, torques: Torques) -> list[float]:
    """Closed-form equilibrium energies in the arctan/sqrt form, branch order.

    These are the published analytic expressions, evaluated verbatim and kept
    for cross-checking against direct Hamiltonian evaluation. They agree with
    the direct values at beta1 = beta2 = 0 (and on the (+,+) branch for all
    admissible torques); on a cos < 0 branch the principal-value arctan drops
    a pi offset in the torque term, so the printed value differs from the
    direct one by pi*beta per such joint. Callers report both numbers.

    Raises
    ------
    ValueError
        If a square-root argument is negative (existence violated).
    """
    mgl = params.mgl
    arg1 = 4.0 * mgl * mgl - torques.beta1 * torques.beta1
    arg2 = mgl * mgl - torques.beta2 * torques.beta2
    if arg1 < 0.0 or arg2 < 0.0:
        raise ValueError("closed-form energies need |beta1| <= 2mgL and |beta2| <= mgL")
    r1 = math.sqrt(arg1)
    r2 = math.sqrt(arg2)
    # arctan(beta/r) with r = 0 means the angle sits at +/- pi/2 exactly
    a1 = math.atan(torques.beta1 / r1) if r1 > 0.0 else math.copysign(0.5 * math.pi, torques.beta1)
    a2 = math.atan(torques.beta2 / r2) if r2 > 0.0 else math.copysign(0.5 * math.pi, torques.beta2)
    b1 = torques.beta1
    b2 = torques.beta2
    return [
        -r2 - r1 - a1 * b1 - a2 * b2,      # branch (+,+)
        +r2 - r1 - a1 * b1 + a2 * b2,      # branch (+,-)
        -r2 + r1 + a1 * b1 - a2 * b2,      # branch (-,+)
        +r2 + r1 + a1 * b1 + a2 * b2,      # branch (-,-)
    ]
