"""Quadratic normal form at a saddle-center.

A linear symplectic frame (x, p_x, y, p_y) in which the quadratic Hamiltonian
splits into a hyperbolic part (nu/2)(p_x^2 - x^2) and a rotational part
(omega/2)(y^2 + p_y^2), built from the eigen-decomposition of the Jacobian
with symplectic normalization of the eigenvectors.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .equilibria import FixedPoint
from .errors import ClassificationError, NumericalError
from .model import ArmParams, State, Torques
from .stability import (SADDLE_CENTER, SYMPLECTIC_FORM, classify, default_tol_zero,
                        eigen4, jacobian)

STATIONARY = "Stationary"
PURE_PERIODIC = "PurePeriodic"
PURE_HYPERBOLIC = "PureHyperbolic"
MIXED = "Mixed"

_SYMPLECTIC_TOL = 1e-10
_INVERSE_TOL = 1e-12
_BLOCK_TOL = 1e-10


@dataclass(frozen=True)
class NormalFormFrame:
    """Saddle-center frame: new coordinates (x, p_x, y, p_y) at `base_point`.

    `transform` columns map normal coordinates to state displacements;
    `inverse_transform` is its (symplectic) inverse. `nu` is the hyperbolic
    exponent, `omega` the rotation frequency (both > 0), `epsilon` the energy
    of the base point, so H ~ e_hyp + e_rot + epsilon near it.
    """

    params: ArmParams
    base_point: State
    transform: np.ndarray
    inverse_transform: np.ndarray
    nu: float
    omega: float
    epsilon: float


@dataclass(frozen=True)
class EnergySplit:
    """Decoupled quadratic energies at a state near the saddle-center."""

    e_hyp: float
    e_rot: float
    motion_class: str


def _real_eigenvector(column: np.ndarray) -> np.ndarray:
    # strip the arbitrary complex phase; the result must be essentially real
    idx = int(np.argmax(np.abs(column)))
    v = column / (column[idx] / abs(column[idx]))
    if np.max(np.abs(v.imag)) > 1e-9 * np.max(np.abs(v.real)):
        raise NumericalError("eigenvector of a real eigenvalue failed to realize")
    return np.real(v)


def build_normal_form(params: ArmParams, torques: Torques, fp: FixedPoint,
                      tol_zero: float | None = None) -> NormalFormFrame:
    """Construct the symplectic normal-form frame at a saddle-center.

    Raises
    ------
    ClassificationError
        If `fp` is not classified SaddleCenter at `tol_zero`.
    NumericalError
        If the eigenvectors are too ill-conditioned to normalize, or the
        constructed frame fails its own symplecticity/decoupling checks.
    """
    if fp.state is None:
        raise ClassificationError("fixed point does not exist; no frame to build")
    if tol_zero is None:
        tol_zero = default_tol_zero(params)
    J = jacobian(params, torques, fp.state)
    es = eigen4(J)
    cls = classify(es, tol_zero)
    if cls.kind != SADDLE_CENTER:
        raise ClassificationError(f"normal form needs a SaddleCenter, got {cls.kind}")

    values = es.values
    i_plus = int(np.argmax(values.real))
    i_minus = int(np.argmin(values.real))
    i_rot = next(i for i in range(4)
                 if i not in (i_plus, i_minus) and values[i].imag > 0.0)
    nu = float(values[i_plus].real)
    omega = float(values[i_rot].imag)

    S = SYMPLECTIC_FORM
    a = _real_eigenvector(es.vectors[:, i_plus])
    b = _real_eigenvector(es.vectors[:, i_minus])
    sig = float(a @ S @ b)
    if abs(sig) < 1e-12:
        raise NumericalError("hyperbolic eigenvectors are symplectically degenerate")
    if sig > 0.0:
        b = -b
        sig = -sig
    scale = math.sqrt(-2.0 / sig)
    t_x = scale * (a + b) / 2.0
    t_px = scale * (a - b) / 2.0

    w = es.vectors[:, i_rot]
    u = np.real(w).copy()
    v = np.imag(w).copy()
    pairing = float(u @ S @ v)
    if abs(pairing) < 1e-12:
        raise NumericalError("rotational eigenvector is symplectically degenerate")
    if pairing < 0.0:
        v = -v
        pairing = -pairing
    gamma = 1.0 / math.sqrt(pairing)
    t_y = gamma * u
    t_py = gamma * v

    hessian = -S @ J
    T = np.column_stack([t_x, t_px, t_y, t_py])
    q = T.T @ hessian @ T
    if q[0, 0] > 0.0:
        # orient the hyperbolic plane so the form reads (nu/2)(p_x^2 - x^2)
        t_x, t_px = t_px, -t_x
        T = np.column_stack([t_x, t_px, t_y, t_py])
        q = T.T @ hessian @ T
    if q[2, 2] < 0.0:
        raise NumericalError("rotational block came out negative definite")

    sympl_err = float(np.max(np.abs(T.T @ S @ T - S)))
    if sympl_err > _SYMPLECTIC_TOL:
        raise NumericalError(f"frame is not symplectic: residual {sympl_err:.3e}")
    qn = float(np.max(np.abs(q)))
    coupling = max(float(np.max(np.abs(q[:2, 2:]))), float(np.max(np.abs(q[2:, :2]))))
    if coupling > _BLOCK_TOL * qn:
        raise NumericalError(f"block coupling residual {coupling:.3e} too large")
    target = np.array([-nu, nu, omega, omega])
    if float(np.max(np.abs(np.diag(q) - target))) > _BLOCK_TOL * max(nu, omega):
        raise NumericalError(f"normal-form diagonal {np.diag(q)} != {target}")

    inverse = -S @ T.T @ S  # symplectic inverse
    if float(np.max(np.abs(T @ inverse - np.eye(4)))) > _INVERSE_TOL:
        raise NumericalError("transform/inverse product deviates from identity")

    return NormalFormFrame(params=params, base_point=fp.state, transform=T,
                           inverse_transform=inverse, nu=nu, omega=omega,
                           epsilon=float(fp.energy))


def to_normal_coords(frame: NormalFormFrame, s: State) -> tuple[float, float, float, float]:
    """Map a state to normal coordinates (x, p_x, y, p_y)."""
    d = np.array(s, dtype=float) - np.array(frame.base_point, dtype=float)
    n = frame.inverse_transform @ d
    return float(n[0]), float(n[1]), float(n[2]), float(n[3])


def from_normal_coords(frame: NormalFormFrame, n) -> State:
    """Map normal coordinates back to a state; inverse of :func:`to_normal_coords`."""
    d = frame.transform @ np.asarray(n, dtype=float)
    base = frame.base_point
    return State(base.theta1 + d[0], base.p1 + d[1], base.theta2 + d[2], base.p2 + d[3])


def energy_split(frame: NormalFormFrame, s: State,
                 tol: float | None = None) -> EnergySplit:
    """Decoupled quadratic energies and the motion class at `s`.

    Meaningful in the linear neighborhood of the base point (not enforced).
    `tol` bounds what counts as a vanishing component; default 1e-10 * mgL.
    """
    if tol is None:
        tol = 1e-10 * frame.params.mgl
    x, px, y, py = to_normal_coords(frame, s)
    e_hyp = 0.5 * frame.nu * (px * px - x * x)
    e_rot = 0.5 * frame.omega * (y * y + py * py)
    hyp_active = abs(e_hyp) >= tol
    rot_active = e_rot >= tol
    if not hyp_active and not rot_active:
        motion = STATIONARY
    elif rot_active and not hyp_active:
        motion = PURE_PERIODIC
    elif hyp_active and not rot_active:
        motion = PURE_HYPERBOLIC
    else:
        motion = MIXED
    return EnergySplit(e_hyp=e_hyp, e_rot=e_rot, motion_class=motion)


def linearized_orbit(frame: NormalFormFrame, n0, t: float) -> tuple[float, float, float, float]:
    """Evolve normal coordinates under the decoupled quadratic flow for time t.

    The (x, p_x) pair follows the hyperbolic flow with exponent nu, the
    (y, p_y) pair rotates with frequency omega; e_hyp and e_rot are each
    conserved.
    """
    x0, px0, y0, py0 = (float(c) for c in n0)
    ch = math.cosh(frame.nu * t)
    sh = math.sinh(frame.nu * t)
    co = math.cos(frame.omega * t)
    si = math.sin(frame.omega * t)
    return (ch * x0 + sh * px0,
            sh * x0 + ch * px0,
            co * y0 + si * py0,
            -si * y0 + co * py0)


def alternate_closed_forms(params: ArmParams) -> dict:
    """Alternative published closed forms, kept for cross-checking reports.

    Their frequencies disagree with the Jacobian spectrum this package
    adopts, and while the listed transformation is exactly symplectic it
    leaves the two position coordinates coupled at the torque-free
    saddle-center (measured as `transform_alternate_block_coupling`).
    Reports print both sets of numbers side by side rather than silently
    picking one.
    """
    from .equilibria import analytic_fixed_points

    rt17 = math.sqrt(17.0)
    a = 5.0 + rt17
    bdenom = 17.0 + 5.0 * rt17
    w0 = params.omega0
    transform = np.array([
        [1.0, 0.0, 1.0, 0.0],
        [0.0, -4.0 / bdenom, 0.0, a * a / (2.0 * bdenom)],
        [a / 4.0, 0.0, 2.0 / a, 0.0],
        [0.0, 2.0 * a / bdenom, 0.0, -2.0 * a / bdenom],
    ])
    S = SYMPLECTIC_FORM
    sympl_res = float(np.max(np.abs(transform.T @ S @ transform - S)))
    no_torque = Torques(0.0, 0.0)
    fp = analytic_fixed_points(params, no_torque)[1]
    hessian = -S @ jacobian(params, no_torque, fp.state)
    q = transform.T @ hessian @ transform
    coupling = float(np.max(np.abs(q - np.diag(np.diag(q)))))
    return {
        "saddle_frequency_adopted": 2.0 ** 0.25 * w0,
        "saddle_frequency_alternate": math.sqrt(2.0 * (rt17 - 3.0)) / 2.0 * w0,
        "center_frequencies_adopted": (math.sqrt(2.0 - math.sqrt(2.0)) * w0,
                                       math.sqrt(2.0 + math.sqrt(2.0)) * w0),
        "center_frequencies_alternate": (math.sqrt(2.0 * (5.0 + rt17)) / 2.0 * w0,
                                         math.sqrt(2.0 * (5.0 - rt17)) / 2.0 * w0),
        "epsilon_alternate": params.mgl,
        "transform_alternate": transform,
        "transform_alternate_symplectic_residual": sympl_res,
        "transform_alternate_block_coupling": coupling,
    }
