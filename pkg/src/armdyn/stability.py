"""Linear stability analysis: Jacobian, 4x4 eigen-solution, classification, propagator.

The Jacobian is hand-differentiated from the canonical equations so that at
the torque-free equilibria it reproduces the four constant matrices of the
linearized system entrywise exactly.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
import scipy.linalg

from .errors import NumericalError, SpectrumInconsistencyError
from .model import ArmParams, State, Torques

PURE_CENTER = "PureCenter"
SADDLE_CENTER = "SaddleCenter"
PURE_SADDLE = "PureSaddle"
DEGENERATE = "Degenerate"

# standard symplectic form for coordinate order (theta1, p1, theta2, p2)
SYMPLECTIC_FORM = np.array([
    [0.0, 1.0, 0.0, 0.0],
    [-1.0, 0.0, 0.0, 0.0],
    [0.0, 0.0, 0.0, 1.0],
    [0.0, 0.0, -1.0, 0.0],
])

_EIG_RESIDUAL_REL = 1e-9
_EIGVEC_COND_LIMIT = 1e8


def default_tol_zero(params: ArmParams) -> float:
    """Default zero-eigenvalue threshold: 1e-7 * omega0 (1/s)."""
    return 1e-7 * params.omega0


def jacobian(params: ArmParams, torques: Torques, s: State) -> np.ndarray:
    """Analytic 4x4 Jacobian of :func:`armdyn.model.vector_field` at `s`.

    Constant torques do not enter (they are additive in p_dot); the argument is
    kept so call sites read naturally. Row/column order matches the state
    order (theta1, p1, theta2, p2).
    """
    del torques  # additive constants; no effect on derivatives
    k = 1.0 / params.ml2
    mgl = params.mgl
    t1, p1, t2, p2 = s

    d = t1 - t2
    cd = math.cos(d)
    sd = math.sin(d)
    den = 1.0 + sd * sd
    den2 = den * den
    den3 = den2 * den
    w = p1 * p1 + 2.0 * p2 * p2 - 2.0 * cd * p1 * p2

    # f1 = k (p1 - cd p2)/den, f3 = k (2 p2 - cd p1)/den
    df1_dd = k * sd * (p2 / den - 2.0 * cd * (p1 - cd * p2) / den2)
    df3_dd = k * sd * (p1 / den - 2.0 * cd * (2.0 * p2 - cd * p1) / den2)
    df1_dp1 = k / den
    df1_dp2 = -k * cd / den
    df3_dp1 = -k * cd / den
    df3_dp2 = 2.0 * k / den

    # coupling terms a = k w cd sd/den^2, b = k sd p1 p2/den; p_dot rows use a - b
    da_dd = k * (2.0 * sd * sd * cd * p1 * p2 / den2
                 + w * (cd * cd - sd * sd) / den2
                 - 4.0 * w * cd * cd * sd * sd / den3)
    db_dd = k * p1 * p2 * cd * (1.0 / den - 2.0 * sd * sd / den2)
    dab_dd = da_dd - db_dd
    dab_dp1 = k * cd * sd * (2.0 * p1 - 2.0 * cd * p2) / den2 - k * sd * p2 / den
    dab_dp2 = k * cd * sd * (4.0 * p2 - 2.0 * cd * p1) / den2 - k * sd * p1 / den

    return np.array([
        [df1_dd, df1_dp1, -df1_dd, df1_dp2],
        [dab_dd - 2.0 * mgl * math.cos(t1), dab_dp1, -dab_dd, dab_dp2],
        [df3_dd, df3_dp1, -df3_dd, df3_dp2],
        [-dab_dd, -dab_dp1, dab_dd - mgl * math.cos(t2), -dab_dp2],
    ])


@dataclass(frozen=True)
class EigenSet:
    """Eigen-solution of a 4x4 Jacobian.

    `values` are sorted by (real part, imaginary part) ascending so the output
    is deterministic. `residuals[i]` is ||J v_i - lambda_i v_i||_2 / ||v_i||_2
    and `jnorm` the Frobenius norm of the source matrix.
    """

    values: np.ndarray
    vectors: np.ndarray
    residuals: np.ndarray
    jnorm: float


def eigen4(J: np.ndarray) -> EigenSet:
    """All four eigenvalues/eigenvectors of `J` with residual validation.

    Raises
    ------
    NumericalError
        If any residual exceeds 1e-9 * ||J||_F.
    """
    J = np.asarray(J, dtype=float)
    if J.shape != (4, 4) or not np.all(np.isfinite(J)):
        raise ValueError("eigen4 expects a finite 4x4 real matrix")
    values, vectors = np.linalg.eig(J)
    order = np.lexsort((values.imag, values.real))
    values = values[order]
    vectors = vectors[:, order]
    jnorm = float(np.linalg.norm(J))
    residuals = np.array([
        float(np.linalg.norm(J @ vectors[:, i] - values[i] * vectors[:, i])
              / np.linalg.norm(vectors[:, i]))
        for i in range(4)
    ])
    limit = _EIG_RESIDUAL_REL * max(jnorm, np.finfo(float).tiny)
    if np.any(residuals > limit):
        raise NumericalError(
            f"eigenvalue residuals {residuals} exceed {limit:.3e} for ||J||_F = {jnorm:.3e}")
    return EigenSet(values=values, vectors=vectors, residuals=residuals, jnorm=jnorm)


@dataclass(frozen=True)
class Classification:
    """Stability class of an equilibrium's spectrum.

    `kind` is one of PURE_CENTER, SADDLE_CENTER, PURE_SADDLE, DEGENERATE;
    the counts describe the spectrum: plus/minus real pairs, plus/minus
    imaginary pairs, and eigenvalues of near-zero modulus.
    """

    kind: str
    real_pairs: int
    imag_pairs: int
    zero_count: int


def classify(e: EigenSet, tol_zero: float) -> Classification:
    """Classify a Hamiltonian 4x4 spectrum.

    An eigenvalue counts as zero when |lambda| < tol_zero (absolute rate
    threshold, 1/s). Among nonzero eigenvalues, "purely real/imaginary" is
    judged against tol_zero * ||J||_F.

    Raises
    ------
    SpectrumInconsistencyError
        If the values do not pair up as (lambda, -lambda) within
        1e-9 * ||J||_F, or a nonzero eigenvalue is neither purely real nor
        purely imaginary at the working tolerance (a complex quartet; this
        Hamiltonian family cannot produce one).
    """
    if tol_zero <= 0.0:
        raise ValueError("tol_zero must be positive")
    values = e.values
    pair_tol = max(_EIG_RESIDUAL_REL * e.jnorm, 1e-300)
    unmatched = list(range(4))
    while unmatched:
        i = unmatched.pop()
        partner = min(unmatched, key=lambda j: abs(values[i] + values[j]), default=None)
        if partner is None or abs(values[i] + values[partner]) > pair_tol:
            raise SpectrumInconsistencyError(
                f"eigenvalues {values} do not form +/- pairs within {pair_tol:.3e}")
        unmatched.remove(partner)

    part_tol = tol_zero * e.jnorm
    zero_count = int(np.sum(np.abs(values) < tol_zero))
    real_pairs = 0
    imag_pairs = 0
    for lam in values:
        if abs(lam) < tol_zero:
            continue
        if abs(lam.imag) < part_tol and lam.real > 0.0:
            real_pairs += 1
        elif abs(lam.real) < part_tol and lam.imag > 0.0:
            imag_pairs += 1
        elif abs(lam.imag) >= part_tol and abs(lam.real) >= part_tol:
            raise SpectrumInconsistencyError(
                f"eigenvalue {lam} is neither purely real nor purely imaginary "
                f"at tolerance {part_tol:.3e}")

    if zero_count > 0:
        kind = DEGENERATE
    elif real_pairs == 0 and imag_pairs == 2:
        kind = PURE_CENTER
    elif real_pairs == 1 and imag_pairs == 1:
        kind = SADDLE_CENTER
    elif real_pairs == 2 and imag_pairs == 0:
        kind = PURE_SADDLE
    else:
        raise SpectrumInconsistencyError(
            f"pair counts (real={real_pairs}, imag={imag_pairs}, zero={zero_count}) "
            "do not form a recognized class")
    return Classification(kind=kind, real_pairs=real_pairs, imag_pairs=imag_pairs,
                          zero_count=zero_count)


def linear_propagate(J: np.ndarray, x0: np.ndarray, t: float) -> np.ndarray:
    """exp(J t) @ x0 via eigen-decomposition.

    Falls back to scaling-and-squaring (scipy expm) when the eigenvector
    matrix is ill-conditioned (condition number > 1e8), e.g. near-degenerate
    boundary Jacobians.
    """
    if not math.isfinite(t):
        raise ValueError("t must be finite")
    J = np.asarray(J, dtype=float)
    x0 = np.asarray(x0, dtype=float)
    values, vectors = np.linalg.eig(J)
    if np.linalg.cond(vectors) > _EIGVEC_COND_LIMIT:
        return scipy.linalg.expm(J * t) @ x0
    coeffs = np.linalg.solve(vectors, x0.astype(complex))
    return np.real(vectors @ (np.exp(values * t) * coeffs))
