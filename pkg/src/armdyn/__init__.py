"""Dynamics toolkit for a planar two-joint pendulum arm under constant torques.

Hamiltonian model, equilibrium branches with existence bounds, linear
stability classification, candidate invariant sheets, saddle-center normal
forms, symplectic integration, and a stability atlas over the torque plane.
"""

__version__ = "0.1.0"

from .atlas import (BoundaryProbe, BoundaryRay, RaySample, SweepCell,
                    boundary_degeneracy_probe, evaluate_cell, grid_value,
                    sweep_grid)
from .equilibria import (BRANCHES, FixedPoint, analytic_fixed_points,
                         fixed_point_energies_closed_form, refine_fixed_point)
from .errors import (ArmdynError, ClassificationError, ConvergenceError,
                     NumericalError, SingularJacobianError,
                     SpectrumInconsistencyError, StepFailureError,
                     TruncationError)
from .integrators import (EXPLICIT_ADAPTIVE, IMPLICIT_MIDPOINT, IntegratorSpec,
                          Trajectory, integrate, integrate_reduced)
from .manifolds import (InvarianceReport, ManifoldId, ReducedState, embed,
                        invariance_check, project, reduced_energy,
                        reduced_vector_field, residual, residual_series,
                        separatrix_energy, trajectory_residuals)
from .model import (ArmParams, State, Torques, canonicalize_angles, hamiltonian,
                    vector_field, winding_energy_shift)
from .normal_form import (MIXED, PURE_HYPERBOLIC, PURE_PERIODIC, STATIONARY,
                          EnergySplit, NormalFormFrame, alternate_closed_forms,
                          build_normal_form, energy_split, from_normal_coords,
                          linearized_orbit, to_normal_coords)
from .stability import (DEGENERATE, PURE_CENTER, PURE_SADDLE, SADDLE_CENTER,
                        SYMPLECTIC_FORM, Classification, EigenSet, classify,
                        default_tol_zero, eigen4, jacobian, linear_propagate)

__all__ = [
    "__version__",
    "ArmParams", "Torques", "State", "hamiltonian", "vector_field",
    "canonicalize_angles", "winding_energy_shift",
    "BRANCHES", "FixedPoint", "analytic_fixed_points", "refine_fixed_point",
    "fixed_point_energies_closed_form",
    "PURE_CENTER", "SADDLE_CENTER", "PURE_SADDLE", "DEGENERATE",
    "SYMPLECTIC_FORM", "EigenSet", "Classification", "jacobian", "eigen4",
    "classify", "default_tol_zero", "linear_propagate",
    "ManifoldId", "ReducedState", "InvarianceReport", "embed", "project",
    "residual", "residual_series", "trajectory_residuals",
    "reduced_vector_field", "reduced_energy", "separatrix_energy",
    "invariance_check",
    "STATIONARY", "PURE_PERIODIC", "PURE_HYPERBOLIC", "MIXED",
    "NormalFormFrame", "EnergySplit", "build_normal_form", "to_normal_coords",
    "from_normal_coords", "energy_split", "linearized_orbit",
    "alternate_closed_forms",
    "IMPLICIT_MIDPOINT", "EXPLICIT_ADAPTIVE", "IntegratorSpec", "Trajectory",
    "integrate", "integrate_reduced",
    "SweepCell", "RaySample", "BoundaryRay", "BoundaryProbe", "grid_value",
    "evaluate_cell", "sweep_grid", "boundary_degeneracy_probe",
    "ArmdynError", "ConvergenceError", "SingularJacobianError",
    "NumericalError", "ClassificationError", "SpectrumInconsistencyError",
    "StepFailureError", "TruncationError",
]
