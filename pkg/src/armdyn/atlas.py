"""Stability atlas over the torque plane.

Grid sweeps recording existence, classification, and the smallest eigenvalue
modulus of the four equilibrium branches, plus a ray probe that tracks how the
spectrum collapses on approach to the existence boundary |beta1| = 2mgL,
|beta2| = mgL.
"""

from __future__ import annotations

from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass

import numpy as np

from .equilibria import analytic_fixed_points
from .model import ArmParams, Torques
from .stability import classify, default_tol_zero, eigen4, jacobian


@dataclass(frozen=True)
class SweepCell:
    """One torque-grid cell: per-branch existence and classification."""

    beta1: float
    beta2: float
    exists: tuple[bool, bool, bool, bool]
    on_boundary: bool
    classifications: tuple[str | None, str | None, str | None, str | None]
    min_abs_eig: float | None
    error: str | None = None


@dataclass(frozen=True)
class RaySample:
    """Spectrum floor of the branch-(+,+) point at one boundary distance."""

    distance: float
    beta1: float
    beta2: float
    min_abs_eig: float


@dataclass(frozen=True)
class BoundaryRay:
    """Samples along one inward ray, plus the spectrum on the boundary itself."""

    name: str
    samples: tuple[RaySample, ...]
    boundary_beta1: float
    boundary_beta2: float
    boundary_spectrum: tuple[complex, complex, complex, complex]
    boundary_zero_count: int


@dataclass(frozen=True)
class BoundaryProbe:
    tol_zero: float
    rays: tuple[BoundaryRay, ...]


def grid_value(lo: float, hi: float, i: int, n: int) -> float:
    """Endpoint-inclusive uniform grid node, identical across processes."""
    if n < 2:
        raise ValueError("grid resolution must be at least 2")
    return lo + i * (hi - lo) / (n - 1)


def evaluate_cell(params: ArmParams, torques: Torques,
                  tol_zero: float | None = None) -> SweepCell:
    """Classify all four equilibrium branches at one torque pair.

    Failures are captured in the `error` field instead of raised, so a sweep
    survives isolated bad cells.
    """
    if tol_zero is None:
        tol_zero = default_tol_zero(params)
    points = analytic_fixed_points(params, torques)
    exists = tuple(fp.exists for fp in points)
    on_boundary = any(fp.on_boundary for fp in points)
    kinds: list[str | None] = [None, None, None, None]
    min_abs: float | None = None
    error: str | None = None
    for i, fp in enumerate(points):
        if not fp.exists:
            continue
        try:
            es = eigen4(jacobian(params, torques, fp.state))
            kinds[i] = classify(es, tol_zero).kind
            floor = float(np.min(np.abs(es.values)))
        except Exception as exc:  # keep the sweep alive, report the cell
            error = f"branch {''.join(fp.branch)}: {exc}"
            continue
        if min_abs is None or floor < min_abs:
            min_abs = floor
    return SweepCell(beta1=torques.beta1, beta2=torques.beta2, exists=exists,
                     on_boundary=on_boundary,
                     classifications=(kinds[0], kinds[1], kinds[2], kinds[3]),
                     min_abs_eig=min_abs, error=error)


def _cell_worker(args: tuple[float, float, float, float, float, float]) -> SweepCell:
    m, length, g, b1, b2, tol_zero = args
    return evaluate_cell(ArmParams(m=m, L=length, g=g), Torques(beta1=b1, beta2=b2),
                         tol_zero)


def sweep_grid(params: ArmParams, beta1_range: tuple[float, float],
               beta2_range: tuple[float, float], n1: int, n2: int,
               tol_zero: float | None = None, jobs: int = 1) -> tuple[SweepCell, ...]:
    """Evaluate an n1 x n2 torque grid, row-major in (beta1, beta2).

    `jobs` > 1 fans cells out to worker processes; the collector preserves
    grid order, so output is identical to a serial run.
    """
    if tol_zero is None:
        tol_zero = default_tol_zero(params)
    args = [(params.m, params.L, params.g,
             grid_value(beta1_range[0], beta1_range[1], i, n1),
             grid_value(beta2_range[0], beta2_range[1], j, n2),
             tol_zero)
            for i in range(n1) for j in range(n2)]
    if jobs <= 1:
        return tuple(_cell_worker(a) for a in args)
    chunk = max(1, len(args) // (jobs * 8))
    with ProcessPoolExecutor(max_workers=jobs) as pool:
        return tuple(pool.map(_cell_worker, args, chunksize=chunk))


_RAY_NAMES = ("edge_b1_pos", "edge_b1_neg", "edge_b2_pos", "edge_b2_neg",
              "corner_pp", "corner_pn", "corner_np", "corner_nn")


def _ray_betas(name: str, mgl: float, delta: float) -> tuple[float, float]:
    b1max = 2.0 * mgl
    if name == "edge_b1_pos":
        return b1max - delta, 0.0
    if name == "edge_b1_neg":
        return -(b1max - delta), 0.0
    if name == "edge_b2_pos":
        return 0.0, mgl - delta
    if name == "edge_b2_neg":
        return 0.0, -(mgl - delta)
    s1 = 1.0 if name[7] == "p" else -1.0
    s2 = 1.0 if name[8] == "p" else -1.0
    return s1 * (b1max - delta), s2 * (mgl - delta)


def boundary_degeneracy_probe(params: ArmParams,
                              distances: tuple[float, ...] | None = None,
                              tol_zero: float | None = None) -> BoundaryProbe:
    """Track min |lambda| of the branch-(+,+) point along 8 inward rays.

    Rays hit the 4 edge midpoints and 4 corners of the existence rectangle.
    Samples run from the largest distance inward; each ray also records the
    spectrum measured exactly on the boundary and how many of its eigenvalues
    fall below `tol_zero`.
    """
    if tol_zero is None:
        tol_zero = default_tol_zero(params)
    mgl = params.mgl
    if distances is None:
        distances = tuple(10.0 ** (-k) * mgl for k in range(2, 9))
    rays = []
    for name in _RAY_NAMES:
        samples = []
        for delta in distances:
            b1, b2 = _ray_betas(name, mgl, delta)
            torques = Torques(beta1=b1, beta2=b2)
            fp = analytic_fixed_points(params, torques)[0]
            values = eigen4(jacobian(params, torques, fp.state)).values
            samples.append(RaySample(distance=delta, beta1=b1, beta2=b2,
                                     min_abs_eig=float(np.min(np.abs(values)))))
        b1, b2 = _ray_betas(name, mgl, 0.0)
        torques = Torques(beta1=b1, beta2=b2)
        fp = analytic_fixed_points(params, torques)[0]
        spectrum = eigen4(jacobian(params, torques, fp.state)).values
        zero_count = int(np.count_nonzero(np.abs(spectrum) < tol_zero))
        rays.append(BoundaryRay(name=name, samples=tuple(samples),
                                boundary_beta1=b1, boundary_beta2=b2,
                                boundary_spectrum=tuple(complex(v) for v in spectrum),
                                boundary_zero_count=zero_count))
    return BoundaryProbe(tol_zero=tol_zero, rays=tuple(rays))
