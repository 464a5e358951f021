"""Command-line front-end.

Every subcommand resolves a Scenario (defaults < config file < flags), runs
the corresponding library call, and writes one deterministic CSV or JSON
document to --out (stdout when omitted). `--plot` additionally renders a PNG
next to the output file. Exit codes: 0 success, 1 error, 2 success with
warnings (non-existence, boundary degeneracy, failed invariance verdicts).
"""

from __future__ import annotations

import argparse
import math
import os
import sys

import numpy as np

from . import __version__, plotting
from .atlas import sweep_grid
from .config import (BRANCH_LABELS, ConfigError, Scenario, resolve_scenario)
from .equilibria import (analytic_fixed_points, fixed_point_energies_closed_form,
                         refine_fixed_point)
from .errors import ArmdynError
from .integrators import (EXPLICIT_ADAPTIVE, IMPLICIT_MIDPOINT, IntegratorSpec,
                          integrate, integrate_reduced)
from .manifolds import (ManifoldId, ReducedState, embed, reduced_energy,
                        residual_series, separatrix_energy)
from .model import State, hamiltonian
from .normal_form import (alternate_closed_forms, build_normal_form,
                          from_normal_coords, to_normal_coords)
from .reporting import (complex_pair, emit, json_doc, render_csv, render_json,
                        state_doc)
from .stability import DEGENERATE, SYMPLECTIC_FORM, classify, eigen4, jacobian

_EIG_COLUMNS = [f"eig{i}_{part}" for i in range(1, 5) for part in ("re", "im")]


class _Parser(argparse.ArgumentParser):
    """argparse maps usage errors to exit code 2; this CLI reserves 2 for
    success-with-warnings, so remap to 1."""

    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(1, f"{self.prog}: error: {message}\n")


def _build_parser() -> _Parser:
    common = _Parser(add_help=False)
    g = common.add_argument_group("scenario")
    g.add_argument("--m", type=float, help="bob mass (kg)")
    g.add_argument("--L", type=float, help="rod length (m)")
    g.add_argument("--g", type=float, help="gravity (m/s^2)")
    g.add_argument("--beta1", type=float, help="constant torque on joint 1")
    g.add_argument("--beta2", type=float, help="constant torque on joint 2")
    g.add_argument("--config", help="INI file, CSV echo block, or JSON report")
    g.add_argument("--out", help="output path (stdout when omitted)")
    g.add_argument("--tol-zero", type=float,
                   help="zero-eigenvalue threshold (1/s), default 1e-7*omega0")
    g.add_argument("--format", help="output format: csv or json")

    parser = _Parser(prog="armdyn",
                     description="Planar two-joint arm dynamics toolkit")
    parser.add_argument("--version", action="version",
                        version=f"armdyn {__version__}")
    sub = parser.add_subparsers(dest="command", required=True, metavar="command")

    p = sub.add_parser("fixed-points", parents=[common],
                       help="locate, refine, and classify the four equilibria")
    p.add_argument("--plot", action="store_true", default=False)

    p = sub.add_parser("classify", parents=[common],
                       help="spectrum and stability class at a point")
    p.add_argument("--at", help="equilibrium label P1..P4 (default P1)")
    p.add_argument("--state", help="explicit state theta1,p1,theta2,p2")

    p = sub.add_parser("simulate", parents=[common],
                       help="integrate the full system from one state")
    p.add_argument("--state", help="initial state theta1,p1,theta2,p2")
    p.add_argument("--T", type=float, help="time horizon (s)")
    p.add_argument("--step", type=float, help="fixed step size (s)")
    p.add_argument("--method", help="midpoint or adaptive")
    p.add_argument("--tolerance", type=float, help="adaptive relative tolerance")
    p.add_argument("--plot", action="store_true", default=False)

    p = sub.add_parser("portrait", parents=[common],
                       help="orbit families on a manifold or normal-form plane")
    p.add_argument("--plane", help="manifold-M1, manifold-M2, normal-xpx, normal-ypy")
    p.add_argument("--n-orbits", type=int, help="number of orbits (default 9)")
    p.add_argument("--T", type=float, help="time horizon per orbit (s)")
    p.add_argument("--step", type=float, help="fixed step size (s)")
    p.add_argument("--at", help="base equilibrium for normal planes (default P2)")
    p.add_argument("--amplitude", type=float,
                   help="largest normal-coordinate amplitude (default 0.05)")
    p.add_argument("--plot", action="store_true", default=False)

    p = sub.add_parser("manifold-check", parents=[common],
                       help="measure invariance of a candidate sheet")
    p.add_argument("--manifold", help="M1 or M2")
    p.add_argument("--amplitude", type=float,
                   help="initial theta1 on the sheet (default 0.3)")
    p.add_argument("--T", type=float, help="time horizon (s)")
    p.add_argument("--step", type=float, help="fixed step size (s)")
    p.add_argument("--tol", type=float, help="residual tolerance (default 1e-6)")
    p.add_argument("--plot", action="store_true", default=False)

    p = sub.add_parser("normal-form", parents=[common],
                       help="saddle-center normal-form frame at an equilibrium")
    p.add_argument("--at", help="equilibrium label P1..P4 (default P2)")

    p = sub.add_parser("sweep", parents=[common],
                       help="existence/classification atlas over the torque plane")
    p.add_argument("--beta1-lo", type=float)
    p.add_argument("--beta1-hi", type=float)
    p.add_argument("--beta2-lo", type=float)
    p.add_argument("--beta2-hi", type=float)
    p.add_argument("--n1", type=int, help="grid points along beta1 (default 101)")
    p.add_argument("--n2", type=int, help="grid points along beta2 (default 101)")
    p.add_argument("--jobs", type=int, default=1,
                   help="worker processes (output is order-deterministic)")
    p.add_argument("--plot", action="store_true", default=False)

    return parser


_SCENARIO_ARG_KEYS = ("m", "L", "g", "beta1", "beta2", "tol_zero", "format",
                      "at", "state", "T", "step", "method", "tolerance",
                      "plane", "n_orbits", "amplitude", "manifold", "tol",
                      "beta1_lo", "beta1_hi", "beta2_lo", "beta2_hi", "n1", "n2")


def _scenario_from_ns(ns: argparse.Namespace) -> Scenario:
    cli_values = {key: getattr(ns, key) for key in _SCENARIO_ARG_KEYS
                  if getattr(ns, key, None) is not None}
    return resolve_scenario(ns.command, cli_values, ns.config)


def _plot_path(out: str) -> str:
    root, _ = os.path.splitext(out)
    return root + ".png"


def _emit_doc(sc: Scenario, out: str | None, summary: dict, columns: list[str],
              rows: list[list], body: dict) -> None:
    if sc.format == "csv":
        meta = sc.echo()
        meta.update(summary)
        emit(render_csv(meta, columns, rows), out)
    else:
        payload: dict = {}
        if summary:
            payload["summary"] = summary
        payload.update(body)
        emit(render_json(json_doc(sc.echo(), payload)), out)


def _branch_index(label: str) -> int:
    return BRANCH_LABELS.index(label)


def _refined_point(sc: Scenario, label: str):
    fp = analytic_fixed_points(sc.params, sc.torques)[_branch_index(label)]
    if not fp.exists:
        raise ArmdynError(f"equilibrium {label} does not exist for beta1="
                          f"{sc.torques.beta1!r}, beta2={sc.torques.beta2!r}")
    return refine_fixed_point(sc.params, sc.torques, fp.state)


def _integrator_spec(options: dict) -> IntegratorSpec:
    if options.get("method", "midpoint") == "adaptive":
        tolerance = options.get("tolerance") or 1e-10
        return IntegratorSpec(method=EXPLICIT_ADAPTIVE, step=None,
                              tolerance=tolerance)
    return IntegratorSpec(method=IMPLICIT_MIDPOINT, step=float(options["step"]))


def _eig_cells(values) -> list[float]:
    out: list[float] = []
    for lam in values:
        out.extend((float(lam.real), float(lam.imag)))
    return out


def _cmd_fixed_points(sc: Scenario, ns: argparse.Namespace) -> int:
    points = analytic_fixed_points(sc.params, sc.torques)
    refined = [refine_fixed_point(sc.params, sc.torques, fp.state) if fp.exists
               else fp for fp in points]
    try:
        closed = fixed_point_energies_closed_form(sc.params, sc.torques)
    except ValueError:
        closed = [None, None, None, None]

    kinds: list[str | None] = []
    eigensets = []
    for fp in refined:
        if fp.exists:
            es = eigen4(jacobian(sc.params, sc.torques, fp.state))
            eigensets.append(es)
            kinds.append(classify(es, sc.tol_zero).kind)
        else:
            eigensets.append(None)
            kinds.append(None)

    columns = ["branch", "exists", "on_boundary", "theta1", "p1", "theta2", "p2",
               "energy_direct", "energy_closed_form", "newton_iterations",
               *_EIG_COLUMNS, "kind", "real_pairs", "imag_pairs", "zero_count"]
    rows = []
    docs = []
    warn = False
    for i, fp in enumerate(refined):
        label = "".join(fp.branch)
        if not fp.exists:
            warn = True
            rows.append([label, False, fp.on_boundary] + [None] * 19)
            docs.append({"branch": label, "exists": False,
                         "on_boundary": fp.on_boundary})
            continue
        es = eigensets[i]
        cls = classify(es, sc.tol_zero)
        if fp.on_boundary or cls.kind == DEGENERATE:
            warn = True
        rows.append([label, True, fp.on_boundary,
                     fp.state.theta1, fp.state.p1, fp.state.theta2, fp.state.p2,
                     fp.energy, closed[i], fp.newton_iterations,
                     *_eig_cells(es.values), cls.kind, cls.real_pairs,
                     cls.imag_pairs, cls.zero_count])
        docs.append({"branch": label, "exists": True,
                     "on_boundary": fp.on_boundary, "state": state_doc(fp.state),
                     "energy_direct": float(fp.energy),
                     "energy_closed_form": closed[i],
                     "newton_iterations": fp.newton_iterations,
                     "eigenvalues": [complex_pair(v) for v in es.values],
                     "classification": {"kind": cls.kind,
                                        "real_pairs": cls.real_pairs,
                                        "imag_pairs": cls.imag_pairs,
                                        "zero_count": cls.zero_count}})
    _emit_doc(sc, ns.out, {}, columns, rows, {"points": docs})
    if ns.plot:
        plotting.fixed_points_figure(refined, kinds, _plot_path(ns.out))
    return 2 if warn else 0


def _cmd_classify(sc: Scenario, ns: argparse.Namespace) -> int:
    if sc.options.get("state") is not None:
        s = State(*sc.options["state"])
        origin = "state"
    else:
        origin = sc.options["at"]
        s = _refined_point(sc, origin).state
    es = eigen4(jacobian(sc.params, sc.torques, s))
    cls = classify(es, sc.tol_zero)
    columns = ["point", "theta1", "p1", "theta2", "p2", *_EIG_COLUMNS,
               "kind", "real_pairs", "imag_pairs", "zero_count"]
    rows = [[origin, s.theta1, s.p1, s.theta2, s.p2, *_eig_cells(es.values),
             cls.kind, cls.real_pairs, cls.imag_pairs, cls.zero_count]]
    body = {"point": origin, "state": state_doc(s),
            "eigenvalues": [complex_pair(v) for v in es.values],
            "classification": {"kind": cls.kind, "real_pairs": cls.real_pairs,
                               "imag_pairs": cls.imag_pairs,
                               "zero_count": cls.zero_count}}
    _emit_doc(sc, ns.out, {}, columns, rows, body)
    return 2 if cls.kind == DEGENERATE else 0


def _cmd_simulate(sc: Scenario, ns: argparse.Namespace) -> int:
    spec = _integrator_spec(sc.options)
    s0 = State(*sc.options["state"])
    traj = integrate(sc.params, sc.torques, s0, float(sc.options["T"]), spec)
    summary = {"n_steps": int(traj.times.size - 1),
               "energy_drift": traj.energy_drift}
    if traj.drift_coefficient is not None:
        summary["drift_coefficient"] = traj.drift_coefficient
    columns = ["time", "theta1", "p1", "theta2", "p2", "energy"]
    rows = [[traj.times[i], *traj.states[i], traj.energies[i]]
            for i in range(traj.times.size)]
    body = {"trajectory": {
        "time": [float(v) for v in traj.times],
        "theta1": [float(v) for v in traj.states[:, 0]],
        "p1": [float(v) for v in traj.states[:, 1]],
        "theta2": [float(v) for v in traj.states[:, 2]],
        "p2": [float(v) for v in traj.states[:, 3]],
        "energy": [float(v) for v in traj.energies]}}
    _emit_doc(sc, ns.out, summary, columns, rows, body)
    if ns.plot:
        plotting.trajectory_figure(traj, _plot_path(ns.out))
    return 0


def _manifold_orbits(sc: Scenario) -> tuple[dict, list[tuple], ManifoldId]:
    mid = ManifoldId[sc.options["plane"].split("-")[1]]
    n = int(sc.options["n_orbits"])
    e_sep = separatrix_energy(sc.params, mid)
    e_min = reduced_energy(sc.params, mid, ReducedState(0.0, 0.0))
    # 4 ml2 converts reduced energy above the bottom into p1^2
    four_ml2 = 4.0 * sc.params.ml2
    spec = IntegratorSpec(step=float(sc.options["step"]))
    orbits = []
    summary: dict = {"separatrix_energy": e_sep, "min_energy": e_min}
    for j in range(n):
        # energies straddle the separatrix: fraction 1 lands exactly on it
        frac = 2.0 * (j + 1) / (n + 1)
        e = e_min + frac * (e_sep - e_min)
        p1 = math.sqrt((e - e_min) * four_ml2)
        try:
            traj = integrate_reduced(sc.params, ReducedState(0.0, p1),
                                     float(sc.options["T"]), spec, manifold=mid)
        except ArmdynError as exc:
            summary[f"orbit_{j}_error"] = str(exc)
            continue
        orbits.append((j, e, traj))
    return summary, orbits, mid


def _normal_orbits(sc: Scenario) -> tuple[dict, list[tuple], object]:
    fp = _refined_point(sc, sc.options["at"])
    frame = build_normal_form(sc.params, sc.torques, fp, tol_zero=sc.tol_zero)
    plane = sc.options["plane"]
    n = int(sc.options["n_orbits"])
    amp = float(sc.options["amplitude"])
    spec = IntegratorSpec(step=float(sc.options["step"]))
    summary: dict = {"nu": frame.nu, "omega": frame.omega, "epsilon": frame.epsilon}
    orbits = []
    for j in range(n):
        a = amp * (j + 1) / n
        if plane == "normal-ypy":
            n0 = (0.0, 0.0, a, 0.0)
        else:
            # spread starts over the four hyperbolic sectors
            phi = 2.0 * math.pi * (j + 0.5) / n
            n0 = (a * math.cos(phi), a * math.sin(phi), 0.0, 0.0)
        s0 = from_normal_coords(frame, n0)
        try:
            traj = integrate(sc.params, sc.torques, s0, float(sc.options["T"]), spec)
        except ArmdynError as exc:
            summary[f"orbit_{j}_error"] = str(exc)
            continue
        orbits.append((j, a, traj))
    return summary, orbits, frame


def _cmd_portrait(sc: Scenario, ns: argparse.Namespace) -> int:
    plane = sc.options["plane"]
    if plane.startswith("manifold-"):
        summary, orbits, mid = _manifold_orbits(sc)
        columns = ["orbit", "time", "theta1", "p1", "theta2", "p2", "energy"]
        rows = []
        docs = []
        curves = []
        for j, e, traj in orbits:
            t2 = mid.theta2_value
            sgn = mid.p2_sign
            for i in range(traj.times.size):
                t1, p1 = traj.states[i]
                rows.append([j, traj.times[i], t1, p1, t2,
                             sgn * 0.5 * p1 * math.cos(t1), traj.energies[i]])
            docs.append({"orbit": j, "energy": e,
                         "theta1": [float(v) for v in traj.states[:, 0]],
                         "p1": [float(v) for v in traj.states[:, 1]]})
            curves.append((traj.states[:, 0], traj.states[:, 1]))
        xlabel, ylabel = "theta1 (rad)", "p1"
    else:
        summary, orbits, frame = _normal_orbits(sc)
        columns = ["orbit", "time", "theta1", "p1", "theta2", "p2", "energy",
                   "x", "px", "y", "py"]
        rows = []
        docs = []
        curves = []
        cols = (0, 1) if plane == "normal-xpx" else (2, 3)
        for j, a, traj in orbits:
            normal = np.array([to_normal_coords(frame, State(*row))
                               for row in traj.states])
            for i in range(traj.times.size):
                rows.append([j, traj.times[i], *traj.states[i],
                             traj.energies[i], *normal[i]])
            docs.append({"orbit": j, "amplitude": a,
                         "x": [float(v) for v in normal[:, 0]],
                         "px": [float(v) for v in normal[:, 1]],
                         "y": [float(v) for v in normal[:, 2]],
                         "py": [float(v) for v in normal[:, 3]]})
            curves.append((normal[:, cols[0]], normal[:, cols[1]]))
        xlabel, ylabel = ("x", "px") if plane == "normal-xpx" else ("y", "py")
    _emit_doc(sc, ns.out, summary, columns, rows, {"orbits": docs})
    if ns.plot:
        plotting.portrait_figure(curves, xlabel, ylabel, _plot_path(ns.out))
    return 2 if any(k.endswith("_error") for k in summary) else 0


def _cmd_manifold_check(sc: Scenario, ns: argparse.Namespace) -> int:
    mid = ManifoldId[sc.options["manifold"]]
    r0 = ReducedState(float(sc.options["amplitude"]), 0.0)
    tol = float(sc.options["tol"])
    spec = IntegratorSpec(step=float(sc.options["step"]))
    traj = integrate(sc.params, sc.torques, embed(mid, r0),
                     float(sc.options["T"]), spec)
    r_theta, r_p = residual_series(mid, traj)
    max_r_theta = float(np.max(r_theta))
    max_r_p = float(np.max(r_p))
    passed = max_r_theta <= tol and max_r_p <= tol
    summary = {"max_r_theta": max_r_theta, "max_r_p": max_r_p,
               "passed": passed, "exploratory": not sc.torques.is_zero,
               "n_steps": int(traj.times.size - 1),
               "energy_drift": traj.energy_drift}
    columns = ["time", "theta1", "p1", "theta2", "p2", "r_theta", "r_p"]
    rows = [[traj.times[i], *traj.states[i], r_theta[i], r_p[i]]
            for i in range(traj.times.size)]
    body = {"residuals": {"time": [float(v) for v in traj.times],
                          "r_theta": [float(v) for v in r_theta],
                          "r_p": [float(v) for v in r_p]}}
    _emit_doc(sc, ns.out, summary, columns, rows, body)
    if ns.plot:
        plotting.residual_figure(traj.times, r_theta, r_p, tol, _plot_path(ns.out))
    return 0 if passed else 2


def _cmd_normal_form(sc: Scenario, ns: argparse.Namespace) -> int:
    fp = _refined_point(sc, sc.options["at"])
    frame = build_normal_form(sc.params, sc.torques, fp, tol_zero=sc.tol_zero)
    T = frame.transform
    S = SYMPLECTIC_FORM
    residual = float(np.max(np.abs(T.T @ S @ T - S)))
    alt = alternate_closed_forms(sc.params)
    c1, c2 = alt["center_frequencies_adopted"]
    a1, a2 = alt["center_frequencies_alternate"]
    summary = {"nu": frame.nu, "omega": frame.omega, "epsilon": frame.epsilon,
               "symplectic_residual": residual,
               "saddle_frequency_adopted": alt["saddle_frequency_adopted"],
               "saddle_frequency_alternate": alt["saddle_frequency_alternate"],
               "center_frequency_slow_adopted": c1,
               "center_frequency_fast_adopted": c2,
               "center_frequency_slow_alternate": a2,
               "center_frequency_fast_alternate": a1,
               "epsilon_alternate": alt["epsilon_alternate"],
               "alternate_symplectic_residual":
                   alt["transform_alternate_symplectic_residual"],
               "alternate_block_coupling":
                   alt["transform_alternate_block_coupling"]}
    columns = ["matrix", "row", "c1", "c2", "c3", "c4"]
    rows = []
    for name, mat in (("transform", T), ("inverse", frame.inverse_transform),
                      ("transform_alternate", alt["transform_alternate"])):
        for r in range(4):
            rows.append([name, r, *(float(v) for v in mat[r])])
    body = {"base_point": state_doc(frame.base_point),
            "transform": [[float(v) for v in row] for row in T],
            "inverse_transform": [[float(v) for v in row]
                                  for row in frame.inverse_transform],
            "transform_alternate": [[float(v) for v in row]
                                    for row in alt["transform_alternate"]]}
    _emit_doc(sc, ns.out, summary, columns, rows, body)
    return 0


def _cmd_sweep(sc: Scenario, ns: argparse.Namespace) -> int:
    n1 = int(sc.options["n1"])
    n2 = int(sc.options["n2"])
    cells = sweep_grid(sc.params,
                       (float(sc.options["beta1_lo"]), float(sc.options["beta1_hi"])),
                       (float(sc.options["beta2_lo"]), float(sc.options["beta2_hi"])),
                       n1, n2, tol_zero=sc.tol_zero, jobs=int(ns.jobs))
    n_missing = sum(1 for c in cells if not all(c.exists))
    n_boundary = sum(1 for c in cells if c.on_boundary)
    n_errors = sum(1 for c in cells if c.error is not None)
    summary = {"cells": len(cells), "cells_missing_any": n_missing,
               "cells_on_boundary": n_boundary, "cells_with_error": n_errors}
    columns = ["i", "j", "beta1", "beta2",
               "exists_pp", "exists_pm", "exists_mp", "exists_mm", "on_boundary",
               "kind_pp", "kind_pm", "kind_mp", "kind_mm", "min_abs_eig", "error"]
    rows = []
    docs = []
    for idx, c in enumerate(cells):
        i, j = divmod(idx, n2)
        rows.append([i, j, c.beta1, c.beta2, *c.exists, c.on_boundary,
                     *c.classifications, c.min_abs_eig, c.error])
        docs.append({"i": i, "j": j, "beta1": c.beta1, "beta2": c.beta2,
                     "exists": list(c.exists), "on_boundary": c.on_boundary,
                     "classifications": list(c.classifications),
                     "min_abs_eig": c.min_abs_eig, "error": c.error})
    _emit_doc(sc, ns.out, summary, columns, rows, {"cells": docs})
    if ns.plot:
        plotting.sweep_figure(cells, n1, n2, _plot_path(ns.out))
    return 2 if (n_missing or n_boundary or n_errors) else 0


_HANDLERS = {"fixed-points": _cmd_fixed_points,
             "classify": _cmd_classify,
             "simulate": _cmd_simulate,
             "portrait": _cmd_portrait,
             "manifold-check": _cmd_manifold_check,
             "normal-form": _cmd_normal_form,
             "sweep": _cmd_sweep}


def main(argv=None) -> int:
    parser = _build_parser()
    try:
        ns = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    try:
        if getattr(ns, "plot", False) and ns.out is None:
            raise ConfigError("--plot requires --out to name the figure file")
        sc = _scenario_from_ns(ns)
        return _HANDLERS[ns.command](sc, ns)
    except (ArmdynError, ValueError, OSError) as exc:
        print(f"armdyn {ns.command}: error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
