"""Optional matplotlib figures rendered next to the delimited outputs.

Import of matplotlib is deferred so the library and CLI stay usable without a
display stack; every figure uses the Agg backend and writes PNG with pinned
metadata, keeping repeated runs byte-identical.
"""

from __future__ import annotations

import numpy as np

_SAVE_KWARGS = {"dpi": 110, "metadata": {"Software": "armdyn"}}

_KIND_MARKERS = {"PureCenter": ("o", "tab:blue"),
                 "SaddleCenter": ("s", "tab:orange"),
                 "PureSaddle": ("D", "tab:red"),
                 "Degenerate": ("x", "tab:gray")}


def _pyplot():
    import matplotlib
    matplotlib.use("Agg", force=True)
    import matplotlib.pyplot as plt
    return plt


def _save(fig, path: str) -> None:
    fig.savefig(path, **_SAVE_KWARGS)


def fixed_points_figure(points, kinds, path: str) -> None:
    """Scatter the equilibria in the (theta1, theta2) plane, marked by kind."""
    plt = _pyplot()
    fig, ax = plt.subplots(figsize=(5.0, 4.0))
    for fp, kind in zip(points, kinds):
        if not fp.exists or kind is None:
            continue
        marker, color = _KIND_MARKERS.get(kind, ("*", "tab:purple"))
        ax.scatter([fp.state.theta1], [fp.state.theta2], marker=marker,
                   color=color, s=60, label=f"{''.join(fp.branch)} {kind}")
    ax.set_xlabel("theta1 (rad)")
    ax.set_ylabel("theta2 (rad)")
    ax.set_title("equilibria")
    ax.grid(True, alpha=0.3)
    if ax.has_data():
        ax.legend(fontsize=8)
    _save(fig, path)
    plt.close(fig)


def trajectory_figure(traj, path: str) -> None:
    """Angle traces, momentum traces, and energy error for one trajectory."""
    plt = _pyplot()
    fig, axes = plt.subplots(3, 1, figsize=(6.0, 7.0), sharex=True)
    t = traj.times
    axes[0].plot(t, traj.states[:, 0], label="theta1")
    axes[0].plot(t, traj.states[:, 2], label="theta2")
    axes[0].set_ylabel("angle (rad)")
    axes[0].legend(fontsize=8)
    axes[1].plot(t, traj.states[:, 1], label="p1")
    axes[1].plot(t, traj.states[:, 3], label="p2")
    axes[1].set_ylabel("momentum")
    axes[1].legend(fontsize=8)
    axes[2].semilogy(t, np.maximum(np.abs(traj.energies - traj.energies[0]), 1e-20))
    axes[2].set_ylabel("|E - E0|")
    axes[2].set_xlabel("t (s)")
    for ax in axes:
        ax.grid(True, alpha=0.3)
    _save(fig, path)
    plt.close(fig)


def portrait_figure(orbits, xlabel: str, ylabel: str, path: str) -> None:
    """Overlay orbit curves; `orbits` is a list of (x array, y array) pairs."""
    plt = _pyplot()
    fig, ax = plt.subplots(figsize=(5.5, 4.5))
    for x, y in orbits:
        ax.plot(x, y, linewidth=0.8)
    ax.set_xlabel(xlabel)
    ax.set_ylabel(ylabel)
    ax.set_title("phase portrait")
    ax.grid(True, alpha=0.3)
    _save(fig, path)
    plt.close(fig)


def residual_figure(times, r_theta, r_p, tol: float, path: str) -> None:
    """Sheet residuals against time on a log scale, with the tolerance line."""
    plt = _pyplot()
    fig, ax = plt.subplots(figsize=(6.0, 4.0))
    floor = 1e-20
    ax.semilogy(times, np.maximum(r_theta, floor), label="|theta2 residual|")
    ax.semilogy(times, np.maximum(r_p, floor), label="|p2 residual|")
    ax.axhline(tol, color="tab:red", linestyle="--", linewidth=0.8, label="tol")
    ax.set_xlabel("t (s)")
    ax.set_ylabel("residual")
    ax.legend(fontsize=8)
    ax.grid(True, alpha=0.3)
    _save(fig, path)
    plt.close(fig)


def sweep_figure(cells, n1: int, n2: int, path: str) -> None:
    """Existence count and log10 min |lambda| over the torque grid."""
    plt = _pyplot()
    b1 = np.array([c.beta1 for c in cells]).reshape(n1, n2)
    b2 = np.array([c.beta2 for c in cells]).reshape(n1, n2)
    count = np.array([sum(c.exists) for c in cells], dtype=float).reshape(n1, n2)
    floor = np.array([np.nan if c.min_abs_eig is None else c.min_abs_eig
                      for c in cells]).reshape(n1, n2)
    fig, axes = plt.subplots(1, 2, figsize=(9.0, 4.0))
    m0 = axes[0].pcolormesh(b1, b2, count, shading="nearest", cmap="viridis")
    fig.colorbar(m0, ax=axes[0], label="existing branches")
    with np.errstate(divide="ignore", invalid="ignore"):
        logf = np.log10(floor)
    m1 = axes[1].pcolormesh(b1, b2, logf, shading="nearest", cmap="magma")
    fig.colorbar(m1, ax=axes[1], label="log10 min |eigenvalue|")
    for ax in axes:
        ax.set_xlabel("beta1")
        ax.set_ylabel("beta2")
    fig.tight_layout()
    _save(fig, path)
    plt.close(fig)
