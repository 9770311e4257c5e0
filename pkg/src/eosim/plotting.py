"""Figure rendering for the report path (written next to the CSV output)."""

from __future__ import annotations

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt  # noqa: E402  (backend must be set first)

from .dynamics import Trajectory
from .sweep import SweepRow


def save_trajectory_plot(traj: Trajectory, path) -> None:
    """Two stacked panels: conditional fidelity F(t) and click density P_c(t)."""
    fig, (ax_f, ax_p) = plt.subplots(2, 1, sharex=True, figsize=(6.4, 6.0))
    ax_f.plot(traj.times, traj.fidelity, color="tab:blue")
    ax_f.set_ylabel("fidelity F(t)")
    ax_f.set_ylim(-0.02, 1.02)
    ax_p.plot(traj.times, traj.pc, color="tab:red")
    ax_p.set_ylabel(r"click density $P_c(t)$  [1/g]")
    ax_p.set_xlabel("detection time t  [1/g]")
    for ax in (ax_f, ax_p):
        ax.grid(True, alpha=0.3)
    fig.tight_layout()
    fig.savefig(path, dpi=150)
    plt.close(fig)


def save_sweep_plot(rows: list[SweepRow], path) -> None:
    """F_average and P_total against the normalized decay rate, one line per delta."""
    by_delta: dict[float, list[SweepRow]] = {}
    for row in rows:
        if row.status == "ok":
            by_delta.setdefault(row.delta, []).append(row)

    fig, (ax_f, ax_p) = plt.subplots(2, 1, sharex=True, figsize=(6.4, 6.0))
    for delta in sorted(by_delta):
        pts = sorted(by_delta[delta], key=lambda r: r.gamma_norm)
        x = [r.gamma_norm for r in pts]
        label = rf"$\Delta = {delta:g}\,g$"
        ax_f.plot(x, [r.f_average for r in pts], marker="o", ms=3, label=label)
        ax_p.plot(x, [r.p_total for r in pts], marker="o", ms=3, label=label)
    ax_f.set_ylabel(r"$F_\mathrm{average}$")
    ax_p.set_ylabel(r"$P_\mathrm{total}$")
    ax_p.set_xlabel(r"normalized decay rate $\gamma = \pi \Delta \Gamma / g^2$")
    ax_f.legend(fontsize=8)
    for ax in (ax_f, ax_p):
        ax.grid(True, alpha=0.3)
    fig.tight_layout()
    fig.savefig(path, dpi=150)
    plt.close(fig)
