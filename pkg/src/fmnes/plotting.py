"""SVG diagnostics: eigenvalue-spectrum and best-value trajectories."""

from __future__ import annotations

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt  # noqa: E402


def build_eig_figure(record: dict, title: str = ""):
    """Dual-axis figure from one trial record dict.

    Left axis: square roots of the eigenvalues of the normalized covariance
    (one red curve per eigenvalue, log scale).  Right axis: best evaluation
    value so far (blue, log scale).  Horizontal axis: evaluations.
    """
    eig = record.get("eig_trajectory")
    traj = record.get("trajectory")
    if not eig or not traj:
        raise ValueError(
            "trajectory disabled for this record: re-run the trial with "
            "trajectory and eigenvalue recording enabled"
        )

    evals_eig = [point[0] for point in eig]
    spectra = [point[1] for point in eig]
    d = len(spectra[0])

    fig, ax_eig = plt.subplots(figsize=(7, 4.5))
    for k in range(d):
        ax_eig.plot(evals_eig, [s[k] for s in spectra], color="tab:red", linewidth=0.7)
    ax_eig.set_xlabel("evaluations")
    ax_eig.set_ylabel("sqrt(eigenvalue)", color="tab:red")
    ax_eig.set_yscale("log")
    ax_eig.tick_params(axis="y", labelcolor="tab:red")

    ax_val = ax_eig.twinx()
    evals_val = [point[0] for point in traj]
    best = [point[1] for point in traj]
    ax_val.plot(evals_val, best, color="tab:blue", linewidth=1.2)
    ax_val.set_ylabel("best evaluation value", color="tab:blue")
    ax_val.set_yscale("log")
    ax_val.tick_params(axis="y", labelcolor="tab:blue")

    if title:
        ax_eig.set_title(title)
    fig.tight_layout()
    return fig


def emit_eig_plot(record: dict, path, title: str = "") -> None:
    """Write the diagnostic figure for one trial record as SVG."""
    fig = build_eig_figure(record, title=title)
    try:
        fig.savefig(path, format="svg")
    finally:
        plt.close(fig)
