"""Render a sweep trace to an image file.

Kept separate from the numerical core: matplotlib is imported lazily and
forced onto the Agg backend so the CLI works headless. The CSV trace is
the data contract; the figure is a convenience rendered alongside it.
"""

from __future__ import annotations

from .radius import RadiusReport


def render_sweep_figure(report: RadiusReport, path, title: str | None = None) -> None:
    """Plot the objective and per-block gains over frequency and save to
    ``path`` (format from the extension)."""
    import matplotlib
    matplotlib.use("Agg")
    import matplotlib.pyplot as plt

    trace = report.trace
    omega = trace[:, 0]
    mu = trace[:, 1]
    gains = trace[:, 2:]

    fig, (ax_mu, ax_g) = plt.subplots(2, 1, sharex=True, figsize=(7.0, 6.0))

    pos = omega > 0
    linthresh = float(omega[pos].min()) if pos.any() else 1.0
    for ax in (ax_mu, ax_g):
        ax.set_xscale("symlog", linthresh=linthresh)
        ax.grid(True, which="both", alpha=0.3)

    ax_mu.plot(omega, mu, lw=1.0, color="tab:blue")
    if not report.radius_is_infinite:
        ax_mu.axhline(report.mu_star, color="tab:red", lw=0.8, ls="--",
                      label=f"peak {report.mu_star:.6g}")
        ax_mu.plot([report.omega_star], [report.mu_star], "o", ms=4,
                   color="tab:red")
        ax_mu.legend(loc="best", fontsize=8)
    if (mu > 0).any() and mu.max() / max(mu[mu > 0].min(), 1e-300) > 1e3:
        ax_mu.set_yscale("log")
    ax_mu.set_ylabel("coupled objective")

    for k in range(gains.shape[1]):
        ax_g.plot(omega, gains[:, k], lw=0.9, label=f"gain {k + 1}")
    if (gains > 0).any():
        ax_g.set_yscale("log")
    ax_g.set_ylabel("block gains")
    ax_g.set_xlabel("frequency (rad/s)")
    if gains.shape[1] <= 8:
        ax_g.legend(loc="best", fontsize=8)

    if title:
        fig.suptitle(title)
    fig.tight_layout()
    fig.savefig(path, dpi=150)
    plt.close(fig)
