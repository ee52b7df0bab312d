"""Figure rendering for sweep results.

Figures are written straight to files next to the CSV output; nothing is
shown interactively.
"""

from __future__ import annotations

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt

from ampcs.montecarlo import SweepResult

AXIS_LABELS = {
    "pe": "cross-over probability $P_e$",
    "snr_db": "SNR (dB)",
    "M": "number of sensors $M$",
}
METRIC_LABELS = {"nmse": "NMSE", "mse_w": r"MSE of the mismatch $\|w\|^2$"}
METHOD_LABELS = {
    "proposed_l1": "proposed ($\\ell_1$ on de-mapped amplitudes)",
    "biht": "BIHT (signs only)",
    "optimal": "optimal level (empirical)",
    "naive": "naive level (empirical)",
}

plt.rcParams.update(
    {
        "figure.figsize": (6.0, 4.2),
        "font.size": 10,
        "axes.grid": True,
        "grid.alpha": 0.3,
        "savefig.dpi": 150,
    }
)


def render_sweep(result: SweepResult, path: str) -> None:
    """One figure per sweep: errorbar curve per method, dashed analytic
    curve where the closed form applies."""
    fig, ax = plt.subplots()
    methods = []
    for p in result.points:
        if p.method not in methods:
            methods.append(p.method)
    for method in methods:
        pts = [p for p in result.points if p.method == method]
        x = [p.axis_value for p in pts]
        y = [p.metric_mean for p in pts]
        err = [p.metric_stderr for p in pts]
        ax.errorbar(x, y, yerr=err, marker="o", capsize=3,
                    label=METHOD_LABELS.get(method, method))
        if all(p.analytic_value is not None for p in pts):
            ax.plot(x, [p.analytic_value for p in pts], "k--",
                    label=f"{METHOD_LABELS.get(method, method)}, analytic")
    ax.set_xlabel(AXIS_LABELS.get(result.axis, result.axis))
    ax.set_ylabel(METRIC_LABELS.get(result.metric, result.metric))
    if result.metric == "nmse":
        ax.set_yscale("log")
    ax.legend(fontsize=8)
    fig.tight_layout()
    fig.savefig(path)
    plt.close(fig)
