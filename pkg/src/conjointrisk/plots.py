"""Figure rendering for the report paths.

Report subcommands write these figures next to their CSV/JSON outputs.
Rendering is headless (Agg) so it works in batch runs and services.
"""

from __future__ import annotations

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt
import numpy as np

from .estimate import UtilityEstimate
from .risk import RiskGrid


def render_risk_grid(grid: RiskGrid, path: str) -> str:
    """Heat map of the use-case x FAR grid.

    Flagged cells (lower risk than the reference) get a hatched overlay and
    the reference cell a bold outline, mirroring the tabular convention.
    """
    values = np.array(
        [
            [grid.cell(uc, far).result.c_identify for uc in grid.use_cases]
            for far in grid.far_labels
        ]
    )
    fig, ax = plt.subplots(figsize=(1.8 + 1.4 * len(grid.use_cases), 3.2))
    im = ax.imshow(values, cmap="YlOrRd", aspect="auto")
    ax.set_xticks(range(len(grid.use_cases)), grid.use_cases)
    ax.set_yticks(range(len(grid.far_labels)), grid.far_labels)
    ax.set_xlabel("use case")
    ax.set_ylabel("FAR")
    ax.set_title(f"integrated risk (FRR={grid.frr:g}, N={grid.n})")

    for i, far in enumerate(grid.far_labels):
        for j, uc in enumerate(grid.use_cases):
            cell = grid.cell(uc, far)
            v = cell.result.c_identify
            label = f"{v:.3f}" if v >= 1e-2 else f"{v:.2e}"
            ax.text(j, i, label, ha="center", va="center", fontsize=8)
            if cell.flagged:
                ax.add_patch(
                    plt.Rectangle(
                        (j - 0.5, i - 0.5), 1, 1,
                        fill=False, hatch="///", edgecolor="grey", linewidth=0,
                    )
                )
            if grid.reference == (uc, far):
                ax.add_patch(
                    plt.Rectangle(
                        (j - 0.5, i - 0.5), 1, 1,
                        fill=False, edgecolor="black", linewidth=2,
                    )
                )
    fig.colorbar(im, ax=ax, label="c_identify")
    fig.tight_layout()
    fig.savefig(path, dpi=150)
    plt.close(fig)
    return str(path)


def render_estimate(est: UtilityEstimate, path: str) -> str:
    """Coefficient plot with 95% Wald intervals."""
    names = list(est.attributes)
    coefs = np.array([est.by_attribute[n].coef for n in names])
    ses = np.array([est.by_attribute[n].se for n in names])
    y = np.arange(len(names))[::-1]

    fig, ax = plt.subplots(figsize=(5.5, 0.6 * len(names) + 1.4))
    ax.errorbar(coefs, y, xerr=1.96 * ses, fmt="o", capsize=3)
    ax.axvline(0.0, color="grey", linewidth=0.8)
    ax.set_yticks(y, names)
    ax.set_xlabel("utility per level step (95% CI)")
    ax.set_title("estimated deterrence utilities")
    fig.tight_layout()
    fig.savefig(path, dpi=150)
    plt.close(fig)
    return str(path)
