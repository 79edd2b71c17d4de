"""Figures for the bound table and the escalator tree.

Rendering uses the non-interactive Agg backend, so it works headless and
writes straight to files.
"""

from __future__ import annotations

from pathlib import Path

import matplotlib
import mpmath

matplotlib.use("Agg")
import matplotlib.pyplot as plt  # noqa: E402


def _log10(x):
    # mpmath handles magnitudes far beyond float range
    return float(mpmath.log10(x))


def crossover_figure(reports, path, highlight=None):
    """log10 of the crossover constant for each depth-4 node, in table order."""
    path = Path(path)
    labels = [",".join(map(str, r.coeffs)) for r in reports]
    values = [_log10(r.C_a.hi) for r in reports]
    colors = ["tab:red" if r.anisotropic else "tab:blue" for r in reports]
    fig, ax = plt.subplots(figsize=(10, 4))
    ax.scatter(range(len(values)), values, s=10, c=colors)
    if highlight is not None:
        idx = labels.index(",".join(map(str, highlight)))
        ax.annotate(
            labels[idx],
            (idx, values[idx]),
            xytext=(5, 5),
            textcoords="offset points",
            fontsize=8,
        )
    ax.set_xlabel("node index")
    ax.set_ylabel(r"$\log_{10} C_a$ (upper endpoint)")
    ax.set_title("Crossover constants over the depth-4 nodes")
    ax.grid(alpha=0.3)
    fig.tight_layout()
    path.parent.mkdir(parents=True, exist_ok=True)
    fig.savefig(path)
    plt.close(fig)
    return path


def truant_figure(tree, path):
    """Truant against depth for every internal node of the escalator tree."""
    path = Path(path)
    depths, truants = [], []
    for node in tree.walk():
        if node.truant is not None:
            depths.append(node.depth)
            truants.append(node.truant)
    fig, ax = plt.subplots(figsize=(6, 4))
    ax.scatter(depths, truants, s=12, alpha=0.6)
    ax.set_yscale("log")
    ax.set_xlabel("number of coefficients")
    ax.set_ylabel("truant")
    ax.set_title("Escalator truants")
    ax.grid(alpha=0.3)
    fig.tight_layout()
    path.parent.mkdir(parents=True, exist_ok=True)
    fig.savefig(path)
    plt.close(fig)
    return path
