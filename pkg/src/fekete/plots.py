"""Figures for the report command.  Uses the Agg backend, so no display is needed."""

from __future__ import annotations

from pathlib import Path

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt  # noqa: E402

RANK_COLORS = {2: "#4c72b0", 3: "#55a868", 4: "#c44e52", 5: "#8172b2"}


def energy_chart(rows, path: Path, n: int) -> Path:
    """Bar chart of the normalized energy of each real configuration, colored by rank."""
    rows = [r for r in rows if r["real_psd"]]
    rows.sort(key=lambda r: r["energy_normalized_float"])
    fig, ax = plt.subplots(figsize=(6.4, 0.45 * len(rows) + 1.2))
    labels = [r["display"] for r in rows]
    vals = [r["energy_normalized_float"] for r in rows]
    colors = [RANK_COLORS.get(r["rank"], "0.5") for r in rows]
    ax.barh(labels, vals, color=colors)
    for y, v in enumerate(vals):
        ax.text(v, y, f" {v:.4g}", va="center", fontsize=8)
    handles = [plt.Rectangle((0, 0), 1, 1, color=c) for k, c in RANK_COLORS.items() if any(r["rank"] == k for r in rows)]
    ranks = [k for k in RANK_COLORS if any(r["rank"] == k for r in rows)]
    ax.legend(handles, [f"rank {k}" for k in ranks], loc="lower right", fontsize=8)
    ax.set_xlabel("normalized energy  prod (1 - x_ij)")
    ax.set_title(f"n = {n}: real critical configurations")
    ax.set_xlim(0, max(vals) * 1.18)
    fig.tight_layout()
    fig.savefig(path, dpi=150)
    plt.close(fig)
    return path


def hessian_chart(spectra, path: Path, n: int) -> Path:
    """Projected Hessian eigenvalues per configuration and ambient dimension.

    ``spectra`` maps (display name, d) to a list of (value, multiplicity).
    """
    keys = list(spectra)
    fig, ax = plt.subplots(figsize=(7.0, 0.42 * len(keys) + 1.4))
    for y, key in enumerate(keys):
        for value, mult in spectra[key]:
            color = "#c44e52" if value < -1e-8 else ("0.6" if abs(value) < 1e-8 else "#4c72b0")
            ax.scatter([value], [y], s=18 + 10 * mult, color=color, zorder=3)
            if mult > 1:
                ax.annotate(str(mult), (value, y), textcoords="offset points", xytext=(0, 6), fontsize=6, ha="center")
    ax.axvline(0, color="0.3", lw=0.8)
    ax.set_yticks(range(len(keys)))
    ax.set_yticklabels([f"{name}, S^{d - 1}" for name, d in keys], fontsize=7)
    ax.invert_yaxis()
    ax.set_xlabel("eigenvalue of the projected Hessian")
    ax.set_title(f"n = {n}: tangent-space Hessian spectra")
    ax.grid(axis="x", alpha=0.3)
    fig.tight_layout()
    fig.savefig(path, dpi=150)
    plt.close(fig)
    return path
