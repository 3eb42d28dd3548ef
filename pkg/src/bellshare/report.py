"""Matplotlib renderings of scenario reports and image round trips.

Figures are written straight to files via the Agg canvas so the library
never touches pyplot's global state or needs a display.
"""
from __future__ import annotations

from pathlib import Path

import numpy as np
from matplotlib.backends.backend_agg import FigureCanvasAgg
from matplotlib.figure import Figure

from .adversary import ScenarioReport
from .neqr import GrayImage


def _save(fig: Figure, path: str | Path) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    FigureCanvasAgg(fig)
    fig.savefig(path, dpi=150)
    return path


def save_scenario_figure(report: ScenarioReport, scenario_name: str, path: str | Path) -> Path:
    """Candidate-set-size histogram with the correct/abort rates annotated."""
    fig = Figure(figsize=(6, 4))
    ax = fig.subplots()
    sizes = sorted(report.ambiguity_histogram)
    counts = [report.ambiguity_histogram[s] for s in sizes]
    ax.bar([str(s) for s in sizes], counts, color="#4878cf")
    ax.set_xlabel("operator candidates per trial")
    ax.set_ylabel("trials")
    ax.set_title(
        f"{scenario_name}: correct rate {report.per_round_correct_rate:.4f}, "
        f"{report.aborted_count} aborted / {report.trials}"
    )
    for x, c in enumerate(counts):
        ax.text(x, c, str(c), ha="center", va="bottom", fontsize=9)
    fig.tight_layout()
    return _save(fig, path)


def save_image_figure(
    original: GrayImage, reconstructed: GrayImage, path: str | Path
) -> Path:
    """Original and reconstructed rasters side by side with a mismatch count."""
    fig = Figure(figsize=(7, 3.6))
    axes = fig.subplots(1, 2)
    left = np.array(original.to_rows())
    right = np.array(reconstructed.to_rows())
    for ax, data, title in ((axes[0], left, "shared"), (axes[1], right, "reconstructed")):
        ax.imshow(data, cmap="gray", vmin=0, vmax=255, interpolation="nearest")
        ax.set_title(title)
        ax.set_xticks(range(data.shape[1]))
        ax.set_yticks(range(data.shape[0]))
    mismatches = int(np.count_nonzero(left != right))
    fig.suptitle(f"{mismatches} mismatched pixel(s)" if mismatches else "exact round trip")
    fig.tight_layout()
    return _save(fig, path)
