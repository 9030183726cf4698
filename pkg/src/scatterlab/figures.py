"""Matplotlib rendering of experiment results to SVG files.

Figures carry no randomized ids or timestamps, so identical results render
to identical bytes.
"""

from __future__ import annotations

import math
from pathlib import Path

import matplotlib

matplotlib.use("Agg")
matplotlib.rcParams["svg.hashsalt"] = "scatterlab"

import matplotlib.pyplot as plt
import numpy as np

from .experiments import PARAM_NAMES, DepthDecayResult, EmbeddingReport, MaskingGridResult

_SAVE_KW = {"format": "svg", "metadata": {"Date": None}, "bbox_inches": "tight"}


def render_masking(result: MaskingGridResult, path: Path) -> Path:
    """Heatmaps of the interference response, one panel per octave of lambda2.

    Within each octave the band with the strongest total response is shown.
    """
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    octave = np.floor(np.log2(result.lambda1 / result.lambda2)).astype(int)
    panels = []
    for o in sorted(set(octave.tolist())):
        members = np.flatnonzero(octave == o)
        best = members[int(np.argmax([result.values[i].sum() for i in members]))]
        panels.append((o, best))

    cols = 3
    rows = math.ceil(len(panels) / cols)
    fig, axes = plt.subplots(rows, cols, figsize=(4 * cols, 3.2 * rows), squeeze=False)
    vmax = result.values.max() or 1.0
    extent = [
        np.log10(result.rel_freqs[0]),
        np.log10(result.rel_freqs[-1]),
        np.log10(result.amp_ratios[0]),
        np.log10(result.amp_ratios[-1]),
    ]
    for ax in axes.flat:
        ax.set_axis_off()
    for ax, (o, idx) in zip(axes.flat, panels):
        ax.set_axis_on()
        im = ax.imshow(
            result.values[idx],
            origin="lower",
            aspect="auto",
            extent=extent,
            vmin=0.0,
            vmax=vmax,
            cmap="magma",
        )
        ax.set_title(f"$\\lambda_2$ = {result.lambda2[idx]:.4g} ({o + 1} oct below)")
        ax.set_xlabel(r"$\log_{10}\,|\nu_2-\nu_1|/\nu_1$")
        ax.set_ylabel(r"$\log_{10}\,a_2/a_1$")
    fig.colorbar(im, ax=axes, shrink=0.8, label="renormalized second order")
    fig.suptitle(f"Two-tone interference around $\\lambda_1$ = {result.lambda1:.4g}")
    fig.savefig(path, **_SAVE_KW)
    plt.close(fig)
    return path


def render_decay(result: DepthDecayResult, path: Path) -> Path:
    """Layer energy (relative to the first layer) against depth, per N."""
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    fig, ax = plt.subplots(figsize=(6, 4.2))
    cmap = matplotlib.colormaps["viridis"]
    groups = [int(math.floor(math.log2(N))) for N in result.N_list]
    gmax = max(groups) or 1
    for N, g in zip(result.N_list, groups):
        rel = np.maximum(result.relative[N], 1e-32)
        m = np.arange(1, len(rel) + 1)
        ax.semilogy(m, rel, marker="o", color=cmap(g / gmax), label=f"N={N}")
    ax.axhline(result.meta["rel_threshold"], color="gray", linestyle=":", linewidth=1)
    ax.set_xlabel("depth m")
    ax.set_ylabel("energy($U_m$) / energy($U_1$)")
    ax.set_title("Scattered energy decay for N-component stacks")
    ax.legend(fontsize=8, ncol=2)
    fig.savefig(path, **_SAVE_KW)
    plt.close(fig)
    return path


def render_embedding(report: EmbeddingReport, path: Path) -> Path:
    """Three 2-D projections per feature set, colored by f1, alpha, and r."""
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    sets = list(report.embeddings)
    projections = [(0, 1), (0, 2), (1, 2)]
    fig, axes = plt.subplots(
        len(sets), 3, figsize=(12, 3.6 * len(sets)), squeeze=False
    )
    for row, name in enumerate(sets):
        emb = report.embeddings[name]
        kept = emb.node_indices
        for col, (param, (ix, iy)) in enumerate(zip(PARAM_NAMES, projections)):
            ax = axes[row][col]
            sc = ax.scatter(
                emb.coords[:, ix],
                emb.coords[:, iy],
                c=report.labels[param][kept],
                s=8,
                cmap="coolwarm",
            )
            ax.set_title(f"{name}: axes {ix},{iy} colored by {param}")
            ax.set_xticks([])
            ax.set_yticks([])
            fig.colorbar(sc, ax=ax, shrink=0.8)
    fig.savefig(path, **_SAVE_KW)
    plt.close(fig)
    return path
