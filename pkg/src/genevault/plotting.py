"""Matplotlib rendering of spectral reports to image files."""
from __future__ import annotations

import os
from pathlib import Path

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt
import numpy as np

from .shares import BASES
from .spectral import LOG_FLOOR, PadScreenResult, SpectralReport


def _draw_spectrum(ax, report: SpectralReport, log: bool) -> None:
    n = report.n
    freqs = np.arange(len(report.magnitudes)) / n
    values = np.log10(report.magnitudes + LOG_FLOOR) if log else report.magnitudes
    ax.plot(freqs, values, lw=0.7, color="C0")
    ax.axvline(1 / 3, color="C3", lw=0.7, ls="--", alpha=0.6)
    ax.set_xlabel("frequency (cycles/base)")
    ax.set_ylabel("log10 magnitude" if log else "magnitude")
    ax.set_xlim(0, 0.5)


def plot_spectrum(
    report: SpectralReport,
    path: str | os.PathLike,
    log: bool = False,
    title: str | None = None,
) -> Path:
    """Render one track's spectrum to an image file; returns the path."""
    fig, ax = plt.subplots(figsize=(7, 4))
    _draw_spectrum(ax, report, log)
    if title:
        ax.set_title(title)
    fig.tight_layout()
    path = Path(path)
    fig.savefig(path, dpi=150)
    plt.close(fig)
    return path


def plot_screen(result: PadScreenResult, path: str | os.PathLike, log: bool = False) -> Path:
    """Render the four per-base spectra as a 2x2 panel with the verdict."""
    fig, axes = plt.subplots(2, 2, figsize=(10, 7))
    for ax, base in zip(axes.flat, BASES):
        report = result.reports[base]
        if report.degenerate:
            ax.text(0.5, 0.5, "degenerate track", ha="center", va="center", transform=ax.transAxes)
            ax.set_xticks([])
            ax.set_yticks([])
        else:
            _draw_spectrum(ax, report, log)
        verdict = "suitable" if report.suitable_for_pad else "unsuitable"
        ax.set_title(f"track {base}: {verdict}")
    fig.suptitle(f"pad screen: {'suitable' if result.suitable else 'unsuitable'}")
    fig.tight_layout()
    path = Path(path)
    fig.savefig(path, dpi=150)
    plt.close(fig)
    return path
