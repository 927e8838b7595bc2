"""Fourier screening of binary tracks for codon periodicity and regularity.

Protein-coding DNA repeats codons, which puts a sharp line at normalized
frequency 1/3 in the amplitude spectrum of an indicator track; such material
(and anything else with strong spectral structure) makes a poor one-time
pad. Tracks enter the transform as raw 0/1 samples with no mean subtraction;
the DC bin is instead excluded from all peak statistics.
"""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .bits import BitVector
from .sequence_io import LiteralSequence
from .shares import BASES, split

DEFAULT_THRESHOLD_RATIO = 8.0
DEFAULT_LOW_FREQ_CUTOFF = 0.01
MIN_SCREEN_LENGTH = 64

LOG_FLOOR = 1e-12  # added before log10 so zero magnitude maps to exactly -12


class TrackTooShort(ValueError):
    pass


class SequenceTooShort(ValueError):
    pass


class DegenerateSpectrum(ValueError):
    """Median magnitude is zero (constant track); peak statistics undefined."""


@dataclass(frozen=True)
class SpectralPeak:
    frequency: float  # normalized, k/n
    magnitude: float
    ratio_to_median: float


@dataclass(frozen=True)
class SpectralReport:
    """One-sided amplitude spectrum of a track plus the pad-suitability verdict."""

    n: int
    magnitudes: np.ndarray
    peaks: list[SpectralPeak]
    codon_peak: bool
    low_freq_flag: bool
    suitable_for_pad: bool
    degenerate: bool = field(default=False)


@dataclass(frozen=True)
class PadScreenResult:
    reports: dict[str, SpectralReport]
    suitable: bool


def power_spectrum(track: BitVector) -> np.ndarray:
    """One-sided amplitude spectrum |DFT| of the 0/1 track, bins 0..n//2.

    Any length is transformed exactly (no zero padding, which would shift
    the 1/3 bin off-grid); cost is O(n log n).
    """
    n = len(track)
    if n < 2:
        raise TrackTooShort(f"need at least 2 bits, got {n}")
    samples = track.to_numpy().astype(np.float64)
    return np.abs(np.fft.rfft(samples))


def detect_peaks(
    magnitudes: np.ndarray,
    threshold_ratio: float = DEFAULT_THRESHOLD_RATIO,
    low_freq_cutoff: float = DEFAULT_LOW_FREQ_CUTOFF,
    n: int | None = None,
) -> SpectralReport:
    """Flag bins exceeding threshold_ratio times the non-DC median magnitude.

    codon_peak is set when a peak sits within one bin of frequency 1/3;
    low_freq_flag when a non-DC peak sits below low_freq_cutoff. The track
    is pad-suitable only when neither flag is raised. `n` is the original
    track length; a one-sided spectrum of L bins defaults to n = 2(L - 1).
    """
    if threshold_ratio <= 1:
        raise ValueError("threshold_ratio must be > 1")
    if not 0 < low_freq_cutoff < 0.5:
        raise ValueError("low_freq_cutoff must be in (0, 0.5)")
    magnitudes = np.asarray(magnitudes, dtype=np.float64)
    if n is None:
        n = 2 * (len(magnitudes) - 1)
    nondc = magnitudes[1:]
    peak_scale = float(nondc.max()) if nondc.size else 0.0
    if peak_scale <= 1e-9 * max(1.0, float(magnitudes[0])):
        raise DegenerateSpectrum("no non-DC spectral content; constant track?")
    median = float(np.median(nondc))
    # A strictly periodic track has an exactly sparse spectrum (median 0);
    # every genuinely nonzero bin then counts as a peak, but bins that are
    # zero up to FFT round-off must not.
    threshold = threshold_ratio * max(median, 1e-9 * peak_scale)

    peaks = []
    codon_peak = False
    low_freq_flag = False
    for k in np.flatnonzero(magnitudes > threshold):
        k = int(k)
        if k == 0:
            continue
        freq = k / n
        ratio = float(magnitudes[k]) / median if median > 0 else float("inf")
        peaks.append(SpectralPeak(freq, float(magnitudes[k]), ratio))
        if abs(freq - 1.0 / 3.0) <= 1.0 / n:
            codon_peak = True
        if freq < low_freq_cutoff:
            low_freq_flag = True

    return SpectralReport(
        n=n,
        magnitudes=magnitudes,
        peaks=peaks,
        codon_peak=codon_peak,
        low_freq_flag=low_freq_flag,
        suitable_for_pad=not codon_peak and not low_freq_flag,
    )


def analyze_track(
    track: BitVector,
    threshold_ratio: float = DEFAULT_THRESHOLD_RATIO,
    low_freq_cutoff: float = DEFAULT_LOW_FREQ_CUTOFF,
) -> SpectralReport:
    """power_spectrum followed by detect_peaks at the exact track length."""
    return detect_peaks(power_spectrum(track), threshold_ratio, low_freq_cutoff, n=len(track))


def degenerate_report(track: BitVector) -> SpectralReport:
    """Placeholder report for a constant track; never pad-suitable."""
    n = len(track)
    magnitudes = np.abs(np.fft.rfft(track.to_numpy().astype(np.float64))) if n >= 2 else np.zeros(1)
    return SpectralReport(
        n=n,
        magnitudes=magnitudes,
        peaks=[],
        codon_peak=False,
        low_freq_flag=False,
        suitable_for_pad=False,
        degenerate=True,
    )


def screen_pad(
    seq: LiteralSequence,
    threshold_ratio: float = DEFAULT_THRESHOLD_RATIO,
    low_freq_cutoff: float = DEFAULT_LOW_FREQ_CUTOFF,
) -> PadScreenResult:
    """Screen a candidate pad sequence: all four tracks must pass.

    A degenerate track (a base absent or everywhere) is maximal regularity
    and fails the screen without peak statistics.
    """
    if len(seq) < MIN_SCREEN_LENGTH:
        raise SequenceTooShort(f"need at least {MIN_SCREEN_LENGTH} bases, got {len(seq)}")
    shares = split(seq)
    reports: dict[str, SpectralReport] = {}
    for base in BASES:
        track = shares.track(base)
        try:
            reports[base] = analyze_track(track, threshold_ratio, low_freq_cutoff)
        except DegenerateSpectrum:
            reports[base] = degenerate_report(track)
    return PadScreenResult(reports, all(r.suitable_for_pad for r in reports.values()))


def export_spectrum(report: SpectralReport, mode: str = "linear") -> str:
    """CSV rows 'frequency,magnitude' for bins 0..n//2, 9 significant digits.

    In log mode the magnitude column is log10(magnitude + 1e-12), so a zero
    bin exports as exactly -12.
    """
    if mode not in ("linear", "log"):
        raise ValueError(f"mode must be 'linear' or 'log', got {mode!r}")
    values = report.magnitudes
    if mode == "log":
        values = np.log10(values + LOG_FLOOR)
    lines = ["frequency,magnitude"]
    n = report.n
    lines.extend(f"{k / n:.9g},{v:.9g}" for k, v in enumerate(values))
    return "\n".join(lines) + "\n"
