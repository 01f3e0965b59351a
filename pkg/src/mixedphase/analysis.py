"""Glottal formant trajectories on real speech (sustained vowels with
externally supplied GCI markers)."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .cepstrum import cc_decompose
from .framing import WindowSpec, extract_frames
from .metrics import NoPeakError, glottal_formant
from .zzt import zzt_decompose

__all__ = ["AnalysisRecord", "analyze_signal"]


@dataclass(frozen=True)
class AnalysisRecord:
    """Per-frame glottal formant estimate for one method."""

    time_s: float
    method: str
    fg_hz: float
    bw_hz: float
    flags: str = ""


def analyze_signal(
    signal,
    gcis,
    fs: float,
    methods=("cc", "zzt"),
    alpha: float = 0.72,
    periods: float = 2.0,
    nfft: int = 4096,
) -> list[AnalysisRecord]:
    """Decompose every GCI-centered frame with each method and estimate the
    glottal formant frequency and bandwidth trajectories.

    Per-frame failures are recorded in the row's flags, never raised.
    Records are ordered by frame, then method (cc before zzt).
    """
    frames = extract_frames(signal, gcis, fs, WindowSpec(alpha=alpha, length_periods=periods))
    records = []
    for frame in frames:
        for method in methods:
            t = frame.gci_index / fs
            flags = ""
            fg = bw = float("nan")
            try:
                if method == "cc":
                    res = cc_decompose(frame, nfft)
                elif method == "zzt":
                    res = zzt_decompose(frame, nfft)
                else:
                    raise ValueError(f"unknown method {method!r}")
                est = glottal_formant(res.max_phase_spectrum, fs)
                fg, bw = est.fg, est.bandwidth
                if est.one_sided:
                    flags = "one-sided-bandwidth"
            except NoPeakError:
                flags = "no-peak"
            except ValueError as exc:
                flags = f"error:{type(exc).__name__}"
            records.append(AnalysisRecord(time_s=t, method=method, fg_hz=fg, bw_hz=bw, flags=flags))
    return records
