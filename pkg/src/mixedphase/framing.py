"""Pitch-synchronous framing with the two-parameter cosine window family.

Frames are centered on glottal closure instants (GCIs) so that the window
center coincides with the causal/anticausal boundary of the speech frame.
The window family

    w(n) = alpha/2 - (1/2) cos(2 pi n / (N-1)) + ((1-alpha)/2) cos(4 pi n / (N-1))

contains the Hanning (alpha = 1) and Blackman (alpha = 0.84) windows as
special cases.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass, field

import numpy as np

log = logging.getLogger(__name__)


@dataclass(frozen=True)
class WindowSpec:
    """Shape parameter and length (in local pitch periods) of the analysis window."""

    alpha: float
    length_periods: float = 2.0

    def __post_init__(self):
        if not 0.0 <= self.alpha <= 1.0:
            raise ValueError(f"alpha must be in [0, 1], got {self.alpha}")
        if self.length_periods <= 0.0:
            raise ValueError(f"length_periods must be > 0, got {self.length_periods}")


@dataclass(frozen=True)
class Frame:
    """A windowed, GCI-centered signal segment.

    samples       windowed amplitudes (odd length, zero at both ends)
    gci_index     sample offset of the window center within the source signal
    fs            sampling rate in Hz
    local_period  local pitch period estimate in samples
    """

    samples: np.ndarray = field(repr=False)
    gci_index: int
    fs: float
    local_period: float

    def __post_init__(self):
        object.__setattr__(self, "samples", np.asarray(self.samples, dtype=float))
        n = len(self.samples)
        if n < 8:
            raise ValueError(f"frame too short ({n} samples, need >= 8)")
        if self.samples[0] != 0.0 or self.samples[-1] != 0.0:
            raise ValueError("frame endpoints must be zero (windowed segment)")

    def __len__(self) -> int:
        return len(self.samples)


def make_window(n: int, alpha: float) -> np.ndarray:
    """Build an ``n``-point window of the two-parameter cosine family.

    alpha = 1 gives the Hanning window, alpha = 0.84 the Blackman window.
    For alpha < 0.75 the window has small negative lobes near its ends;
    that is intentional, the family is used over the whole of [0, 1].
    """
    if n < 2:
        raise ValueError(f"window length must be >= 2, got {n}")
    if not 0.0 <= alpha <= 1.0:
        raise ValueError(f"alpha must be in [0, 1], got {alpha}")
    k = np.arange(n) / (n - 1)
    w = alpha / 2.0 - 0.5 * np.cos(2.0 * np.pi * k) + (1.0 - alpha) / 2.0 * np.cos(4.0 * np.pi * k)
    # The endpoints cancel exactly in exact arithmetic (alpha/2 - 1/2 + (1-alpha)/2);
    # pin them to zero so downstream trimming sees true zeros.
    w[0] = 0.0
    w[-1] = 0.0
    return w


def extract_frames(
    signal: np.ndarray,
    gcis,
    fs: float,
    spec: WindowSpec,
) -> list[Frame]:
    """Extract one windowed frame per interior GCI.

    The local pitch period at each interior GCI is the mean distance to its
    two neighbors.  The frame length is ``length_periods`` times that period,
    rounded and forced odd so the GCI sits exactly at the center sample.
    GCIs whose window would overrun the signal are skipped (and logged);
    the first and last GCI have no period estimate and never yield a frame.
    """
    signal = np.asarray(signal, dtype=float)
    gcis = np.asarray(gcis, dtype=int)
    if gcis.size == 0:
        raise ValueError("empty GCI list")
    if gcis.size < 2:
        raise ValueError("need at least 2 GCIs to estimate a local period")
    if np.any(np.diff(gcis) <= 0):
        raise ValueError("GCIs must be strictly increasing")
    if gcis[0] < 0 or gcis[-1] >= len(signal):
        raise ValueError("GCIs outside signal bounds")

    frames = []
    skipped = []
    for i in range(1, len(gcis) - 1):
        gci = int(gcis[i])
        period = 0.5 * (gcis[i + 1] - gcis[i - 1])
        n = int(round(spec.length_periods * period))
        if n % 2 == 0:
            n += 1
        half = (n - 1) // 2
        if gci - half < 0 or gci + half >= len(signal):
            skipped.append(gci)
            continue
        seg = signal[gci - half : gci + half + 1]
        frames.append(
            Frame(
                samples=seg * make_window(n, spec.alpha),
                gci_index=gci,
                fs=fs,
                local_period=float(period),
            )
        )
    if skipped:
        log.warning("skipped %d GCIs whose window overruns the signal: %s", len(skipped), skipped)
    return frames
