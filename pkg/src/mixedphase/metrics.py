"""Decomposition quality measures: spectral distortion, glottal formant
estimation, and the 10% determination-rate statistic."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

__all__ = [
    "GlottalFormantEstimate",
    "NoPeakError",
    "spectral_distortion",
    "glottal_formant",
    "determination_rate",
]


class NoPeakError(ValueError):
    """The spectrum has no interior peak in the search band."""


@dataclass(frozen=True)
class GlottalFormantEstimate:
    fg: float  # Hz
    bandwidth: float  # Hz, -3 dB width
    peak_mag_db: float
    one_sided: bool = False  # bandwidth doubled from one side (other side never
    #                          drops 3 dB below the peak, e.g. a shallow dip at DC)

    def __post_init__(self):
        if self.fg <= 0 or self.bandwidth <= 0:
            raise ValueError("glottal formant frequency and bandwidth must be positive")


def spectral_distortion(x_spec, y_spec, normalize: bool = True) -> float:
    """RMS log-magnitude spectral ratio in dB over the supplied bins.

    Both spectra are peak-magnitude normalized first (gain-invariant
    comparison) unless ``normalize`` is False.  Callers restrict the band by
    slicing before the call.
    """
    x = np.abs(np.asarray(x_spec))
    y = np.abs(np.asarray(y_spec))
    if x.shape != y.shape:
        raise ValueError(f"spectra must have equal length, got {x.shape} vs {y.shape}")
    if np.any(y == 0.0):
        raise ValueError("zero bin in reference spectrum")
    if np.any(x == 0.0):
        raise ValueError("zero bin in test spectrum")
    if normalize:
        x = x / x.max()
        y = y / y.max()
    ratio_db = 20.0 * np.log10(x / y)
    return float(np.sqrt(np.mean(ratio_db**2)))


def glottal_formant(component_spectrum, fs: float) -> GlottalFormantEstimate:
    """Glottal formant frequency and -3 dB bandwidth from a component spectrum.

    The largest magnitude peak in (0, fs/4] is refined by three-point
    parabolic interpolation on the log magnitude; the bandwidth comes from
    linearly interpolated -3 dB crossings on each side of the peak.
    """
    spec = np.asarray(component_spectrum)
    nfft = len(spec)
    mag = np.abs(spec[: nfft // 2 + 1])
    if not np.any(mag > 0.0):
        raise ValueError("zero spectrum")
    hi = nfft // 4  # f = k*fs/nfft <= fs/4
    band = mag[1 : hi + 1]
    k = 1 + int(np.argmax(band))
    if k + 1 >= len(mag) or not (mag[k] > mag[k - 1] and mag[k] >= mag[k + 1]):
        raise NoPeakError("no interior spectral peak in (0, fs/4]")

    with np.errstate(divide="ignore"):
        mag_db = 20.0 * np.log10(mag)
    lm, lc, lp = mag_db[k - 1], mag_db[k], mag_db[k + 1]
    denom = lm - 2.0 * lc + lp
    delta = 0.5 * (lm - lp) / denom if denom != 0.0 else 0.0
    peak_db = lc - 0.25 * (lm - lp) * delta
    fg = (k + delta) * fs / nfft

    cut = peak_db - 3.0
    f_left = _crossing(mag_db, k, -1, cut, fs / nfft)
    f_right = _crossing(mag_db, k, +1, cut, fs / nfft)
    if f_left is None and f_right is None:
        raise NoPeakError("-3 dB crossings not found on either side of the peak")
    one_sided = f_left is None or f_right is None
    if f_left is None:
        bandwidth = 2.0 * (f_right - fg)
    elif f_right is None:
        bandwidth = 2.0 * (fg - f_left)
    else:
        bandwidth = f_right - f_left
    return GlottalFormantEstimate(
        fg=fg, bandwidth=bandwidth, peak_mag_db=float(peak_db), one_sided=one_sided
    )


def _crossing(mag_db, k, step, cut, df):
    """Frequency where mag_db crosses ``cut`` walking from bin k in ``step``
    direction, linearly interpolated; None if the edge is reached first."""
    i = k
    while 0 <= i + step < len(mag_db):
        j = i + step
        if mag_db[j] < cut:
            frac = (mag_db[i] - cut) / (mag_db[i] - mag_db[j])
            return (i + step * frac) * df
        i = j
    return None


def determination_rate(estimates, truths) -> float:
    """Fraction of estimates whose relative error against the truth is
    below 10%.  Non-finite estimates count as failures."""
    est = np.asarray(estimates, dtype=float)
    tru = np.asarray(truths, dtype=float)
    if est.shape != tru.shape:
        raise ValueError(f"length mismatch: {est.shape} vs {tru.shape}")
    if np.any(tru <= 0):
        raise ValueError("truths must be positive")
    if est.size == 0:
        raise ValueError("empty estimate list")
    with np.errstate(invalid="ignore"):
        hits = np.abs(est - tru) / tru < 0.10
    return float(np.count_nonzero(hits) / est.size)
