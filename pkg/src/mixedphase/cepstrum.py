"""Complex cepstrum computation and causal/anticausal decomposition.

The complex cepstrum of a frame is the inverse FFT of ``log|X| + j*phase``
where the phase is unwrapped on a dense FFT grid and its integer linear
component (delay plus one full turn per maximum-phase zero) is removed.
Splitting the cepstrum at quefrency zero and exponentiating each half
factorizes the frame into a maximum-phase (anticausal, glottal) and a
minimum-phase (causal, vocal tract) component.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .framing import Frame

__all__ = [
    "ComplexCepstrum",
    "DecompositionResult",
    "ZeroBinError",
    "UnwrapError",
    "spectrum",
    "unwrap_phase",
    "complex_cepstrum",
    "split_cepstrum",
    "realize_component",
    "cc_decompose",
]

# Relative magnitude below which a spectral bin counts as a zero on the grid.
ZERO_BIN_TOL = 1e-12
# Relative imaginary residue above which the unwrap is considered failed.
IMAG_RESIDUE_TOL = 1e-8
# Radius of the exponential taper used to push a zero off the sampled grid.
TAPER_RADIUS = 0.9999


class ZeroBinError(ValueError):
    """A zero of X(z) lies on the sampled unit-circle grid (log is singular)."""


class UnwrapError(ValueError):
    """Phase unwrapping failed (excessive imaginary residue in the cepstrum)."""


@dataclass(frozen=True)
class ComplexCepstrum:
    """Quefrency-domain representation of a frame.

    values             real array of length nfft in FFT wrap-around order:
                       index n holds quefrency n for n < nfft/2 and
                       quefrency n - nfft for n >= nfft/2
    nfft               FFT size used
    linear_phase_slope integer samples of linear phase removed before the
                       inverse transform (delay + number of maximum-phase zeros)
    log_gain           the quefrency-zero coefficient, log of the overall gain
    sign               +1/-1, sign of the spectrum at DC, factored out so the
                       log stays real; reapplied on the minimum-phase side
    imag_residue       relative imaginary residue discarded by the inverse
                       transform; a quality measure of the unwrap
    """

    values: np.ndarray = field(repr=False)
    nfft: int
    linear_phase_slope: int
    log_gain: float
    sign: int = 1
    imag_residue: float = 0.0

    def at(self, n: int) -> float:
        """Value at quefrency n, -nfft/2 <= n < nfft/2."""
        if not -self.nfft // 2 <= n < self.nfft // 2:
            raise IndexError(f"quefrency {n} outside [-{self.nfft // 2}, {self.nfft // 2})")
        return float(self.values[n % self.nfft])


@dataclass(frozen=True)
class DecompositionResult:
    """Paired maximum-phase and minimum-phase components of a frame.

    Time sequences are length-nfft buffers in wrap-around order: the
    anticausal (maximum-phase) component occupies index 0 and the tail of
    the buffer, i.e. nonpositive times.
    """

    max_phase: np.ndarray = field(repr=False)
    min_phase: np.ndarray = field(repr=False)
    max_phase_spectrum: np.ndarray = field(repr=False)
    min_phase_spectrum: np.ndarray = field(repr=False)
    method: str
    nfft: int
    linear_phase_slope: int
    diagnostics: dict = field(default_factory=dict)


def _samples(frame) -> np.ndarray:
    if isinstance(frame, Frame):
        return frame.samples
    return np.asarray(frame, dtype=float)


def _check_nfft(nfft: int, n: int, factor: int = 1):
    if nfft & (nfft - 1) or nfft < 4:
        raise ValueError(f"nfft must be a power of two >= 4, got {nfft}")
    if nfft < factor * n:
        raise ValueError(f"nfft={nfft} too small for frame of {n} samples (need >= {factor}x)")


def spectrum(frame, nfft: int) -> np.ndarray:
    """Zero-padded FFT of the frame samples on an nfft-point grid."""
    x = _samples(frame)
    _check_nfft(nfft, len(x))
    return np.fft.fft(x, nfft)


def unwrap_phase(spec: np.ndarray) -> tuple[np.ndarray, int]:
    """Unwrap the phase of a full-circle spectrum and remove its linear component.

    Accumulates principal-value differences around the whole grid (the extra
    wrap back to omega = 2*pi determines the integer slope), then adds
    ``slope * omega`` so the returned phase has no net winding.  Returns
    (phase, slope); slope equals the signal delay plus the number of
    maximum-phase zeros.
    """
    spec = np.asarray(spec)
    n = len(spec)
    mag = np.abs(spec)
    if np.any(mag <= ZERO_BIN_TOL * mag.max(initial=0.0)):
        raise ZeroBinError("spectral bin with zero magnitude on the FFT grid")
    ang = np.angle(spec)
    unwrapped = np.unwrap(np.concatenate([ang, ang[:1]]))
    slope = int(round(-(unwrapped[-1] - unwrapped[0]) / (2.0 * np.pi)))
    omega = 2.0 * np.pi * np.arange(n) / n
    return unwrapped[:-1] + slope * omega, slope


def complex_cepstrum(frame, nfft: int = 4096) -> ComplexCepstrum:
    """Complex cepstrum of a frame with linear phase removed.

    The negative-quefrency half sits at the tail of ``values`` (wrap-around
    convention).  A negative DC spectrum value is factored out as ``sign``
    so the cepstrum stays purely real; an imaginary residue above 1e-8
    relative raises :class:`UnwrapError`.
    """
    x = _samples(frame)
    if not np.any(x):
        raise ValueError("all-zero frame has no cepstrum")
    _check_nfft(nfft, len(x), factor=4)
    spec = np.fft.fft(x, nfft)
    phase, slope = unwrap_phase(spec)
    sign = 1
    if spec[0].real < 0.0:
        sign = -1
        phase = phase - np.pi
    log_spec = np.log(np.abs(spec)) + 1j * phase
    values = np.fft.ifft(log_spec)
    scale = np.max(np.abs(values.real))
    residue = np.max(np.abs(values.imag)) / scale if scale > 0.0 else 0.0
    if residue > IMAG_RESIDUE_TOL:
        raise UnwrapError(f"imaginary residue {residue:.3e} exceeds {IMAG_RESIDUE_TOL:.0e}")
    values = values.real.copy()
    return ComplexCepstrum(
        values=values,
        nfft=nfft,
        linear_phase_slope=slope,
        log_gain=float(values[0]),
        sign=sign,
        imag_residue=float(residue),
    )


def split_cepstrum(cc: ComplexCepstrum) -> tuple[ComplexCepstrum, ComplexCepstrum]:
    """Split at quefrency zero into (anticausal, causal) halves.

    The anticausal half keeps n < 0; the causal half keeps n > 0 plus the
    n = 0 gain coefficient (and the DC sign), so the glottal estimate is
    defined up to gain.  The halves sum to the original values exactly.
    """
    half = cc.nfft // 2
    anti = np.zeros_like(cc.values)
    anti[half:] = cc.values[half:]
    caus = np.zeros_like(cc.values)
    caus[: half] = cc.values[: half]
    return (
        ComplexCepstrum(anti, cc.nfft, cc.linear_phase_slope, 0.0, 1),
        ComplexCepstrum(caus, cc.nfft, cc.linear_phase_slope, cc.log_gain, cc.sign),
    )


def realize_component(part: ComplexCepstrum, nfft: int | None = None):
    """Exponentiate a half-cepstrum back into (time, spectrum).

    For an anticausal part the time support lies at nonpositive indices,
    rendered at the tail of the wrap-around buffer.
    """
    if nfft is None:
        nfft = part.nfft
    if nfft != part.nfft:
        raise ValueError("nfft must match the cepstrum grid")
    spec = np.exp(np.fft.fft(part.values))
    if part.sign < 0:
        spec = -spec
    time = np.fft.ifft(spec).real
    return time, spec


def cc_decompose(frame, nfft: int = 4096) -> DecompositionResult:
    """Full cepstral decomposition: maximum-phase (glottal) and minimum-phase
    (tract) components of a frame.

    If a zero of X(z) falls on the sampled grid, the frame is retried once
    with an exponential taper (radius 0.9999) and the retry is recorded in
    ``diagnostics['taper_applied']``.
    """
    x = _samples(frame)
    taper_applied = False
    try:
        cc = complex_cepstrum(x, nfft)
    except ZeroBinError:
        taper_applied = True
        x = x * TAPER_RADIUS ** np.arange(len(x))
        cc = complex_cepstrum(x, nfft)
    anti, caus = split_cepstrum(cc)
    max_time, max_spec = realize_component(anti)
    min_time, min_spec = realize_component(caus)
    return DecompositionResult(
        max_phase=max_time,
        min_phase=min_time,
        max_phase_spectrum=max_spec,
        min_phase_spectrum=min_spec,
        method="cc",
        nfft=nfft,
        linear_phase_slope=cc.linear_phase_slope,
        diagnostics={"taper_applied": taper_applied, "imag_residue": cc.imag_residue},
    )
