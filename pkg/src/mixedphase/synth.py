"""Synthetic voiced speech: LF glottal flow derivative trains through all-pole filters.

The corpus generator sweeps pitch, open quotient, asymmetry coefficient and
vowel over a fixed grid (7 x 11 x 7 x 4 = 2156 configurations) and records
full ground truth: GCI positions, the source pulse, and the true glottal
formant frequency.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from functools import lru_cache

import numpy as np
import scipy.linalg
import scipy.signal
from scipy.optimize import bisect

__all__ = [
    "LFParams",
    "SyntheticUtterance",
    "VOWELS",
    "lf_pulse",
    "lf_train",
    "vowel_filter",
    "corpus_filter",
    "synthesize",
    "true_glottal_formant",
    "parameter_grid",
]


@dataclass(frozen=True)
class LFParams:
    """LF source parameters: pitch, open quotient, asymmetry, excitation strength."""

    f0: float
    oq: float
    am: float
    ee: float = 1.0

    def __post_init__(self):
        if self.f0 <= 0:
            raise ValueError(f"f0 must be > 0, got {self.f0}")
        if not 0.0 < self.oq < 1.0:
            raise ValueError(f"open quotient must be in (0, 1), got {self.oq}")
        if not 0.5 < self.am < 1.0:
            raise ValueError(f"asymmetry coefficient must be in (0.5, 1), got {self.am}")
        if self.ee <= 0:
            raise ValueError(f"ee must be > 0, got {self.ee}")


@dataclass(frozen=True)
class SyntheticUtterance:
    """A synthesized utterance bundled with its ground truth."""

    signal: np.ndarray = field(repr=False)
    fs: float
    gcis: np.ndarray = field(repr=False)
    params: LFParams
    vowel: str
    filter_coeffs: np.ndarray = field(repr=False)
    true_fg: float
    source: np.ndarray = field(repr=False)  # unfiltered flow-derivative train
    pulse: np.ndarray = field(repr=False)  # single source period


# Return phase duration as a fraction of the closed phase.  The corpus sweeps
# only (oq, am); this fixes the remaining degree of freedom of the pulse shape
# (a short return phase, typical of modal-to-tense voice).
RETURN_QUOTIENT = 0.02


class LFSolveError(ValueError):
    """A parameter combination admits no solution for the implicit pulse constants."""


def _solve_return_constant(ta: float, tr: float) -> float:
    """Unique eps > 0 with eps*ta = 1 - exp(-eps*tr); makes the return phase
    start exactly at the excitation minimum (continuity of the pulse at Te)."""
    f = lambda eps: eps * ta - 1.0 + np.exp(-eps * tr)
    lo, hi = 1e-9, 2.0 / ta
    # f(0+) < 0 because ta < tr; f grows like eps*ta for large eps.
    if not (f(lo) < 0.0 < f(hi)):
        raise LFSolveError(f"return-phase continuity constraint has no root (ta={ta}, tr={tr})")
    return bisect(f, lo, hi, rtol=1e-14, maxiter=200)


def _sample_pulse(tau: np.ndarray, te: float, theta: float, a: float, eps: float, ta: float):
    """Evaluate one period of the flow derivative on normalized time tau in [0, 1)."""
    omega = theta / te
    # E0 pins the open phase to -1 at te: E0 * exp(a te) * sin(theta) = -1.
    log_env = a * (tau - te)
    open_part = -np.sin(omega * tau) / np.sin(theta) * np.exp(log_env)
    tr = 1.0 - te
    ret_part = -(np.exp(-eps * (tau - te)) - np.exp(-eps * tr)) / (eps * ta)
    return np.where(tau <= te, open_part, ret_part)


def lf_pulse(p: LFParams, fs: float) -> np.ndarray:
    """One period of the LF glottal flow derivative, sampled at ``fs``.

    The open phase is a growing-exponential sinusoid reaching its negative
    extremum ``-ee`` at Te = oq*T0 (Te is snapped to the sample grid so the
    extremum lands exactly on a sample); the flow maximum sits at Tp = am*Te.
    The exponential return phase starts at -ee (continuity) and decays to
    zero at the period end.  The growth constant is solved by bisection so
    the sampled pulse sums to zero (net flow conservation).
    """
    if fs < 8000:
        raise ValueError(f"fs must be >= 8000 Hz, got {fs}")
    n_period = int(round(fs / p.f0))
    te_idx = int(round(p.oq * n_period))
    if te_idx < 2 or te_idx > n_period - 2:
        raise LFSolveError(f"open/closed phase shorter than 2 samples (f0={p.f0}, oq={p.oq}, fs={fs})")
    te = te_idx / n_period
    tr = 1.0 - te
    ta = RETURN_QUOTIENT * tr
    theta = np.pi / p.am  # omega_g * Te with Tp = am * Te
    eps = _solve_return_constant(ta, tr)

    tau = np.arange(n_period) / n_period

    def total(a):
        return float(np.sum(_sample_pulse(tau, te, theta, a, eps, ta)))

    # Bracket the flow-conservation root: very negative a front-loads the
    # positive lobe (sum > 0), very positive a deepens the negative lobe.
    lo, hi = -1.0, 1.0
    cap = 600.0 / te
    while total(lo) <= 0.0:
        lo *= 2.0
        if lo < -cap:
            raise LFSolveError(f"flow conservation has no solution (lower bracket), params={p}")
    while total(hi) >= 0.0:
        hi *= 2.0
        if hi > cap:
            raise LFSolveError(f"flow conservation has no solution (upper bracket), params={p}")
    a = bisect(total, lo, hi, rtol=1e-14, maxiter=300)

    return p.ee * _sample_pulse(tau, te, theta, a, eps, ta)


def lf_train(p: LFParams, duration: float, fs: float):
    """Concatenate identical LF periods; returns (signal, gci_indices).

    GCIs are recorded at the per-period sample of maximal negative excitation
    (the pulse argmin; this is the Te sample for all but the most extreme
    low-asymmetry shapes).
    """
    if duration < 4.0 / p.f0:
        raise ValueError(f"duration must cover at least 4 periods ({4.0 / p.f0:.4f} s), got {duration}")
    pulse = lf_pulse(p, fs)
    n_period = len(pulse)
    n_periods = int(round(duration * fs / n_period))
    signal = np.tile(pulse, n_periods)
    excitation_idx = int(np.argmin(pulse))
    gcis = excitation_idx + n_period * np.arange(n_periods)
    return signal, gcis


# Formant frequencies/bandwidths (Hz) per vowel, typical adult male values
# with LPC-analysis-like bandwidths; a cascade of second-order resonators
# built from these replaces LPC analysis of recorded vowels.
VOWELS: dict[str, tuple[tuple[float, float], ...]] = {
    "a": ((700.0, 130.0), (1220.0, 90.0), (2600.0, 160.0), (3300.0, 220.0), (4200.0, 280.0)),
    "@": ((500.0, 90.0), (1500.0, 110.0), (2500.0, 150.0), (3500.0, 200.0), (4500.0, 280.0)),
    "i": ((310.0, 80.0), (2020.0, 150.0), (2960.0, 250.0), (3800.0, 300.0)),
    "y": ((250.0, 90.0), (1800.0, 110.0), (2250.0, 140.0), (3350.0, 200.0), (4500.0, 260.0)),
}


def vowel_filter(vowel: str, fs: float) -> np.ndarray:
    """All-pole denominator coefficients for a vowel's vocal-tract filter.

    Cascade of second-order resonators from the shipped formant table;
    formants at or above 0.45*fs are dropped so the filter stays usable at
    any sampling rate.  All poles lie strictly inside the unit circle.
    """
    if vowel not in VOWELS:
        raise ValueError(f"unsupported vowel {vowel!r}, expected one of {sorted(VOWELS)}")
    a = np.ones(1)
    for freq, bw in VOWELS[vowel]:
        if freq >= 0.45 * fs:
            continue
        r = np.exp(-np.pi * bw / fs)
        section = np.array([1.0, -2.0 * r * np.cos(2.0 * np.pi * freq / fs), r * r])
        a = np.convolve(a, section)
    return a


@lru_cache(maxsize=32)
def corpus_filter(vowel: str, fs: float, order: int = 18) -> np.ndarray:
    """All-pole corpus filter: the LPC envelope of a modal reference vowel.

    A sustained vowel at 100 Hz (modal male voice) is synthesized through the
    resonator cascade and refit by autocorrelation LPC.  Like a filter
    estimated from a recording, the result carries the reference source's
    spectral envelope (tilt and glottal-formant hump) on top of the formant
    structure, which is what makes the corpus a realistic decomposition
    challenge.  Deterministic per (vowel, fs, order); always minimum-phase.
    """
    reference = synthesize(LFParams(f0=100.0, oq=0.6, am=0.7), vowel, 0.5, fs, tract="cascade")
    x = reference.signal * np.hanning(len(reference.signal))
    r = np.correlate(x, x, "full")[len(x) - 1 : len(x) + order]
    coeffs = scipy.linalg.solve_toeplitz((r[:-1], r[:-1]), r[1:])
    a = np.r_[1.0, -coeffs]
    if not np.all(np.abs(np.roots(a)) < 1.0):
        raise ValueError(f"LPC refit for vowel {vowel!r} is unstable")
    return a


def synthesize(
    p: LFParams, vowel: str, duration: float, fs: float, tract: str = "lpc"
) -> SyntheticUtterance:
    """LF train through the vowel's all-pole filter, with full ground truth.

    tract="lpc" (default, the corpus setting) filters with the LPC envelope
    of a modal reference vowel; tract="cascade" uses the bare resonator
    cascade from the formant table.
    """
    source, gcis = lf_train(p, duration, fs)
    if tract == "lpc":
        a = corpus_filter(vowel, fs)
    elif tract == "cascade":
        a = vowel_filter(vowel, fs)
    else:
        raise ValueError(f"tract must be 'lpc' or 'cascade', got {tract!r}")
    signal = scipy.signal.lfilter([1.0], a, source)
    return SyntheticUtterance(
        signal=signal,
        fs=fs,
        gcis=gcis,
        params=p,
        vowel=vowel,
        filter_coeffs=a,
        true_fg=true_glottal_formant(p, fs),
        source=source,
        pulse=lf_pulse(p, fs),
    )


def true_glottal_formant(p: LFParams, fs: float, nfft: int | None = None) -> float:
    """Ground-truth glottal formant: location of the amplitude-spectrum maximum
    of one zero-padded LF pulse, refined by parabolic interpolation."""
    pulse = lf_pulse(p, fs)
    if nfft is None:
        # fixed ~0.25 Hz grid regardless of fs
        nfft = 1 << int(np.ceil(np.log2(fs * 4.0)))
    mag = np.abs(np.fft.rfft(pulse, nfft))
    hi = int(np.floor(nfft / 4))  # search (0, fs/4]
    k = 1 + int(np.argmax(mag[1 : hi + 1]))
    if 1 <= k < len(mag) - 1:
        lm, lc, lp = np.log(mag[k - 1 : k + 2])
        denom = lm - 2.0 * lc + lp
        delta = 0.5 * (lm - lp) / denom if denom != 0.0 else 0.0
    else:
        delta = 0.0
    return (k + delta) * fs / nfft


def parameter_grid():
    """The corpus grid: (f0, oq, am, vowel) tuples in deterministic order."""
    f0s = [60.0, 80.0, 100.0, 120.0, 140.0, 160.0, 180.0]
    oqs = [round(0.40 + 0.05 * i, 2) for i in range(11)]
    ams = [round(0.60 + 0.05 * i, 2) for i in range(7)]
    vowels = ["a", "@", "i", "y"]
    return [(f0, oq, am, v) for f0 in f0s for oq in oqs for am in ams for v in vowels]
