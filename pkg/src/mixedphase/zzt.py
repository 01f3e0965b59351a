"""Mixed-phase decomposition through the zeros of the Z-transform.

A length-N frame is a degree N-1 polynomial in z^-1; its roots split by
modulus into a maximum-phase set (outside the unit circle, glottal open
phase) and a minimum-phase set (inside, vocal tract plus return phase).
Gain and linear-phase conventions mirror :mod:`mixedphase.cepstrum` exactly,
so results from both methods are directly comparable:

    max-phase spectrum = prod_k (1 - e^{j w} / Z_ac,k)          (unit gain)
    min-phase spectrum = g * prod_k (1 - Z_c,k e^{-j w}),  g = x(0) * prod_k(-Z_ac,k)
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .cepstrum import ComplexCepstrum, DecompositionResult, _samples

__all__ = [
    "RootSet",
    "RootSplit",
    "zzt_roots",
    "split_roots",
    "component_from_roots",
    "zzt_decompose",
    "cepstrum_from_roots",
]

CIRCLE_TOL = 1e-10


@dataclass(frozen=True)
class RootSet:
    """All zeros of a trimmed frame's Z-transform plus bookkeeping.

    gain is the first nonzero sample; trim_lead/trim_trail count the zero
    samples removed from the frame ends before root finding.
    """

    roots: np.ndarray = field(repr=False)
    gain: float
    trim_lead: int
    trim_trail: int
    degree: int
    max_residual: float = 0.0

    def __post_init__(self):
        if len(self.roots) != self.degree:
            raise ValueError("root count must equal polynomial degree")


@dataclass(frozen=True)
class RootSplit:
    """Roots partitioned by modulus: |z| > 1 anticausal, |z| < 1 causal,
    and a diagnostic band of width ``tol_circle`` around the unit circle.
    The three sets are disjoint; on-circle roots are *assigned* to the
    causal side at decomposition time."""

    anticausal: np.ndarray = field(repr=False)
    causal: np.ndarray = field(repr=False)
    on_circle: np.ndarray = field(repr=False)
    gain: float
    trim_lead: int = 0


def _polish_roots(coeffs: np.ndarray, roots: np.ndarray) -> np.ndarray:
    """One Newton step per root; roots outside the unit circle are refined on
    the reversed polynomial (evaluated at 1/z) to avoid overflow."""
    deg = len(coeffs) - 1
    rev = coeffs[::-1]
    drev = np.polyder(rev)
    dcoeffs = np.polyder(coeffs)

    inside = np.abs(roots) <= 1.0
    out = roots.copy()
    z = roots[inside]
    if z.size:
        dp = np.polyval(dcoeffs, z)
        ok = dp != 0
        step = np.zeros_like(z)
        step[ok] = np.polyval(coeffs, z[ok]) / dp[ok]
        out[inside] = z - step
    z = roots[~inside]
    if z.size:
        w = 1.0 / z
        q = np.polyval(rev, w)
        dq = np.polyval(drev, w)
        denom = deg * z * q - dq
        ok = denom != 0
        step = np.zeros_like(z)
        step[ok] = (z[ok] ** 2 * q[ok]) / denom[ok]
        out[~inside] = z - step
    return out


def _residuals(coeffs: np.ndarray, roots: np.ndarray) -> np.ndarray:
    """Scale-bounded residual |p(z)| / max(1, |z|)^deg at each root.

    Dividing by |z|^deg for outside roots (equivalently, evaluating the
    reversed polynomial at 1/z) keeps the residual a meaningful accuracy
    measure; the raw |p(z)| grows like |z|^deg however accurate the root is.
    """
    deg = len(coeffs) - 1
    res = np.empty(len(roots))
    inside = np.abs(roots) <= 1.0
    z = roots[inside]
    res[inside] = np.abs(np.polyval(coeffs, z))
    z = roots[~inside]
    res[~inside] = np.abs(np.polyval(coeffs[::-1], 1.0 / z))
    return res


def zzt_roots(frame) -> RootSet:
    """All roots of the frame's Z-transform, from the balanced companion
    matrix with one Newton polishing pass."""
    x = _samples(frame)
    nz = np.nonzero(x)[0]
    if nz.size == 0:
        raise ValueError("all-zero frame has no roots")
    trimmed = x[nz[0] : nz[-1] + 1]
    if len(trimmed) < 2:
        raise ValueError("frame has fewer than 2 nonzero samples after trimming")
    roots = np.roots(trimmed).astype(complex)
    roots = _polish_roots(trimmed, roots)
    max_res = float(np.max(_residuals(trimmed, roots)) / np.abs(trimmed).max())
    return RootSet(
        roots=roots,
        gain=float(trimmed[0]),
        trim_lead=int(nz[0]),
        trim_trail=int(len(x) - 1 - nz[-1]),
        degree=len(trimmed) - 1,
        max_residual=max_res,
    )


def split_roots(rs: RootSet, tol_circle: float = CIRCLE_TOL) -> RootSplit:
    """Partition roots by modulus against 1 with a tolerance band."""
    mod = np.abs(rs.roots)
    on = np.abs(mod - 1.0) <= tol_circle
    return RootSplit(
        anticausal=rs.roots[~on & (mod > 1.0)],
        causal=rs.roots[~on & (mod < 1.0)],
        on_circle=rs.roots[on],
        gain=rs.gain,
        trim_lead=rs.trim_lead,
    )


def _log_product(base: np.ndarray, factors: np.ndarray) -> np.ndarray:
    """log of prod_k (1 - base * factors[k]) per grid point, computed as a sum
    of logs so partial products cannot overflow; roots axis is chunked to
    bound memory on high degrees."""
    total = np.zeros(len(base), dtype=complex)
    # a root exactly on the sampled grid gives log(0) = -inf, which correctly
    # exponentiates to a zero spectral bin
    with np.errstate(divide="ignore"):
        for start in range(0, len(factors), 128):
            total += np.log(1.0 - base[:, None] * factors[None, start : start + 128]).sum(axis=1)
    return total


def component_from_roots(roots, gain: float, kind: str, nfft: int):
    """Time sequence and spectrum of one modulus class of roots.

    kind='causal': spectrum = gain * prod(1 - Z e^{-jw}); roots must lie on
    or inside the unit circle.  kind='anticausal': spectrum =
    prod(1 - e^{jw}/Z) with unit n=0 coefficient (the gain convention puts
    all gain on the causal side); roots must lie strictly outside.
    """
    roots = np.asarray(roots, dtype=complex)
    if nfft & (nfft - 1) or nfft < 4:
        raise ValueError(f"nfft must be a power of two >= 4, got {nfft}")
    mod = np.abs(roots)
    # the component is a real time sequence, so evaluate the upper half of the
    # grid and mirror by conjugate symmetry
    half = np.exp(2j * np.pi * np.arange(nfft // 2 + 1) / nfft)
    if kind == "causal":
        if np.any(mod > 1.0 + CIRCLE_TOL):
            raise ValueError("causal component given roots outside the unit circle")
        spec_half = np.full(nfft // 2 + 1, complex(gain))
        if roots.size:
            spec_half = spec_half * np.exp(_log_product(np.conj(half), roots))
    elif kind == "anticausal":
        if np.any(mod <= 1.0 + CIRCLE_TOL):
            raise ValueError("anticausal component given roots on or inside the unit circle")
        spec_half = np.ones(nfft // 2 + 1, dtype=complex)
        if roots.size:
            spec_half = spec_half * np.exp(_log_product(half, 1.0 / roots))
    else:
        raise ValueError(f"kind must be 'causal' or 'anticausal', got {kind!r}")
    spec = np.concatenate([spec_half, np.conj(spec_half[-2:0:-1])])
    time = np.fft.irfft(spec_half, nfft)
    return time, spec


def zzt_decompose(frame, nfft: int = 4096) -> DecompositionResult:
    """Mixed-phase decomposition by root splitting; gain/linear-phase
    conventions identical to :func:`mixedphase.cepstrum.cc_decompose`."""
    rs = zzt_roots(frame)
    split = split_roots(rs)
    causal = np.concatenate([split.causal, split.on_circle])
    anticausal = split.anticausal
    # overall minimum-phase gain: x(0) * prod(-Z_ac); real for a real frame
    g = complex(rs.gain)
    if anticausal.size:
        g *= np.exp(np.sum(np.log(-anticausal)))
    min_time, min_spec = component_from_roots(causal, g.real, "causal", nfft)
    max_time, max_spec = component_from_roots(anticausal, 1.0, "anticausal", nfft)
    mod = np.abs(rs.roots)
    return DecompositionResult(
        max_phase=max_time,
        min_phase=min_time,
        max_phase_spectrum=max_spec,
        min_phase_spectrum=min_spec,
        method="zzt",
        nfft=nfft,
        linear_phase_slope=len(anticausal) + rs.trim_lead,
        diagnostics={
            "min_circle_distance": float(np.min(np.abs(mod - 1.0))) if mod.size else np.inf,
            "max_root_residual": rs.max_residual,
            "on_circle_count": int(split.on_circle.size),
        },
    )


def cepstrum_from_roots(split: RootSplit, n_range: int, nfft: int = 4096) -> ComplexCepstrum:
    """Complex cepstrum from root power sums, the cross-oracle for the FFT path.

    For 1 <= n <= n_range:

        cepstrum(-n) = -(1/n) * sum_k Z_ac,k^{-n}
        cepstrum(+n) = -(1/n) * sum_k Z_c,k^{+n}

    (the anticausal half matches the direct series expansion of the log of
    the spectral factorization; the causal half carries a minus sign, which
    is the convention that agrees with the FFT-path cepstrum).  The n = 0
    coefficient is the log of the overall gain.
    """
    if n_range < 1 or n_range >= nfft // 2:
        raise ValueError(f"n_range must be in [1, nfft/2), got {n_range}")
    all_roots = np.concatenate([split.anticausal, split.causal, split.on_circle])
    mod = np.abs(all_roots)
    if np.any(np.abs(mod - 1.0) < 1e-3):
        raise ValueError("root within 1e-3 of the unit circle: power-sum series diverges")
    values = np.zeros(nfft)
    ns = np.arange(1, n_range + 1)
    causal = np.concatenate([split.causal, split.on_circle])
    if causal.size:
        values[1 : n_range + 1] = -np.real(np.sum(causal[None, :] ** ns[:, None], axis=1)) / ns
    if split.anticausal.size:
        values[-n_range:] = (
            -np.real(np.sum(split.anticausal[None, :] ** (-ns[:, None]), axis=1)) / ns
        )[::-1]
    g = complex(split.gain)
    sign = 1
    if split.anticausal.size:
        g *= np.exp(np.sum(np.log(-split.anticausal)))
    if g.real < 0:
        sign = -1
    values[0] = float(np.log(np.abs(g.real)))
    return ComplexCepstrum(
        values=values,
        nfft=nfft,
        linear_phase_slope=split.anticausal.size + split.trim_lead,
        log_gain=float(values[0]),
        sign=sign,
    )
