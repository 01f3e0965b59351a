import numpy as np
import pytest

from mixedphase.framing import WindowSpec, extract_frames
from mixedphase.synth import LFParams, synthesize

FS = 16000.0
NFFT = 4096


@pytest.fixture(scope="session")
def voiced_frame():
    """A representative GCI-centered frame from the synthetic corpus."""
    utt = synthesize(LFParams(f0=100.0, oq=0.6, am=0.7), "a", 0.08, FS)
    frames = extract_frames(utt.signal, utt.gcis, FS, WindowSpec(alpha=0.72, length_periods=2.0))
    return frames[len(frames) // 2]


@pytest.fixture(scope="session")
def low_pitch_frame():
    """Two-period frame at f0=60 (polynomial degree > 500)."""
    utt = synthesize(LFParams(f0=60.0, oq=0.6, am=0.7), "a", 0.14, FS)
    frames = extract_frames(utt.signal, utt.gcis, FS, WindowSpec(alpha=0.72, length_periods=2.0))
    return frames[len(frames) // 2]


def random_offcircle_signal(rng, max_len=16, margin=1e-3):
    """Random short signal whose Z-transform roots stay off the unit circle."""
    while True:
        n = rng.integers(8, max_len + 1)
        x = rng.standard_normal(n)
        roots = np.roots(x)
        if np.all(np.abs(np.abs(roots) - 1.0) >= margin):
            return x
