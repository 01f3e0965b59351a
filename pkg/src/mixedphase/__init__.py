"""Glottal source estimation by mixed-phase decomposition of voiced speech.

Two decomposition paths separate the maximum-phase (glottal open phase) and
minimum-phase (vocal tract) components of GCI-centered, pitch-synchronous
windowed frames: the complex cepstrum (fast, FFT-based) and the zeros of the
Z-transform (root splitting by modulus).  A synthetic corpus of LF-model
glottal pulses through all-pole vowel filters drives the windowing study,
the method-equivalence test, and the speed comparison.
"""

from .analysis import AnalysisRecord, analyze_signal
from .cepstrum import (
    ComplexCepstrum,
    DecompositionResult,
    UnwrapError,
    ZeroBinError,
    cc_decompose,
    complex_cepstrum,
    realize_component,
    spectrum,
    split_cepstrum,
    unwrap_phase,
)
from .experiments import (
    BenchResult,
    GridRecord,
    SweepResult,
    benchmark,
    run_grid,
    sweep_alpha,
    sweep_length,
)
from .fileio import (
    MarkerFile,
    MultichannelError,
    TruncatedFileError,
    UnsupportedCodecError,
    WavError,
    read_markers,
    read_wav,
    write_csv,
    write_markers,
    write_wav,
)
from .framing import Frame, WindowSpec, extract_frames, make_window
from .metrics import (
    GlottalFormantEstimate,
    NoPeakError,
    determination_rate,
    glottal_formant,
    spectral_distortion,
)
from .synth import (
    LFParams,
    SyntheticUtterance,
    corpus_filter,
    lf_pulse,
    lf_train,
    parameter_grid,
    synthesize,
    true_glottal_formant,
    vowel_filter,
)
from .zzt import (
    RootSet,
    RootSplit,
    cepstrum_from_roots,
    component_from_roots,
    split_roots,
    zzt_decompose,
    zzt_roots,
)

__version__ = "0.1.0"
