"""Command-line interface: corpus synthesis, decomposition of real speech,
windowing sweeps, grid evaluation, and the speed benchmark."""

from __future__ import annotations

import argparse
import sys
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from . import experiments, fileio, synth
from .analysis import analyze_signal
from .cepstrum import cc_decompose
from .framing import WindowSpec, extract_frames
from .metrics import NoPeakError, glottal_formant
from .zzt import zzt_decompose

GRID_FIELDS = [
    "f0", "oq", "am", "vowel", "alpha", "periods", "frame_index", "method",
    "fg_est_hz", "fg_true_hz", "fg_ref_hz", "rel_err", "sd_db", "flags", "pair_rms",
]
ANALYZE_FIELDS = ["time_s", "method", "fg_hz", "bw_hz", "flags"]
BENCH_FIELDS = ["f0_hz", "method", "median_ms", "iqr_ms", "frame_len", "fs"]
DECOMPOSE_FIELDS = ["time_s", "method", "fg_hz", "bw_hz", "slope", "flags"]


@dataclass(frozen=True)
class BenchRow:
    f0_hz: float
    method: str
    median_ms: float
    iqr_ms: float
    frame_len: int
    fs: float


@dataclass(frozen=True)
class DecomposeRow:
    time_s: float
    method: str
    fg_hz: float
    bw_hz: float
    slope: int
    flags: str


def _float_list(text: str) -> list[float]:
    return [float(t) for t in text.split(",") if t.strip()]


def _range_or_list(text: str) -> list[float]:
    """Parse '0.5:0.02:1.0' (start:step:stop, inclusive) or 'a,b,c'."""
    if ":" in text:
        start, step, stop = (float(t) for t in text.split(":"))
        n = int(round((stop - start) / step))
        return [round(start + i * step, 10) for i in range(n + 1)]
    return _float_list(text)


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(
        prog="mixedphase",
        description="Glottal source estimation by mixed-phase decomposition "
        "(complex cepstrum and zeros of the Z-transform).",
    )
    sub = ap.add_subparsers(dest="command", required=True)

    p = sub.add_parser("synth", help="emit the synthetic corpus as WAV + marker files")
    p.add_argument("--out-dir", required=True)
    p.add_argument("--format", choices=["float32", "pcm16"], default="float32")
    p.add_argument("--fs", type=float, default=16000.0)
    p.add_argument("--duration", type=float, default=0.5, help="seconds per utterance")
    p.add_argument("--f0", type=_float_list, default=None, help="restrict pitches, e.g. 60,100")
    p.add_argument("--vowels", default=None, help="restrict vowels, e.g. a,@")

    p = sub.add_parser("decompose", help="per-frame glottal estimates from a WAV + GCI markers")
    p.add_argument("--in", dest="wav", required=True)
    p.add_argument("--gci", required=True)
    p.add_argument("--method", choices=["cc", "zzt"], default="cc")
    p.add_argument("--alpha", type=float, default=0.72)
    p.add_argument("--periods", type=float, default=2.0)
    p.add_argument("--nfft", type=int, default=4096)
    p.add_argument("--out", required=True)
    p.add_argument("--save-components", metavar="DIR", default=None,
                   help="also write per-frame max/min-phase component WAVs")

    p = sub.add_parser("analyze", help="glottal formant trajectories (both methods)")
    p.add_argument("--in", dest="wav", required=True)
    p.add_argument("--gci", required=True)
    p.add_argument("--alpha", type=float, default=0.72)
    p.add_argument("--periods", type=float, default=2.0)
    p.add_argument("--nfft", type=int, default=4096)
    p.add_argument("--out", required=True)

    p = sub.add_parser("sweep-alpha", help="window-shape sweep over the synthetic grid")
    p.add_argument("--alphas", type=_range_or_list, default="0.5:0.02:1.0")
    p.add_argument("--periods", type=float, default=2.0)
    p.add_argument("--method", choices=["cc", "zzt"], default="cc")
    p.add_argument("--nfft", type=int, default=4096)
    p.add_argument("--jobs", type=int, default=1)
    p.add_argument("--out", required=True)

    p = sub.add_parser("sweep-length", help="window-length sweep over the synthetic grid")
    p.add_argument("--periods", type=_range_or_list, default="1.25,1.5,2.0,2.5,3.0")
    p.add_argument("--alpha", type=float, default=0.72)
    p.add_argument("--method", choices=["cc", "zzt"], default="cc")
    p.add_argument("--nfft", type=int, default=4096)
    p.add_argument("--jobs", type=int, default=1)
    p.add_argument("--out", required=True)

    p = sub.add_parser("grid", help="evaluate the full synthetic grid with both methods")
    p.add_argument("--methods", default="cc,zzt")
    p.add_argument("--alpha", type=float, default=0.72)
    p.add_argument("--periods", type=float, default=2.0)
    p.add_argument("--frames-per-config", type=int, default=1)
    p.add_argument("--nfft", type=int, default=4096)
    p.add_argument("--jobs", type=int, default=1)
    p.add_argument("--out", required=True)

    p = sub.add_parser("bench", help="decomposition speed comparison")
    p.add_argument("--f0", type=_float_list, default=[60.0, 180.0])
    p.add_argument("--reps", type=int, default=20)
    p.add_argument("--fs", type=float, default=16000.0)
    p.add_argument("--out", default=None)

    return ap


def _parse_alphas_or_default(value):
    if isinstance(value, str):
        return _range_or_list(value)
    return value


def _cmd_synth(args) -> int:
    out = Path(args.out_dir)
    out.mkdir(parents=True, exist_ok=True)
    grid = synth.parameter_grid()
    if args.f0:
        grid = [c for c in grid if c[0] in set(args.f0)]
    if args.vowels:
        keep = set(args.vowels.split(","))
        grid = [c for c in grid if c[3] in keep]
    rows = []
    for f0, oq, am, vowel in grid:
        utt = synth.synthesize(synth.LFParams(f0=f0, oq=oq, am=am), vowel, args.duration, args.fs)
        stem = f"f0_{f0:g}_oq_{oq:g}_am_{am:g}_{vowel}"
        fileio.write_wav(out / f"{stem}.wav", utt.signal, args.fs, fmt=args.format)
        fileio.write_markers(out / f"{stem}.gci", utt.gcis)
        rows.append((stem, f0, oq, am, vowel, utt.true_fg))
    with open(out / "corpus.csv", "w") as fh:
        fh.write("stem,f0,oq,am,vowel,true_fg_hz\n")
        for stem, f0, oq, am, vowel, fg in rows:
            fh.write(f"{stem},{f0:.9g},{oq:.9g},{am:.9g},{vowel},{fg:.9g}\n")
    print(f"wrote {len(rows)} utterances to {out}")
    return 0


def _load_frames(args):
    signal, fs = fileio.read_wav(args.wav)
    markers = fileio.read_markers(args.gci, fs=fs)
    spec = WindowSpec(alpha=args.alpha, length_periods=args.periods)
    return signal, fs, extract_frames(signal, markers.entries, fs, spec)


def _cmd_decompose(args) -> int:
    _, fs, frames = _load_frames(args)
    decompose = cc_decompose if args.method == "cc" else zzt_decompose
    comp_dir = Path(args.save_components) if args.save_components else None
    if comp_dir:
        comp_dir.mkdir(parents=True, exist_ok=True)
    rows = []
    for i, frame in enumerate(frames):
        fg = bw = float("nan")
        slope = 0
        flags = ""
        try:
            res = decompose(frame, args.nfft)
            slope = res.linear_phase_slope
            if comp_dir:
                fileio.write_wav(comp_dir / f"frame{i:04d}_max.wav", res.max_phase, fs)
                fileio.write_wav(comp_dir / f"frame{i:04d}_min.wav", res.min_phase, fs)
            est = glottal_formant(res.max_phase_spectrum, fs)
            fg, bw = est.fg, est.bandwidth
        except NoPeakError:
            flags = "no-peak"
        except ValueError as exc:
            flags = f"error:{type(exc).__name__}"
        rows.append(DecomposeRow(frame.gci_index / fs, args.method, fg, bw, slope, flags))
    fileio.write_csv(rows, args.out, DECOMPOSE_FIELDS)
    print(f"decomposed {len(rows)} frames -> {args.out}")
    return 0


def _cmd_analyze(args) -> int:
    signal, fs = fileio.read_wav(args.wav)
    markers = fileio.read_markers(args.gci, fs=fs)
    records = analyze_signal(
        signal, markers.entries, fs, alpha=args.alpha, periods=args.periods, nfft=args.nfft
    )
    fileio.write_csv(records, args.out, ANALYZE_FIELDS)
    for method in ("cc", "zzt"):
        fgs = [r.fg_hz for r in records if r.method == method and np.isfinite(r.fg_hz)]
        med = float(np.median(fgs)) if fgs else float("nan")
        print(f"{method}: {len(fgs)} frames, median Fg {med:.1f} Hz")
    print(f"wrote {len(records)} records -> {args.out}")
    return 0


def _print_sweep(result, axis_name: str) -> None:
    print(f"{axis_name:>8} {'det_rate':>9} {'sd_mean_db':>11}")
    for v, d, s in zip(result.axis_values, result.det_rate, result.sd_mean):
        print(f"{v:8.3g} {d:9.3f} {s:11.2f}")


def _cmd_sweep_alpha(args) -> int:
    alphas = _parse_alphas_or_default(args.alphas)
    result = experiments.sweep_alpha(
        alphas, periods=args.periods, method=args.method, nfft=args.nfft, n_jobs=args.jobs
    )
    fileio.write_csv(result.records, args.out, GRID_FIELDS)
    _print_sweep(result, "alpha")
    return 0


def _cmd_sweep_length(args) -> int:
    periods = _parse_alphas_or_default(args.periods)
    result = experiments.sweep_length(
        periods, alpha=args.alpha, method=args.method, nfft=args.nfft, n_jobs=args.jobs
    )
    fileio.write_csv(result.records, args.out, GRID_FIELDS)
    _print_sweep(result, "periods")
    return 0


def _cmd_grid(args) -> int:
    methods = tuple(m.strip() for m in args.methods.split(",") if m.strip())
    spec = WindowSpec(alpha=args.alpha, length_periods=args.periods)
    records = experiments.run_grid(
        spec,
        methods=methods,
        frames_per_config=args.frames_per_config,
        nfft=args.nfft,
        n_jobs=args.jobs,
    )
    fileio.write_csv(records, args.out, GRID_FIELDS)
    for method in methods:
        rows = [r for r in records if r.method == method]
        ests = np.array([r.fg_est_hz for r in rows])
        refs = np.array([r.fg_ref_hz for r in rows])
        with np.errstate(invalid="ignore"):
            det = float(np.mean(np.abs(ests - refs) / refs < 0.1))
        print(f"{method}: {len(rows)} frames, determination rate {det:.3f}")
    return 0


def _cmd_bench(args) -> int:
    results = experiments.benchmark(args.f0, fs=args.fs, repetitions=args.reps)
    rows = []
    for r in results:
        rows.append(BenchRow(r.f0, "zzt", r.zzt_ms, r.zzt_iqr_ms, r.frame_length, r.fs))
        rows.append(BenchRow(r.f0, "cc", r.cc_ms, r.cc_iqr_ms, r.frame_length, r.fs))
    if args.out:
        fileio.write_csv(rows, args.out, BENCH_FIELDS)
    print(f"{'f0_hz':>7} {'zzt_ms':>10} {'cc_ms':>8} {'ratio':>7}")
    for r in results:
        print(f"{r.f0:7.0f} {r.zzt_ms:10.2f} {r.cc_ms:8.2f} {r.zzt_ms / r.cc_ms:7.1f}")
    return 0


_COMMANDS = {
    "synth": _cmd_synth,
    "decompose": _cmd_decompose,
    "analyze": _cmd_analyze,
    "sweep-alpha": _cmd_sweep_alpha,
    "sweep-length": _cmd_sweep_length,
    "grid": _cmd_grid,
    "bench": _cmd_bench,
}


def cli_dispatch(argv) -> int:
    """Run one CLI invocation; returns the process exit code (0 success,
    2 usage error, 1 runtime error with a diagnostic on stderr)."""
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    try:
        return _COMMANDS[args.command](args)
    except (ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


def main() -> None:
    sys.exit(cli_dispatch(sys.argv[1:]))


if __name__ == "__main__":
    main()
