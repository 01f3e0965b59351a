"""WAV and marker-file reading, WAV writing, and CSV serialization.

Only mono RIFF/WAVE files are supported, PCM 16-bit or IEEE float32; the
reader is a small chunk parser so malformed inputs give precise errors.
Marker files carry one GCI per line with an optional ``unit=`` header.
"""

from __future__ import annotations

import csv
import struct
from dataclasses import dataclass, fields, field
from pathlib import Path

import numpy as np

__all__ = [
    "WavError",
    "MultichannelError",
    "UnsupportedCodecError",
    "TruncatedFileError",
    "MarkerError",
    "MarkerFile",
    "read_wav",
    "write_wav",
    "read_markers",
    "write_markers",
    "write_csv",
]


class WavError(ValueError):
    """Malformed or unsupported WAV file."""


class MultichannelError(WavError):
    """The file has more than one channel."""


class UnsupportedCodecError(WavError):
    """Codec other than PCM 16-bit or IEEE float32."""


class TruncatedFileError(WavError):
    """The file ends before its declared data."""


class MarkerError(ValueError):
    """Malformed marker file."""


@dataclass(frozen=True)
class MarkerFile:
    """GCI positions in samples, converted from the declared unit at load."""

    entries: np.ndarray = field(repr=False)
    unit: str = "samples"


def read_wav(path) -> tuple[np.ndarray, float]:
    """Read a mono PCM16 or float32 WAV; returns (samples in [-1, 1], fs)."""
    raw = Path(path).read_bytes()
    if len(raw) < 12 or raw[:4] != b"RIFF" or raw[8:12] != b"WAVE":
        raise WavError(f"{path}: not a RIFF/WAVE file")
    fmt = None
    pos = 12
    while pos + 8 <= len(raw):
        cid, size = struct.unpack_from("<4sI", raw, pos)
        body = raw[pos + 8 : pos + 8 + size]
        if cid == b"fmt ":
            if len(body) < 16:
                raise TruncatedFileError(f"{path}: fmt chunk truncated")
            fmt = struct.unpack_from("<HHIIHH", body, 0)
        elif cid == b"data":
            if fmt is None:
                raise WavError(f"{path}: data chunk before fmt chunk")
            if len(body) < size:
                raise TruncatedFileError(
                    f"{path}: data chunk declares {size} bytes, file has {len(body)}"
                )
            return _decode_samples(path, fmt, body)
        pos += 8 + size + (size & 1)
    if fmt is None:
        raise WavError(f"{path}: missing fmt chunk")
    raise TruncatedFileError(f"{path}: missing data chunk")


def _decode_samples(path, fmt, body) -> tuple[np.ndarray, float]:
    audio_format, n_channels, rate, _, _, bits = fmt
    if n_channels != 1:
        raise MultichannelError(f"{path}: {n_channels} channels, only mono supported")
    if audio_format == 1 and bits == 16:
        x = np.frombuffer(body, dtype="<i2").astype(np.float64) / 32768.0
    elif audio_format == 3 and bits == 32:
        x = np.frombuffer(body, dtype="<f4").astype(np.float64)
    else:
        raise UnsupportedCodecError(
            f"{path}: format tag {audio_format} at {bits} bits unsupported "
            "(need PCM16 or IEEE float32)"
        )
    return x, float(rate)


def write_wav(path, signal, fs: float, fmt: str = "float32") -> None:
    """Write a mono WAV; fmt is 'float32' (lossless for tests) or 'pcm16'."""
    signal = np.asarray(signal, dtype=np.float64)
    if fmt == "float32":
        payload = signal.astype("<f4").tobytes()
        format_tag, bits = 3, 32
    elif fmt == "pcm16":
        clipped = np.clip(signal, -1.0, 32767.0 / 32768.0)
        payload = (np.round(clipped * 32768.0)).astype("<i2").tobytes()
        format_tag, bits = 1, 16
    else:
        raise ValueError(f"fmt must be 'float32' or 'pcm16', got {fmt!r}")
    block = bits // 8
    header = struct.pack(
        "<4sI4s4sIHHIIHH4sI",
        b"RIFF", 36 + len(payload), b"WAVE",
        b"fmt ", 16, format_tag, 1, int(fs), int(fs) * block, block, bits,
        b"data", len(payload),
    )
    Path(path).write_bytes(header + payload)


def read_markers(path, fs: float | None = None) -> MarkerFile:
    """Parse a GCI marker file: one value per line, optional first line
    ``unit=samples`` or ``unit=seconds``.  Seconds are converted to samples
    using ``fs`` (required in that case)."""
    lines = Path(path).read_text().splitlines()
    unit = "samples"
    start = 0
    if lines and lines[0].strip().startswith("unit="):
        unit = lines[0].strip()[5:]
        if unit not in ("samples", "seconds"):
            raise MarkerError(f"{path}:1: unknown unit {unit!r}")
        start = 1
    values = []
    for i, line in enumerate(lines[start:], start=start + 1):
        text = line.strip()
        if not text:
            continue
        try:
            v = float(text)
        except ValueError:
            raise MarkerError(f"{path}:{i}: unparseable value {text!r}") from None
        if v < 0:
            raise MarkerError(f"{path}:{i}: negative marker {text}")
        if values and v <= values[-1]:
            raise MarkerError(f"{path}:{i}: markers must be strictly increasing")
        values.append(v)
    arr = np.asarray(values, dtype=float)
    if unit == "seconds":
        if fs is None:
            raise MarkerError(f"{path}: unit=seconds requires the signal's sampling rate")
        arr = arr * fs
    return MarkerFile(entries=np.round(arr).astype(int), unit=unit)


def write_markers(path, gcis, unit: str = "samples") -> None:
    """Write GCI sample indices, one per line, with a unit header."""
    with open(path, "w") as fh:
        fh.write(f"unit={unit}\n")
        for g in gcis:
            fh.write(f"{int(g)}\n")


def _format_value(v) -> str:
    if isinstance(v, float) or isinstance(v, np.floating):
        return f"{v:.9g}"
    return str(v)


def write_csv(records, path, fieldnames=None) -> None:
    """Write homogeneous dataclass records as RFC-4180 CSV with a header row.

    Floats get 9 significant digits; identical records produce byte-identical
    files."""
    records = list(records)
    if fieldnames is None:
        if not records:
            raise ValueError("cannot infer CSV header from an empty record list")
        fieldnames = [f.name for f in fields(records[0])]
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(fieldnames)
        for rec in records:
            writer.writerow([_format_value(getattr(rec, name)) for name in fieldnames])
