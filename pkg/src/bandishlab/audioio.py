"""Mono WAV reading and writing (16-bit PCM or float32)."""

from __future__ import annotations

from pathlib import Path

import numpy as np
from scipy.io import wavfile

from .errors import DataError


def read_wav(path: str | Path) -> tuple[np.ndarray, int]:
    """Read a mono WAV file, returning (float samples in [-1, 1], rate)."""
    try:
        rate, data = wavfile.read(str(path))
    except (ValueError, OSError) as exc:
        raise DataError(f"cannot read WAV file {path}: {exc}") from exc
    if data.ndim != 1:
        raise DataError(f"{path}: expected mono audio, got {data.ndim} channels")
    if data.dtype == np.int16:
        samples = data.astype(float) / 32768.0
    elif data.dtype in (np.float32, np.float64):
        samples = data.astype(float)
    else:
        raise DataError(f"{path}: unsupported sample format {data.dtype}")
    return samples, int(rate)


def write_wav(path: str | Path, samples: np.ndarray, sample_rate: int) -> None:
    """Write float samples as a mono float32 WAV."""
    out = np.asarray(samples, dtype=np.float32)
    Path(path).parent.mkdir(parents=True, exist_ok=True)
    wavfile.write(str(path), sample_rate, out)
