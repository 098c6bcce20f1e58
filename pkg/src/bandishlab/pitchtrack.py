"""Monophonic F0 tracking at a 10 ms hop via normalized autocorrelation.

Self-contained substitute for an external tracker: short-time
autocorrelation with unbiased lag normalization for peak location,
parabolic peak interpolation, and a biased-ratio voicing decision.
Unvoiced frames are reported as 0 Hz.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import ConfigurationError, DomainError

HOP_SECONDS = 0.010


@dataclass(frozen=True)
class TrackerParams:
    fmin: float = 80.0
    fmax: float = 1000.0
    frame_length: float = 0.040
    voicing_threshold: float = 0.45

    def __post_init__(self):
        if not 0 < self.fmin < self.fmax:
            raise ConfigurationError(f"need 0 < fmin < fmax, got {self.fmin}/{self.fmax}")
        if self.frame_length < 2.0 / self.fmin:
            raise ConfigurationError(
                f"frame_length {self.frame_length} shorter than two fmin periods"
            )
        if not 0 < self.voicing_threshold < 1:
            raise ConfigurationError("voicing_threshold must lie in (0, 1)")


@dataclass(frozen=True)
class PitchContour:
    """Uniformly sampled F0 series; 0 Hz marks unvoiced frames."""

    hop: float
    start_time: float
    frames: np.ndarray = field(repr=False)

    def __post_init__(self):
        frames = np.asarray(self.frames, dtype=float)
        frames.flags.writeable = False
        object.__setattr__(self, "frames", frames)

    def __len__(self) -> int:
        return len(self.frames)

    def __eq__(self, other) -> bool:
        if not isinstance(other, PitchContour):
            return NotImplemented
        return (
            self.hop == other.hop
            and self.start_time == other.start_time
            and np.array_equal(self.frames, other.frames)
        )

    @property
    def times(self) -> np.ndarray:
        return self.start_time + self.hop * np.arange(len(self.frames))

    @property
    def end_time(self) -> float:
        return self.start_time + self.hop * (len(self.frames) - 1)


def frame_count(n_samples: int, sample_rate: int, frame_length: float,
                hop: float = HOP_SECONDS) -> int:
    """floor((duration - frame_length)/hop) + 1, computed in whole samples."""
    win = round(frame_length * sample_rate)
    hop_samples = round(hop * sample_rate)
    if n_samples < win:
        return 0
    return (n_samples - win) // hop_samples + 1


def extract_f0(
    samples: np.ndarray,
    sample_rate: int,
    params: TrackerParams = TrackerParams(),
) -> PitchContour:
    """Track F0 over 10 ms hops; returns one value per analysis frame.

    Voiced frames carry ``sample_rate / best_lag`` with parabolic
    interpolation of the autocorrelation peak; frames failing the
    voicing ratio or energy floor are 0.
    """
    if sample_rate < 8000:
        raise ConfigurationError(f"sample_rate {sample_rate} below 8 kHz minimum")
    x = np.asarray(samples, dtype=float)
    if x.ndim != 1:
        raise DomainError("audio must be a mono 1-D sample sequence")
    win = round(params.frame_length * sample_rate)
    hop = round(HOP_SECONDS * sample_rate)
    if len(x) < win:
        raise DomainError(f"audio shorter than one analysis frame ({win} samples)")
    lag_min = int(np.floor(sample_rate / params.fmax))
    lag_max = int(np.ceil(sample_rate / params.fmin))
    if lag_min < 2 or lag_max >= win:
        raise ConfigurationError(
            f"fmin/fmax {params.fmin}/{params.fmax} inconsistent with "
            f"sample_rate {sample_rate} and frame_length {params.frame_length}"
        )

    n_frames = frame_count(len(x), sample_rate, params.frame_length)
    frames = np.lib.stride_tricks.sliding_window_view(x, win)[::hop][:n_frames]
    frames = frames - frames.mean(axis=1, keepdims=True)

    nfft = 1 << int(np.ceil(np.log2(2 * win)))
    spectrum = np.fft.rfft(frames, n=nfft, axis=1)
    acf = np.fft.irfft(np.abs(spectrum) ** 2, n=nfft, axis=1)[:, : lag_max + 2]

    energy = acf[:, 0]
    # Unbiased estimate removes the linear lag taper so the peak sits on
    # the true period; voicing uses the biased ratio, which decays as the
    # window content stops being periodic.
    lags = np.arange(lag_max + 2)
    unbiased = acf / np.maximum(win - lags, 1)[None, :]

    region = unbiased[:, : lag_max + 2]
    interior = region[:, 1:-1]
    local_max = (interior > region[:, :-2]) & (interior >= region[:, 2:])
    peak_lag_ok = (lags[1:-1] >= lag_min) & (lags[1:-1] <= lag_max)
    local_max &= peak_lag_ok[None, :]

    peak_vals = np.where(local_max, interior, -np.inf)
    row_best = peak_vals.max(axis=1)
    # Smallest lag whose peak is within 10% of the best keeps pure tones
    # from locking an octave low on an equal-height multiple of the period.
    near_best = peak_vals >= 0.9 * row_best[:, None]
    first_idx = np.argmax(near_best, axis=1)
    best_lag = first_idx + 1  # interior is offset by one lag

    f0 = np.zeros(n_frames)
    has_peak = np.isfinite(row_best) & (energy / win > 1e-10)
    idx = np.arange(n_frames)
    ratio = np.zeros(n_frames)
    ratio[has_peak] = acf[idx[has_peak], best_lag[has_peak]] / energy[has_peak]
    voiced = has_peak & (ratio > params.voicing_threshold)

    if voiced.any():
        v = idx[voiced]
        tau = best_lag[voiced]
        left = unbiased[v, tau - 1]
        mid = unbiased[v, tau]
        right = unbiased[v, tau + 1]
        denom = left - 2 * mid + right
        delta = np.where(np.abs(denom) > 0, 0.5 * (left - right) / np.where(denom == 0, 1, denom), 0.0)
        delta = np.clip(delta, -0.5, 0.5)
        est = sample_rate / (tau + delta)
        in_band = (est >= params.fmin) & (est <= params.fmax)
        f0[v[in_band]] = est[in_band]

    return PitchContour(hop=HOP_SECONDS, start_time=params.frame_length / 2.0, frames=f0)
