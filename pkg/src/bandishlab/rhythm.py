"""Beat grids from sam/khali marks and fractional timing deviations.

Each half cycle (sam to khali, khali to the next sam) is divided into
``beats_per_cycle/2`` equal parts under a locally-consistent tempo
assumption.  Realised syllable onsets are matched to the nearest
occurrence of their canonical beat position across cycles, and the
deviation is expressed as a signed fraction of that half cycle's beat
interval (positive = lag).
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from .annotation_io import BeatMark, LineRendition
from .errors import (
    DataError,
    InsufficientDataError,
    NotFoundError,
    OutOfRangeError,
    ValidationError,
)
from .notation import CanonicalSyllable


@dataclass(frozen=True)
class BeatInstant:
    cycle: int
    beat: int  # 0-based index within the cycle; sam = 0, khali = bpc/2
    time: float
    interval: float  # local beat interval of this half cycle, seconds


@dataclass(frozen=True)
class BeatGrid:
    beats_per_cycle: int
    instants: tuple[BeatInstant, ...]

    @property
    def start(self) -> float:
        return self.instants[0].time

    @property
    def end(self) -> float:
        return self.instants[-1].time

    def occurrences(self, beat_index: int) -> list[BeatInstant]:
        """All instants of one canonical beat index, in time order."""
        return [b for b in self.instants if b.beat == beat_index]


@dataclass(frozen=True)
class TimingDeviation:
    syllable_label: str
    repetition_index: int
    deviation: float  # fraction of the local beat interval, signed
    onset_time: float


@dataclass(frozen=True)
class SyllableDuration:
    syllable_label: str
    repetition_index: int
    duration: float


@dataclass(frozen=True)
class SyllableStats:
    mean: float
    sd: float
    n: int
    single_observation: bool = False


def build_beat_grid(marks: list[BeatMark], beats_per_cycle: int = 16) -> BeatGrid:
    """Subdivide each adjacent sam/khali pair into equal beat instants."""
    if len(marks) < 2:
        raise InsufficientDataError("need at least 2 beat marks to build a grid")
    if beats_per_cycle < 2 or beats_per_cycle % 2:
        raise ValidationError(f"beats_per_cycle must be even, got {beats_per_cycle}")
    half = beats_per_cycle // 2
    for a, b in zip(marks, marks[1:]):
        if b.time <= a.time:
            raise ValidationError(f"beat marks not strictly increasing at {b.time}")
        if a.kind == b.kind:
            raise ValidationError(f"beat marks must alternate sam/khali at {b.time}")

    instants = []
    cycle = 0
    for a, b in zip(marks, marks[1:]):
        interval = (b.time - a.time) / half
        base = 0 if a.kind == "sam" else half
        for k in range(half):
            instants.append(
                BeatInstant(cycle=cycle, beat=base + k, time=a.time + k * interval,
                            interval=interval)
            )
        if b.kind == "sam":
            cycle += 1
    last = marks[-1]
    closing_beat = 0 if last.kind == "sam" else half
    instants.append(
        BeatInstant(cycle=cycle, beat=closing_beat, time=last.time,
                    interval=instants[-1].interval)
    )
    return BeatGrid(beats_per_cycle=beats_per_cycle, instants=tuple(instants))


def canonical_instant(grid: BeatGrid, syllable: CanonicalSyllable) -> list[tuple[float, float]]:
    """(time, local interval) of every occurrence of a syllable's position."""
    out = []
    for inst in grid.occurrences(syllable.beat_index):
        out.append((inst.time + syllable.offset * inst.interval, inst.interval))
    return out


def assign_and_deviate(
    rendition: LineRendition,
    canon: list[CanonicalSyllable],
    grid: BeatGrid,
) -> list[TimingDeviation]:
    """Match each realised onset to its nearest canonical occurrence.

    Ties between equally distant occurrences go to the earlier cycle.
    """
    by_label = {s.label: s for s in canon}
    out = []
    for label, onset in rendition.onsets:
        syllable = by_label.get(label)
        if syllable is None:
            raise NotFoundError(
                f"syllable {label!r} not in line {rendition.line_index} "
                f"(valid: {sorted(by_label)})"
            )
        if not grid.start <= onset <= grid.end:
            raise OutOfRangeError(
                f"onset {onset} for {label!r} outside beat grid "
                f"[{grid.start}, {grid.end}]"
            )
        candidates = canonical_instant(grid, syllable)
        if not candidates:
            raise OutOfRangeError(f"grid has no occurrence of beat {syllable.beat_index}")
        best_time, best_interval = min(candidates, key=lambda ti: abs(onset - ti[0]))
        out.append(
            TimingDeviation(
                syllable_label=label,
                repetition_index=rendition.repetition_index,
                deviation=(onset - best_time) / best_interval,
                onset_time=onset,
            )
        )
    return out


def syllable_durations(
    rendition: LineRendition, end_fallback: float | None = None
) -> list[SyllableDuration]:
    """Onset-to-next-event durations.

    Each syllable lasts until the next onset or the start of the next
    silence, whichever comes first; the last syllable needs a following
    silence (or an explicit ``end_fallback``).
    """
    onsets = list(rendition.onsets)
    silence_starts = sorted(start for start, _ in rendition.silences)
    out = []
    for i, (label, onset) in enumerate(onsets):
        next_onset = onsets[i + 1][1] if i + 1 < len(onsets) else None
        next_silence = next((s for s in silence_starts if s >= onset), None)
        bounds = [b for b in (next_onset, next_silence) if b is not None]
        if not bounds:
            if end_fallback is None:
                raise DataError(
                    f"no following onset or silence after {label!r} at {onset}"
                )
            bounds = [end_fallback]
        duration = min(bounds) - onset
        if duration <= 0:
            raise DataError(f"non-positive duration for {label!r} at {onset}")
        out.append(
            SyllableDuration(
                syllable_label=label,
                repetition_index=rendition.repetition_index,
                duration=duration,
            )
        )
    return out


def deviation_stats(deviations: list[TimingDeviation]) -> dict[str, SyllableStats]:
    """Per-syllable mean and sample standard deviation (n-1 denominator)."""
    groups: dict[str, list[float]] = {}
    for dev in deviations:
        groups.setdefault(dev.syllable_label, []).append(dev.deviation)
    stats = {}
    for label, values in groups.items():
        n = len(values)
        mean = math.fsum(values) / n
        if n == 1:
            stats[label] = SyllableStats(mean=mean, sd=0.0, n=1, single_observation=True)
        elif min(values) == max(values):
            stats[label] = SyllableStats(mean=values[0], sd=0.0, n=n)
        else:
            var = math.fsum((v - mean) ** 2 for v in values) / (n - 1)
            stats[label] = SyllableStats(mean=mean, sd=math.sqrt(var), n=n)
    return stats
