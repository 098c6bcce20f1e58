"""Pitch-shape representation and similarity for syllable repetitions.

A syllable's pitch contour is quantized to the nearest raga swar, reduced
to a fixed-length symbol string by piecewise aggregate approximation
(10 intervals per allotted beat, modal symbol per interval), and compared
across repetitions with the normalised Levenshtein substitution score
(NLSS).  PAA strings of the same syllable are equal-length by
construction, so NLSS reduces to Hamming distance over string length;
the general Levenshtein with op-count traceback is kept for unequal
lengths, where all edit-op counts are reported rather than guessing a
normalization.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import (
    ContractViolationError,
    DomainError,
    InsufficientDataError,
    OutOfRangeError,
)
from .notation import CanonicalSyllable, SwarSymbol, parse_swar, render_swar
from .pitchtrack import PitchContour
from .raga import EDGE_MARGIN_CENTS, RagaScale, Tonic, hz_to_cents

PAA_PER_BEAT = 10


@dataclass(frozen=True)
class CentsContour:
    """Gap-free cents series on the same 10 ms frame grid as its source."""

    hop: float
    start_time: float
    values: np.ndarray = field(repr=False)

    def __post_init__(self):
        values = np.asarray(self.values, dtype=float)
        values.flags.writeable = False
        object.__setattr__(self, "values", values)

    @property
    def end_time(self) -> float:
        return self.start_time + self.hop * (len(self.values) - 1)


@dataclass(frozen=True)
class PaaString:
    syllable_label: str
    repetition_index: int
    symbols: tuple[SwarSymbol, ...]

    def __len__(self) -> int:
        return len(self.symbols)

    def as_text(self) -> str:
        return " ".join(render_swar(s) for s in self.symbols)

    @classmethod
    def from_text(cls, label: str, repetition: int, text: str) -> "PaaString":
        return cls(label, repetition, tuple(parse_swar(t) for t in text.split()))


@dataclass(frozen=True)
class NlssMatrix:
    labels: tuple[int, ...]  # repetition indices
    values: np.ndarray = field(repr=False)

    def __post_init__(self):
        values = np.asarray(self.values, dtype=float)
        if values.shape != (len(self.labels), len(self.labels)):
            raise ContractViolationError("NLSS matrix shape does not match labels")
        if not np.allclose(values, values.T):
            raise ContractViolationError("NLSS matrix must be symmetric")
        if np.diag(values).any():
            raise ContractViolationError("NLSS matrix diagonal must be zero")
        if values.min() < 0 or values.max() > 1:
            raise ContractViolationError("NLSS values must lie in [0, 1]")
        values.flags.writeable = False
        object.__setattr__(self, "values", values)

    @property
    def size(self) -> int:
        return len(self.labels)


@dataclass(frozen=True)
class VariationClusters:
    threshold: float
    assignments: dict[int, int]  # repetition label -> cluster id (1-based)
    merges: tuple[tuple[int, int, float], ...]  # dendrogram rows (a, b, height)

    @property
    def n_clusters(self) -> int:
        return len(set(self.assignments.values()))


def continuous_cents(contour: PitchContour, tonic: Tonic) -> CentsContour:
    """Convert to cents and linearly interpolate across unvoiced gaps.

    Leading and trailing unvoiced frames take the nearest voiced value.
    """
    frames = np.asarray(contour.frames, dtype=float)
    voiced = frames > 0
    if not voiced.any():
        raise DomainError("cannot interpolate an all-unvoiced contour")
    idx = np.arange(len(frames))
    cents_voiced = 1200.0 * np.log2(frames[voiced] / tonic.frequency)
    values = np.interp(idx, idx[voiced], cents_voiced)
    return CentsContour(hop=contour.hop, start_time=contour.start_time, values=values)


def slice_syllable(series: CentsContour, onset: float, duration: float) -> np.ndarray:
    """Frames with time in [onset, onset + duration); at least one frame."""
    if duration <= 0:
        raise DomainError(f"duration must be positive, got {duration}")
    span_start = series.start_time
    span_end = series.end_time + series.hop
    if onset < span_start - 1e-9 or onset + duration > span_end + 1e-9:
        raise DomainError(
            f"slice [{onset}, {onset + duration}) outside contour span "
            f"[{span_start}, {span_end})"
        )
    first = max(0, int(np.ceil((onset - span_start) / series.hop - 1e-9)))
    stop = int(np.ceil((onset + duration - span_start) / series.hop - 1e-9))
    stop = min(stop, len(series.values))
    if stop <= first:
        raise DomainError(f"slice [{onset}, {onset + duration}) contains no frames")
    return series.values[first:stop]


def quantize_series(cents: np.ndarray, scale: RagaScale) -> list[SwarSymbol]:
    """Vectorized nearest-swar quantization; ties resolve to the lower swar."""
    grid_cents = np.array([c for _, c in scale.grid])
    symbols = [s for s, _ in scale.grid]
    values = np.asarray(cents, dtype=float)
    if len(values) and (
        values.min() < grid_cents[0] - EDGE_MARGIN_CENTS
        or values.max() > grid_cents[-1] + EDGE_MARGIN_CENTS
    ):
        edge = symbols[0] if values.min() < grid_cents[0] else symbols[-1]
        raise OutOfRangeError(
            f"cents outside the {scale.name} grid (nearest edge {render_swar(edge)})"
        )
    pos = np.searchsorted(grid_cents, values)
    lo = np.clip(pos - 1, 0, len(grid_cents) - 1)
    hi = np.clip(pos, 0, len(grid_cents) - 1)
    pick_lo = values - grid_cents[lo] <= grid_cents[hi] - values
    chosen = np.where(pick_lo, lo, hi)
    return [symbols[i] for i in chosen]


def _interval_sizes(n_frames: int, n_intervals: int) -> list[int]:
    base, rem = divmod(n_frames, n_intervals)
    return [base + 1 if k < rem else base for k in range(n_intervals)]


def _mode_earliest(symbols: list[SwarSymbol]) -> SwarSymbol:
    counts: dict[SwarSymbol, int] = {}
    for s in symbols:
        counts[s] = counts.get(s, 0) + 1
    best, best_count = None, 0
    for s, c in counts.items():  # insertion order = first appearance
        if c > best_count:
            best, best_count = s, c
    return best


def paa_symbols(segment: np.ndarray, n_intervals: int, scale: RagaScale) -> tuple[SwarSymbol, ...]:
    """Modal quantized swar per interval over an equal-as-possible partition.

    Remainder frames go one-per-interval from the front; an interval left
    empty (fewer frames than intervals) inherits its predecessor's symbol.
    """
    if len(segment) == 0:
        raise DomainError("empty pitch segment")
    if n_intervals < 1:
        raise DomainError(f"need at least one interval, got {n_intervals}")
    quantized = quantize_series(segment, scale)
    out: list[SwarSymbol] = []
    pos = 0
    for size in _interval_sizes(len(quantized), n_intervals):
        if size == 0:
            if not out:
                raise DomainError("leading PAA interval is empty")
            out.append(out[-1])
        else:
            out.append(_mode_earliest(quantized[pos:pos + size]))
            pos += size
    return tuple(out)


def paa_string(
    segment: np.ndarray,
    allotted_beats: int,
    scale: RagaScale,
    *,
    label: str = "",
    repetition: int = 0,
    per_beat: int = PAA_PER_BEAT,
) -> PaaString:
    """Fixed-length PAA string for one syllable: per_beat x allotted_beats symbols."""
    if allotted_beats < 1:
        raise DomainError(f"allotted_beats must be >= 1, got {allotted_beats}")
    symbols = paa_symbols(segment, per_beat * allotted_beats, scale)
    return PaaString(syllable_label=label, repetition_index=repetition, symbols=symbols)


def canonical_symbols(
    syllable: CanonicalSyllable, per_beat: int = PAA_PER_BEAT
) -> tuple[SwarSymbol, ...]:
    """The syllable's notated swars spread over its PAA slots.

    Each allotted beat contributes per_beat slots; a beat's swars split
    those slots equal-as-possible (front-loaded), and sustain beats with
    no swars of their own hold the previous pitch.
    """
    out: list[SwarSymbol] = []
    for group in syllable.cell_swars:
        if not group:
            out.extend([out[-1]] * per_beat)
            continue
        sizes = _interval_sizes(per_beat, len(group))
        filled = []
        for swar, size in zip(group, sizes):
            filled.extend([swar] * size)
        # More swars than slots: keep the first per_beat, never drop to zero.
        out.extend(filled[:per_beat] if len(filled) >= per_beat else filled + [group[-1]] * (per_beat - len(filled)))
    return tuple(out)


@dataclass(frozen=True)
class EditCounts:
    distance: int
    substitutions: int
    insertions: int
    deletions: int
    matches: int


def levenshtein(a, b) -> EditCounts:
    """Unit-cost edit distance with op counts from one optimal traceback.

    Traceback ties prefer substitution over insertion over deletion.
    """
    la, lb = len(a), len(b)
    dist = [[0] * (lb + 1) for _ in range(la + 1)]
    for i in range(la + 1):
        dist[i][0] = i
    for j in range(lb + 1):
        dist[0][j] = j
    for i in range(1, la + 1):
        ai = a[i - 1]
        row = dist[i]
        prev = dist[i - 1]
        for j in range(1, lb + 1):
            cost = 0 if ai == b[j - 1] else 1
            best = prev[j - 1] + cost
            up = prev[j] + 1
            if up < best:
                best = up
            left = row[j - 1] + 1
            if left < best:
                best = left
            row[j] = best

    subs = ins = dels = matches = 0
    i, j = la, lb
    while i > 0 or j > 0:
        if i > 0 and j > 0:
            cost = 0 if a[i - 1] == b[j - 1] else 1
            if dist[i][j] == dist[i - 1][j - 1] + cost:
                if cost:
                    subs += 1
                else:
                    matches += 1
                i -= 1
                j -= 1
                continue
        if j > 0 and dist[i][j] == dist[i][j - 1] + 1:
            ins += 1
            j -= 1
            continue
        dels += 1
        i -= 1
    return EditCounts(
        distance=dist[la][lb],
        substitutions=subs,
        insertions=ins,
        deletions=dels,
        matches=matches,
    )


def nlss(a: PaaString, b: PaaString) -> float:
    """Substitution count over string length, in [0, 1].

    Equal-length strings (always the case for repetitions of one
    syllable) make this the Hamming distance divided by length.
    """
    if len(a) != len(b):
        raise ContractViolationError(
            f"PAA strings differ in length ({len(a)} vs {len(b)}); "
            "NLSS is defined for repetitions of the same syllable"
        )
    if len(a) == 0:
        raise ContractViolationError("empty PAA strings")
    differing = sum(1 for x, y in zip(a.symbols, b.symbols) if x != y)
    return differing / len(a)


def pairwise_nlss(reps: list[PaaString]) -> NlssMatrix:
    """Symmetric zero-diagonal NLSS matrix over repetitions of a syllable."""
    if len(reps) < 2:
        raise InsufficientDataError(
            f"need at least 2 repetitions for a pairwise matrix, got {len(reps)}"
        )
    n = len(reps)
    values = np.zeros((n, n))
    for i in range(n):
        for j in range(i + 1, n):
            values[i, j] = values[j, i] = nlss(reps[i], reps[j])
    return NlssMatrix(labels=tuple(r.repetition_index for r in reps), values=values)


def mean_nlss(matrix: NlssMatrix) -> float:
    """Mean over the strict upper triangle."""
    if matrix.size < 2:
        raise InsufficientDataError("mean NLSS needs a matrix of at least 2x2")
    iu = np.triu_indices(matrix.size, k=1)
    return float(matrix.values[iu].mean())


def cluster_variations(matrix: NlssMatrix, threshold: float) -> VariationClusters:
    """Average-linkage agglomerative clustering cut at ``threshold``."""
    from scipy.cluster import hierarchy
    from scipy.spatial.distance import squareform

    if matrix.size == 1:
        return VariationClusters(threshold=threshold,
                                 assignments={matrix.labels[0]: 1}, merges=())
    condensed = squareform(np.asarray(matrix.values), checks=False)
    linkage = hierarchy.linkage(condensed, method="average")
    flat = hierarchy.fcluster(linkage, t=threshold, criterion="distance")

    # Renumber clusters in order of first appearance for stable output.
    remap: dict[int, int] = {}
    assignments = {}
    for label, cluster in zip(matrix.labels, flat):
        if cluster not in remap:
            remap[cluster] = len(remap) + 1
        assignments[label] = remap[cluster]
    merges = tuple(
        (int(row[0]), int(row[1]), float(row[2])) for row in linkage
    )
    return VariationClusters(threshold=threshold, assignments=assignments, merges=merges)
