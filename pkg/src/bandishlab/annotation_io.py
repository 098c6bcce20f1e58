"""Loading and validation of per-performance annotation datasets.

A dataset root holds one ``manifest.json``, the notation files it
references, and one directory per concert with ``performance.meta``
(JSON), ``beats.csv``, ``onsets.csv``, ``silences.csv`` and either a
``pitch.csv`` contour or a mono ``audio.wav`` for the tracker.

Times are seconds as decimal text with at least three fractional digits
(the pitch frame grid is 10 ms).
"""

from __future__ import annotations

import csv
import json
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .errors import NotFoundError, ValidationError
from .notation import CanonicalScore, parse_notation
from .pitchtrack import PitchContour
from .raga import Tonic

META_FILE = "performance.meta"
BEAT_KINDS = ("sam", "khali")


@dataclass(frozen=True)
class BeatMark:
    time: float
    kind: str  # "sam" | "khali"

    def __post_init__(self):
        if self.time < 0:
            raise ValidationError(f"beat mark time {self.time} is negative")
        if self.kind not in BEAT_KINDS:
            raise ValidationError(f"beat mark kind {self.kind!r} not in {BEAT_KINDS}")


@dataclass(frozen=True)
class LineRendition:
    line_index: int
    repetition_index: int
    onsets: tuple[tuple[str, float], ...]  # (syllable label, onset seconds)
    silences: tuple[tuple[float, float], ...] = ()

    @property
    def start(self) -> float:
        return self.onsets[0][1]


@dataclass(frozen=True)
class PerformanceAnnotation:
    concert_id: str
    artist_id: str
    bandish_name: str
    tonic: Tonic
    tempo_range: tuple[float, float]  # matra per minute
    beat_marks: tuple[BeatMark, ...]
    renditions: tuple[LineRendition, ...]

    def renditions_of(self, line_index: int) -> list[LineRendition]:
        return [r for r in self.renditions if r.line_index == line_index]


@dataclass(frozen=True)
class BandishEntry:
    name: str
    raga: str
    tala: str
    notation_path: str
    concerts: tuple[str, ...]
    repetitions: dict[int, int]  # line index -> claimed rendition count


@dataclass(frozen=True)
class DatasetManifest:
    bandish: tuple[BandishEntry, ...]
    seed: int | None = None


def format_seconds(t: float) -> str:
    """Seconds as decimal text with >= 3 fractional digits, repr-exact."""
    s = repr(float(t))
    if "e" in s or "E" in s:
        return f"{t:.9f}"
    if "." not in s:
        return f"{s}.000"
    whole, frac = s.split(".")
    return f"{whole}.{frac.ljust(3, '0')}"


def _read_csv(path: Path, columns: list[str]) -> list[dict[str, str]]:
    if not path.exists():
        raise NotFoundError(f"missing annotation file {path}")
    with open(path, newline="", encoding="utf-8") as fh:
        reader = csv.reader(fh)
        rows = [row for row in reader if row and any(c.strip() for c in row)]
    if not rows:
        raise ValidationError(f"{path}: empty file")
    header = [c.strip() for c in rows[0] if not c.startswith("#")]
    header = [c for c in header if c]
    if header != columns:
        raise ValidationError(f"{path}: header {header} != expected {columns}")
    out = []
    for row in rows[1:]:
        if row[0].lstrip().startswith("#"):
            continue
        if len(row) != len(columns):
            raise ValidationError(f"{path}: row {row} has {len(row)} fields")
        out.append(dict(zip(columns, (c.strip() for c in row))))
    return out


def _parse_float(text: str, context: str) -> float:
    try:
        return float(text)
    except ValueError:
        raise ValidationError(f"{context}: {text!r} is not a number") from None


def load_beat_marks(path: Path) -> tuple[BeatMark, ...]:
    rows = _read_csv(path, ["time_s", "kind"])
    marks = []
    for i, row in enumerate(rows):
        marks.append(BeatMark(time=_parse_float(row["time_s"], f"{path} row {i+2}"),
                              kind=row["kind"]))
    for i, (a, b) in enumerate(zip(marks, marks[1:])):
        if b.time <= a.time:
            raise ValidationError(f"{path}: marks not strictly increasing at row {i+3}")
        if a.kind == b.kind:
            raise ValidationError(f"{path}: marks not alternating sam/khali at row {i+3}")
    return tuple(marks)


def load_silences(path: Path) -> tuple[tuple[float, float], ...]:
    rows = _read_csv(path, ["start_s", "end_s"])
    silences = []
    for i, row in enumerate(rows):
        start = _parse_float(row["start_s"], f"{path} row {i+2}")
        end = _parse_float(row["end_s"], f"{path} row {i+2}")
        if end <= start:
            raise ValidationError(f"{path}: silence end {end} <= start {start}")
        silences.append((start, end))
    silences.sort()
    for (s0, e0), (s1, _) in zip(silences, silences[1:]):
        if s1 < e0:
            raise ValidationError(f"{path}: overlapping silences at {s1}")
    return tuple(silences)


def load_pitch_contour(perf_dir: Path) -> PitchContour | None:
    """Read pitch.csv (time_s, f0_hz) if present; 0 Hz marks unvoiced."""
    path = Path(perf_dir) / "pitch.csv"
    if not path.exists():
        return None
    rows = _read_csv(path, ["time_s", "f0_hz"])
    times = np.array([_parse_float(r["time_s"], f"{path}") for r in rows])
    f0 = np.array([_parse_float(r["f0_hz"], f"{path}") for r in rows])
    if (f0 < 0).any():
        raise ValidationError(f"{path}: negative f0 value")
    if len(times) >= 2:
        hops = np.diff(times)
        if np.abs(hops - 0.01).max() > 1e-6:
            raise ValidationError(f"{path}: pitch frames not on a uniform 10 ms grid")
    return PitchContour(hop=0.01, start_time=float(times[0]), frames=f0)


def load_performance(perf_dir: str | Path, score: CanonicalScore) -> PerformanceAnnotation:
    """Load one concert directory and cross-validate against the score."""
    perf_dir = Path(perf_dir)
    meta_path = perf_dir / META_FILE
    if not meta_path.exists():
        raise NotFoundError(f"missing {META_FILE} in {perf_dir}")
    meta = json.loads(meta_path.read_text("utf-8"))
    for key in ("concert_id", "artist_id", "bandish", "tonic_hz", "tempo_matra_per_min"):
        if key not in meta:
            raise ValidationError(f"{meta_path}: missing key {key!r}")
    if meta["bandish"] != score.bandish_name:
        raise ValidationError(
            f"{meta_path}: bandish {meta['bandish']!r} does not match score "
            f"{score.bandish_name!r}"
        )

    marks = load_beat_marks(perf_dir / "beats.csv")
    silences = load_silences(perf_dir / "silences.csv")

    rows = _read_csv(perf_dir / "onsets.csv",
                     ["line", "repetition", "syllable_label", "onset_s"])
    grouped: dict[tuple[int, int], list[tuple[str, float]]] = {}
    order: list[tuple[int, int]] = []
    for i, row in enumerate(rows):
        context = f"onsets.csv row {i + 2}"
        try:
            line_index = int(row["line"])
            repetition = int(row["repetition"])
        except ValueError:
            raise ValidationError(f"{context}: non-integer line/repetition") from None
        onset = _parse_float(row["onset_s"], context)
        label = row["syllable_label"]
        valid = {s.label for s in score.line(line_index).syllables}
        if label not in valid:
            raise ValidationError(
                f"{context}: unknown syllable {label!r} for line {line_index} "
                f"(valid: {sorted(valid)})"
            )
        if not marks[0].time <= onset <= marks[-1].time:
            raise ValidationError(
                f"{context}: onset {onset} outside beat marks "
                f"[{marks[0].time}, {marks[-1].time}]"
            )
        key = (line_index, repetition)
        if key not in grouped:
            grouped[key] = []
            order.append(key)
        bucket = grouped[key]
        if bucket and onset <= bucket[-1][1]:
            raise ValidationError(f"{context}: onsets not strictly increasing")
        bucket.append((label, onset))

    rendition_starts = sorted((grouped[key][0][1], key) for key in order)
    silences_by_key: dict[tuple[int, int], list[tuple[float, float]]] = {
        key: [] for key in order
    }
    for silence in silences:
        owner = rendition_starts[0][1]
        for start, key in rendition_starts:
            if start <= silence[0]:
                owner = key
            else:
                break
        silences_by_key[owner].append(silence)

    renditions = tuple(
        LineRendition(
            line_index=key[0],
            repetition_index=key[1],
            onsets=tuple(grouped[key]),
            silences=tuple(silences_by_key[key]),
        )
        for key in sorted(order)
    )
    return PerformanceAnnotation(
        concert_id=str(meta["concert_id"]),
        artist_id=str(meta["artist_id"]),
        bandish_name=str(meta["bandish"]),
        tonic=Tonic(float(meta["tonic_hz"])),
        tempo_range=(float(meta["tempo_matra_per_min"][0]),
                     float(meta["tempo_matra_per_min"][1])),
        beat_marks=marks,
        renditions=renditions,
    )


def serialize_performance(perf: PerformanceAnnotation, perf_dir: str | Path) -> None:
    """Write a performance back out in the on-disk annotation schema."""
    perf_dir = Path(perf_dir)
    perf_dir.mkdir(parents=True, exist_ok=True)
    meta = {
        "concert_id": perf.concert_id,
        "artist_id": perf.artist_id,
        "bandish": perf.bandish_name,
        "tonic_hz": perf.tonic.frequency,
        "tempo_matra_per_min": list(perf.tempo_range),
    }
    (perf_dir / META_FILE).write_text(json.dumps(meta, indent=2) + "\n", "utf-8")

    with open(perf_dir / "beats.csv", "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(["time_s", "kind"])
        for mark in perf.beat_marks:
            writer.writerow([format_seconds(mark.time), mark.kind])

    with open(perf_dir / "onsets.csv", "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(["line", "repetition", "syllable_label", "onset_s"])
        for r in sorted(perf.renditions, key=lambda r: (r.line_index, r.repetition_index)):
            for label, onset in r.onsets:
                writer.writerow([r.line_index, r.repetition_index, label,
                                 format_seconds(onset)])

    all_silences = sorted({s for r in perf.renditions for s in r.silences})
    with open(perf_dir / "silences.csv", "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(["start_s", "end_s"])
        for start, end in all_silences:
            writer.writerow([format_seconds(start), format_seconds(end)])


def write_pitch_csv(contour: PitchContour, path: str | Path) -> None:
    with open(path, "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(["time_s", "f0_hz"])
        for i, f0 in enumerate(contour.frames):
            t = contour.start_time + i * contour.hop
            writer.writerow([f"{t:.6f}", f"{f0:.6f}" if f0 > 0 else "0.000"])


@dataclass(frozen=True)
class Dataset:
    root: Path
    manifest: DatasetManifest
    scores: dict[str, CanonicalScore]  # bandish name -> score
    performances: tuple[PerformanceAnnotation, ...]

    def score_for(self, perf: PerformanceAnnotation) -> CanonicalScore:
        return self.scores[perf.bandish_name]


def load_manifest(root: str | Path) -> DatasetManifest:
    path = Path(root) / "manifest.json"
    if not path.exists():
        raise ValidationError(f"no performances: missing manifest.json under {root}")
    data = json.loads(path.read_text("utf-8"))
    entries = []
    for item in data.get("bandish", []):
        entries.append(
            BandishEntry(
                name=item["name"],
                raga=item["raga"],
                tala=item["tala"],
                notation_path=item["notation"],
                concerts=tuple(item["concerts"]),
                repetitions={int(k): int(v) for k, v in item.get("repetitions", {}).items()},
            )
        )
    return DatasetManifest(bandish=tuple(entries), seed=data.get("seed"))


def load_dataset(root: str | Path) -> Dataset:
    """Load manifest, scores and every referenced concert directory."""
    root = Path(root)
    manifest = load_manifest(root)
    if not manifest.bandish:
        raise ValidationError(f"no performances: manifest lists no bandish under {root}")
    scores = {}
    performances = []
    for entry in manifest.bandish:
        notation = root / entry.notation_path
        if not notation.exists():
            raise NotFoundError(f"notation file {notation} missing")
        score = parse_notation(notation.read_text("utf-8"))
        scores[entry.name] = score
        for concert_id in entry.concerts:
            perf_dir = root / "concerts" / concert_id
            if not perf_dir.is_dir():
                raise NotFoundError(f"concert directory {perf_dir} missing")
            performances.append(load_performance(perf_dir, score))
    return Dataset(root=root, manifest=manifest, scores=scores,
                   performances=tuple(performances))


@dataclass(frozen=True)
class BandishReport:
    name: str
    raga: str
    tala: str
    n_concerts: int
    n_artists: int
    observed: dict[int, int]
    claimed: dict[int, int]
    tempo_range: tuple[float, float] | None
    mismatches: tuple[str, ...]


@dataclass(frozen=True)
class ManifestReport:
    entries: tuple[BandishReport, ...]

    @property
    def ok(self) -> bool:
        return all(not e.mismatches for e in self.entries)

    def to_text(self) -> str:
        lines = []
        for e in self.entries:
            lines.append(f"Bandish: {e.name}  (raga {e.raga}, tala {e.tala})")
            lines.append(f"  concerts: {e.n_concerts}   artists: {e.n_artists}")
            line_ids = sorted(set(e.observed) | set(e.claimed))
            observed = ", ".join(f"L{i}={e.observed.get(i, 0)}" for i in line_ids)
            claimed = ", ".join(f"L{i}={e.claimed.get(i, 0)}" for i in line_ids)
            lines.append(f"  repetitions observed: {observed or '(none)'}")
            lines.append(f"  repetitions claimed:  {claimed or '(none)'}")
            if e.tempo_range:
                lines.append(
                    f"  matra per min range: {e.tempo_range[0]:g}-{e.tempo_range[1]:g}"
                )
            for m in e.mismatches:
                lines.append(f"  MISMATCH: {m}")
        return "\n".join(lines)


def validate_manifest(
    manifest: DatasetManifest, performances: list[PerformanceAnnotation]
) -> ManifestReport:
    """Compare claimed repetition counts against loaded performances."""
    entries = []
    for entry in manifest.bandish:
        perfs = [p for p in performances if p.bandish_name == entry.name]
        observed: dict[int, int] = {}
        for perf in perfs:
            for r in perf.renditions:
                observed[r.line_index] = observed.get(r.line_index, 0) + 1
        mismatches = []
        for line_index in sorted(set(entry.repetitions) | set(observed)):
            claimed = entry.repetitions.get(line_index, 0)
            got = observed.get(line_index, 0)
            if claimed != got:
                mismatches.append(
                    f"line {line_index}: claimed {claimed} repetitions, observed {got}"
                )
        missing = set(entry.concerts) - {p.concert_id for p in perfs}
        if missing:
            mismatches.append(f"concerts missing from load: {sorted(missing)}")
        tempo = None
        if perfs:
            tempo = (min(p.tempo_range[0] for p in perfs),
                     max(p.tempo_range[1] for p in perfs))
        entries.append(
            BandishReport(
                name=entry.name,
                raga=entry.raga,
                tala=entry.tala,
                n_concerts=len(perfs),
                n_artists=len({p.artist_id for p in perfs}),
                observed=observed,
                claimed=dict(entry.repetitions),
                tempo_range=tempo,
                mismatches=tuple(mismatches),
            )
        )
    return ManifestReport(entries=tuple(entries))
