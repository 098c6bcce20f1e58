"""Parser for machine-readable Bhatkhande-style bandish notation.

The file format is CSV: a two-row header (field names, then values for
bandish/raga/tala/beats_per_cycle) followed by one pair of rows per song
line.  Row A holds notation cells (swar tokens, ``s`` for a sustained
note, empty for a rest), row B the aligned lyric syllables (``-`` marks a
continuation of the previous syllable).

Swar tokens use an ASCII octave convention: a ``.`` prefix lowers by one
octave (mandra), a ``'`` suffix raises by one (taar), bare tokens are
madhya.  An optional parenthesised ornament group may prefix a cell, e.g.
``(n)S'``; ornaments are retained but ignored by all similarity metrics.
"""

from __future__ import annotations

import csv
import functools
import io
from dataclasses import dataclass

from .errors import NotFoundError, ParseError

# Chromatic degree order; lowercase = komal, M = tivra ma.
DEGREES = ("S", "r", "R", "g", "G", "m", "M", "P", "d", "D", "n", "N")
DEGREE_CENTS = {name: 100 * i for i, name in enumerate(DEGREES)}

SUSTAIN_NOTATION = "s"
SUSTAIN_LYRIC = "-"


@functools.total_ordering
@dataclass(frozen=True)
class SwarSymbol:
    """One scale degree at a specific octave (-1 mandra, 0 madhya, +1 taar)."""

    degree: str
    octave: int = 0

    def __post_init__(self):
        if self.degree not in DEGREE_CENTS:
            raise ParseError(f"unknown swar degree {self.degree!r}")
        if self.octave not in (-1, 0, 1):
            raise ParseError(f"octave {self.octave} outside {{-1, 0, +1}}")

    @property
    def cents(self) -> float:
        """Position on the 12-TET grid relative to the tonic, in cents."""
        return float(DEGREE_CENTS[self.degree] + 1200 * self.octave)

    def __lt__(self, other: "SwarSymbol") -> bool:
        return self.cents < other.cents

    def __str__(self) -> str:
        return render_swar(self)


def parse_swar(token: str) -> SwarSymbol:
    """Parse one ASCII swar token such as ``g``, ``.n`` or ``S'``."""
    text = token.strip()
    mandra = text.startswith(".")
    if mandra:
        text = text[1:]
    taar = text.endswith("'")
    if taar:
        text = text[:-1]
    if mandra and taar:
        raise ParseError(f"swar token {token!r} mixes mandra and taar marks")
    if text not in DEGREE_CENTS:
        raise ParseError(f"unknown swar token {token!r}")
    return SwarSymbol(degree=text, octave=-1 if mandra else (1 if taar else 0))


def render_swar(swar: SwarSymbol) -> str:
    """Inverse of :func:`parse_swar`; round-trips every valid token."""
    if swar.octave == -1:
        return f".{swar.degree}"
    if swar.octave == 1:
        return f"{swar.degree}'"
    return swar.degree


@dataclass(frozen=True)
class NotationCell:
    """One beat cell: a syllable onset, a sustain, or a rest."""

    kind: str  # "syllable" | "sustain" | "rest"
    swars: tuple[SwarSymbol, ...] = ()
    ornament: tuple[SwarSymbol, ...] = ()
    lyric: str | None = None  # raw lyric cell; may hold several syllables


@dataclass(frozen=True)
class CanonicalSyllable:
    """A lyric syllable with its canonical metrical position.

    ``beat_index`` is 0-based within the 16-beat cycle; ``offset`` is the
    fractional sub-beat position used when several syllables share one
    cell.  ``allotted_beats`` counts the syllable's own beat plus any
    immediately following sustain cells.  ``cell_swars`` keeps one swar
    group per allotted beat (empty group = hold the previous pitch).
    """

    label: str
    beat_index: int
    allotted_beats: int
    cell_swars: tuple[tuple[SwarSymbol, ...], ...]
    offset: float = 0.0
    ornament: tuple[SwarSymbol, ...] = ()

    @property
    def swars(self) -> tuple[SwarSymbol, ...]:
        return tuple(s for group in self.cell_swars for s in group)

    @property
    def position(self) -> float:
        return self.beat_index + self.offset


@dataclass(frozen=True)
class CanonicalLine:
    line_index: int  # 1-based
    cells: tuple[NotationCell, ...]
    syllables: tuple[CanonicalSyllable, ...]

    @property
    def rest_count(self) -> int:
        return sum(1 for c in self.cells if c.kind == "rest")


@dataclass(frozen=True)
class CanonicalScore:
    bandish_name: str
    raga_name: str
    tala_name: str
    beats_per_cycle: int
    lines: tuple[CanonicalLine, ...]

    def line(self, line_index: int) -> CanonicalLine:
        if not 1 <= line_index <= len(self.lines):
            raise NotFoundError(
                f"line {line_index} not in score ({len(self.lines)} lines)"
            )
        return self.lines[line_index - 1]


def _parse_notation_cell(text: str, row_no: int, cell_no: int):
    """Split a row-A cell into (ornament tokens, main tokens, is_sustain)."""
    text = text.strip()
    ornament: tuple[SwarSymbol, ...] = ()
    if text.startswith("("):
        end = text.find(")")
        if end < 0:
            raise ParseError("unterminated ornament group", line=row_no, cell=cell_no)
        try:
            ornament = tuple(parse_swar(t) for t in text[1:end].split())
        except ParseError as exc:
            raise ParseError(str(exc), line=row_no, cell=cell_no) from None
        if not ornament:
            raise ParseError("empty ornament group", line=row_no, cell=cell_no)
        text = text[end + 1:].strip()
        if not text:
            raise ParseError(
                "ornament group without a main swar", line=row_no, cell=cell_no
            )
    if text == SUSTAIN_NOTATION:
        if ornament:
            raise ParseError(
                "ornament not allowed on a sustain marker", line=row_no, cell=cell_no
            )
        return (), (), True
    try:
        swars = tuple(parse_swar(t) for t in text.split())
    except ParseError as exc:
        raise ParseError(str(exc), line=row_no, cell=cell_no) from None
    return ornament, swars, False


def _classify_cells(notation_row, lyric_row, row_no) -> list[NotationCell]:
    cells = []
    for i, (ntext, ltext) in enumerate(zip(notation_row, lyric_row)):
        ntext = ntext.strip()
        ltext = ltext.strip()
        ornament, swars, sustain_marker = _parse_notation_cell(ntext, row_no, i)
        if sustain_marker and ltext not in ("", SUSTAIN_LYRIC):
            raise ParseError(
                f"lyric {ltext!r} on a sustain notation cell", line=row_no + 1, cell=i
            )
        if sustain_marker or ltext == SUSTAIN_LYRIC:
            cells.append(
                NotationCell(kind="sustain", swars=swars, ornament=ornament, lyric=None)
            )
        elif not ntext and not ltext:
            cells.append(NotationCell(kind="rest"))
        elif not ltext:
            raise ParseError(
                "swar tokens without a lyric or sustain marker", line=row_no, cell=i
            )
        elif not swars:
            raise ParseError(
                f"lyric {ltext!r} has no swar token", line=row_no, cell=i
            )
        else:
            if len(ltext.split()) > len(swars):
                raise ParseError(
                    "more syllables than swar tokens in cell", line=row_no, cell=i
                )
            cells.append(
                NotationCell(kind="syllable", swars=swars, ornament=ornament, lyric=ltext)
            )
    return cells


def _split_even(items: tuple, parts: int) -> list[tuple]:
    """Contiguous split into ``parts`` groups, remainder to the front."""
    base, rem = divmod(len(items), parts)
    out, pos = [], 0
    for k in range(parts):
        size = base + (1 if k < rem else 0)
        out.append(tuple(items[pos:pos + size]))
        pos += size
    return out


def _derive_syllables(cells, row_no) -> tuple[CanonicalSyllable, ...]:
    raw = []  # (lyric, beat, offset, allotted, cell_swars, ornament)
    beat = 0
    n = len(cells)
    while beat < n:
        cell = cells[beat]
        if cell.kind == "sustain":
            raise ParseError(
                "sustain cell with no preceding syllable", line=row_no, cell=beat
            )
        if cell.kind == "rest":
            beat += 1
            continue
        span_end = beat + 1
        while span_end < n and cells[span_end].kind == "sustain":
            span_end += 1
        sustain_swars = [cells[j].swars for j in range(beat + 1, span_end)]
        texts = cell.lyric.split()
        groups = _split_even(cell.swars, len(texts))
        for j, text in enumerate(texts):
            last = j == len(texts) - 1
            cell_swars = [groups[j]] + (sustain_swars if last else [])
            raw.append(
                (
                    text,
                    beat,
                    j / len(texts),
                    span_end - beat if last else 1,
                    tuple(cell_swars),
                    cell.ornament if j == 0 else (),
                )
            )
        beat = span_end

    counts: dict[str, int] = {}
    for text, *_ in raw:
        counts[text] = counts.get(text, 0) + 1
    seen: dict[str, int] = {}
    syllables = []
    for text, beat, offset, allotted, cell_swars, ornament in raw:
        if counts[text] > 1:
            seen[text] = seen.get(text, 0) + 1
            label = f"{text}{seen[text]}"
        else:
            label = text
        syllables.append(
            CanonicalSyllable(
                label=label,
                beat_index=beat,
                allotted_beats=allotted,
                cell_swars=cell_swars,
                offset=offset,
                ornament=ornament,
            )
        )
    return tuple(syllables)


def parse_notation(source_text: str) -> CanonicalScore:
    """Parse notation file text into a :class:`CanonicalScore`.

    Raises :class:`ParseError` with row/cell coordinates on malformed
    rows, unknown swar tokens, or lyric/sustain mismatches.
    """
    rows = [row for row in csv.reader(io.StringIO(source_text))]
    # Drop trailing blank lines; a full row of 16 empty cells is a real
    # all-rest line and must survive.
    while rows and len(rows[-1]) <= 1 and not any(c.strip() for c in rows[-1]):
        rows.pop()
    if len(rows) < 2:
        raise ParseError("missing header block")
    header = [c.strip() for c in rows[0]]
    if header[:4] != ["bandish", "raga", "tala", "beats_per_cycle"]:
        raise ParseError(f"bad header row {header!r}", line=1)
    values = [c.strip() for c in rows[1]]
    if len(values) < 4:
        raise ParseError("header value row too short", line=2)
    bandish_name, raga_name, tala_name = values[0], values[1], values[2]
    try:
        beats_per_cycle = int(values[3])
    except ValueError:
        raise ParseError(f"beats_per_cycle {values[3]!r} is not an integer", line=2)
    if beats_per_cycle <= 0:
        raise ParseError("beats_per_cycle must be positive", line=2)
    if tala_name.lower() == "teentaal" and beats_per_cycle != 16:
        raise ParseError("teentaal requires beats_per_cycle == 16", line=2)

    body = rows[2:]
    if len(body) % 2:
        raise ParseError("notation row without a matching lyric row", line=len(rows))
    lines = []
    for pair_idx in range(0, len(body), 2):
        row_no = 3 + pair_idx  # 1-based file row of the notation row
        notation_row = [c.strip() for c in body[pair_idx]]
        lyric_row = [c.strip() for c in body[pair_idx + 1]]
        if len(notation_row) != beats_per_cycle:
            raise ParseError(
                f"notation row has {len(notation_row)} cells, expected {beats_per_cycle}",
                line=row_no,
            )
        if len(lyric_row) != beats_per_cycle:
            raise ParseError(
                f"lyric row has {len(lyric_row)} cells, expected {beats_per_cycle}",
                line=row_no + 1,
            )
        cells = _classify_cells(notation_row, lyric_row, row_no)
        line_index = pair_idx // 2 + 1
        lines.append(
            CanonicalLine(
                line_index=line_index,
                cells=tuple(cells),
                syllables=_derive_syllables(cells, row_no),
            )
        )
    return CanonicalScore(
        bandish_name=bandish_name,
        raga_name=raga_name,
        tala_name=tala_name,
        beats_per_cycle=beats_per_cycle,
        lines=tuple(lines),
    )


def serialize_notation(score: CanonicalScore) -> str:
    """Render a score back to normalized notation-file text."""
    out = io.StringIO()
    writer = csv.writer(out, lineterminator="\n")
    writer.writerow(["bandish", "raga", "tala", "beats_per_cycle"])
    writer.writerow(
        [score.bandish_name, score.raga_name, score.tala_name, str(score.beats_per_cycle)]
    )
    for line in score.lines:
        notation_row, lyric_row = [], []
        for cell in line.cells:
            tokens = " ".join(render_swar(s) for s in cell.swars)
            if cell.ornament:
                orn = " ".join(render_swar(s) for s in cell.ornament)
                tokens = f"({orn}){tokens}"
            if cell.kind == "rest":
                notation_row.append("")
                lyric_row.append("")
            elif cell.kind == "sustain":
                notation_row.append(tokens if cell.swars else SUSTAIN_NOTATION)
                lyric_row.append(SUSTAIN_LYRIC)
            else:
                notation_row.append(tokens)
                lyric_row.append(cell.lyric)
        writer.writerow(notation_row)
        writer.writerow(lyric_row)
    return out.getvalue()


def canonical_positions(score: CanonicalScore, line_index: int) -> list[CanonicalSyllable]:
    """Syllables of one line ordered by canonical beat position."""
    line = score.line(line_index)
    return sorted(line.syllables, key=lambda s: (s.beat_index, s.offset))
