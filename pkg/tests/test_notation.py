from __future__ import annotations

import csv
import io

import pytest

from bandishlab import bundled_notation_text, bundled_score
from bandishlab.errors import NotFoundError, ParseError
from bandishlab.notation import (
    SwarSymbol,
    canonical_positions,
    parse_notation,
    parse_swar,
    render_swar,
    serialize_notation,
)

HEADER = "bandish,raga,tala,beats_per_cycle\nTest,Bhimpalasi,teentaal,16\n"


def _row(cells):
    return ",".join(cells) + "\n"


def _score(notation_cells, lyric_cells):
    return parse_notation(HEADER + _row(notation_cells) + _row(lyric_cells))


def _pad(cells):
    return cells + [""] * (16 - len(cells))


class TestSwarTokens:
    def test_round_trip_all_valid_tokens(self):
        for degree in "S r R g G m M P d D n N".split():
            for token in (f".{degree}", degree, f"{degree}'"):
                assert render_swar(parse_swar(token)) == token

    def test_octave_values(self):
        assert parse_swar(".n").octave == -1
        assert parse_swar("n").octave == 0
        assert parse_swar("N'").octave == 1

    @pytest.mark.parametrize("token", ["X", "Sa", "", "''", ".S'", "s'"])
    def test_bad_tokens_rejected(self, token):
        with pytest.raises(ParseError):
            parse_swar(token)

    def test_grid_ordering_follows_cents(self):
        assert SwarSymbol("S") < SwarSymbol("r") < SwarSymbol("P")
        assert SwarSymbol("N") < SwarSymbol("S", octave=1)
        assert SwarSymbol("S", octave=-1) < SwarSymbol("S")


class TestParseNotation:
    def test_sustain_attachment_rule(self):
        # Two-beat "Jaa" plus a second occurrence to force ordinal labels.
        score = _score(
            _pad(["m", "s", "P"]),
            _pad(["Jaa", "-", "Jaa"]),
        )
        syllables = score.lines[0].syllables
        assert [s.label for s in syllables] == ["Jaa1", "Jaa2"]
        assert syllables[0].beat_index == 0
        assert syllables[0].allotted_beats == 2
        assert syllables[1].allotted_beats == 1

    def test_all_empty_row_pair_is_sixteen_rests(self):
        score = _score([""] * 16, [""] * 16)
        line = score.lines[0]
        assert line.rest_count == 16
        assert line.syllables == ()

    def test_unique_lyrics_keep_bare_labels(self):
        score = _score(_pad(["m", "P"]), _pad(["Man", "Di"]))
        assert [s.label for s in score.lines[0].syllables] == ["Man", "Di"]

    def test_bundled_ja_ja_re_line1(self):
        score = bundled_score()
        assert score.bandish_name == "Ja Ja Re"
        assert score.raga_name == "Bhimpalasi"
        assert score.beats_per_cycle == 16
        assert len(score.lines) == 4
        syllables = canonical_positions(score, 1)
        labels = [s.label for s in syllables]
        assert labels == ["Man", "Di", "Ra", "Vaa", "Jaa1", "Jaa2", "Re", "A", "Pa", "Ne"]
        by_label = {s.label: s for s in syllables}
        # Man opens the cycle on the sam; Jaa1 starts the sung line on matra 7.
        assert by_label["Man"].beat_index == 0
        assert by_label["Jaa1"].beat_index == 6
        assert by_label["Jaa2"].beat_index == 8
        assert by_label["Ne"].beat_index == 13
        for label in ("Man", "Jaa1", "Jaa2"):
            assert by_label[label].allotted_beats == 2
        for label in ("Re", "A", "Pa", "Ne", "Di", "Ra", "Vaa"):
            assert by_label[label].allotted_beats == 1

    def test_bundled_ornament_and_melisma(self):
        score = bundled_score()
        ga = next(s for s in score.lines[2].syllables if s.label == "Ga")
        assert ga.ornament == (SwarSymbol("n"),)
        assert ga.allotted_beats == 2
        yaa1 = next(s for s in score.lines[3].syllables if s.label == "Yaa1")
        assert yaa1.cell_swars == ((SwarSymbol("g"), SwarSymbol("m")), ())

    def test_multi_syllable_cell_offsets(self):
        score = bundled_score()
        line4 = {s.label: s for s in score.lines[3].syllables}
        assert line4["Ri"].beat_index == 4 and line4["Ri"].offset == 0.0
        assert line4["Ba"].beat_index == 4 and line4["Ba"].offset == 0.5
        assert line4["Ri"].swars == (SwarSymbol("P"),)
        assert line4["Ba"].swars == (SwarSymbol("m"),)

    def test_allotted_beats_partition_each_line(self):
        score = bundled_score()
        for line in score.lines:
            span = sum(
                s.allotted_beats for s in line.syllables if s.offset == 0.0
            )
            assert span + line.rest_count == score.beats_per_cycle

    @pytest.mark.parametrize(
        "notation,lyric",
        [
            (_pad(["m", "q"]), _pad(["Jaa", "Re"])),  # unknown swar token
            (_pad(["m"])[:15], _pad(["Jaa"])[:15]),  # short row pair
            (_pad(["s"]), _pad(["Jaa"])),  # lyric on sustain cell
            (_pad(["m"]), _pad([""])),  # swars without lyric
            (_pad([""]), _pad(["Jaa"])),  # lyric without swars
            (_pad(["m"]), _pad(["Su Na Ra"])),  # more syllables than swars
        ],
    )
    def test_parse_errors(self, notation, lyric):
        with pytest.raises(ParseError):
            _score(notation, lyric)

    def test_leading_sustain_rejected(self):
        with pytest.raises(ParseError):
            _score(_pad(["s", "m"]), _pad(["-", "Jaa"]))

    def test_sustain_after_rest_rejected(self):
        with pytest.raises(ParseError):
            _score(_pad(["m", "", "s"]), _pad(["Jaa", "", "-"]))

    def test_error_coordinates_reported(self):
        with pytest.raises(ParseError) as err:
            _score(_pad(["m", "q"]), _pad(["Jaa", "Re"]))
        assert "cell 1" in str(err.value)

    def test_trailing_whitespace_ignored(self):
        text = HEADER + _row(_pad(["m"])) + _row(_pad(["Jaa"]))
        assert parse_notation(text + "\n\n") == parse_notation(text)


class TestSerialize:
    def test_round_trip_bundled_fixture_cellwise(self):
        text = bundled_notation_text()
        round_tripped = serialize_notation(parse_notation(text))
        original = [[c.strip() for c in row] for row in csv.reader(io.StringIO(text))]
        rewritten = list(csv.reader(io.StringIO(round_tripped)))
        assert rewritten == original

    def test_parse_serialize_fixed_point(self):
        text = bundled_notation_text()
        once = serialize_notation(parse_notation(text))
        twice = serialize_notation(parse_notation(once))
        assert once == twice


class TestCanonicalPositions:
    def test_single_syllable(self):
        score = _score(_pad(["m"]), _pad(["Jaa"]))
        [syl] = canonical_positions(score, 1)
        assert syl.beat_index == 0

    def test_order_is_stable(self):
        score = bundled_score()
        assert canonical_positions(score, 1) == canonical_positions(score, 1)

    def test_out_of_range_line(self):
        score = bundled_score()
        with pytest.raises(NotFoundError):
            canonical_positions(score, 99)
