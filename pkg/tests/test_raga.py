from __future__ import annotations

import json
import math
import random

import pytest

from bandishlab.errors import ConfigurationError, DomainError, OutOfRangeError
from bandishlab.notation import SwarSymbol
from bandishlab.raga import (
    BHIMPALASI,
    YAMAN,
    RagaScale,
    Tonic,
    cents_to_hz,
    get_raga,
    hz_to_cents,
    load_raga,
    quantize_cents,
)


class TestHzToCents:
    def test_identity(self):
        assert hz_to_cents(220.0, Tonic(220.0)) == 0.0

    def test_octave(self):
        assert hz_to_cents(440.0, Tonic(220.0)) == pytest.approx(1200.0, abs=1e-9)

    def test_perfect_fifth_closed_form(self):
        # 1200*log2(1.5) = 701.955...
        expected = 1200.0 * math.log2(1.5)
        assert hz_to_cents(330.0, Tonic(220.0)) == pytest.approx(expected, abs=1e-6)
        assert expected == pytest.approx(701.955, abs=1e-3)

    def test_power_of_two_multiples_exact(self):
        tonic = Tonic(261.3)
        for k in (-1, 0, 1, 2, 3):
            assert hz_to_cents(tonic.frequency * 2.0**k, tonic) == pytest.approx(
                1200.0 * k, abs=1e-9
            )

    @pytest.mark.parametrize("bad", [0.0, -3.0, math.inf, math.nan])
    def test_domain_errors(self, bad):
        with pytest.raises(DomainError):
            hz_to_cents(bad, Tonic(220.0))

    def test_bad_tonic(self):
        with pytest.raises(DomainError):
            Tonic(0.0)


class TestQuantize:
    def test_exact_grid_point(self):
        assert quantize_cents(0.0, YAMAN) == SwarSymbol("S")

    def test_nearest_by_two_cents(self):
        assert quantize_cents(702.0, BHIMPALASI) == SwarSymbol("P")

    def test_upper_octave_neighbor(self):
        # Yaman neighbors around 1250: S' at 1200 and R' at 1400.
        assert quantize_cents(1250.0, YAMAN) == SwarSymbol("S", octave=1)

    def test_midpoint_tie_resolves_down(self):
        # S (0) and R (200) midpoint in Yaman.
        assert quantize_cents(100.0, YAMAN) == SwarSymbol("S")

    def test_out_of_range_names_edge(self):
        with pytest.raises(OutOfRangeError) as err:
            quantize_cents(-2000.0, YAMAN)
        assert ".S" in str(err.value)
        with pytest.raises(OutOfRangeError) as err:
            quantize_cents(2901.0, BHIMPALASI)
        assert "n'" in str(err.value)

    def test_edge_margin_accepted(self):
        # Bhimpalasi top grid note is n' at 2200; +600 must still clamp.
        assert quantize_cents(2799.0, BHIMPALASI) == SwarSymbol("n", octave=1)

    def test_idempotence(self):
        rng = random.Random(7)
        for _ in range(200):
            c = rng.uniform(-1700.0, 2700.0)
            sym = quantize_cents(c, BHIMPALASI)
            assert quantize_cents(BHIMPALASI.cents_of(sym), BHIMPALASI) == sym

    def test_monotonicity_in_grid_order(self):
        rng = random.Random(11)
        values = sorted(rng.uniform(-1700.0, 2700.0) for _ in range(300))
        indices = [YAMAN.grid_index(quantize_cents(c, YAMAN)) for c in values]
        assert indices == sorted(indices)


class TestScaleDefinitions:
    def test_builtin_swar_sets(self):
        assert [s.degree for s in BHIMPALASI.swars] == list("SRgmPDn")
        assert [s.degree for s in YAMAN.swars] == list("SRGMPDN")

    def test_grid_spans_three_octaves(self):
        assert len(YAMAN.grid) == 3 * 7
        assert YAMAN.grid[0][1] == -1200.0
        assert YAMAN.grid[-1][1] == 1100.0 + 1200.0

    def test_grid_octave_offsets(self):
        for sym, cents in BHIMPALASI.grid:
            base = BHIMPALASI.cents_of(SwarSymbol(sym.degree))
            assert cents == base + 1200.0 * sym.octave

    def test_get_raga_lookup(self):
        assert get_raga("bhimpalasi") is BHIMPALASI
        with pytest.raises(ConfigurationError):
            get_raga("nosuch")

    def test_descending_cents_rejected(self):
        with pytest.raises(ConfigurationError):
            RagaScale.from_degrees("Bad", "S R", {"R": -50.0})

    def test_load_raga_file_with_overrides(self, tmp_path):
        path = tmp_path / "raga.json"
        path.write_text(
            json.dumps({"name": "Custom", "degrees": ["S", "P"], "cents": {"P": 702.0}})
        )
        scale = load_raga(path)
        assert scale.cents_of(SwarSymbol("P")) == 702.0
        assert quantize_cents(701.0, scale) == SwarSymbol("P")

    def test_cents_to_hz_round_trip(self):
        tonic = Tonic(240.0)
        for c in (-1200.0, 0.0, 386.31, 1900.0):
            assert hz_to_cents(cents_to_hz(c, tonic), tonic) == pytest.approx(c, abs=1e-9)
