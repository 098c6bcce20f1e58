"""Raga scale grids in cents and pitch quantization against them.

Swar intonation defaults to the 12-TET grid (S=0, r=100, ..., N=1100
cents); per-degree cent overrides can be supplied for other tunings.
The grid spans the mandra/madhya/taar octaves; values beyond the grid
edge by more than half an octave raise rather than silently clamp.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from pathlib import Path

from .errors import ConfigurationError, DomainError, OutOfRangeError
from .notation import DEGREE_CENTS, SwarSymbol, parse_swar, render_swar

GRID_OCTAVES = (-1, 0, 1)
EDGE_MARGIN_CENTS = 600.0


@dataclass(frozen=True)
class Tonic:
    """The singer's reference Sa in Hz."""

    frequency: float

    def __post_init__(self):
        if not (math.isfinite(self.frequency) and self.frequency > 0):
            raise DomainError(f"tonic must be finite and positive, got {self.frequency}")


@dataclass(frozen=True)
class RagaScale:
    """Allowed swars of a raga with their cent positions over three octaves."""

    name: str
    swars: tuple[SwarSymbol, ...]  # one octave, ascending
    base_cents: tuple[float, ...]  # same order as swars
    grid: tuple[tuple[SwarSymbol, float], ...] = field(init=False)

    def __post_init__(self):
        if not self.swars:
            raise ConfigurationError("raga scale needs at least one swar")
        if len(self.base_cents) != len(self.swars):
            raise ConfigurationError("swars and cent table differ in length")
        if any(b > a for a, b in zip(self.base_cents[1:], self.base_cents)):
            raise ConfigurationError(f"{self.name}: swar cents must ascend within the octave")
        grid = []
        for octave in GRID_OCTAVES:
            for swar, cents in zip(self.swars, self.base_cents):
                grid.append((SwarSymbol(swar.degree, octave), cents + 1200.0 * octave))
        object.__setattr__(self, "grid", tuple(grid))

    @classmethod
    def from_degrees(cls, name: str, degrees: str | list[str],
                     cent_overrides: dict[str, float] | None = None) -> "RagaScale":
        """Build a scale from degree names, e.g. ``"S R g m P D n"``."""
        names = degrees.split() if isinstance(degrees, str) else list(degrees)
        swars = tuple(parse_swar(d) for d in names)
        if any(s.octave != 0 for s in swars):
            raise ConfigurationError("scale degrees must be given in the middle octave")
        overrides = cent_overrides or {}
        cents = tuple(
            float(overrides.get(s.degree, DEGREE_CENTS[s.degree])) for s in swars
        )
        return cls(name=name, swars=swars, base_cents=cents)

    def cents_of(self, swar: SwarSymbol) -> float:
        for sym, cents in self.grid:
            if sym == swar:
                return cents
        raise OutOfRangeError(f"{render_swar(swar)} is not in raga {self.name}")

    def grid_index(self, swar: SwarSymbol) -> int:
        for i, (sym, _) in enumerate(self.grid):
            if sym == swar:
                return i
        raise OutOfRangeError(f"{render_swar(swar)} is not in raga {self.name}")


BHIMPALASI = RagaScale.from_degrees("Bhimpalasi", "S R g m P D n")
YAMAN = RagaScale.from_degrees("Yaman", "S R G M P D N")
BUILTIN_RAGAS = {scale.name.lower(): scale for scale in (BHIMPALASI, YAMAN)}


def get_raga(name: str) -> RagaScale:
    try:
        return BUILTIN_RAGAS[name.lower()]
    except KeyError:
        raise ConfigurationError(
            f"unknown raga {name!r}; known: {sorted(BUILTIN_RAGAS)}"
        ) from None


def load_raga(path: str | Path) -> RagaScale:
    """Load a raga definition file: JSON with name, degrees, optional cents."""
    data = json.loads(Path(path).read_text("utf-8"))
    return RagaScale.from_degrees(
        data["name"], data["degrees"], data.get("cents")
    )


def hz_to_cents(f0: float, tonic: Tonic) -> float:
    """Frequency in Hz to cents relative to the tonic: 1200*log2(f0/tonic)."""
    if not (math.isfinite(f0) and f0 > 0):
        raise DomainError(f"frequency must be finite and positive, got {f0}")
    return 1200.0 * math.log2(f0 / tonic.frequency)


def cents_to_hz(cents: float, tonic: Tonic) -> float:
    return tonic.frequency * 2.0 ** (cents / 1200.0)


def quantize_cents(cents: float, scale: RagaScale) -> SwarSymbol:
    """Nearest raga swar on the grid; exact midpoints resolve downward.

    Raises OutOfRangeError when ``cents`` lies more than 600 cents beyond
    either grid edge, naming the nearest edge symbol.
    """
    grid = scale.grid
    lo_sym, lo = grid[0]
    hi_sym, hi = grid[-1]
    if cents < lo - EDGE_MARGIN_CENTS or cents > hi + EDGE_MARGIN_CENTS:
        edge = lo_sym if cents < lo else hi_sym
        raise OutOfRangeError(
            f"{cents:.1f} cents is outside the {scale.name} grid "
            f"(nearest edge {render_swar(edge)})"
        )
    best_sym, best_dist = lo_sym, abs(cents - lo)
    for sym, c in grid[1:]:
        dist = abs(cents - c)
        if dist < best_dist:  # strict: ties stay with the lower swar
            best_sym, best_dist = sym, dist
    return best_sym
