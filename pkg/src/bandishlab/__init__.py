"""Expressive timing and pitch variation analysis for Khayal bandish lines.

The package parses canonical bandish notation, aligns annotated
performances against it, measures per-syllable timing deviations and
pitch-shape (PAA/NLSS) variation, aggregates artist-level expression
tables, and resamples the measured distributions into new synthetic
renditions with sine-tone audio.
"""

from importlib import resources

from .notation import (
    CanonicalLine,
    CanonicalScore,
    CanonicalSyllable,
    NotationCell,
    SwarSymbol,
    canonical_positions,
    parse_notation,
    parse_swar,
    render_swar,
    serialize_notation,
)

__version__ = "0.1.0"


def bundled_notation_text(name: str = "ja_ja_re") -> str:
    """Return the text of a notation file shipped with the package."""
    return resources.files(__package__).joinpath(f"data/{name}.csv").read_text("utf-8")


def bundled_score(name: str = "ja_ja_re") -> CanonicalScore:
    """Parse and return a bundled canonical score."""
    return parse_notation(bundled_notation_text(name))
