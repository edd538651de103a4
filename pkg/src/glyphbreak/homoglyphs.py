"""Homoglyph substitution: swap characters for visually confusable codepoints.

The default table carries five Latin-to-lookalike mappings (four Cyrillic,
one accented Latin). Tables are a catalog: a source character may appear with
several alternate replacements, but a *selection* handed to an attack must
use each source at most once.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from pathlib import Path
from typing import Iterable, Sequence

from .errors import InsufficientTargetsError, TableFormatError
from .rng import SplitMix64
from .validation import check_fraction, check_seed


@dataclass(frozen=True)
class HomoglyphPair:
    """A single source scalar value and its replacement scalar value."""

    source: str
    replacement: str

    def __post_init__(self):
        if len(self.source) != 1 or len(self.replacement) != 1:
            raise ValueError("source and replacement must be single scalar values")
        if self.source == self.replacement:
            raise ValueError("source and replacement must differ")

    def __str__(self) -> str:
        return f"U+{ord(self.source):04X}>U+{ord(self.replacement):04X}"


# Latin a -> Cyrillic a, Latin e -> Cyrillic ie, Latin e -> e-acute,
# Latin c -> Cyrillic es, Latin p -> Cyrillic er.
DEFAULT_PAIRS: tuple[HomoglyphPair, ...] = (
    HomoglyphPair("a", "а"),
    HomoglyphPair("e", "е"),
    HomoglyphPair("e", "é"),
    HomoglyphPair("c", "с"),
    HomoglyphPair("p", "р"),
)


@dataclass(frozen=True)
class HomoglyphTable:
    """Catalog of available pairs; sources may repeat with alternate replacements."""

    pairs: tuple[HomoglyphPair, ...]

    def __post_init__(self):
        if len(set(self.pairs)) != len(self.pairs):
            raise ValueError("duplicate pair in table")

    def __len__(self) -> int:
        return len(self.pairs)

    def select(self, spec: str) -> tuple[HomoglyphPair, ...]:
        """Resolve a comma-separated selection into a distinct-source pair set.

        Each token is either a single source character (first catalog entry
        for that source wins, so ``e`` picks the Cyrillic alternative) or an
        explicit ``source=replacement`` pair where either side may be a
        literal character or ``U+XXXX`` notation.
        """
        selected = []
        for token in spec.split(","):
            token = token.strip()
            if not token:
                raise ValueError("empty pair selector")
            if "=" in token:
                src_txt, _, repl_txt = token.partition("=")
                pair = HomoglyphPair(_parse_char(src_txt), _parse_char(repl_txt))
            else:
                source = _parse_char(token)
                matches = [p for p in self.pairs if p.source == source]
                if not matches:
                    raise ValueError(f"no table entry for source {source!r}")
                pair = matches[0]
            selected.append(pair)
        return check_pair_selection(selected)


DEFAULT_TABLE = HomoglyphTable(pairs=DEFAULT_PAIRS)


def check_pair_selection(pairs: Iterable[HomoglyphPair]) -> tuple[HomoglyphPair, ...]:
    """Validate a pair set chosen for an attack: nonempty, one pair per source."""
    pairs = tuple(pairs)
    if not pairs:
        raise ValueError("pair selection must be nonempty")
    sources = [p.source for p in pairs]
    if len(set(sources)) != len(sources):
        raise ValueError("pair selection reuses a source character")
    return pairs


def _parse_char(text: str) -> str:
    text = text.strip()
    if text.upper().startswith("U+"):
        try:
            return chr(int(text[2:], 16))
        except (ValueError, OverflowError) as exc:
            raise ValueError(f"bad codepoint {text!r}") from exc
    if len(text) != 1:
        raise ValueError(f"expected one character or U+XXXX, got {text!r}")
    return text


def parse_homoglyph_table(lines: Iterable[str]) -> HomoglyphTable:
    """Parse ``U+XXXX U+YYYY`` lines; ``#`` starts a comment, blanks ignored."""
    pairs = []
    for line_no, raw in enumerate(lines):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        fields = line.split()
        if len(fields) != 2:
            raise TableFormatError(line_no, f"expected two fields, got {len(fields)}")
        try:
            pair = HomoglyphPair(_parse_char(fields[0]), _parse_char(fields[1]))
        except ValueError as exc:
            raise TableFormatError(line_no, str(exc)) from exc
        pairs.append(pair)
    return HomoglyphTable(pairs=tuple(pairs))


def load_homoglyph_table(path: str | Path) -> HomoglyphTable:
    with open(path, encoding="utf-8") as fh:
        return parse_homoglyph_table(fh)


@dataclass(frozen=True)
class PerturbedText:
    """An attacked text plus an audit trail of what changed.

    ``replaced_positions`` are scalar-value indices into the *original* text
    (for character substitutions the output indices coincide).
    """

    text: str
    replaced_positions: tuple[int, ...]
    achieved_count: int

    def __post_init__(self):
        if len(self.replaced_positions) != self.achieved_count:
            raise ValueError("achieved_count must equal len(replaced_positions)")
        if list(self.replaced_positions) != sorted(set(self.replaced_positions)):
            raise ValueError("replaced_positions must be strictly increasing")
        if self.replaced_positions and self.replaced_positions[0] < 0:
            raise ValueError("replaced_positions must be non-negative")


def compute_quota(char_count: int, fraction: float) -> int:
    """ceil(fraction * char_count), exact over the decimal value of ``fraction``.

    The product is taken with rational arithmetic on the shortest decimal
    representation of the float, so 0.05 of 100 characters is 5, never 6.
    """
    if char_count < 0:
        raise ValueError("char_count must be >= 0")
    check_fraction(fraction, allow_zero=True)
    if char_count == 0 or fraction == 0.0:
        return 0
    return math.ceil(Fraction(str(fraction)) * char_count)


def _eligible_positions(chars: Sequence[str], pairs: Sequence[HomoglyphPair]) -> list[int]:
    mapping = {p.source for p in pairs}
    return [i for i, ch in enumerate(chars) if ch in mapping]


def apply_budgeted(
    text: str,
    pairs: Iterable[HomoglyphPair],
    fraction: float,
    seed: int,
    *,
    count_letters_only: bool = False,
) -> PerturbedText:
    """Replace a random quota of eligible characters with their homoglyphs.

    The quota is ceil(fraction * character count), counting every scalar
    value unless ``count_letters_only`` restricts the universe to letters.
    Exactly the quota is replaced, with positions drawn uniformly without
    replacement from the occurrences of the selected source characters.

    Raises InsufficientTargetsError when there are fewer eligible positions
    than the quota; callers treat that as "discard this sample".
    """
    pairs = check_pair_selection(pairs)
    check_fraction(fraction)
    check_seed(seed)
    chars = list(text)
    base_count = sum(1 for ch in chars if ch.isalpha()) if count_letters_only else len(chars)
    quota = compute_quota(base_count, fraction)
    eligible = _eligible_positions(chars, pairs)
    if len(eligible) < quota:
        raise InsufficientTargetsError(eligible_count=len(eligible), quota=quota)
    rng = SplitMix64(seed)
    chosen = [eligible[i] for i in rng.sample_indices(len(eligible), quota)]
    replacement_for = {p.source: p.replacement for p in pairs}
    for i in chosen:
        chars[i] = replacement_for[chars[i]]
    return PerturbedText(
        text="".join(chars),
        replaced_positions=tuple(sorted(chosen)),
        achieved_count=quota,
    )


def apply_exhaustive(text: str, pairs: Iterable[HomoglyphPair]) -> PerturbedText:
    """Replace every occurrence of the selected source characters. No RNG."""
    pairs = check_pair_selection(pairs)
    chars = list(text)
    positions = _eligible_positions(chars, pairs)
    replacement_for = {p.source: p.replacement for p in pairs}
    for i in positions:
        chars[i] = replacement_for[chars[i]]
    return PerturbedText(
        text="".join(chars),
        replaced_positions=tuple(positions),
        achieved_count=len(positions),
    )
