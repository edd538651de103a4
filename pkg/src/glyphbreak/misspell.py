"""Human-like attack: swap words for common human misspellings.

The dictionary format is the machine-readable Wikipedia convention, one
``misspelling->correction[, correction]*`` entry per line. The map is stored
in reverse (correct word -> candidate misspellings) because the attack walks
correctly spelled text.
"""

from __future__ import annotations

import enum
import re
from dataclasses import dataclass, field
from pathlib import Path
from typing import Iterable, Mapping

from .errors import InsufficientEligibleWordsError, MalformedEntryError
from .homoglyphs import PerturbedText, compute_quota
from .rng import SplitMix64
from .validation import check_fraction, check_seed

# Maximal runs of Unicode letters; an ASCII apostrophe joins two runs.
# Hyphens and digits split words.
_WORD_RE = re.compile(r"[^\W\d_]+(?:'[^\W\d_]+)*")


@dataclass(frozen=True)
class WordSpan:
    start: int
    end: int
    surface: str


def tokenize_words(text: str) -> list[WordSpan]:
    """Word spans in order; indices are scalar-value offsets, end exclusive."""
    return [
        WordSpan(start=m.start(), end=m.end(), surface=m.group())
        for m in _WORD_RE.finditer(text)
    ]


def _is_single_token(word: str) -> bool:
    spans = tokenize_words(word)
    return len(spans) == 1 and spans[0].start == 0 and spans[0].end == len(word)


class Policy(enum.Enum):
    STRICT = "strict"
    BEST_EFFORT = "best-effort"


@dataclass(frozen=True)
class MisspellingDictionary:
    """Reverse map: case-folded correct word -> sorted tuple of misspellings."""

    reverse_map: Mapping[str, tuple[str, ...]]
    skipped_count: int = 0
    malformed_lines: tuple[int, ...] = field(default=())

    def __len__(self) -> int:
        return len(self.reverse_map)

    def misspellings_for(self, word: str) -> tuple[str, ...]:
        return self.reverse_map.get(word.casefold(), ())


def parse_misspelling_list(
    lines: Iterable[str], *, strict: bool = False
) -> MisspellingDictionary:
    """Build the reverse dictionary from ``wrong->right[, right]*`` lines.

    Lines beginning with ``#`` and blank lines are ignored. Multi-word
    corrections (and any side that is not a single word token) are skipped
    and counted. Lines without ``->`` are counted in ``malformed_lines``, or
    raised as MalformedEntryError when ``strict`` is set.
    """
    collected: dict[str, set[str]] = {}
    skipped = 0
    malformed: list[int] = []
    for line_no, raw in enumerate(lines):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        if "->" not in line:
            if strict:
                raise MalformedEntryError(line_no)
            malformed.append(line_no)
            continue
        wrong, _, rights = line.partition("->")
        wrong = wrong.strip()
        if not _is_single_token(wrong):
            skipped += 1
            continue
        for right in rights.split(","):
            right = right.strip()
            if not _is_single_token(right):
                skipped += 1
                continue
            collected.setdefault(right.casefold(), set()).add(wrong)
    reverse_map = {key: tuple(sorted(values)) for key, values in collected.items()}
    return MisspellingDictionary(
        reverse_map=reverse_map,
        skipped_count=skipped,
        malformed_lines=tuple(malformed),
    )


def load_misspelling_list(path: str | Path, *, strict: bool = False) -> MisspellingDictionary:
    with open(path, encoding="utf-8") as fh:
        return parse_misspelling_list(fh, strict=strict)


def _transfer_case(pattern: str, word: str) -> str:
    """Impose the case shape of ``pattern`` onto ``word``.

    all-lower -> lower, ALL-CAPS -> upper, Titlecase -> first letter upper,
    anything else -> lower.
    """
    if pattern.islower():
        return word.lower()
    if pattern.isupper():
        return word.upper()
    if pattern[:1].isupper() and pattern[1:].islower():
        return word[:1].upper() + word[1:].lower()
    return word.lower()


def apply_misspellings(
    text: str,
    dictionary: MisspellingDictionary,
    fraction: float,
    seed: int,
    policy: Policy = Policy.STRICT,
) -> PerturbedText:
    """Misspell a random quota of the text's dictionary-covered words.

    quota = ceil(fraction * word count). Eligible words are those whose
    case-folded surface has dictionary entries. min(quota, eligible) words
    are chosen uniformly without replacement; each selected word is replaced
    by a uniformly chosen misspelling with the original's case shape
    transferred. Under STRICT, fewer eligible words than the quota raises
    InsufficientEligibleWordsError (the sample is discarded); BEST_EFFORT
    replaces what it can.

    ``replaced_positions`` on the result are the start offsets of the
    replaced words in the original text.
    """
    check_fraction(fraction)
    check_seed(seed)
    if not isinstance(policy, Policy):
        raise TypeError("policy must be a Policy")
    spans = tokenize_words(text)
    quota = compute_quota(len(spans), fraction)
    eligible = [s for s in spans if dictionary.misspellings_for(s.surface)]
    if policy is Policy.STRICT and len(eligible) < quota:
        raise InsufficientEligibleWordsError(eligible_count=len(eligible), quota=quota)
    n_select = min(quota, len(eligible))
    rng = SplitMix64(seed)
    chosen = [eligible[i] for i in rng.sample_indices(len(eligible), n_select)]
    # Selection indices come back ascending, so the per-word misspelling
    # draws consume the stream in position order.
    pieces = []
    cursor = 0
    for span in chosen:
        candidates = dictionary.misspellings_for(span.surface)
        replacement = _transfer_case(span.surface, rng.choice(candidates))
        pieces.append(text[cursor : span.start])
        pieces.append(replacement)
        cursor = span.end
    pieces.append(text[cursor:])
    return PerturbedText(
        text="".join(pieces),
        replaced_positions=tuple(s.start for s in chosen),
        achieved_count=n_select,
    )
