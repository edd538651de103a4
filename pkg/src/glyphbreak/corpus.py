"""Labeled text corpora in the JSONL convention (one ``{"text": ...}`` per line)."""

from __future__ import annotations

import enum
import json
from dataclasses import dataclass
from pathlib import Path
from typing import Iterator, Sequence

from .errors import MalformedLineError, NotEnoughSamplesError
from .rng import SplitMix64
from .validation import check_non_negative_int, check_seed


class Label(enum.Enum):
    NEURAL = "neural"
    HUMAN = "human"


@dataclass(frozen=True)
class TextSample:
    """One document. ``id`` is the 0-based line number in the source file."""

    id: int
    text: str
    label: Label


@dataclass(frozen=True)
class Corpus:
    samples: tuple[TextSample, ...]
    label: Label
    source: str = ""

    def __post_init__(self):
        ids = [s.id for s in self.samples]
        if len(set(ids)) != len(ids):
            raise ValueError("sample ids must be unique within a corpus")

    def __len__(self) -> int:
        return len(self.samples)

    def __iter__(self) -> Iterator[TextSample]:
        return iter(self.samples)

    def __getitem__(self, index: int) -> TextSample:
        return self.samples[index]

    def texts(self) -> list[str]:
        return [s.text for s in self.samples]


def load_corpus(path: str | Path, label: Label) -> Corpus:
    """Load a UTF-8 JSONL file into a corpus.

    Every non-blank line must be a JSON object with a string field ``text``
    (other fields are ignored). Blank lines are skipped but still consume a
    line number, so ids stay stable.

    Raises MalformedLineError (with the 0-based line number) for lines that
    are not JSON objects or lack a string ``text``.
    """
    path = Path(path)
    samples = []
    with open(path, encoding="utf-8") as fh:
        for line_no, line in enumerate(fh):
            if not line.strip():
                continue
            try:
                record = json.loads(line)
            except json.JSONDecodeError as exc:
                raise MalformedLineError(line_no, f"invalid JSON ({exc.msg})") from exc
            if not isinstance(record, dict) or not isinstance(record.get("text"), str):
                raise MalformedLineError(line_no, "missing string field 'text'")
            samples.append(TextSample(id=line_no, text=record["text"], label=label))
    return Corpus(samples=tuple(samples), label=label, source=str(path))


def save_corpus(corpus: Corpus, path: str | Path) -> None:
    """Write samples back out in the same JSONL convention, in corpus order."""
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        for sample in corpus:
            fh.write(json.dumps({"text": sample.text}, ensure_ascii=False))
            fh.write("\n")


def subsample(corpus: Corpus, n: int, seed: int) -> Corpus:
    """n distinct samples chosen uniformly without replacement, ascending by id.

    The draw is made by a SplitMix64 generator seeded with ``seed``, so the
    selection is identical across runs and platforms.
    """
    check_non_negative_int(n, "n")
    check_seed(seed)
    if n > len(corpus):
        raise NotEnoughSamplesError(requested=n, available=len(corpus))
    rng = SplitMix64(seed)
    picked = rng.sample_indices(len(corpus), n)
    samples = tuple(corpus.samples[i] for i in picked)
    return Corpus(samples=samples, label=corpus.label, source=corpus.source)


def corpus_from_texts(
    texts: Sequence[str], label: Label, source: str = "<memory>"
) -> Corpus:
    """Corpus built directly from strings; ids are sequence positions."""
    samples = tuple(
        TextSample(id=i, text=t, label=label) for i, t in enumerate(texts)
    )
    return Corpus(samples=samples, label=label, source=source)
