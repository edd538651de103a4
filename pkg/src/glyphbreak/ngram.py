"""Word-level add-k n-gram language model with per-token rank scoring.

The model assigns every scored token a 1-based rank: its position in the
vocabulary sorted by descending conditional probability (ties broken by
ascending lexicographic order). Tokens outside the vocabulary get the
reserved worst rank |V|+1 and act as UNK when they appear in a context.
Low ranks mean the text sits where the model expects it; substitution
attacks push tokens out of the vocabulary and drive ranks up.
"""

from __future__ import annotations

import json
from bisect import bisect_left
from dataclasses import dataclass
from pathlib import Path
from typing import Iterable, Sequence

from sklearn.base import BaseEstimator
from sklearn.exceptions import NotFittedError

from .corpus import Corpus
from .errors import EmptyCorpusError, NoTokensError
from .misspell import tokenize_words

BOS = "<s>"
UNK = "<unk>"

_PERSIST_FORMAT = "glyphbreak-ngram"
_PERSIST_VERSION = 1


@dataclass(frozen=True)
class RankSequence:
    ranks: tuple[int, ...]
    token_count: int

    def __post_init__(self):
        if self.token_count != len(self.ranks):
            raise ValueError("token_count must equal len(ranks)")


def _lm_tokens(text: str) -> list[str]:
    return [span.surface.lower() for span in tokenize_words(text)]


def _as_texts(data: Corpus | Iterable[str]) -> list[str]:
    if isinstance(data, Corpus):
        return data.texts()
    return list(data)


class NgramLanguageModel(BaseEstimator):
    """Add-k smoothed n-gram model over lowercased word tokens.

    P(w | ctx) = (count(ctx, w) + k) / (count(ctx) + k * (|V| + 1)); the +1
    reserves probability mass for UNK, so every conditional distribution over
    vocabulary + UNK sums to one.

    Parameters
    ----------
    order : context length is ``order - 1``; order 1 is a unigram model.
    smoothing_k : additive smoothing constant, > 0.
    """

    def __init__(self, order: int = 2, smoothing_k: float = 1.0):
        self.order = order
        self.smoothing_k = smoothing_k

    def _check_params(self):
        if not isinstance(self.order, int) or isinstance(self.order, bool) or self.order < 1:
            raise ValueError(f"order must be an int >= 1, got {self.order!r}")
        if not float(self.smoothing_k) > 0.0:
            raise ValueError(f"smoothing_k must be > 0, got {self.smoothing_k!r}")

    def fit(self, X: Corpus | Iterable[str], y=None) -> "NgramLanguageModel":
        """Count n-grams over the training texts. Ignores ``y``."""
        self._check_params()
        texts = _as_texts(X)
        if not texts:
            raise EmptyCorpusError("training corpus is empty")
        counts: dict[tuple[str, ...], dict[str, int]] = {}
        totals: dict[tuple[str, ...], int] = {}
        vocab: set[str] = set()
        total_tokens = 0
        pad = (BOS,) * (self.order - 1)
        for text in texts:
            tokens = _lm_tokens(text)
            total_tokens += len(tokens)
            vocab.update(tokens)
            padded = pad + tuple(tokens)
            for t in range(len(tokens)):
                ctx = padded[t : t + self.order - 1]
                target = padded[t + self.order - 1]
                by_token = counts.setdefault(ctx, {})
                by_token[target] = by_token.get(target, 0) + 1
                totals[ctx] = totals.get(ctx, 0) + 1
        if total_tokens == 0:
            raise NoTokensError("training corpus has no word tokens")
        self.vocabulary_ = frozenset(vocab)
        self.vocab_sorted_ = sorted(vocab)
        self.counts_ = counts
        self.context_totals_ = totals
        return self

    def _check_fitted(self):
        if not hasattr(self, "vocabulary_"):
            raise NotFittedError("language model is not fitted")

    @property
    def vocab_size_(self) -> int:
        self._check_fitted()
        return len(self.vocab_sorted_)

    @property
    def oov_rank_(self) -> int:
        """Reserved rank for tokens outside the vocabulary."""
        return self.vocab_size_ + 1

    def _map_context(self, tokens: Sequence[str]) -> tuple[str, ...]:
        # BOS is a reserved padding symbol, never a vocabulary miss.
        return tuple(
            t if t == BOS or t in self.vocabulary_ else UNK for t in tokens
        )

    def conditional_prob(self, context: Sequence[str], token: str) -> float:
        """P(token | context) with OOV context tokens mapped to UNK."""
        self._check_fitted()
        ctx = self._map_context(context)
        k = float(self.smoothing_k)
        by_token = self.counts_.get(ctx, {})
        total = self.context_totals_.get(ctx, 0)
        count = by_token.get(token, 0) if token in self.vocabulary_ or token == UNK else 0
        return (count + k) / (total + k * (self.vocab_size_ + 1))

    def _rank_of(self, ctx: tuple[str, ...], target: str) -> int:
        if target not in self.vocabulary_:
            return self.oov_rank_
        by_token = self.counts_.get(ctx, {})
        c_t = by_token.get(target, 0)
        greater = sum(1 for c in by_token.values() if c > c_t)
        if c_t > 0:
            tie_less = sum(1 for w, c in by_token.items() if c == c_t and w < target)
        else:
            below = bisect_left(self.vocab_sorted_, target)
            tie_less = below - sum(1 for w in by_token if w < target)
        return greater + tie_less + 1

    def token_ranks(self, text: str) -> RankSequence:
        """Rank every word token of ``text``; empty text gives an empty sequence.

        The first ``order - 1`` tokens are conditioned on begin-of-sequence
        padding, so every token is scored.
        """
        self._check_fitted()
        tokens = _lm_tokens(text)
        padded = (BOS,) * (self.order - 1) + tuple(tokens)
        ranks = []
        for t in range(len(tokens)):
            raw_ctx = padded[t : t + self.order - 1]
            ctx = self._map_context(raw_ctx)
            ranks.append(self._rank_of(ctx, tokens[t]))
        return RankSequence(ranks=tuple(ranks), token_count=len(ranks))

    def mean_rank(self, data: Corpus | Iterable[str]) -> float:
        """Token-weighted mean rank pooled over every sample in ``data``."""
        self._check_fitted()
        texts = _as_texts(data)
        if not texts:
            raise EmptyCorpusError("corpus is empty")
        total = 0
        count = 0
        for text in texts:
            seq = self.token_ranks(text)
            total += sum(seq.ranks)
            count += seq.token_count
        if count == 0:
            raise NoTokensError("corpus has no word tokens")
        return total / count

    def to_payload(self) -> dict:
        """JSON-serializable snapshot of the fitted model."""
        self._check_fitted()
        return {
            "format": _PERSIST_FORMAT,
            "version": _PERSIST_VERSION,
            "order": self.order,
            "smoothing_k": float(self.smoothing_k),
            "vocabulary": self.vocab_sorted_,
            "counts": {
                " ".join(ctx): dict(sorted(by_token.items()))
                for ctx, by_token in sorted(self.counts_.items())
            },
        }

    @classmethod
    def from_payload(cls, payload: dict) -> "NgramLanguageModel":
        if payload.get("format") != _PERSIST_FORMAT:
            raise ValueError(f"not a {_PERSIST_FORMAT} payload")
        if payload.get("version") != _PERSIST_VERSION:
            raise ValueError(f"unsupported artifact version {payload.get('version')!r}")
        model = cls(order=payload["order"], smoothing_k=payload["smoothing_k"])
        counts: dict[tuple[str, ...], dict[str, int]] = {}
        totals: dict[tuple[str, ...], int] = {}
        for ctx_key, by_token in payload["counts"].items():
            ctx = tuple(ctx_key.split(" ")) if ctx_key else ()
            counts[ctx] = {str(w): int(c) for w, c in by_token.items()}
            totals[ctx] = sum(counts[ctx].values())
        vocab = payload["vocabulary"]
        model.vocabulary_ = frozenset(vocab)
        model.vocab_sorted_ = sorted(vocab)
        model.counts_ = counts
        model.context_totals_ = totals
        return model

    def save(self, path: str | Path) -> None:
        """Write a versioned JSON artifact that round-trips exactly."""
        with open(path, "w", encoding="utf-8", newline="\n") as fh:
            json.dump(self.to_payload(), fh, ensure_ascii=False, indent=2, sort_keys=True)
            fh.write("\n")

    @classmethod
    def load(cls, path: str | Path) -> "NgramLanguageModel":
        with open(path, encoding="utf-8") as fh:
            return cls.from_payload(json.load(fh))


def train_ngram(
    corpus: Corpus | Iterable[str], order: int = 2, smoothing_k: float = 1.0
) -> NgramLanguageModel:
    """Convenience constructor: fit an NgramLanguageModel on a corpus."""
    return NgramLanguageModel(order=order, smoothing_k=smoothing_k).fit(corpus)
