"""Attack configurations as sklearn-style transformers.

Each attack is a parameterized, stateless transformer: ``transform`` maps a
list of texts to perturbed texts (element ``i`` gets a seed derived from
``master_seed`` and ``i``), while ``apply`` perturbs one text under an
explicit seed, which is how the experiment harness drives per-sample
reproducibility.
"""

from __future__ import annotations

from typing import Iterable, Sequence

from sklearn.base import BaseEstimator, TransformerMixin

from .homoglyphs import (
    DEFAULT_TABLE,
    HomoglyphPair,
    PerturbedText,
    apply_budgeted,
    apply_exhaustive,
    check_pair_selection,
)
from .misspell import MisspellingDictionary, Policy, apply_misspellings
from .rng import derive_seed
from .validation import check_texts

PairsSpec = str | Iterable[HomoglyphPair]


def resolve_pairs(pairs: PairsSpec) -> tuple[HomoglyphPair, ...]:
    """Accept either a selector string (against the default table) or pairs."""
    if isinstance(pairs, str):
        return DEFAULT_TABLE.select(pairs)
    return check_pair_selection(pairs)


def pairs_echo(pairs: Sequence[HomoglyphPair]) -> str:
    return ",".join(str(p) for p in pairs)


class _AttackBase(TransformerMixin, BaseEstimator):
    def fit(self, X=None, y=None):
        self._resolved()
        return self

    def transform(self, X: Iterable[str]) -> list[str]:
        self._resolved()
        return [
            self.apply(text, derive_seed(self.master_seed, i)).text
            for i, text in enumerate(check_texts(X))
        ]

    def _resolved(self):
        raise NotImplementedError

    def apply(self, text: str, seed: int) -> PerturbedText:
        raise NotImplementedError

    def config_echo(self) -> dict:
        raise NotImplementedError


class HomoglyphBudgeted(_AttackBase):
    """Random homoglyph substitution under a character budget.

    Raises InsufficientTargetsError for texts that cannot meet the quota;
    the harness discards such samples.
    """

    kind = "homoglyph-budgeted"

    def __init__(
        self,
        pairs: PairsSpec = "e,a",
        fraction: float = 0.015,
        master_seed: int = 0,
        count_letters_only: bool = False,
    ):
        self.pairs = pairs
        self.fraction = fraction
        self.master_seed = master_seed
        self.count_letters_only = count_letters_only

    def _resolved(self) -> tuple[HomoglyphPair, ...]:
        return resolve_pairs(self.pairs)

    def apply(self, text: str, seed: int) -> PerturbedText:
        return apply_budgeted(
            text,
            self._resolved(),
            self.fraction,
            seed,
            count_letters_only=self.count_letters_only,
        )

    def config_echo(self) -> dict:
        return {
            "kind": self.kind,
            "pairs": pairs_echo(self._resolved()),
            "fraction": self.fraction,
            "count_letters_only": self.count_letters_only,
        }


class HomoglyphExhaustive(_AttackBase):
    """Replace every occurrence of the selected source characters."""

    kind = "homoglyph-exhaustive"

    def __init__(self, pairs: PairsSpec = "e,a", master_seed: int = 0):
        self.pairs = pairs
        self.master_seed = master_seed

    def _resolved(self) -> tuple[HomoglyphPair, ...]:
        return resolve_pairs(self.pairs)

    def apply(self, text: str, seed: int = 0) -> PerturbedText:
        # Deterministic; the seed argument exists for interface uniformity.
        return apply_exhaustive(text, self._resolved())

    def config_echo(self) -> dict:
        return {"kind": self.kind, "pairs": pairs_echo(self._resolved())}


class MisspellingAttack(_AttackBase):
    """Swap a budgeted fraction of words for human misspellings."""

    kind = "misspelling"

    def __init__(
        self,
        dictionary: MisspellingDictionary | None = None,
        fraction: float = 0.05,
        master_seed: int = 0,
        policy: Policy = Policy.STRICT,
    ):
        self.dictionary = dictionary
        self.fraction = fraction
        self.master_seed = master_seed
        self.policy = policy

    def _resolved(self) -> MisspellingDictionary:
        if self.dictionary is None:
            raise ValueError("MisspellingAttack requires a dictionary")
        return self.dictionary

    def apply(self, text: str, seed: int) -> PerturbedText:
        return apply_misspellings(
            text, self._resolved(), self.fraction, seed, policy=self.policy
        )

    def config_echo(self) -> dict:
        return {
            "kind": self.kind,
            "fraction": self.fraction,
            "policy": self.policy.value,
            "dictionary_size": len(self._resolved()),
        }


Attack = HomoglyphBudgeted | HomoglyphExhaustive | MisspellingAttack
