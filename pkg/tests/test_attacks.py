import pytest
from sklearn.base import clone
from sklearn.feature_extraction.text import CountVectorizer
from sklearn.pipeline import make_pipeline

from glyphbreak.attacks import (
    HomoglyphBudgeted,
    HomoglyphExhaustive,
    MisspellingAttack,
    resolve_pairs,
)
from glyphbreak.errors import InsufficientEligibleWordsError, InsufficientTargetsError
from glyphbreak.homoglyphs import DEFAULT_TABLE, HomoglyphPair
from glyphbreak.misspell import Policy, parse_misspelling_list

DICT = parse_misspelling_list(["teh->the", "agian->again"])


def test_resolve_pairs_from_string_and_objects():
    assert resolve_pairs("e,a") == DEFAULT_TABLE.select("e,a")
    pair = HomoglyphPair("x", "y")
    assert resolve_pairs([pair]) == (pair,)


class TestTransform:
    def test_exhaustive_transform(self):
        attack = HomoglyphExhaustive(pairs="e")
        out = attack.fit().transform(["tell me", "no vowel of that kind"])
        assert out[0] == "tеll mе"

    def test_budgeted_transform_deterministic(self):
        attack = HomoglyphBudgeted(pairs="e,a", fraction=0.05, master_seed=42)
        texts = ["tell me a tale of clever cats and dogs"] * 3
        assert attack.transform(texts) == attack.transform(texts)

    def test_budgeted_transform_varies_by_position(self):
        attack = HomoglyphBudgeted(pairs="e", fraction=0.05, master_seed=42)
        text = "e" * 100
        a, b = attack.transform([text, text])
        assert a != b  # element index feeds the per-text seed

    def test_budgeted_transform_raises_on_quota_miss(self):
        attack = HomoglyphBudgeted(pairs="p", fraction=0.5, master_seed=1)
        with pytest.raises(InsufficientTargetsError):
            attack.transform(["no target letters here"])

    def test_misspelling_transform(self):
        attack = MisspellingAttack(dictionary=DICT, fraction=1.0, master_seed=7)
        assert attack.transform(["the again"]) == [
            "teh agian"
        ]

    def test_misspelling_strict_raises(self):
        attack = MisspellingAttack(dictionary=DICT, fraction=0.5, master_seed=7)
        with pytest.raises(InsufficientEligibleWordsError):
            attack.transform(["nothing matches here"])

    def test_misspelling_best_effort_passes_through(self):
        attack = MisspellingAttack(
            dictionary=DICT, fraction=0.5, master_seed=7, policy=Policy.BEST_EFFORT
        )
        assert attack.transform(["nothing matches here"]) == ["nothing matches here"]

    def test_misspelling_requires_dictionary(self):
        with pytest.raises(ValueError):
            MisspellingAttack().fit()


class TestSklearnCompat:
    def test_get_params_and_clone(self):
        attack = HomoglyphBudgeted(pairs="e,a", fraction=0.02, master_seed=5)
        params = attack.get_params()
        assert params["fraction"] == 0.02
        cloned = clone(attack)
        assert cloned.get_params() == params

    def test_composes_in_pipeline(self):
        pipeline = make_pipeline(HomoglyphExhaustive(pairs="e,a"), CountVectorizer())
        texts = ["tell me a tale", "the cat sat on the mat"]
        matrix = pipeline.fit_transform(texts)
        vocab = set(pipeline.named_steps["countvectorizer"].vocabulary_)
        # Attacked tokens carry the lookalike codepoints into the vectorizer.
        assert "tеll" in vocab
        assert matrix.shape[0] == 2

    def test_config_echo(self):
        echo = HomoglyphBudgeted(pairs="e", fraction=0.015).config_echo()
        assert echo == {
            "kind": "homoglyph-budgeted",
            "pairs": "U+0065>U+0435",
            "fraction": 0.015,
            "count_letters_only": False,
        }
        echo = MisspellingAttack(dictionary=DICT).config_echo()
        assert echo["kind"] == "misspelling"
        assert echo["dictionary_size"] == 2
