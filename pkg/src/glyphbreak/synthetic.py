"""Seeded desk-scale corpora for demos, calibration, and the acceptance suite.

A "neural proxy" text source is a near-deterministic word chain: from each
word the chain usually follows a fixed successor permutation, occasionally
jumping to a uniformly random word. Texts sampled with low jump noise play
the role of machine-generated text (highly predictable to a model trained on
the same chain); the same chain sampled with high jump noise plays the role
of human text (plausible but looser). Vocabulary composition is controlled
so the character-level attacks have realistic targets: most words carry an
``e`` or an ``a``, a small group carries a doubled ``c``, and a few words
avoid all attackable letters.
"""

from __future__ import annotations

from dataclasses import dataclass

from .corpus import Corpus, Label, corpus_from_texts
from .misspell import MisspellingDictionary
from .rng import SplitMix64, derive_seed

_CONSONANTS = "bdfghjklmnrstvw"
_SOFT_VOWELS = "iou"


def _make_word(rng: SplitMix64, required: str, banned: str, length: int) -> str:
    letters = [c for c in _CONSONANTS + _SOFT_VOWELS if c not in banned]
    word = [letters[rng.randbelow(len(letters))] for _ in range(length)]
    pos = rng.randbelow(length)
    word[pos : pos + len(required)] = required
    return "".join(word)


def make_vocabulary(
    seed: int,
    size: int = 200,
    e_share: float = 0.6,
    a_share: float = 0.25,
    c_share: float = 0.1,
) -> tuple[str, ...]:
    """Unique lowercase words with controlled letter composition.

    ``e_share`` of words contain an e (and never a or c), ``a_share``
    contain an a (never e or c), ``c_share`` contain a doubled c (never
    e or a), and the remainder avoid e, a, c, and p entirely.
    """
    rng = SplitMix64(seed)
    groups = [
        (round(size * e_share), "e", "acp"),
        (round(size * a_share), "a", "ecp"),
        (round(size * c_share), "cc", "aep"),
    ]
    counted = sum(count for count, _, _ in groups)
    groups.append((size - counted, "", "aecp"))
    words: list[str] = []
    seen = set()
    for count, required, banned in groups:
        made = 0
        while made < count:
            length = 4 + rng.randbelow(4)
            word = _make_word(rng, required, banned, length)
            if word in seen:
                continue
            seen.add(word)
            words.append(word)
            made += 1
    return tuple(words)


@dataclass(frozen=True)
class WordChain:
    """Word vocabulary plus a successor permutation."""

    vocabulary: tuple[str, ...]
    successor: dict[str, str]


def make_chain(vocabulary: tuple[str, ...], seed: int) -> WordChain:
    """Pair every word with one preferred successor (a seeded permutation)."""
    rng = SplitMix64(seed)
    targets = list(vocabulary)
    for i in range(len(targets) - 1, 0, -1):
        j = rng.randbelow(i + 1)
        targets[i], targets[j] = targets[j], targets[i]
    return WordChain(
        vocabulary=tuple(vocabulary),
        successor=dict(zip(vocabulary, targets)),
    )


def sample_text(chain: WordChain, rng: SplitMix64, n_words: int, noise: float) -> str:
    vocab = chain.vocabulary
    word = vocab[rng.randbelow(len(vocab))]
    words = [word]
    for _ in range(n_words - 1):
        if rng.random() < noise:
            word = vocab[rng.randbelow(len(vocab))]
        else:
            word = chain.successor[word]
        words.append(word)
    return " ".join(words)


def sample_corpus(
    chain: WordChain,
    n_samples: int,
    *,
    noise: float,
    seed: int,
    label: Label,
    min_words: int = 250,
    max_words: int = 350,
    source: str = "<synthetic>",
) -> Corpus:
    rng = SplitMix64(seed)
    texts = []
    for _ in range(n_samples):
        n_words = min_words + rng.randbelow(max_words - min_words + 1)
        texts.append(sample_text(chain, rng, n_words, noise))
    return corpus_from_texts(texts, label=label, source=source)


def make_misspelling_dictionary(
    vocabulary: tuple[str, ...], seed: int, coverage: float = 0.6
) -> MisspellingDictionary:
    """Misspelling variants (doubled letters) for a share of the vocabulary.

    Variants are guaranteed to fall outside the vocabulary, so a misspelled
    word is out-of-vocabulary for any model trained on chain text.
    """
    rng = SplitMix64(seed)
    vocab_set = set(vocabulary)
    n_covered = round(len(vocabulary) * coverage)
    picked = [vocabulary[i] for i in rng.sample_indices(len(vocabulary), n_covered)]
    reverse_map = {}
    for word in picked:
        variants = []
        for pos in range(len(word)):
            variant = word[:pos] + word[pos] + word[pos:]
            if variant not in vocab_set and variant not in variants:
                variants.append(variant)
            if len(variants) == 2:
                break
        if variants:
            reverse_map[word] = tuple(sorted(variants))
    return MisspellingDictionary(reverse_map=reverse_map)


@dataclass(frozen=True)
class DeskWorld:
    """Standard splits for a self-contained evaluation.

    ``train`` fits the language model; the calibration splits fit the proxy
    detector; the eval splits are held out for attack measurements. All
    neural splits share one chain and noise level; the human splits use the
    same chain with much higher jump noise.
    """

    vocabulary: tuple[str, ...]
    chain: WordChain
    train: Corpus
    neural_calibration: Corpus
    human_calibration: Corpus
    neural_eval: Corpus
    human_eval: Corpus
    dictionary: MisspellingDictionary
    neural_noise: float
    human_noise: float


def make_desk_world(
    seed: int,
    *,
    vocab_size: int = 200,
    train_samples: int = 150,
    calibration_samples: int = 150,
    neural_eval_samples: int = 500,
    human_eval_samples: int = 200,
    neural_noise: float = 0.05,
    human_noise: float = 0.25,
    min_words: int = 250,
    max_words: int = 350,
) -> DeskWorld:
    vocabulary = make_vocabulary(derive_seed(seed, "vocab"), size=vocab_size)
    chain = make_chain(vocabulary, derive_seed(seed, "chain"))

    def corpus(name: str, n: int, noise: float, label: Label) -> Corpus:
        return sample_corpus(
            chain,
            n,
            noise=noise,
            seed=derive_seed(seed, name),
            label=label,
            min_words=min_words,
            max_words=max_words,
            source=f"<synthetic:{name}>",
        )

    return DeskWorld(
        vocabulary=vocabulary,
        chain=chain,
        train=corpus("train", train_samples, neural_noise, Label.NEURAL),
        neural_calibration=corpus(
            "neural-calibration", calibration_samples, neural_noise, Label.NEURAL
        ),
        human_calibration=corpus(
            "human-calibration", calibration_samples, human_noise, Label.HUMAN
        ),
        neural_eval=corpus("neural-eval", neural_eval_samples, neural_noise, Label.NEURAL),
        human_eval=corpus("human-eval", human_eval_samples, human_noise, Label.HUMAN),
        dictionary=make_misspelling_dictionary(
            vocabulary, derive_seed(seed, "misspellings")
        ),
        neural_noise=neural_noise,
        human_noise=human_noise,
    )
