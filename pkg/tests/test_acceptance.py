"""Acceptance gate: one test per criterion, at the stated tolerance.

Run with ``pytest tests/test_acceptance.py -v`` to get one pass/fail line per
criterion. Desk-scale corpora come from the seeded synthetic generator; the
attack-effect criteria assert directions and margins, not the magnitudes a
full-scale detector would produce.
"""

import time

import numpy as np
import pytest

from glyphbreak import harness
from glyphbreak.corpus import Label, subsample
from glyphbreak.detector import calibrate
from glyphbreak.errors import InsufficientEligibleWordsError, InsufficientTargetsError
from glyphbreak.homoglyphs import (
    DEFAULT_PAIRS,
    DEFAULT_TABLE,
    HomoglyphPair,
    apply_budgeted,
    compute_quota,
)
from glyphbreak.misspell import (
    MisspellingDictionary,
    Policy,
    apply_misspellings,
    tokenize_words,
)
from glyphbreak.ngram import NgramLanguageModel
from glyphbreak.rng import SplitMix64, derive_seed
from glyphbreak.synthetic import make_desk_world, sample_corpus

ACCEPT_SEED = 12345


@pytest.fixture(scope="module")
def world():
    return make_desk_world(ACCEPT_SEED)


@pytest.fixture(scope="module")
def lm(world):
    return NgramLanguageModel(order=2, smoothing_k=1.0).fit(world.train)


@pytest.fixture(scope="module")
def detector(world, lm):
    return calibrate(lm, 10, world.neural_calibration, world.human_calibration)


@pytest.fixture(scope="module")
def short_corpus(world):
    # Short samples make the budgeted per-pair differences visible and
    # exercise the discard rule for the scarcer consonant targets.
    return sample_corpus(
        world.chain,
        400,
        noise=world.neural_noise,
        seed=derive_seed(ACCEPT_SEED, "short-eval"),
        label=Label.NEURAL,
        min_words=50,
        max_words=70,
        source="<synthetic:short-eval>",
    )


def test_criterion_1_codepoint_exactness():
    """Default table holds exactly the five documented mappings."""
    expected = {
        (0x0061, 0x0430),
        (0x0065, 0x0435),
        (0x0065, 0x00E9),
        (0x0063, 0x0441),
        (0x0070, 0x0440),
    }
    actual = {(ord(p.source), ord(p.replacement)) for p in DEFAULT_PAIRS}
    assert actual == expected
    assert len(DEFAULT_PAIRS) == len(expected)
    assert DEFAULT_TABLE.pairs == DEFAULT_PAIRS


def _random_pair_selection(rng):
    pairs = []
    if rng.randbelow(2):
        pairs.append(HomoglyphPair("a", "а"))
    e_mode = rng.randbelow(3)
    if e_mode == 1:
        pairs.append(HomoglyphPair("e", "е"))
    elif e_mode == 2:
        pairs.append(HomoglyphPair("e", "é"))
    if rng.randbelow(2):
        pairs.append(HomoglyphPair("c", "с"))
    if rng.randbelow(2):
        pairs.append(HomoglyphPair("p", "р"))
    if not pairs:
        pairs.append(HomoglyphPair("e", "е"))
    return tuple(pairs)


def test_criterion_2_budget_property_suite():
    """1,000 randomized budgeted attacks honor quota, bounds, and determinism."""
    rng = SplitMix64(777)
    alphabet = "aaeecp xyzoiu XYZ.!-аеé\n"
    start = time.perf_counter()
    for _ in range(1000):
        n = rng.randbelow(301)
        text = "".join(alphabet[rng.randbelow(len(alphabet))] for _ in range(n))
        pairs = _random_pair_selection(rng)
        fraction = (1 + rng.randbelow(1000)) / 1000
        seed = rng.next_u64()
        sources = {p.source for p in pairs}
        mapping = {p.source: p.replacement for p in pairs}
        quota = compute_quota(len(text), fraction)
        eligible = sum(1 for ch in text if ch in sources)
        try:
            result = apply_budgeted(text, pairs, fraction, seed)
        except InsufficientTargetsError as err:
            assert eligible < quota
            assert (err.eligible_count, err.quota) == (eligible, quota)
            continue
        assert eligible >= quota
        assert result.achieved_count == quota
        assert len(result.replaced_positions) == quota
        assert len(result.text) == len(text)
        replaced = set(result.replaced_positions)
        for i, (old, new) in enumerate(zip(text, result.text)):
            if i in replaced:
                assert new == mapping[old]
            else:
                assert new == old
        assert apply_budgeted(text, pairs, fraction, seed) == result
    assert time.perf_counter() - start < 5.0


def _random_dictionary(rng):
    letters = "bdfghklmnorstuvw"
    reverse = {}
    for _ in range(12 + rng.randbelow(20)):
        word = "".join(letters[rng.randbelow(len(letters))] for _ in range(3 + rng.randbelow(6)))
        variants = set()
        for _ in range(1 + rng.randbelow(3)):
            pos = rng.randbelow(len(word))
            variants.add(word[:pos] + word[pos] + word[pos:])
        reverse[word] = tuple(sorted(variants))
    return MisspellingDictionary(reverse_map=reverse)


def _random_case(rng, word):
    mode = rng.randbelow(4)
    if mode == 0:
        return word.lower()
    if mode == 1:
        return word.upper()
    if mode == 2:
        return word[:1].upper() + word[1:]
    return "".join(
        ch.upper() if rng.randbelow(2) else ch for ch in word
    )


def test_criterion_3_misspelling_property_suite():
    """1,000 randomized misspelling attacks: listed substitutions, stable word
    count, strict errors exactly on quota misses."""
    rng = SplitMix64(888)
    fillers = ["zzz", "qq", "123", "jjjj", "x"]
    start = time.perf_counter()
    for _ in range(1000):
        dictionary = _random_dictionary(rng)
        keys = sorted(dictionary.reverse_map)
        n_words = rng.randbelow(50)
        words = []
        for _ in range(n_words):
            if rng.randbelow(3) < 2:
                words.append(_random_case(rng, keys[rng.randbelow(len(keys))]))
            else:
                words.append(fillers[rng.randbelow(len(fillers))])
        text = " ".join(words)
        fraction = (1 + rng.randbelow(1000)) / 1000
        seed = rng.next_u64()
        policy = Policy.STRICT if rng.randbelow(2) else Policy.BEST_EFFORT
        spans = tokenize_words(text)
        quota = compute_quota(len(spans), fraction)
        eligible = [s for s in spans if dictionary.misspellings_for(s.surface)]
        try:
            result = apply_misspellings(text, dictionary, fraction, seed, policy)
        except InsufficientEligibleWordsError as err:
            assert policy is Policy.STRICT
            assert len(eligible) < quota
            assert (err.eligible_count, err.quota) == (len(eligible), quota)
            continue
        assert result.achieved_count == min(quota, len(eligible))
        before_words = [s.surface for s in spans]
        after_words = [s.surface for s in tokenize_words(result.text)]
        assert len(after_words) == len(before_words)
        replaced_starts = set(result.replaced_positions)
        for span, old, new in zip(spans, before_words, after_words):
            if span.start in replaced_starts:
                listed = dictionary.misspellings_for(old)
                assert new.casefold() in {m.casefold() for m in listed}
            else:
                assert new == old
        assert apply_misspellings(text, dictionary, fraction, seed, policy) == result
    assert time.perf_counter() - start < 5.0


def test_criterion_4_rank_ordering(world, lm):
    """Mean rank: neural held-out < human proxy < attacked neural held-out."""
    report = harness.run_rank_analysis(
        lm, world.neural_eval, world.human_eval, n=50, master_seed=ACCEPT_SEED
    )
    assert report.mean_rank_neural < report.mean_rank_human
    assert report.mean_rank_human < report.mean_rank_attacked_neural


@pytest.fixture(scope="module")
def evasion_reports(world, detector):
    exhaustive = harness.run_exhaustive(
        world.neural_eval, detector, "e,a", master_seed=ACCEPT_SEED, min_evaluated=None
    )
    misspelling = harness.run_misspelling(
        world.neural_eval, detector, world.dictionary, 0.05,
        master_seed=ACCEPT_SEED, min_evaluated=None,
    )
    return exhaustive, misspelling


def test_criterion_5_detector_evasion(evasion_reports):
    """Clean recall >= 0.90; exhaustive e,a recall <= 0.10; 5% misspelling
    drops recall by >= 0.30; homoglyph beats misspelling."""
    exhaustive, misspelling = evasion_reports
    clean_recall = exhaustive.recall_before
    assert clean_recall >= 0.90
    assert exhaustive.recall_after <= 0.10
    assert misspelling.recall_after <= clean_recall - 0.30
    assert exhaustive.recall_after <= misspelling.recall_after


def test_criterion_6_sweep_monotonic_trend(world, detector):
    """Best-fit slope of recall vs. fraction is negative over the default grid."""
    corpus = subsample(world.neural_eval, 250, derive_seed(ACCEPT_SEED, "sweep-sub"))
    report = harness.run_sweep(
        corpus, detector, "e", harness.DEFAULT_SWEEP_FRACTIONS, master_seed=ACCEPT_SEED
    )
    measured = [(p.fraction, p.recall_after) for p in report.points if p.recall_after is not None]
    assert len(measured) == len(harness.DEFAULT_SWEEP_FRACTIONS)
    fractions, recalls = zip(*measured)
    slope = np.polyfit(fractions, recalls, 1)[0]
    assert slope < 0
    assert recalls[-1] <= recalls[0]


def test_criterion_7_vowel_vs_consonant_ordering(short_corpus, detector):
    """Same 1.5% budget: e beats c, and the e,a pair set beats e alone,
    within a 0.05 recall margin."""
    reports = harness.run_pair_comparison(
        short_corpus, detector, ["e", "c", "e,a"], 0.015,
        master_seed=ACCEPT_SEED, min_evaluated=None,
    )
    recall_e, recall_c, recall_ea = (r.recall_after for r in reports)
    assert recall_e <= recall_c + 0.05
    assert recall_ea <= recall_e + 0.05


def test_criterion_8_determinism_end_to_end(world, detector):
    """Same master seed gives byte-identical JSON and CSV reports, at any
    worker count."""
    corpus = subsample(world.neural_eval, 60, derive_seed(ACCEPT_SEED, "det-sub"))

    def run(workers):
        pair = harness.run_pair_comparison(
            corpus, detector, ["e,a"], 0.015,
            master_seed=41, min_evaluated=None, max_workers=workers,
        )[0]
        sweep = harness.run_sweep(
            corpus, detector, "e", [0.005, 0.02, 0.05],
            master_seed=41, max_workers=workers,
        )
        mis = harness.run_misspelling(
            corpus, detector, world.dictionary, 0.05,
            master_seed=41, min_evaluated=None, max_workers=workers,
        )
        return (
            harness.report_to_json_str(pair),
            harness.experiments_csv([pair, mis]),
            harness.report_to_json_str(sweep),
            harness.sweep_csv(sweep),
            harness.report_to_json_str(mis),
        )

    first = run(workers=1)
    second = run(workers=1)
    threaded = run(workers=4)
    assert first == second
    assert first == threaded
