"""glyphbreak: black-box perturbation attacks on neural-text detectors.

Two attack families (homoglyph substitution and human-like misspelling), a
rank-based proxy detector backed by a word n-gram model, a client for remote
detectors behind a byte-exact wire protocol, and a harness that measures how
far each attack pushes detector recall.
"""

from .attacks import HomoglyphBudgeted, HomoglyphExhaustive, MisspellingAttack
from .corpus import Corpus, Label, TextSample, corpus_from_texts, load_corpus, save_corpus, subsample
from .detector import (
    Bucket,
    DetectorVerdict,
    RankDetector,
    RemoteDetector,
    VerdictLabel,
    bucketize,
    calibrate,
    classify,
    fraction_topk,
    remote_classify,
)
from .harness import (
    BucketReport,
    ExperimentReport,
    RankReport,
    SweepReport,
    run_exhaustive,
    run_misspelling,
    run_pair_comparison,
    run_rank_analysis,
    run_sweep,
    run_transfer,
)
from .homoglyphs import (
    DEFAULT_TABLE,
    HomoglyphPair,
    HomoglyphTable,
    PerturbedText,
    apply_budgeted,
    apply_exhaustive,
    compute_quota,
    load_homoglyph_table,
    parse_homoglyph_table,
)
from .misspell import (
    MisspellingDictionary,
    Policy,
    WordSpan,
    apply_misspellings,
    load_misspelling_list,
    parse_misspelling_list,
    tokenize_words,
)
from .ngram import NgramLanguageModel, RankSequence, train_ngram

__version__ = "0.1.0"

__all__ = [
    "Bucket",
    "BucketReport",
    "Corpus",
    "DEFAULT_TABLE",
    "DetectorVerdict",
    "ExperimentReport",
    "HomoglyphBudgeted",
    "HomoglyphExhaustive",
    "HomoglyphPair",
    "HomoglyphTable",
    "Label",
    "MisspellingAttack",
    "MisspellingDictionary",
    "NgramLanguageModel",
    "PerturbedText",
    "Policy",
    "RankDetector",
    "RankReport",
    "RankSequence",
    "RemoteDetector",
    "SweepReport",
    "TextSample",
    "VerdictLabel",
    "WordSpan",
    "apply_budgeted",
    "apply_exhaustive",
    "apply_misspellings",
    "bucketize",
    "calibrate",
    "classify",
    "compute_quota",
    "corpus_from_texts",
    "fraction_topk",
    "load_corpus",
    "load_homoglyph_table",
    "load_misspelling_list",
    "parse_homoglyph_table",
    "parse_misspelling_list",
    "remote_classify",
    "run_exhaustive",
    "run_misspelling",
    "run_pair_comparison",
    "run_rank_analysis",
    "run_sweep",
    "run_transfer",
    "save_corpus",
    "subsample",
    "tokenize_words",
    "train_ngram",
]
