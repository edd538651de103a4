"""Experiment harness: attack a corpus, score it, and emit reproducible reports.

Every per-sample random decision is seeded by hash(master_seed, sample id),
so reports are identical across runs, evaluation orders, and worker counts.
Samples that cannot meet an attack quota are skipped and excluded from the
recall denominator; reports carry the skipped count so the bias stays
visible. Reports serialize to JSON (full per-sample detail) and CSV
(aggregate rows with stable columns).
"""

from __future__ import annotations

import csv
import io
import json
import warnings
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import Callable, Sequence

from .attacks import Attack, HomoglyphBudgeted, HomoglyphExhaustive, MisspellingAttack, PairsSpec, pairs_echo, resolve_pairs
from .corpus import Corpus, TextSample, subsample
from .detector import Bucket, Detector, DetectorVerdict, VerdictLabel, bucketize
from .errors import (
    ChecksumMismatchError,
    EmptyExperimentError,
    InsufficientEligibleWordsError,
    InsufficientTargetsError,
    ProtocolError,
    TransportError,
)
from .misspell import MisspellingDictionary, Policy
from .ngram import NgramLanguageModel
from .rng import derive_seed
from .validation import check_positive_int, check_seed

# Fraction grid for the replacement-rate sweep.
DEFAULT_SWEEP_FRACTIONS: tuple[float, ...] = (
    0.0025, 0.005, 0.0075, 0.01, 0.015, 0.02, 0.03, 0.04, 0.05,
)

# Attacks below this many evaluated samples get a warning, not a failure.
DEFAULT_MIN_EVALUATED = 2500

_SKIP_ERRORS = (InsufficientTargetsError, InsufficientEligibleWordsError)
_REMOTE_ERRORS = (TransportError, ProtocolError, ChecksumMismatchError)


@dataclass(frozen=True)
class SampleRecord:
    sample_id: int
    skipped: bool
    skip_reason: str | None
    prob_before: float
    prob_after: float | None
    achieved_count: int | None

    @property
    def label_before(self) -> VerdictLabel:
        return DetectorVerdict(self.prob_before).label

    @property
    def label_after(self) -> VerdictLabel | None:
        if self.prob_after is None:
            return None
        return DetectorVerdict(self.prob_after).label

    def to_json_dict(self) -> dict:
        return {
            "id": self.sample_id,
            "skipped": self.skipped,
            "skip_reason": self.skip_reason,
            "verdict_before": {
                "prob_machine": self.prob_before,
                "label": self.label_before.value,
            },
            "verdict_after": None
            if self.prob_after is None
            else {"prob_machine": self.prob_after, "label": self.label_after.value},
            "achieved_count": self.achieved_count,
        }


@dataclass(frozen=True)
class ExperimentReport:
    experiment: str
    records: tuple[SampleRecord, ...]
    evaluated_count: int
    skipped_count: int
    recall_before: float
    recall_after: float
    avg_confidence_human_before: float
    avg_confidence_human_after: float
    config: dict

    def to_json_dict(self) -> dict:
        return {
            "experiment": self.experiment,
            "config": self.config,
            "aggregates": {
                "evaluated_count": self.evaluated_count,
                "skipped_count": self.skipped_count,
                "recall_before": self.recall_before,
                "recall_after": self.recall_after,
                "avg_confidence_human_before": self.avg_confidence_human_before,
                "avg_confidence_human_after": self.avg_confidence_human_after,
            },
            "records": [r.to_json_dict() for r in self.records],
        }


@dataclass(frozen=True)
class SweepPoint:
    fraction: float
    recall_after: float | None  # None marks a gap (every sample skipped)
    evaluated_count: int
    skipped_count: int


@dataclass(frozen=True)
class SweepReport:
    experiment: str
    points: tuple[SweepPoint, ...]
    config: dict

    def __post_init__(self):
        fractions = [p.fraction for p in self.points]
        if sorted(set(fractions)) != fractions:
            raise ValueError("sweep fractions must be strictly increasing")

    def to_json_dict(self) -> dict:
        return {
            "experiment": self.experiment,
            "config": self.config,
            "points": [
                {
                    "fraction": p.fraction,
                    "recall_after": p.recall_after,
                    "evaluated_count": p.evaluated_count,
                    "skipped_count": p.skipped_count,
                }
                for p in self.points
            ],
        }


@dataclass(frozen=True)
class TransferRecord:
    sample_id: int
    prob_before: float | None
    prob_after: float | None
    bucket_before: Bucket | None
    bucket_after: Bucket | None
    unscored_reason: str | None

    @property
    def scored(self) -> bool:
        return self.unscored_reason is None

    def to_json_dict(self) -> dict:
        return {
            "id": self.sample_id,
            "prob_before": self.prob_before,
            "prob_after": self.prob_after,
            "bucket_before": self.bucket_before.value if self.bucket_before else None,
            "bucket_after": self.bucket_after.value if self.bucket_after else None,
            "unscored_reason": self.unscored_reason,
        }


@dataclass(frozen=True)
class BucketReport:
    experiment: str
    records: tuple[TransferRecord, ...]
    before_counts: dict[Bucket, int]
    after_counts: dict[Bucket, int]
    n: int
    unscored_count: int
    config: dict

    @property
    def sample_ids(self) -> tuple[int, ...]:
        return tuple(r.sample_id for r in self.records)

    def to_json_dict(self) -> dict:
        return {
            "experiment": self.experiment,
            "config": self.config,
            "aggregates": {
                "n": self.n,
                "unscored_count": self.unscored_count,
                "before_counts": {b.value: c for b, c in self.before_counts.items()},
                "after_counts": {b.value: c for b, c in self.after_counts.items()},
            },
            "records": [r.to_json_dict() for r in self.records],
        }


@dataclass(frozen=True)
class RankReport:
    experiment: str
    mean_rank_neural: float
    mean_rank_human: float
    mean_rank_attacked_neural: float
    token_count_neural: int
    token_count_human: int
    token_count_attacked: int
    n: int
    skipped_attack_ids: tuple[int, ...]
    config: dict

    def to_json_dict(self) -> dict:
        return {
            "experiment": self.experiment,
            "config": self.config,
            "aggregates": {
                "mean_rank_neural": self.mean_rank_neural,
                "mean_rank_human": self.mean_rank_human,
                "mean_rank_attacked_neural": self.mean_rank_attacked_neural,
                "token_count_neural": self.token_count_neural,
                "token_count_human": self.token_count_human,
                "token_count_attacked": self.token_count_attacked,
                "n": self.n,
                "skipped_attack_ids": list(self.skipped_attack_ids),
            },
        }


def _describe_detector(detector: Detector) -> dict:
    if hasattr(detector, "describe"):
        return detector.describe()
    return {"type": type(detector).__name__}


def _describe_corpus(corpus: Corpus) -> dict:
    return {"source": corpus.source, "size": len(corpus), "label": corpus.label.value}


def _evaluate(
    corpus: Corpus,
    detector: Detector,
    attack_one: Callable[[TextSample], tuple[str | None, str | None, int | None]],
    max_workers: int,
) -> list[SampleRecord]:
    """Attack and score every sample; order of results follows corpus order.

    ``attack_one`` returns (perturbed_text, skip_reason, achieved_count)
    with perturbed_text None when the sample is skipped.
    """

    def work(sample: TextSample) -> SampleRecord:
        before = detector.classify(sample.text)
        perturbed, skip_reason, achieved = attack_one(sample)
        if perturbed is None:
            return SampleRecord(
                sample_id=sample.id,
                skipped=True,
                skip_reason=skip_reason,
                prob_before=before.prob_machine,
                prob_after=None,
                achieved_count=None,
            )
        after = detector.classify(perturbed)
        return SampleRecord(
            sample_id=sample.id,
            skipped=False,
            skip_reason=None,
            prob_before=before.prob_machine,
            prob_after=after.prob_machine,
            achieved_count=achieved,
        )

    if max_workers <= 1:
        return [work(s) for s in corpus]
    with ThreadPoolExecutor(max_workers=max_workers) as pool:
        return list(pool.map(work, corpus.samples))


def _aggregate(
    experiment: str,
    records: Sequence[SampleRecord],
    config: dict,
    min_evaluated: int | None,
) -> ExperimentReport:
    evaluated = [r for r in records if not r.skipped]
    skipped = len(records) - len(evaluated)
    if not evaluated:
        raise EmptyExperimentError(
            f"every sample was skipped in experiment {experiment!r} "
            f"(config {json.dumps(config, sort_keys=True, ensure_ascii=False)})"
        )
    if min_evaluated is not None and len(evaluated) < min_evaluated:
        warnings.warn(
            f"experiment {experiment!r} evaluated only {len(evaluated)} samples "
            f"(minimum {min_evaluated})",
            stacklevel=3,
        )
    n = len(evaluated)
    recall_before = sum(1 for r in evaluated if r.label_before is VerdictLabel.MACHINE) / n
    recall_after = sum(1 for r in evaluated if r.label_after is VerdictLabel.MACHINE) / n
    conf_before = sum(1.0 - r.prob_before for r in evaluated) / n
    conf_after = sum(1.0 - r.prob_after for r in evaluated) / n
    return ExperimentReport(
        experiment=experiment,
        records=tuple(records),
        evaluated_count=n,
        skipped_count=skipped,
        recall_before=recall_before,
        recall_after=recall_after,
        avg_confidence_human_before=conf_before,
        avg_confidence_human_after=conf_after,
        config=config,
    )


def _run_attack_experiment(
    experiment: str,
    corpus: Corpus,
    detector: Detector,
    attack: Attack,
    master_seed: int,
    min_evaluated: int | None,
    max_workers: int,
) -> ExperimentReport:
    check_seed(master_seed, "master_seed")

    def attack_one(sample: TextSample):
        try:
            result = attack.apply(sample.text, derive_seed(master_seed, sample.id))
        except _SKIP_ERRORS as exc:
            return None, type(exc).__name__.removesuffix("Error"), None
        return result.text, None, result.achieved_count

    records = _evaluate(corpus, detector, attack_one, max_workers)
    config = {
        "experiment": experiment,
        "attack": attack.config_echo(),
        "master_seed": master_seed,
        "corpus": _describe_corpus(corpus),
        "detector": _describe_detector(detector),
    }
    return _aggregate(experiment, records, config, min_evaluated)


def run_pair_comparison(
    corpus: Corpus,
    detector: Detector,
    pair_configs: Sequence[PairsSpec],
    fraction: float = 0.015,
    *,
    master_seed: int,
    count_letters_only: bool = False,
    min_evaluated: int | None = DEFAULT_MIN_EVALUATED,
    max_workers: int = 1,
) -> list[ExperimentReport]:
    """Budgeted homoglyph attack once per pair set, for side-by-side recall."""
    if not pair_configs:
        raise ValueError("pair_configs must be nonempty")
    reports = []
    for spec in pair_configs:
        attack = HomoglyphBudgeted(
            pairs=resolve_pairs(spec),
            fraction=fraction,
            master_seed=master_seed,
            count_letters_only=count_letters_only,
        )
        reports.append(
            _run_attack_experiment(
                "pair-comparison", corpus, detector, attack,
                master_seed, min_evaluated, max_workers,
            )
        )
    return reports


def run_exhaustive(
    corpus: Corpus,
    detector: Detector,
    pairs: PairsSpec,
    *,
    master_seed: int = 0,
    min_evaluated: int | None = DEFAULT_MIN_EVALUATED,
    max_workers: int = 1,
) -> ExperimentReport:
    """Unbudgeted attack: every occurrence of the source characters replaced."""
    attack = HomoglyphExhaustive(pairs=resolve_pairs(pairs), master_seed=master_seed)
    return _run_attack_experiment(
        "exhaustive", corpus, detector, attack, master_seed, min_evaluated, max_workers
    )


def run_misspelling(
    corpus: Corpus,
    detector: Detector,
    dictionary: MisspellingDictionary,
    fraction: float = 0.05,
    *,
    master_seed: int,
    policy: Policy = Policy.STRICT,
    min_evaluated: int | None = DEFAULT_MIN_EVALUATED,
    max_workers: int = 1,
) -> ExperimentReport:
    attack = MisspellingAttack(
        dictionary=dictionary, fraction=fraction, master_seed=master_seed, policy=policy
    )
    return _run_attack_experiment(
        "misspelling", corpus, detector, attack, master_seed, min_evaluated, max_workers
    )


def run_sweep(
    corpus: Corpus,
    detector: Detector,
    pair: PairsSpec,
    fractions: Sequence[float] = DEFAULT_SWEEP_FRACTIONS,
    *,
    master_seed: int,
    count_letters_only: bool = False,
    max_workers: int = 1,
) -> SweepReport:
    """Recall as a function of the maximum replacement fraction.

    A fraction where every sample is skipped becomes a gap point
    (recall_after None) rather than an error.
    """
    fracs = [float(f) for f in fractions]
    if sorted(set(fracs)) != fracs:
        raise ValueError("fractions must be strictly increasing")
    pairs = resolve_pairs(pair)
    points = []
    for fraction in fracs:
        attack = HomoglyphBudgeted(
            pairs=pairs, fraction=fraction, master_seed=master_seed,
            count_letters_only=count_letters_only,
        )
        try:
            report = _run_attack_experiment(
                "sweep-point", corpus, detector, attack, master_seed, None, max_workers
            )
        except EmptyExperimentError:
            points.append(
                SweepPoint(
                    fraction=fraction,
                    recall_after=None,
                    evaluated_count=0,
                    skipped_count=len(corpus),
                )
            )
            continue
        points.append(
            SweepPoint(
                fraction=fraction,
                recall_after=report.recall_after,
                evaluated_count=report.evaluated_count,
                skipped_count=report.skipped_count,
            )
        )
    config = {
        "experiment": "sweep",
        "pairs": pairs_echo(pairs),
        "fractions": fracs,
        "count_letters_only": count_letters_only,
        "master_seed": master_seed,
        "corpus": _describe_corpus(corpus),
        "detector": _describe_detector(detector),
    }
    return SweepReport(experiment="sweep", points=tuple(points), config=config)


def run_transfer(
    corpus: Corpus,
    detector: Detector,
    attack: Attack,
    n: int = 20,
    *,
    master_seed: int,
) -> BucketReport:
    """Bucketized verdicts before/after an attack on a random n-subsample.

    Remote transport failures and attack-quota skips mark a sample unscored;
    bucket counts cover only scored samples.
    """
    check_positive_int(n, "n")
    sub = subsample(corpus, n, derive_seed(master_seed, "transfer-subsample"))
    records = []
    for sample in sub:
        prob_before = prob_after = None
        bucket_before = bucket_after = None
        reason = None
        try:
            before = detector.classify(sample.text)
            prob_before = before.prob_machine
            bucket_before = bucketize(before)
            perturbed = attack.apply(sample.text, derive_seed(master_seed, sample.id))
            after = detector.classify(perturbed.text)
            prob_after = after.prob_machine
            bucket_after = bucketize(after)
        except _SKIP_ERRORS as exc:
            reason = type(exc).__name__.removesuffix("Error")
            bucket_before = None  # unscored samples contribute to no counts
        except _REMOTE_ERRORS as exc:
            reason = f"{type(exc).__name__.removesuffix('Error')}: {exc}"
            bucket_before = None
        records.append(
            TransferRecord(
                sample_id=sample.id,
                prob_before=prob_before if reason is None else None,
                prob_after=prob_after if reason is None else None,
                bucket_before=bucket_before,
                bucket_after=bucket_after if reason is None else None,
                unscored_reason=reason,
            )
        )
    before_counts = {b: 0 for b in Bucket}
    after_counts = {b: 0 for b in Bucket}
    for record in records:
        if record.scored:
            before_counts[record.bucket_before] += 1
            after_counts[record.bucket_after] += 1
    config = {
        "experiment": "transfer",
        "attack": attack.config_echo(),
        "n": n,
        "master_seed": master_seed,
        "corpus": _describe_corpus(corpus),
        "detector": _describe_detector(detector),
    }
    return BucketReport(
        experiment="transfer",
        records=tuple(records),
        before_counts=before_counts,
        after_counts=after_counts,
        n=n,
        unscored_count=sum(1 for r in records if not r.scored),
        config=config,
    )


def run_rank_analysis(
    lm: NgramLanguageModel,
    neural_corpus: Corpus,
    human_corpus: Corpus,
    attack: Attack | None = None,
    n: int = 50,
    *,
    master_seed: int,
) -> RankReport:
    """Mean token rank for human, neural, and attacked-neural subsamples.

    The default attack replaces every ``e`` and ``a`` with their lookalikes
    (no budget), the configuration that shifts neural text furthest from the
    scoring model's expectations.
    """
    check_positive_int(n, "n")
    if attack is None:
        attack = HomoglyphExhaustive(pairs="e,a")
    neural_sub = subsample(neural_corpus, n, derive_seed(master_seed, "ranks-neural"))
    human_sub = subsample(human_corpus, n, derive_seed(master_seed, "ranks-human"))

    attacked_texts = []
    skipped_ids = []
    for sample in neural_sub:
        try:
            attacked_texts.append(
                attack.apply(sample.text, derive_seed(master_seed, sample.id)).text
            )
        except _SKIP_ERRORS:
            skipped_ids.append(sample.id)

    def pooled(texts: list[str]) -> tuple[float, int]:
        total = 0
        count = 0
        for text in texts:
            seq = lm.token_ranks(text)
            total += sum(seq.ranks)
            count += seq.token_count
        return total / count, count

    mean_neural, tokens_neural = pooled(neural_sub.texts())
    mean_human, tokens_human = pooled(human_sub.texts())
    mean_attacked, tokens_attacked = pooled(attacked_texts)
    config = {
        "experiment": "rank-analysis",
        "attack": attack.config_echo(),
        "n": n,
        "master_seed": master_seed,
        "neural_corpus": _describe_corpus(neural_corpus),
        "human_corpus": _describe_corpus(human_corpus),
        "lm": {"order": lm.order, "smoothing_k": lm.smoothing_k, "vocab_size": lm.vocab_size_},
    }
    return RankReport(
        experiment="rank-analysis",
        mean_rank_neural=mean_neural,
        mean_rank_human=mean_human,
        mean_rank_attacked_neural=mean_attacked,
        token_count_neural=tokens_neural,
        token_count_human=tokens_human,
        token_count_attacked=tokens_attacked,
        n=n,
        skipped_attack_ids=tuple(skipped_ids),
        config=config,
    )


# -- serialization ----------------------------------------------------------

EXPERIMENT_CSV_COLUMNS = [
    "experiment", "attack_kind", "pairs", "fraction", "policy", "master_seed",
    "corpus_source", "corpus_size", "evaluated_count", "skipped_count",
    "recall_before", "recall_after",
    "avg_confidence_human_before", "avg_confidence_human_after",
]

SWEEP_CSV_COLUMNS = [
    "experiment", "pairs", "master_seed", "fraction",
    "recall_after", "evaluated_count", "skipped_count",
]

TRANSFER_CSV_COLUMNS = [
    "experiment", "attack_kind", "pairs", "fraction", "master_seed", "n",
    "unscored_count",
    "machine_pp_before", "machine_p_before", "human_p_before", "human_pp_before",
    "machine_pp_after", "machine_p_after", "human_p_after", "human_pp_after",
]

RANKS_CSV_COLUMNS = [
    "experiment", "attack_kind", "pairs", "master_seed", "n",
    "mean_rank_neural", "mean_rank_human", "mean_rank_attacked_neural",
]


def report_to_json_str(report) -> str:
    """Canonical JSON rendering: sorted keys, UTF-8 text, trailing newline."""
    return json.dumps(report.to_json_dict(), indent=2, sort_keys=True, ensure_ascii=False) + "\n"


def _csv_str(columns: list[str], rows: list[dict]) -> str:
    buf = io.StringIO()
    writer = csv.DictWriter(buf, fieldnames=columns, lineterminator="\n")
    writer.writeheader()
    for row in rows:
        writer.writerow({k: _csv_value(row.get(k)) for k in columns})
    return buf.getvalue()


def _csv_value(value):
    if value is None:
        return ""
    if isinstance(value, float):
        return repr(value)
    return value


def _experiment_csv_row(report: ExperimentReport) -> dict:
    attack = report.config.get("attack", {})
    return {
        "experiment": report.experiment,
        "attack_kind": attack.get("kind", ""),
        "pairs": attack.get("pairs", ""),
        "fraction": attack.get("fraction"),
        "policy": attack.get("policy", ""),
        "master_seed": report.config.get("master_seed"),
        "corpus_source": report.config.get("corpus", {}).get("source", ""),
        "corpus_size": report.config.get("corpus", {}).get("size"),
        "evaluated_count": report.evaluated_count,
        "skipped_count": report.skipped_count,
        "recall_before": report.recall_before,
        "recall_after": report.recall_after,
        "avg_confidence_human_before": report.avg_confidence_human_before,
        "avg_confidence_human_after": report.avg_confidence_human_after,
    }


def experiments_csv(reports: Sequence[ExperimentReport]) -> str:
    """One aggregate row per configuration (the side-by-side comparison table)."""
    return _csv_str(EXPERIMENT_CSV_COLUMNS, [_experiment_csv_row(r) for r in reports])


def sweep_csv(report: SweepReport) -> str:
    """One row per fraction; plots directly as recall vs. replacement rate."""
    rows = [
        {
            "experiment": report.experiment,
            "pairs": report.config.get("pairs", ""),
            "master_seed": report.config.get("master_seed"),
            "fraction": p.fraction,
            "recall_after": p.recall_after,
            "evaluated_count": p.evaluated_count,
            "skipped_count": p.skipped_count,
        }
        for p in report.points
    ]
    return _csv_str(SWEEP_CSV_COLUMNS, rows)


def transfer_csv(report: BucketReport) -> str:
    attack = report.config.get("attack", {})
    row = {
        "experiment": report.experiment,
        "attack_kind": attack.get("kind", ""),
        "pairs": attack.get("pairs", ""),
        "fraction": attack.get("fraction"),
        "master_seed": report.config.get("master_seed"),
        "n": report.n,
        "unscored_count": report.unscored_count,
        "machine_pp_before": report.before_counts[Bucket.MACHINE_PP],
        "machine_p_before": report.before_counts[Bucket.MACHINE_P],
        "human_p_before": report.before_counts[Bucket.HUMAN_P],
        "human_pp_before": report.before_counts[Bucket.HUMAN_PP],
        "machine_pp_after": report.after_counts[Bucket.MACHINE_PP],
        "machine_p_after": report.after_counts[Bucket.MACHINE_P],
        "human_p_after": report.after_counts[Bucket.HUMAN_P],
        "human_pp_after": report.after_counts[Bucket.HUMAN_PP],
    }
    return _csv_str(TRANSFER_CSV_COLUMNS, [row])


def ranks_csv(report: RankReport) -> str:
    attack = report.config.get("attack", {})
    row = {
        "experiment": report.experiment,
        "attack_kind": attack.get("kind", ""),
        "pairs": attack.get("pairs", ""),
        "master_seed": report.config.get("master_seed"),
        "n": report.n,
        "mean_rank_neural": report.mean_rank_neural,
        "mean_rank_human": report.mean_rank_human,
        "mean_rank_attacked_neural": report.mean_rank_attacked_neural,
    }
    return _csv_str(RANKS_CSV_COLUMNS, [row])
