"""Command-line entry point.

Subcommands: ``attack`` (filter: text in, perturbed text out), ``train-lm``,
``calibrate``, ``eval``, ``sweep``, ``transfer``, ``ranks``. Experiment
commands write JSON and CSV reports into an output directory; ``attack``
writes only the perturbed text to stdout so it composes in pipelines.

Exit codes: 0 success, 1 runtime failure, 2 usage error, 3 invalid
configuration. Flags override values from a JSON ``--config`` file; every
randomized command requires an explicit seed (there is no wall-clock
default).
"""

from __future__ import annotations

import argparse
import json
import os
import sys
from pathlib import Path

from . import harness
from .attacks import HomoglyphBudgeted, HomoglyphExhaustive, MisspellingAttack
from .corpus import Label, load_corpus, subsample
from .detector import RankDetector, RemoteDetector, calibrate
from .errors import ConfigError, GlyphbreakError
from .homoglyphs import DEFAULT_TABLE, load_homoglyph_table
from .misspell import Policy, load_misspelling_list
from .ngram import NgramLanguageModel
from .rng import derive_seed

ENV_DETECTOR_URL = "GLYPHBREAK_DETECTOR_URL"

EXIT_OK = 0
EXIT_RUNTIME = 1
EXIT_USAGE = 2
EXIT_CONFIG = 3


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="glyphbreak",
        description="Perturbation attacks on neural-text detectors and an evaluation harness.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", help="JSON config file; flags override its values")
    common.add_argument("--seed", type=int, default=None, help="master seed (required where randomness is used)")

    attack_p = sub.add_parser("attack", parents=[common], help="perturb one text (stdin/file to stdout)")
    attack_p.add_argument("--kind", choices=["homoglyph", "misspell"], default=None)
    attack_p.add_argument("--pairs", default=None, help="comma-separated sources, e.g. 'e,a' or 'e=U+00E9'")
    attack_p.add_argument("--table", default=None, help="homoglyph table file (U+XXXX U+YYYY lines)")
    attack_p.add_argument("--exhaustive", action="store_true", default=None)
    attack_p.add_argument("--fraction", type=float, default=None)
    attack_p.add_argument("--count-letters-only", action="store_true", default=None)
    attack_p.add_argument("--dictionary", default=None, help="misspelling list file")
    attack_p.add_argument("--policy", choices=["strict", "best-effort"], default=None)
    attack_p.add_argument("--input", default="-", help="input text file, '-' for stdin")

    train_p = sub.add_parser("train-lm", parents=[common], help="fit the n-gram model")
    train_p.add_argument("--corpus", default=None, help="training corpus (JSONL)")
    train_p.add_argument("--label", choices=["neural", "human"], default=None)
    train_p.add_argument("--order", type=int, default=None)
    train_p.add_argument("--smoothing-k", type=float, default=None)
    train_p.add_argument("--out", default=None, help="model artifact path")

    cal_p = sub.add_parser("calibrate", parents=[common], help="calibrate the proxy detector")
    cal_p.add_argument("--lm", default=None, help="model artifact from train-lm")
    cal_p.add_argument("--machine-corpus", default=None)
    cal_p.add_argument("--human-corpus", default=None)
    cal_p.add_argument("--k-top", type=int, default=None)
    cal_p.add_argument("--out", default=None, help="detector artifact path")

    def add_detector_flags(p):
        p.add_argument("--detector", choices=["proxy", "remote"], default=None)
        p.add_argument("--detector-artifact", default=None, help="proxy detector artifact")
        p.add_argument("--endpoint", default=None,
                       help=f"remote detector base URL (or ${ENV_DETECTOR_URL})")
        p.add_argument("--max-workers", type=int, default=None)

    def add_attack_flags(p):
        p.add_argument("--kind", choices=["homoglyph", "misspell"], default=None)
        p.add_argument("--table", default=None)
        p.add_argument("--exhaustive", action="store_true", default=None)
        p.add_argument("--fraction", type=float, default=None)
        p.add_argument("--count-letters-only", action="store_true", default=None)
        p.add_argument("--dictionary", default=None)
        p.add_argument("--policy", choices=["strict", "best-effort"], default=None)

    eval_p = sub.add_parser("eval", parents=[common], help="attack a corpus and report recall")
    eval_p.add_argument("--neural-corpus", default=None)
    add_detector_flags(eval_p)
    add_attack_flags(eval_p)
    eval_p.add_argument("--pairs", action="append", default=None,
                        help="pair selection; repeat for a side-by-side comparison")
    eval_p.add_argument("--max-samples", type=int, default=None)
    eval_p.add_argument("--min-evaluated", type=int, default=None)
    eval_p.add_argument("--out-dir", default=None)

    sweep_p = sub.add_parser("sweep", parents=[common], help="recall vs. replacement fraction")
    sweep_p.add_argument("--neural-corpus", default=None)
    add_detector_flags(sweep_p)
    sweep_p.add_argument("--pairs", default=None, help="single pair selection (default 'e')")
    sweep_p.add_argument("--table", default=None)
    sweep_p.add_argument("--fractions", default=None, help="comma-separated ascending fractions")
    sweep_p.add_argument("--count-letters-only", action="store_true", default=None)
    sweep_p.add_argument("--max-samples", type=int, default=None)
    sweep_p.add_argument("--out-dir", default=None)

    transfer_p = sub.add_parser("transfer", parents=[common], help="bucketized before/after verdicts")
    transfer_p.add_argument("--neural-corpus", default=None)
    add_detector_flags(transfer_p)
    add_attack_flags(transfer_p)
    transfer_p.add_argument("--pairs", default=None)
    transfer_p.add_argument("--n", type=int, default=None)
    transfer_p.add_argument("--out-dir", default=None)

    ranks_p = sub.add_parser("ranks", parents=[common], help="mean token ranks: human/neural/attacked")
    ranks_p.add_argument("--lm", default=None)
    ranks_p.add_argument("--neural-corpus", default=None)
    ranks_p.add_argument("--human-corpus", default=None)
    add_attack_flags(ranks_p)
    ranks_p.add_argument("--pairs", default=None)
    ranks_p.add_argument("--n", type=int, default=None)
    ranks_p.add_argument("--out-dir", default=None)

    return parser


class _Settings:
    """Flag values with JSON-config fallback."""

    def __init__(self, args: argparse.Namespace):
        self._args = vars(args)
        self._config = {}
        config_path = self._args.get("config")
        if config_path:
            path = Path(config_path)
            if not path.is_file():
                raise ConfigError(f"config file not found: {path}")
            try:
                loaded = json.loads(path.read_text(encoding="utf-8"))
            except json.JSONDecodeError as exc:
                raise ConfigError(f"config file is not valid JSON: {exc}") from exc
            if not isinstance(loaded, dict):
                raise ConfigError("config file must hold a JSON object")
            self._config = loaded

    def get(self, key: str, default=None):
        value = self._args.get(key)
        if value is None:
            value = self._config.get(key, default)
        return value

    def require(self, key: str, what: str):
        value = self.get(key)
        if value is None:
            raise ConfigError(f"missing required setting '{key}' ({what})")
        return value

    def path(self, key: str, what: str, required: bool = True) -> Path | None:
        value = self.require(key, what) if required else self.get(key)
        if value is None:
            return None
        path = Path(value)
        if not path.is_file():
            raise ConfigError(f"{what} not found: {path}")
        return path

    def seed(self) -> int:
        value = self.require("seed", "master seed; pass --seed or set it in the config")
        if isinstance(value, bool) or not isinstance(value, int):
            raise ConfigError(f"seed must be an integer, got {value!r}")
        return value

    def out_dir(self) -> Path:
        value = self.require("out_dir", "report output directory")
        path = Path(value)
        path.mkdir(parents=True, exist_ok=True)
        return path


def _table(settings: _Settings):
    table_path = settings.path("table", "homoglyph table", required=False)
    return load_homoglyph_table(table_path) if table_path else DEFAULT_TABLE


def _select_pairs(settings: _Settings, spec: str):
    return _table(settings).select(spec)


def _policy(settings: _Settings) -> Policy:
    return Policy(settings.get("policy", "strict"))


def _fraction(settings: _Settings, default: float) -> float:
    value = settings.get("fraction")
    return default if value is None else float(value)


def _build_attack(settings: _Settings, *, seed: int | None, default_pairs: str = "e,a"):
    kind = settings.get("kind", "homoglyph")
    if kind == "misspell":
        dict_path = settings.path("dictionary", "misspelling dictionary")
        dictionary = load_misspelling_list(dict_path)
        return MisspellingAttack(
            dictionary=dictionary,
            fraction=_fraction(settings, 0.05),
            master_seed=seed or 0,
            policy=_policy(settings),
        )
    pairs_value = settings.get("pairs") or default_pairs
    if isinstance(pairs_value, list):
        if len(pairs_value) != 1:
            raise ConfigError("this command takes exactly one --pairs selection")
        pairs_value = pairs_value[0]
    pairs = _select_pairs(settings, pairs_value)
    if settings.get("exhaustive"):
        return HomoglyphExhaustive(pairs=pairs, master_seed=seed or 0)
    return HomoglyphBudgeted(
        pairs=pairs,
        fraction=_fraction(settings, 0.015),
        master_seed=seed or 0,
        count_letters_only=bool(settings.get("count_letters_only", False)),
    )


def _build_detector(settings: _Settings):
    choice = settings.get("detector", "proxy")
    if choice == "remote":
        endpoint = settings.get("endpoint") or os.environ.get(ENV_DETECTOR_URL)
        if not endpoint:
            raise ConfigError(
                f"remote detector needs --endpoint or ${ENV_DETECTOR_URL}"
            )
        return RemoteDetector(endpoint)
    artifact = settings.path("detector_artifact", "proxy detector artifact")
    return RankDetector.load(artifact)


def _max_workers(settings: _Settings) -> int:
    value = settings.get("max_workers")
    if value is not None:
        return int(value)
    return 4 if settings.get("detector") == "remote" else 1


def _load_eval_corpus(settings: _Settings):
    corpus = load_corpus(settings.path("neural_corpus", "neural corpus"), Label.NEURAL)
    max_samples = settings.get("max_samples")
    if max_samples is not None:
        corpus = subsample(corpus, int(max_samples), derive_seed(settings.seed(), "subsample"))
    return corpus


def _write(path: Path, content: str) -> None:
    with open(path, "w", encoding="utf-8", newline="") as fh:
        fh.write(content)


def _cmd_attack(settings: _Settings) -> int:
    source = settings.get("input", "-")
    if source == "-":
        text = sys.stdin.buffer.read().decode("utf-8")
    else:
        path = Path(source)
        if not path.is_file():
            raise ConfigError(f"input file not found: {path}")
        text = path.read_text(encoding="utf-8")
    needs_seed = not (settings.get("kind", "homoglyph") == "homoglyph" and settings.get("exhaustive"))
    seed = settings.seed() if needs_seed else settings.get("seed")
    attack = _build_attack(settings, seed=seed)
    result = attack.apply(text, seed if seed is not None else 0)
    sys.stdout.buffer.write(result.text.encode("utf-8"))
    sys.stdout.buffer.flush()
    print(f"replaced {result.achieved_count} positions", file=sys.stderr)
    return EXIT_OK


def _cmd_train_lm(settings: _Settings) -> int:
    corpus = load_corpus(settings.path("corpus", "training corpus"), Label(settings.get("label", "neural")))
    model = NgramLanguageModel(
        order=int(settings.get("order", 2)),
        smoothing_k=float(settings.get("smoothing_k", 1.0)),
    ).fit(corpus)
    out = Path(settings.require("out", "model artifact path"))
    model.save(out)
    print(f"trained order-{model.order} model, vocabulary {model.vocab_size_}", file=sys.stderr)
    return EXIT_OK


def _cmd_calibrate(settings: _Settings) -> int:
    lm = NgramLanguageModel.load(settings.path("lm", "model artifact"))
    machine = load_corpus(settings.path("machine_corpus", "machine corpus"), Label.NEURAL)
    human = load_corpus(settings.path("human_corpus", "human corpus"), Label.HUMAN)
    detector = calibrate(lm, int(settings.get("k_top", 10)), machine, human)
    out = Path(settings.require("out", "detector artifact path"))
    detector.save(out)
    print(
        f"calibrated detector: threshold {detector.threshold_t_:.4f}, "
        f"balanced accuracy {detector.calibration_balanced_accuracy_:.4f}",
        file=sys.stderr,
    )
    return EXIT_OK


def _cmd_eval(settings: _Settings) -> int:
    seed = settings.seed()
    corpus = _load_eval_corpus(settings)
    detector = _build_detector(settings)
    out_dir = settings.out_dir()
    workers = _max_workers(settings)
    min_evaluated = settings.get("min_evaluated", harness.DEFAULT_MIN_EVALUATED)
    kind = settings.get("kind", "homoglyph")

    if kind == "misspell":
        dictionary = load_misspelling_list(settings.path("dictionary", "misspelling dictionary"))
        report = harness.run_misspelling(
            corpus, detector, dictionary, _fraction(settings, 0.05),
            master_seed=seed, policy=_policy(settings),
            min_evaluated=min_evaluated, max_workers=workers,
        )
        reports = [report]
        names = ["misspelling"]
    elif settings.get("exhaustive"):
        pairs_value = settings.get("pairs") or ["e,a"]
        if isinstance(pairs_value, list):
            if len(pairs_value) != 1:
                raise ConfigError("exhaustive eval takes exactly one --pairs selection")
            pairs_value = pairs_value[0]
        report = harness.run_exhaustive(
            corpus, detector, _select_pairs(settings, pairs_value),
            master_seed=seed, min_evaluated=min_evaluated, max_workers=workers,
        )
        reports = [report]
        names = ["exhaustive"]
    else:
        pairs_value = settings.get("pairs") or ["e,a"]
        if not isinstance(pairs_value, list):
            pairs_value = [pairs_value]
        selections = [_select_pairs(settings, spec) for spec in pairs_value]
        reports = harness.run_pair_comparison(
            corpus, detector, selections, _fraction(settings, 0.015),
            master_seed=seed,
            count_letters_only=bool(settings.get("count_letters_only", False)),
            min_evaluated=min_evaluated, max_workers=workers,
        )
        names = [f"pair-comparison-{i}" for i in range(len(reports))]

    for name, report in zip(names, reports):
        _write(out_dir / f"{name}.json", harness.report_to_json_str(report))
    _write(out_dir / "experiments.csv", harness.experiments_csv(reports))
    for name, report in zip(names, reports):
        print(
            f"{name}: recall {report.recall_before:.4f} -> {report.recall_after:.4f} "
            f"(evaluated {report.evaluated_count}, skipped {report.skipped_count})",
            file=sys.stderr,
        )
    return EXIT_OK


def _cmd_sweep(settings: _Settings) -> int:
    seed = settings.seed()
    corpus = _load_eval_corpus(settings)
    detector = _build_detector(settings)
    out_dir = settings.out_dir()
    fractions_value = settings.get("fractions")
    if fractions_value is None:
        fractions = harness.DEFAULT_SWEEP_FRACTIONS
    elif isinstance(fractions_value, str):
        fractions = tuple(float(f) for f in fractions_value.split(","))
    else:
        fractions = tuple(float(f) for f in fractions_value)
    report = harness.run_sweep(
        corpus, detector, _select_pairs(settings, settings.get("pairs") or "e"),
        fractions, master_seed=seed,
        count_letters_only=bool(settings.get("count_letters_only", False)),
        max_workers=_max_workers(settings),
    )
    _write(out_dir / "sweep.json", harness.report_to_json_str(report))
    _write(out_dir / "sweep.csv", harness.sweep_csv(report))
    print(f"sweep over {len(report.points)} fractions written", file=sys.stderr)
    return EXIT_OK


def _cmd_transfer(settings: _Settings) -> int:
    seed = settings.seed()
    corpus = _load_eval_corpus(settings)
    detector = _build_detector(settings)
    out_dir = settings.out_dir()
    attack = _build_attack(settings, seed=seed)
    report = harness.run_transfer(
        corpus, detector, attack, int(settings.get("n", 20)), master_seed=seed
    )
    _write(out_dir / "transfer.json", harness.report_to_json_str(report))
    _write(out_dir / "transfer.csv", harness.transfer_csv(report))
    print(
        f"transfer buckets written (n={report.n}, unscored {report.unscored_count})",
        file=sys.stderr,
    )
    return EXIT_OK


def _cmd_ranks(settings: _Settings) -> int:
    seed = settings.seed()
    lm = NgramLanguageModel.load(settings.path("lm", "model artifact"))
    neural = load_corpus(settings.path("neural_corpus", "neural corpus"), Label.NEURAL)
    human = load_corpus(settings.path("human_corpus", "human corpus"), Label.HUMAN)
    out_dir = settings.out_dir()
    if settings.get("kind", "homoglyph") == "homoglyph" and not settings.get("fraction"):
        # Unbudgeted e,a substitution unless the user configured otherwise.
        attack = HomoglyphExhaustive(pairs=_select_pairs(settings, settings.get("pairs") or "e,a"))
    else:
        attack = _build_attack(settings, seed=seed)
    report = harness.run_rank_analysis(
        lm, neural, human, attack, int(settings.get("n", 50)), master_seed=seed
    )
    _write(out_dir / "ranks.json", harness.report_to_json_str(report))
    _write(out_dir / "ranks.csv", harness.ranks_csv(report))
    print(
        f"mean ranks: neural {report.mean_rank_neural:.2f}, "
        f"human {report.mean_rank_human:.2f}, "
        f"attacked {report.mean_rank_attacked_neural:.2f}",
        file=sys.stderr,
    )
    return EXIT_OK


_COMMANDS = {
    "attack": _cmd_attack,
    "train-lm": _cmd_train_lm,
    "calibrate": _cmd_calibrate,
    "eval": _cmd_eval,
    "sweep": _cmd_sweep,
    "transfer": _cmd_transfer,
    "ranks": _cmd_ranks,
}


def dispatch(argv: list[str]) -> int:
    """Parse arguments and run one subcommand, returning the exit status."""
    parser = _build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return exc.code if isinstance(exc.code, int) else EXIT_USAGE
    try:
        settings = _Settings(args)
        return _COMMANDS[args.command](settings)
    except ConfigError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except (ValueError, TypeError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except GlyphbreakError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_RUNTIME
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_RUNTIME


def main(argv: list[str] | None = None) -> int:
    return dispatch(sys.argv[1:] if argv is None else argv)


if __name__ == "__main__":
    sys.exit(main())
