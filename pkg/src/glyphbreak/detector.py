"""Black-box detector interface: a calibrated rank-based proxy and an HTTP client.

The proxy collapses a text's token ranks into one feature, the fraction of
tokens ranked in the model's top k, then maps it through a calibrated
logistic to a machine probability. The remote client speaks a fixed wire
protocol and verifies, via an echoed checksum, that the service scored the
exact bytes it was sent (substitution attacks die silently if a transport
normalizes them).
"""

from __future__ import annotations

import enum
import hashlib
import json
import math
from dataclasses import dataclass
from pathlib import Path
from typing import Iterable, Protocol, Sequence

import numpy as np
import requests
from sklearn.base import BaseEstimator, ClassifierMixin
from sklearn.exceptions import NotFittedError

from .corpus import Corpus, Label
from .errors import (
    ChecksumMismatchError,
    DegenerateCalibrationError,
    ProtocolError,
    TransportError,
)
from .ngram import NgramLanguageModel
from .validation import check_positive_int, check_texts

_DETECTOR_FORMAT = "glyphbreak-detector"
_DETECTOR_VERSION = 1

# Logistic steepness: the nearer class mean lands at probability 0.95 / 0.05.
_SLOPE_LOGIT = math.log(19.0)
_MIN_MARGIN = 1e-3


class VerdictLabel(enum.Enum):
    MACHINE = "machine"
    HUMAN = "human"


@dataclass(frozen=True)
class DetectorVerdict:
    prob_machine: float

    def __post_init__(self):
        if not 0.0 <= self.prob_machine <= 1.0:
            raise ValueError(f"prob_machine must be in [0, 1], got {self.prob_machine}")

    @property
    def label(self) -> VerdictLabel:
        # Ties classify as machine, so recall measurements are conservative.
        return VerdictLabel.MACHINE if self.prob_machine >= 0.5 else VerdictLabel.HUMAN


class Bucket(enum.Enum):
    """Four-way confidence verdict mirroring the GROVER demo's phrasing."""

    MACHINE_PP = "machine++"
    MACHINE_P = "machine+"
    HUMAN_P = "human+"
    HUMAN_PP = "human++"


def bucketize(verdict: DetectorVerdict) -> Bucket:
    """Partition [0, 1] at 0.9 / 0.5 / 0.1 (artifact conventions, documented)."""
    p = verdict.prob_machine
    if p >= 0.9:
        return Bucket.MACHINE_PP
    if p >= 0.5:
        return Bucket.MACHINE_P
    if p > 0.1:
        return Bucket.HUMAN_P
    return Bucket.HUMAN_PP


class Detector(Protocol):
    """Anything that turns a text into a verdict."""

    def classify(self, text: str) -> DetectorVerdict: ...


def fraction_topk(lm: NgramLanguageModel, text: str, k_top: int) -> float:
    """Share of tokens ranked <= k_top; 0.0 for token-free text."""
    check_positive_int(k_top, "k_top")
    seq = lm.token_ranks(text)
    if seq.token_count == 0:
        return 0.0
    return sum(1 for r in seq.ranks if r <= k_top) / seq.token_count


def _normalize_target(value) -> int:
    if isinstance(value, Label):
        return 1 if value is Label.NEURAL else 0
    if isinstance(value, VerdictLabel):
        return 1 if value is VerdictLabel.MACHINE else 0
    if isinstance(value, str):
        lowered = value.lower()
        if lowered in ("machine", "neural", "1"):
            return 1
        if lowered in ("human", "0"):
            return 0
        raise ValueError(f"unrecognized class label {value!r}")
    if value in (0, 1):
        return int(value)
    raise ValueError(f"unrecognized class label {value!r}")


class RankDetector(ClassifierMixin, BaseEstimator):
    """Proxy detector: thresholded, logistic-calibrated top-k rank fraction.

    Calibration scans every midpoint of the sorted observed feature values
    and keeps the lowest threshold maximizing balanced accuracy of the rule
    "feature >= t means machine". The logistic map is then anchored so the
    threshold sits at probability 0.5 and the nearer class mean at 0.95/0.05,
    which makes the probability monotone in the feature by construction.
    """

    def __init__(self, lm: NgramLanguageModel | None = None, k_top: int = 10):
        self.lm = lm
        self.k_top = k_top

    # -- sklearn surface ---------------------------------------------------

    def fit(self, X: Iterable[str], y: Sequence) -> "RankDetector":
        """Calibrate on texts ``X`` with machine/human targets ``y``."""
        if self.lm is None:
            raise ValueError("RankDetector requires a fitted language model")
        check_positive_int(self.k_top, "k_top")
        texts = check_texts(X)
        targets = [_normalize_target(v) for v in y]
        if len(texts) != len(targets):
            raise ValueError("X and y length mismatch")
        machine = [self._feature(t) for t, c in zip(texts, targets) if c == 1]
        human = [self._feature(t) for t, c in zip(texts, targets) if c == 0]
        if not machine or not human:
            raise ValueError("calibration needs at least one sample of each class")

        observed = sorted(set(machine) | set(human))
        if len(observed) < 2:
            raise DegenerateCalibrationError(
                "all calibration features are identical; classes are inseparable"
            )
        candidates = [
            (observed[i] + observed[i + 1]) / 2.0 for i in range(len(observed) - 1)
        ]
        best_t = None
        best_score = -1.0
        for t in candidates:
            tpr = sum(1 for f in machine if f >= t) / len(machine)
            tnr = sum(1 for f in human if f < t) / len(human)
            score = (tpr + tnr) / 2.0
            if score > best_score:
                best_score = score
                best_t = t

        mean_m = sum(machine) / len(machine)
        mean_h = sum(human) / len(human)
        margin = min(abs(mean_m - best_t), abs(mean_h - best_t))
        slope = _SLOPE_LOGIT / max(margin, _MIN_MARGIN)

        self.classes_ = np.array([0, 1])
        self.threshold_t_ = float(best_t)
        self.slope_ = float(slope)
        self.intercept_ = float(-slope * best_t)
        self.calibration_balanced_accuracy_ = float(best_score)
        return self

    def _check_fitted(self):
        if not hasattr(self, "threshold_t_"):
            raise NotFittedError("detector is not calibrated")

    def _feature(self, text: str) -> float:
        return fraction_topk(self.lm, text, self.k_top)

    def prob_machine_from_feature(self, feature: float) -> float:
        """Calibrated logistic map; exactly 0.5 at the decision threshold."""
        self._check_fitted()
        z = self.slope_ * feature + self.intercept_
        if z >= 0:
            return 1.0 / (1.0 + math.exp(-z))
        e = math.exp(z)
        return e / (1.0 + e)

    def classify(self, text: str) -> DetectorVerdict:
        self._check_fitted()
        return DetectorVerdict(prob_machine=self.prob_machine_from_feature(self._feature(text)))

    def predict_proba(self, X: Iterable[str]) -> np.ndarray:
        self._check_fitted()
        probs = [self.prob_machine_from_feature(self._feature(t)) for t in check_texts(X)]
        return np.array([[1.0 - p, p] for p in probs])

    def predict(self, X: Iterable[str]) -> np.ndarray:
        return (self.predict_proba(X)[:, 1] >= 0.5).astype(int)

    # -- persistence -------------------------------------------------------

    def to_payload(self) -> dict:
        self._check_fitted()
        return {
            "format": _DETECTOR_FORMAT,
            "version": _DETECTOR_VERSION,
            "k_top": self.k_top,
            "threshold_t": self.threshold_t_,
            "slope": self.slope_,
            "intercept": self.intercept_,
            "calibration_balanced_accuracy": self.calibration_balanced_accuracy_,
            "lm": self.lm.to_payload(),
        }

    @classmethod
    def from_payload(cls, payload: dict) -> "RankDetector":
        if payload.get("format") != _DETECTOR_FORMAT:
            raise ValueError(f"not a {_DETECTOR_FORMAT} payload")
        if payload.get("version") != _DETECTOR_VERSION:
            raise ValueError(f"unsupported artifact version {payload.get('version')!r}")
        detector = cls(lm=NgramLanguageModel.from_payload(payload["lm"]),
                       k_top=int(payload["k_top"]))
        detector.classes_ = np.array([0, 1])
        detector.threshold_t_ = float(payload["threshold_t"])
        detector.slope_ = float(payload["slope"])
        detector.intercept_ = float(payload["intercept"])
        detector.calibration_balanced_accuracy_ = float(
            payload["calibration_balanced_accuracy"]
        )
        return detector

    def save(self, path: str | Path) -> None:
        with open(path, "w", encoding="utf-8", newline="\n") as fh:
            json.dump(self.to_payload(), fh, ensure_ascii=False, indent=2, sort_keys=True)
            fh.write("\n")

    @classmethod
    def load(cls, path: str | Path) -> "RankDetector":
        with open(path, encoding="utf-8") as fh:
            return cls.from_payload(json.load(fh))

    def describe(self) -> dict:
        """Config echo for experiment reports."""
        self._check_fitted()
        return {
            "type": "rank-proxy",
            "k_top": self.k_top,
            "threshold_t": self.threshold_t_,
            "slope": self.slope_,
            "intercept": self.intercept_,
            "vocab_size": self.lm.vocab_size_,
            "lm_order": self.lm.order,
        }


def calibrate(
    lm: NgramLanguageModel,
    k_top: int,
    machine_corpus: Corpus,
    human_corpus: Corpus,
) -> RankDetector:
    """Fit a RankDetector from one machine-labeled and one human-labeled corpus."""
    texts = machine_corpus.texts() + human_corpus.texts()
    y = [1] * len(machine_corpus) + [0] * len(human_corpus)
    return RankDetector(lm=lm, k_top=k_top).fit(texts, y)


def classify(detector: Detector, text: str) -> DetectorVerdict:
    return detector.classify(text)


def text_sha256(text: str) -> str:
    return hashlib.sha256(text.encode("utf-8")).hexdigest()


class RemoteDetector:
    """Client for the wire protocol: POST {endpoint}/detect with {"text": ...}.

    The response must echo the SHA-256 of the exact UTF-8 bytes of the text
    the service received; a mismatch means the transport or service mangled
    the Unicode, which would invalidate any attack measurement.
    """

    def __init__(self, endpoint: str, timeout: float = 30.0):
        self.endpoint = endpoint.rstrip("/")
        self.timeout = timeout

    def classify(self, text: str) -> DetectorVerdict:
        body = json.dumps({"text": text}, ensure_ascii=False).encode("utf-8")
        try:
            response = requests.post(
                f"{self.endpoint}/detect",
                data=body,
                headers={"Content-Type": "application/json; charset=utf-8"},
                timeout=self.timeout,
            )
        except requests.RequestException as exc:
            raise TransportError(detail=str(exc)) from exc
        if response.status_code != 200:
            raise TransportError(
                detail=f"status {response.status_code}", status=response.status_code
            )
        try:
            payload = response.json()
        except ValueError as exc:
            raise ProtocolError(f"response is not JSON: {exc}") from exc
        if not isinstance(payload, dict):
            raise ProtocolError("response is not a JSON object")
        prob = payload.get("prob_machine")
        echo = payload.get("echo_sha256")
        if not isinstance(prob, (int, float)) or isinstance(prob, bool):
            raise ProtocolError("missing or non-numeric prob_machine")
        if not 0.0 <= float(prob) <= 1.0:
            raise ProtocolError(f"prob_machine out of range: {prob}")
        if not isinstance(echo, str):
            raise ProtocolError("missing echo_sha256")
        sent = text_sha256(text)
        if echo.lower() != sent:
            raise ChecksumMismatchError(sent_sha256=sent, echoed_sha256=echo.lower())
        return DetectorVerdict(prob_machine=float(prob))

    def describe(self) -> dict:
        return {"type": "remote", "endpoint": self.endpoint}


def remote_classify(endpoint: str, text: str, timeout: float = 30.0) -> DetectorVerdict:
    """One-shot remote classification against a wire-protocol service."""
    return RemoteDetector(endpoint, timeout=timeout).classify(text)
