"""Wrapper around a HuggingFace sequence-classification detector.

The wrapped model must be a two-ish-class text classifier where one label
means "machine-written". The machine label is resolved from the model's
id2label names when possible and can always be forced via configuration.
"""

from __future__ import annotations

import torch
from transformers import AutoModelForSequenceClassification, AutoTokenizer

# Label names (casefolded) that mark the machine/generated class.
_MACHINE_LABEL_NAMES = {"fake", "machine", "neural", "generated", "ai", "llm", "bot"}


class ModelLoadError(RuntimeError):
    pass


def _resolve_machine_index(id2label: dict[int, str], requested: str | int | None) -> int:
    if requested is not None:
        if isinstance(requested, int) or str(requested).isdigit():
            index = int(requested)
            if index not in id2label:
                raise ModelLoadError(f"label index {index} not in model labels {id2label}")
            return index
        by_name = {name.casefold(): i for i, name in id2label.items()}
        key = str(requested).casefold()
        if key not in by_name:
            raise ModelLoadError(f"label {requested!r} not in model labels {id2label}")
        return by_name[key]
    matches = [i for i, name in id2label.items() if name.casefold() in _MACHINE_LABEL_NAMES]
    if len(matches) == 1:
        return matches[0]
    if len(id2label) == 2:
        return 1
    raise ModelLoadError(
        f"cannot infer the machine label from {id2label}; pass --machine-label"
    )


class DetectorModel:
    """Loads the artifacts eagerly; scoring is deterministic (eval mode, no sampling)."""

    def __init__(self, model_path: str, machine_label: str | int | None = None):
        try:
            self.tokenizer = AutoTokenizer.from_pretrained(model_path)
            self.model = AutoModelForSequenceClassification.from_pretrained(model_path)
        except Exception as exc:
            raise ModelLoadError(f"failed to load model from {model_path!r}: {exc}") from exc
        self.model.eval()
        id2label = {int(i): str(name) for i, name in self.model.config.id2label.items()}
        self.machine_index = _resolve_machine_index(id2label, machine_label)
        self.model_path = model_path

    @torch.no_grad()
    def prob_machine(self, text: str) -> float:
        encoded = self.tokenizer(
            text,
            return_tensors="pt",
            truncation=True,
            max_length=self.tokenizer.model_max_length
            if self.tokenizer.model_max_length < 10**6
            else self.model.config.max_position_embeddings - 2,
        )
        logits = self.model(**encoded).logits[0]
        probs = torch.softmax(logits, dim=-1)
        return float(probs[self.machine_index])
