"""Conversation-to-training-sequence transform and training hyperparameters.

Input is a JSONL file of multi-turn conversations
(``{"id": ..., "conversations": [{"from": role, "value": text}, ...]}``);
output is a JSONL file of single concatenated sequences (``{"text": ...}``),
one example per conversation.
"""
from __future__ import annotations

import dataclasses
import json
import logging
from dataclasses import dataclass
from typing import Iterable, Iterator, TextIO

logger = logging.getLogger(__name__)

ROLES = ("system", "user", "assistant", "function")

DEFAULT_DELIMITERS = {
    "system": "<|system|>",
    "user": "<|user|>",
    "assistant": "<|assistant|>",
    "function": "<|function|>",
}
END_OF_EXAMPLE = "<|endofexample|>"

# Characters-per-token proxy used when flagging over-length sequences.
CHARS_PER_TOKEN = 4


class DatasetError(ValueError):
    pass


class EmptyConversation(DatasetError):
    pass


class UnknownRole(DatasetError):
    pass


class NoAssistantTurn(DatasetError):
    pass


class ZeroBatch(ValueError):
    pass


@dataclass
class RawConversation:
    id: str
    turns: list[tuple[str, str]]  # (role, value)


@dataclass
class TrainingExample:
    text: str


@dataclass
class TrainingConfig:
    """Fine-tuning hyperparameter bundle, serialized as a flat JSON object."""

    learning_rate: float = 5e-5
    warmup_steps: int = 100
    per_device_batch: int = 8
    grad_accumulation: int = 4
    effective_batch: int = 32
    max_grad_norm: float = 0.3
    weight_decay: float = 0.01
    epochs: int = 1
    mixed_precision: bool = True
    gradient_checkpointing: bool = True
    max_seq_len: int = 8192

    def validate(self) -> None:
        if self.effective_batch != self.per_device_batch * self.grad_accumulation:
            raise ValueError(
                "effective_batch must equal per_device_batch * grad_accumulation"
            )
        for name in (
            "learning_rate", "warmup_steps", "per_device_batch",
            "grad_accumulation", "effective_batch", "max_grad_norm",
            "weight_decay", "max_seq_len",
        ):
            if getattr(self, name) <= 0:
                raise ValueError(f"{name} must be strictly positive")
        if self.epochs < 1:
            raise ValueError("epochs must be >= 1")

    def to_json(self) -> str:
        return json.dumps(dataclasses.asdict(self), indent=2)

    @classmethod
    def from_json(cls, text: str) -> "TrainingConfig":
        cfg = cls(**json.loads(text))
        cfg.validate()
        return cfg


def transform_conversation(
    conv: RawConversation,
    delimiters: dict[str, str] = DEFAULT_DELIMITERS,
) -> TrainingExample:
    """Concatenate one conversation into a single delimited sequence."""
    if not conv.turns:
        raise EmptyConversation(f"conversation {conv.id!r} has no turns")
    missing = [r for r in ROLES if r not in delimiters]
    if missing:
        raise ValueError(f"delimiter map lacks roles: {missing}")
    if not any(role == "assistant" for role, _ in conv.turns):
        raise NoAssistantTurn(f"conversation {conv.id!r} has no assistant turn")

    parts = []
    for role, value in conv.turns:
        if role not in ROLES:
            raise UnknownRole(f"conversation {conv.id!r}: unknown role {role!r}")
        parts.append(f"{delimiters[role]}\n{value}\n")
    parts.append(END_OF_EXAMPLE)
    return TrainingExample(text="".join(parts))


@dataclass
class TransformSummary:
    total: int = 0
    emitted: int = 0
    skipped: int = 0
    overlong: int = 0  # emitted intact but longer than max_seq_len (proxy tokens)

    def merge(self, other: "TransformSummary") -> "TransformSummary":
        return TransformSummary(
            total=self.total + other.total,
            emitted=self.emitted + other.emitted,
            skipped=self.skipped + other.skipped,
            overlong=self.overlong + other.overlong,
        )


def transform_corpus(
    conversations: Iterable[RawConversation],
    delimiters: dict[str, str] = DEFAULT_DELIMITERS,
    max_seq_len: int = 8192,
) -> tuple[list[TrainingExample], TransformSummary]:
    """Transform a corpus, skipping (and counting) malformed records."""
    summary = TransformSummary()
    examples: list[TrainingExample] = []
    for conv in conversations:
        summary.total += 1
        try:
            example = transform_conversation(conv, delimiters)
        except DatasetError as exc:
            summary.skipped += 1
            logger.warning("skipping record %s: %s", conv.id, exc)
            continue
        if len(example.text) // CHARS_PER_TOKEN > max_seq_len:
            summary.overlong += 1
        examples.append(example)
        summary.emitted += 1
    return examples, summary


def read_conversations(stream: TextIO) -> Iterator[RawConversation]:
    """Parse the JSONL conversation format, line by line."""
    for lineno, line in enumerate(stream):
        if not line.strip():
            continue
        try:
            record = json.loads(line)
            turns = [(t["from"], t["value"]) for t in record["conversations"]]
            yield RawConversation(id=str(record.get("id", lineno)), turns=turns)
        except (json.JSONDecodeError, KeyError, TypeError) as exc:
            # Surface as a structurally-empty record so the transform counts it.
            logger.warning("line %d unreadable: %s", lineno, exc)
            yield RawConversation(id=f"line-{lineno}", turns=[])


def transform_file(
    in_path: str,
    out_path: str,
    delimiters: dict[str, str] = DEFAULT_DELIMITERS,
    max_seq_len: int = 8192,
) -> TransformSummary:
    """File-to-file transform; output order preserves input order."""
    with open(in_path, encoding="utf-8") as f:
        examples, summary = transform_corpus(
            read_conversations(f), delimiters, max_seq_len
        )
    with open(out_path, "w", encoding="utf-8") as f:
        for example in examples:
            f.write(json.dumps({"text": example.text}) + "\n")
    return summary


def compute_training_steps(num_examples: int, effective_batch: int, epochs: int) -> int:
    """Optimizer steps for one run: floor(examples / batch) * epochs (drop-last)."""
    if effective_batch == 0:
        raise ZeroBatch("effective_batch must be nonzero")
    if num_examples < 0 or effective_batch < 0 or epochs < 1:
        raise ValueError("num_examples/effective_batch >= 0 and epochs >= 1 required")
    return (num_examples // effective_batch) * epochs
