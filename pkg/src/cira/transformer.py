"""Fine-tuned bidirectional transformer encoder for causality detection.

Three variants share one architecture: a transformer encoder whose pooled
classification-token representation feeds a single feed-forward layer
with softmax over {not causal, causal}. The base variant reads the raw
sentence at length 128; the pos/dep variants read tag-enriched text at
length 384 (the enrichment roughly triples token counts).

The encoder is consumed, not built: pass ``encoder_checkpoint`` (a local
directory or hub id understood by ``transformers``) to fine-tune a
published pretrained encoder. Without a checkpoint a compact
randomly-initialized encoder of the same family is used, which keeps the
pipeline self-contained for small-scale runs and tests; expect pretrained
quality only from a pretrained encoder.
"""

from __future__ import annotations

import copy
import json
from dataclasses import asdict, dataclass
from pathlib import Path
from typing import Optional, Sequence

import torch
from torch import nn

from .corpus import Dataset, dataset_fingerprint
from .errors import DataError, TaggerError
from .evaluation import macro_f1
from .features import (SubwordTokenizer, Tagger, encode_for_transformer,
                       enrich)
from .subword import WordPieceTokenizer

VARIANTS = ("base", "pos", "dep")
_MANIFEST_NAME = "manifest.json"


@dataclass(frozen=True)
class VariantConfig:
    variant: str
    epochs: int = 4
    batch_size: int = 16
    learning_rate: float = 2e-5
    weight_decay: float = 0.01
    encoder_checkpoint: Optional[str] = None
    # Scratch-encoder dimensions, used only without a checkpoint.
    hidden_size: int = 64
    num_layers: int = 2
    num_heads: int = 4
    intermediate_size: int = 128
    tokenizer_vocab_size: int = 8000

    def __post_init__(self):
        if self.variant not in VARIANTS:
            raise DataError(
                f"unknown variant {self.variant!r}; valid: {', '.join(VARIANTS)}"
            )

    @property
    def max_len(self) -> int:
        """128 for the base variant, 384 for the enriched ones (fixed)."""
        return 128 if self.variant == "base" else 384

    @property
    def needs_tagger(self) -> bool:
        return self.variant in ("pos", "dep")

    def hyperparameters(self) -> dict:
        return {
            "batch_size": self.batch_size,
            "learning_rate": self.learning_rate,
            "weight_decay": self.weight_decay,
            "optimizer": "AdamW",
            "epochs": self.epochs,
        }


def _build_scratch_encoder(config: VariantConfig, vocab_size: int):
    from transformers import BertConfig, BertModel

    bert_config = BertConfig(
        vocab_size=vocab_size,
        hidden_size=config.hidden_size,
        num_hidden_layers=config.num_layers,
        num_attention_heads=config.num_heads,
        intermediate_size=config.intermediate_size,
        max_position_embeddings=max(512, config.max_len + 2),
    )
    return BertModel(bert_config)


def _load_encoder(source: str):
    from transformers import AutoModel

    return AutoModel.from_pretrained(source)


def _pooled(encoder_output) -> torch.Tensor:
    pooled = getattr(encoder_output, "pooler_output", None)
    if pooled is not None:
        return pooled
    return encoder_output.last_hidden_state[:, 0]


class CausalityModel:
    """A fine-tuned (or in-training) causality classifier."""

    def __init__(
        self,
        config: VariantConfig,
        encoder,
        head: nn.Linear,
        tokenizer: SubwordTokenizer,
        tagger: Optional[Tagger] = None,
        training_curve: Optional[list[dict]] = None,
    ):
        self.config = config
        self.encoder = encoder
        self.head = head
        self.tokenizer = tokenizer
        self.tagger = tagger
        self.training_curve = training_curve or []
        if config.needs_tagger and tagger is None:
            raise TaggerError(
                f"variant {config.variant!r} needs a tagger for enrichment"
            )

    def _render(self, text: str) -> str:
        if self.config.variant == "base":
            return text
        return enrich(text, self.config.variant, self.tagger)

    def _prepare(self, texts: Sequence[str]) -> tuple[torch.Tensor, torch.Tensor]:
        ids, masks = [], []
        for text in texts:
            encoded = encode_for_transformer(
                self._render(text), self.config.max_len, self.tokenizer
            )
            ids.append(encoded.token_ids)
            masks.append(encoded.attention_mask)
        return torch.tensor(ids, dtype=torch.long), \
            torch.tensor(masks, dtype=torch.long)

    def _logits(self, ids: torch.Tensor, mask: torch.Tensor) -> torch.Tensor:
        output = self.encoder(input_ids=ids, attention_mask=mask)
        return self.head(_pooled(output))

    @torch.no_grad()
    def predict_proba(
        self, texts: Sequence[str], batch_size: int = 32
    ) -> list[tuple[float, float]]:
        """(p_causal, p_not_causal) per text, in input order."""
        self.encoder.eval()
        self.head.eval()
        out: list[tuple[float, float]] = []
        for start in range(0, len(texts), batch_size):
            batch = texts[start:start + batch_size]
            ids, mask = self._prepare(batch)
            probabilities = torch.softmax(self._logits(ids, mask), dim=-1)
            for row in probabilities:
                out.append((float(row[1]), float(row[0])))
        return out

    def predict_labels(self, texts: Sequence[str]) -> list[int]:
        """1 = causal; ties break toward not causal."""
        return [
            1 if p_causal > p_not else 0
            for p_causal, p_not in self.predict_proba(texts)
        ]


def _texts_labels(dataset: Dataset) -> tuple[list[str], list[int]]:
    texts, labels = dataset.texts_and_labels()
    if not texts:
        raise DataError("no labeled sentences")
    return texts, labels


def fine_tune(
    config: VariantConfig,
    train: Dataset,
    validation: Dataset,
    seed: int,
    tagger: Optional[Tagger] = None,
    tokenizer: Optional[SubwordTokenizer] = None,
) -> CausalityModel:
    """Train the classifier, keeping the epoch with the best validation
    macro-F1.

    The training curve (loss, train accuracy, validation macro-F1 per
    epoch) is available as ``model.training_curve``. Deterministic for a
    fixed seed under single-threaded execution.
    """
    if config.needs_tagger and tagger is None:
        raise TaggerError(
            f"variant {config.variant!r} needs a tagger for enrichment"
        )
    train_texts, train_labels = _texts_labels(train)
    val_texts, val_labels = _texts_labels(validation)

    torch.manual_seed(seed)

    def render(text: str) -> str:
        return text if config.variant == "base" \
            else enrich(text, config.variant, tagger)

    rendered_train = [render(t) for t in train_texts]
    if tokenizer is None:
        tokenizer = WordPieceTokenizer.train(
            rendered_train, vocab_size=config.tokenizer_vocab_size
        )

    if config.encoder_checkpoint:
        encoder = _load_encoder(config.encoder_checkpoint)
    else:
        vocab_size = getattr(tokenizer, "vocab_size", None)
        if vocab_size is None:
            raise DataError(
                "a scratch encoder needs a tokenizer exposing vocab_size"
            )
        encoder = _build_scratch_encoder(config, vocab_size)
    hidden = encoder.config.hidden_size
    head = nn.Linear(hidden, 2)

    model = CausalityModel(config, encoder, head, tokenizer, tagger=tagger)
    ids, mask = model._prepare(train_texts)
    labels = torch.tensor(train_labels, dtype=torch.long)

    optimizer = torch.optim.AdamW(
        list(encoder.parameters()) + list(head.parameters()),
        lr=config.learning_rate,
        weight_decay=config.weight_decay,
    )
    loss_fn = nn.CrossEntropyLoss()
    generator = torch.Generator().manual_seed(seed)

    best_f1 = -1.0
    best_state: Optional[tuple[dict, dict]] = None
    for epoch in range(config.epochs):
        encoder.train()
        head.train()
        order = torch.randperm(len(train_texts), generator=generator)
        epoch_loss = 0.0
        for start in range(0, len(order), config.batch_size):
            batch = order[start:start + config.batch_size]
            optimizer.zero_grad()
            logits = model._logits(ids[batch], mask[batch])
            loss = loss_fn(logits, labels[batch])
            loss.backward()
            optimizer.step()
            epoch_loss += loss.detach().item() * len(batch)

        train_predictions = model.predict_labels(train_texts)
        train_accuracy = sum(
            1 for p, g in zip(train_predictions, train_labels) if p == g
        ) / len(train_labels)
        val_f1 = macro_f1(model.predict_labels(val_texts), val_labels)
        model.training_curve.append({
            "epoch": epoch,
            "train_loss": epoch_loss / len(train_labels),
            "train_accuracy": train_accuracy,
            "validation_macro_f1": val_f1,
        })
        if val_f1 > best_f1:
            best_f1 = val_f1
            best_state = (
                copy.deepcopy(encoder.state_dict()),
                copy.deepcopy(head.state_dict()),
            )

    if best_state is not None:
        encoder.load_state_dict(best_state[0])
        head.load_state_dict(best_state[1])
    return model


def save_model(model: CausalityModel, path: str | Path,
               training_data: Optional[Dataset] = None) -> None:
    """Write a checkpoint directory: encoder weights, head weights,
    tokenizer, and a manifest recording variant and hyperparameters."""
    path = Path(path)
    path.mkdir(parents=True, exist_ok=True)
    model.encoder.save_pretrained(path / "encoder")
    torch.save(model.head.state_dict(), path / "head.pt")
    if not isinstance(model.tokenizer, WordPieceTokenizer):
        raise DataError(
            "only WordPieceTokenizer-backed models can be saved; "
            "got a custom tokenizer"
        )
    model.tokenizer.save(path / "tokenizer.json")
    manifest = {
        "variant": model.config.variant,
        "max_len": model.config.max_len,
        "hyperparameters": model.config.hyperparameters(),
        "config": asdict(model.config),
        "training_fingerprint": dataset_fingerprint(training_data)
        if training_data is not None else None,
        "hidden_size": model.head.in_features,
    }
    (path / _MANIFEST_NAME).write_text(json.dumps(manifest, indent=2))


def load_model(
    path: str | Path,
    tagger: Optional[Tagger] = None,
    variant: Optional[str] = None,
) -> CausalityModel:
    """Load a checkpoint directory.

    ``variant`` asserts the expected variant; a mismatch is an error
    naming both.
    """
    path = Path(path)
    manifest_path = path / _MANIFEST_NAME
    if not manifest_path.exists():
        raise DataError(f"no checkpoint manifest at {manifest_path}")
    manifest = json.loads(manifest_path.read_text())
    if variant is not None and manifest["variant"] != variant:
        raise DataError(
            f"checkpoint variant is {manifest['variant']!r}, "
            f"expected {variant!r}"
        )
    config = VariantConfig(**manifest["config"])
    encoder = _load_encoder(str(path / "encoder"))
    head = nn.Linear(manifest["hidden_size"], 2)
    head.load_state_dict(torch.load(path / "head.pt", weights_only=True))
    tokenizer = WordPieceTokenizer.load(path / "tokenizer.json")
    return CausalityModel(config, encoder, head, tokenizer, tagger=tagger)
