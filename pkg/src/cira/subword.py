"""WordPiece subword tokenizer built from the working corpus.

Satisfies the ``SubwordTokenizer`` protocol: lowercasing normalizer,
BERT-style pre-tokenization, and the usual special tokens. The vocabulary
is assembled deterministically (specials, then full character coverage
with continuation pieces, then words by descending frequency with
lexicographic tie-breaks), so identical corpora always yield identical
token ids; encoding itself is greedy longest-prefix WordPiece matching.
Character coverage guarantees out-of-vocabulary words still tokenize
instead of collapsing to the unknown token.
"""

from __future__ import annotations

from collections import Counter
from pathlib import Path
from typing import Iterable

from tokenizers import Tokenizer, models, normalizers, pre_tokenizers

SPECIAL_TOKENS = ("[PAD]", "[UNK]", "[CLS]", "[SEP]", "[MASK]")


def _build_vocab(texts: Iterable[str], vocab_size: int) -> dict[str, int]:
    normalizer = normalizers.Lowercase()
    pre_tokenizer = pre_tokenizers.BertPreTokenizer()
    counts: Counter = Counter()
    characters: set[str] = set()
    for text in texts:
        normalized = normalizer.normalize_str(text)
        for word, _ in pre_tokenizer.pre_tokenize_str(normalized):
            counts[word] += 1
            characters.update(word)

    vocab: dict[str, int] = {}
    for token in SPECIAL_TOKENS:
        vocab[token] = len(vocab)
    for character in sorted(characters):
        for piece in (character, f"##{character}"):
            if piece not in vocab:
                vocab[piece] = len(vocab)
    for word, _ in sorted(counts.items(), key=lambda kv: (-kv[1], kv[0])):
        if len(vocab) >= vocab_size:
            break
        if word not in vocab:
            vocab[word] = len(vocab)
    return vocab


class WordPieceTokenizer:
    def __init__(self, tokenizer: Tokenizer):
        self._tokenizer = tokenizer
        self.pad_id = tokenizer.token_to_id("[PAD]")
        self.cls_id = tokenizer.token_to_id("[CLS]")
        self.sep_id = tokenizer.token_to_id("[SEP]")
        self.unk_id = tokenizer.token_to_id("[UNK]")

    @classmethod
    def train(cls, texts: Iterable[str], vocab_size: int = 8000
              ) -> "WordPieceTokenizer":
        vocab = _build_vocab(texts, vocab_size)
        tokenizer = Tokenizer(models.WordPiece(vocab, unk_token="[UNK]"))
        tokenizer.normalizer = normalizers.Lowercase()
        tokenizer.pre_tokenizer = pre_tokenizers.BertPreTokenizer()
        return cls(tokenizer)

    @property
    def vocab_size(self) -> int:
        return self._tokenizer.get_vocab_size()

    def encode_ids(self, text: str) -> list[int]:
        if not text:
            return []
        return self._tokenizer.encode(text).ids

    def save(self, path: str | Path) -> None:
        self._tokenizer.save(str(path))

    @classmethod
    def load(cls, path: str | Path) -> "WordPieceTokenizer":
        return cls(Tokenizer.from_file(str(path)))
