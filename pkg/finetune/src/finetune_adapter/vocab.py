"""Local vocabularies for from-scratch models; no hub downloads.

The generative side splits text into tag markers and whitespace words and
keeps both as atomic symbols. The encoder side maps each corpus token to
one or more pieces: known words stay whole, unknown words fall back to
character pieces ("##x" continuation style), and labels ride on the first
piece only.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field

PAD, UNK, EOS = "<pad>", "<unk>", "<eos>"

_TAG_SPLIT_RE = re.compile(r"(</?(?:claim|premise)>)", re.IGNORECASE)


def split_generative(text: str) -> list[str]:
    """Tags become atomic symbols; everything else splits on whitespace."""
    out: list[str] = []
    for part in _TAG_SPLIT_RE.split(text):
        if not part:
            continue
        if _TAG_SPLIT_RE.fullmatch(part):
            out.append(part.lower())
        else:
            out.extend(part.split())
    return out


def join_generative(symbols: list[str]) -> str:
    """Inverse of split_generative up to whitespace; single spaces are
    enough because the pipeline's scoring is token-level."""
    return " ".join(symbols)


@dataclass
class Vocab:
    symbol_to_id: dict[str, int] = field(default_factory=dict)

    @classmethod
    def build(cls, symbol_lists: list[list[str]]) -> "Vocab":
        vocab = cls()
        for special in (PAD, UNK, EOS):
            vocab.symbol_to_id[special] = len(vocab.symbol_to_id)
        for symbols in symbol_lists:
            for symbol in symbols:
                if symbol not in vocab.symbol_to_id:
                    vocab.symbol_to_id[symbol] = len(vocab.symbol_to_id)
        return vocab

    def __len__(self) -> int:
        return len(self.symbol_to_id)

    @property
    def pad_id(self) -> int:
        return self.symbol_to_id[PAD]

    @property
    def unk_id(self) -> int:
        return self.symbol_to_id[UNK]

    @property
    def eos_id(self) -> int:
        return self.symbol_to_id[EOS]

    def encode(self, symbols: list[str]) -> list[int]:
        unk = self.unk_id
        return [self.symbol_to_id.get(s, unk) for s in symbols]

    def decode(self, ids: list[int]) -> list[str]:
        id_to_symbol = {i: s for s, i in self.symbol_to_id.items()}
        return [id_to_symbol.get(i, UNK) for i in ids]


@dataclass
class PieceVocab:
    """Word vocabulary with character-piece fallback for unknown words."""

    vocab: Vocab

    @classmethod
    def build(cls, token_lists: list[tuple[str, ...]]) -> "PieceVocab":
        words = [list(tokens) for tokens in token_lists]
        # seed character pieces so any unseen word remains encodable
        chars = sorted({c for tokens in token_lists for t in tokens for c in t})
        pieces = [[c for c in chars], [f"##{c}" for c in chars]]
        return cls(Vocab.build(words + pieces))

    def __len__(self) -> int:
        return len(self.vocab)

    def split_word(self, word: str) -> list[str]:
        if word in self.vocab.symbol_to_id:
            return [word]
        return [word[0]] + [f"##{c}" for c in word[1:]]

    def encode_tokens(
        self, tokens: tuple[str, ...] | list[str]
    ) -> tuple[list[int], list[int]]:
        """Return (piece ids, first-piece index per token)."""
        ids: list[int] = []
        firsts: list[int] = []
        for token in tokens:
            pieces = self.split_word(token)
            firsts.append(len(ids))
            ids.extend(self.vocab.encode(pieces))
        return ids, firsts
