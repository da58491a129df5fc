"""Deterministic whitespace + punctuation tokenizer.

Rules: split on Unicode whitespace, then peel leading and trailing
punctuation/symbol characters off each chunk one character at a time.
Internal characters (apostrophes in "don't", hyphens in "re-run") stay
attached. Every non-whitespace character lands in exactly one token, so
the original text is reconstructible from token extents plus the
whitespace gaps between them.
"""

from __future__ import annotations

import re
import unicodedata
from typing import Sequence

from acdkit.corpus.model import Token

_CHUNK_RE = re.compile(r"\S+")


def _is_edge_punct(ch: str) -> bool:
    return unicodedata.category(ch)[0] in ("P", "S")


def tokenize(text: str) -> list[Token]:
    """Tokenize text; empty input yields an empty list."""
    tokens: list[Token] = []
    for m in _CHUNK_RE.finditer(text):
        chunk = m.group()
        base = m.start()
        left, right = 0, len(chunk)
        while left < right and _is_edge_punct(chunk[left]):
            left += 1
        while right > left and _is_edge_punct(chunk[right - 1]):
            right -= 1
        for i in range(left):
            tokens.append(Token(chunk[i], base + i, base + i + 1))
        if left < right:
            tokens.append(Token(chunk[left:right], base + left, base + right))
        for i in range(right, len(chunk)):
            tokens.append(Token(chunk[i], base + i, base + i + 1))
    return tokens


def reconstruct(text_length: int, tokens: Sequence[Token], gap_fill: str = " ") -> str:
    """Rebuild a text skeleton from tokens alone (gaps become gap_fill).

    Only used by tests to check losslessness against the true gaps; the
    canonical reconstruction is slicing the original text.
    """
    out: list[str] = []
    pos = 0
    for tok in tokens:
        out.append(gap_fill * (tok.char_start - pos))
        out.append(tok.text)
        pos = tok.char_end
    out.append(gap_fill * (text_length - pos))
    return "".join(out)


# Detokenization for token-table input: single space between tokens, no
# space before these closing marks.
NO_SPACE_BEFORE = {".", ",", "!", "?", ";", ":", "'", '"', ")"}


def detokenize(token_texts: Sequence[str]) -> tuple[str, list[Token]]:
    """Assemble text from bare token strings, returning tokens with offsets."""
    parts: list[str] = []
    tokens: list[Token] = []
    pos = 0
    for i, text in enumerate(token_texts):
        if i > 0 and text not in NO_SPACE_BEFORE:
            parts.append(" ")
            pos += 1
        parts.append(text)
        tokens.append(Token(text, pos, pos + len(text)))
        pos += len(text)
    return "".join(parts), tokens
