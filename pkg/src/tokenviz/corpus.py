"""Corpus ingestion: tokenization, vocabulary filtering, JSONL loading.

Documents are immutable after load and all functions here are pure, so
corpora can be shared freely across threads.
"""

from __future__ import annotations

import json
import re
from collections import Counter
from dataclasses import dataclass
from importlib import resources

import numpy as np

from .errors import DataError

# Maximal runs of Unicode letters/digits (\w minus the underscore).
_WORD_RE = re.compile(r"[^\W_]+")

_PARAGRAPH_RE = re.compile(r"\n\s*\n")

TOKEN_MODES = ("word", "char")


@dataclass(frozen=True)
class Token:
    """One surface token with its [char_start, char_end) source offsets.

    Offsets count Unicode scalar values, not bytes, so they are stable
    positions for rendering and hit-testing. ``text`` equals the source
    slice except for case when the tokenizer lowercased it.
    """

    text: str
    char_start: int
    char_end: int

    def __post_init__(self) -> None:
        if not 0 <= self.char_start < self.char_end:
            raise DataError(
                f"invalid token offsets [{self.char_start}, {self.char_end})"
            )


@dataclass(frozen=True)
class Document:
    id: str
    source_text: str
    tokens: tuple[Token, ...]
    order_key: str | None = None
    label: str | None = None


@dataclass(frozen=True)
class Corpus:
    documents: tuple[Document, ...]
    token_mode: str = "word"

    def total_tokens(self) -> int:
        return sum(len(d.tokens) for d in self.documents)

    def document_by_id(self, doc_id: str) -> Document:
        for doc in self.documents:
            if doc.id == doc_id:
                return doc
        raise DataError(f"no document with id {doc_id!r}")


@dataclass(frozen=True)
class Vocabulary:
    """Dense term ids plus the per-token in-model mask for one corpus.

    ``modeled_mask`` is parallel to ``corpus.documents``: one boolean per
    token, true iff the token's term survived filtering.
    """

    terms: tuple[str, ...]
    term_to_id: dict[str, int]
    modeled_mask: tuple[np.ndarray, ...]

    @property
    def size(self) -> int:
        return len(self.terms)

    def __contains__(self, term: str) -> bool:
        return term in self.term_to_id

    def id_of(self, term: str) -> int:
        return self.term_to_id[term]


def tokenize_words(text: str, lowercase: bool = True) -> tuple[Token, ...]:
    """Split text into maximal runs of Unicode letters/digits.

    Empty input gives an empty sequence. Offsets always point at the
    original slice; only the token text is lowercased when asked.
    """
    tokens = []
    for m in _WORD_RE.finditer(text):
        piece = m.group()
        tokens.append(Token(piece.lower() if lowercase else piece, m.start(), m.end()))
    return tuple(tokens)


def tokenize_chars(text: str) -> tuple[Token, ...]:
    """One token per Unicode scalar value, offsets in scalar units."""
    return tuple(Token(ch, i, i + 1) for i, ch in enumerate(text))


def load_default_stopwords() -> frozenset[str]:
    """The built-in 127-word English stopword list."""
    data = resources.files("tokenviz").joinpath("data/stopwords_en.txt").read_text("utf-8")
    return frozenset(line for line in data.splitlines() if line)


def build_vocabulary(
    corpus: Corpus,
    min_count: int = 5,
    max_doc_fraction: float = 0.5,
    stopwords: frozenset[str] | set[str] | None = None,
) -> Vocabulary:
    """Filter terms by corpus count, document spread, and stopword status.

    A term is kept iff it occurs at least ``min_count`` times, appears in at
    most ``max_doc_fraction`` of documents, and is not a stopword. Passing
    ``stopwords=None`` uses the built-in English list; pass an empty set to
    disable stopword filtering.
    """
    if min_count < 1:
        raise DataError(f"min_count must be >= 1, got {min_count}")
    if not 0 < max_doc_fraction <= 1:
        raise DataError(f"max_doc_fraction must be in (0, 1], got {max_doc_fraction}")
    if stopwords is None:
        stopwords = load_default_stopwords()

    counts: Counter[str] = Counter()
    doc_freq: Counter[str] = Counter()
    for doc in corpus.documents:
        seen = set()
        for tok in doc.tokens:
            counts[tok.text] += 1
            seen.add(tok.text)
        doc_freq.update(seen)

    n_docs = len(corpus.documents)
    kept = sorted(
        term
        for term, c in counts.items()
        if c >= min_count
        and doc_freq[term] <= max_doc_fraction * n_docs
        and term not in stopwords
    )
    if not kept:
        raise DataError("vocabulary empty after filtering")

    term_to_id = {term: i for i, term in enumerate(kept)}
    mask = tuple(
        np.fromiter((tok.text in term_to_id for tok in doc.tokens), dtype=bool, count=len(doc.tokens))
        for doc in corpus.documents
    )
    return Vocabulary(terms=tuple(kept), term_to_id=term_to_id, modeled_mask=mask)


def _tokenize(text: str, token_mode: str, lowercase: bool) -> tuple[Token, ...]:
    if token_mode == "word":
        return tokenize_words(text, lowercase=lowercase)
    return tokenize_chars(text)


def load_corpus(
    path: str,
    format: str = "jsonl",
    token_mode: str = "word",
    lowercase: bool = True,
    split_paragraphs: bool = False,
) -> Corpus:
    """Load a JSONL corpus: one {"id", "text", "date"?, "label"?} per line.

    Documents with a date sort by it (stable); undated documents keep input
    order after the dated ones. ``split_paragraphs`` turns each blank-line
    separated paragraph into its own document, suffixing the id.
    """
    if format != "jsonl":
        raise DataError(f"unknown corpus format {format!r}")
    if token_mode not in TOKEN_MODES:
        raise DataError(f"unknown token mode {token_mode!r}")

    docs: list[Document] = []
    seen_ids: set[str] = set()
    with open(path, encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, start=1):
            line = line.rstrip("\n")
            if not line.strip():
                continue
            try:
                record = json.loads(line)
            except json.JSONDecodeError as exc:
                raise DataError(f"{path}: line {lineno}: invalid JSON ({exc.msg})") from exc
            if not isinstance(record, dict):
                raise DataError(f"{path}: line {lineno}: record is not an object")
            doc_id = record.get("id")
            text = record.get("text")
            if not isinstance(doc_id, str) or not isinstance(text, str):
                raise DataError(f"{path}: line {lineno}: record needs string 'id' and 'text'")
            order_key = record.get("date")
            if order_key is not None and not isinstance(order_key, str):
                raise DataError(f"{path}: line {lineno}: 'date' must be a string")
            label = record.get("label")
            if label is not None and not isinstance(label, str):
                raise DataError(f"{path}: line {lineno}: 'label' must be a string")

            if split_paragraphs:
                parts = [p for p in _PARAGRAPH_RE.split(text) if p.strip()]
                pieces = [(f"{doc_id}#p{i}", p) for i, p in enumerate(parts)]
            else:
                pieces = [(doc_id, text)]
            for piece_id, piece_text in pieces:
                if piece_id in seen_ids:
                    raise DataError(f"{path}: line {lineno}: duplicate document id {piece_id!r}")
                seen_ids.add(piece_id)
                docs.append(
                    Document(
                        id=piece_id,
                        source_text=piece_text,
                        tokens=_tokenize(piece_text, token_mode, lowercase),
                        order_key=order_key,
                        label=label,
                    )
                )

    if any(d.order_key is not None for d in docs):
        docs.sort(key=lambda d: (d.order_key is None, d.order_key or ""))
    return Corpus(documents=tuple(docs), token_mode=token_mode)


def token_positions(
    corpus: Corpus, mask: tuple[np.ndarray, ...] | None = None
) -> list[tuple[int, int]]:
    """Concatenated display order: (document index, token index) per token.

    With a mask only the masked-true tokens appear; without one, every
    token does. The list index is the token's global display index.
    """
    positions: list[tuple[int, int]] = []
    for di, doc in enumerate(corpus.documents):
        if mask is None:
            positions.extend((di, ti) for ti in range(len(doc.tokens)))
        else:
            positions.extend((di, int(ti)) for ti in np.flatnonzero(mask[di]))
    return positions
