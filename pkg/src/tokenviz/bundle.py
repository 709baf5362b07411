"""Everything the explorer needs for one corpus+model pair, precomputed.

A bundle resolves the display universe (modeled tokens for a topic model,
all tokens for a linear model), computes every token's attribution and
color once, and fixes the pixel-grid layout. The HTTP service and the
render subcommands are thin readers over it.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .classifier import LinearTextModel, doc_log_odds, import_linear_model
from .colors import (
    CategoricalPalette,
    Color,
    DivergingScale,
    StyleConfig,
    default_palette,
    encode_scalar,
    encode_topic,
    fit_scale,
)
from .corpus import Corpus, load_corpus, token_positions
from .errors import DataError
from .render import PixelLayout, layout_pixels
from .topics import TrainedTopicModel, load_topic_model


@dataclass(frozen=True)
class SessionBundle:
    corpus: Corpus
    model: TrainedTopicModel | LinearTextModel
    style: StyleConfig
    layout: PixelLayout
    positions: tuple[tuple[int, int], ...]
    values: np.ndarray
    colors: tuple[Color, ...]
    doc_colors: tuple[tuple[Color | None, ...], ...]
    doc_starts: tuple[int, ...]
    modeled_mask: tuple[np.ndarray, ...] | None
    palette: CategoricalPalette | None
    scale: DivergingScale | None

    @property
    def kind(self) -> str:
        return "lda" if isinstance(self.model, TrainedTopicModel) else "linear"

    def token_info(self, t: int) -> dict:
        """The /api/token payload: document, position, text, psi, color."""
        if not 0 <= t < len(self.positions):
            raise DataError(f"token index {t} out of range for {len(self.positions)} tokens")
        di, ti = self.positions[t]
        doc = self.corpus.documents[di]
        psi = self.values[t].tolist() if self.kind == "lda" else float(self.values[t])
        return {
            "doc": doc.id,
            "pos": ti,
            "text": doc.tokens[ti].text,
            "psi": psi,
            "color": self.colors[t].hex,
        }


def load_model(path: str) -> TrainedTopicModel | LinearTextModel:
    """Read a model file, dispatching on its "type" field."""
    try:
        with open(path, encoding="utf-8") as fh:
            raw = json.load(fh)
    except json.JSONDecodeError as exc:
        raise DataError(f"{path}: invalid JSON ({exc.msg})") from exc
    kind = raw.get("type") if isinstance(raw, dict) else None
    if kind == "lda":
        return load_topic_model(path)
    if kind == "linear":
        return import_linear_model(path)
    raise DataError(f"{path}: unknown model type {kind!r}")


def corpus_mode_for(model: TrainedTopicModel | LinearTextModel) -> str:
    return "word" if isinstance(model, TrainedTopicModel) else model.token_mode


def _lda_masks(corpus: Corpus, model: TrainedTopicModel) -> tuple[np.ndarray, ...]:
    """Recover the modeled-token mask and check it against the model's psi."""
    term_set = set(model.terms)
    masks = tuple(
        np.fromiter((tok.text in term_set for tok in doc.tokens), dtype=bool, count=len(doc.tokens))
        for doc in corpus.documents
    )
    model_ids = set(model.psi.keys())
    corpus_ids = [doc.id for doc in corpus.documents]
    missing = [i for i in corpus_ids if i not in model_ids]
    if missing:
        raise DataError(f"model has no attributions for document(s) {missing[:5]}")
    extra = sorted(model_ids.difference(corpus_ids))
    if extra:
        raise DataError(f"corpus is missing document(s) the model was trained on: {extra[:5]}")
    for doc, mask in zip(corpus.documents, masks):
        have = model.psi[doc.id].shape[0]
        want = int(mask.sum())
        if have != want:
            raise DataError(
                f"document {doc.id!r}: model has psi for {have} tokens but the corpus "
                f"has {want} modeled tokens; tokenization or vocabulary does not match"
            )
    return masks


def bundle_from_objects(
    corpus: Corpus,
    model: TrainedTopicModel | LinearTextModel,
    style: StyleConfig | None = None,
    column_height: int = 150,
    pixel_size: int = 3,
) -> SessionBundle:
    style = style or StyleConfig()
    palette: CategoricalPalette | None = None
    scale: DivergingScale | None = None

    if isinstance(model, TrainedTopicModel):
        masks = _lda_masks(corpus, model)
        positions = tuple(token_positions(corpus, masks))
        if positions:
            values = np.concatenate([model.psi[doc.id] for doc in corpus.documents])
        else:
            values = np.zeros((0, model.k), dtype=np.float64)
        palette = style.palette or default_palette(model.k)
        colors = tuple(encode_topic(row, palette, blend=style.blend) for row in values)
        doc_colors = []
        offset = 0
        for doc, mask in zip(corpus.documents, masks):
            row: list[Color | None] = [None] * len(doc.tokens)
            for ti in np.flatnonzero(mask):
                row[int(ti)] = colors[offset]
                offset += 1
            doc_colors.append(tuple(row))
        modeled_mask: tuple[np.ndarray, ...] | None = masks
    else:
        if corpus.token_mode != model.token_mode:
            raise DataError(
                f"corpus tokenized as {corpus.token_mode!r} but the model expects "
                f"{model.token_mode!r} tokens"
            )
        positions = tuple(token_positions(corpus))
        per_doc_psi = [doc_log_odds(model, doc.tokens).psi for doc in corpus.documents]
        values = np.asarray(
            [psi for doc_psi in per_doc_psi for psi in doc_psi], dtype=np.float64
        )
        scale = fit_scale(
            values, style.percentile, style.negative_color, style.positive_color
        )
        colors = tuple(encode_scalar(float(v), scale) for v in values)
        doc_colors = []
        offset = 0
        for doc_psi in per_doc_psi:
            doc_colors.append(tuple(colors[offset : offset + len(doc_psi)]))
            offset += len(doc_psi)
        modeled_mask = None

    doc_starts = tuple(
        g for g, (di, _) in enumerate(positions) if g == 0 or positions[g - 1][0] != di
    )
    return SessionBundle(
        corpus=corpus,
        model=model,
        style=style,
        layout=layout_pixels(len(positions), column_height, pixel_size),
        positions=positions,
        values=values,
        colors=colors,
        doc_colors=tuple(doc_colors),
        doc_starts=doc_starts,
        modeled_mask=modeled_mask,
        palette=palette,
        scale=scale,
    )


def build_bundle(
    corpus_path: str,
    model_path: str,
    style: StyleConfig | None = None,
    column_height: int = 150,
    pixel_size: int = 3,
) -> SessionBundle:
    """Load model and corpus files and precompute the session."""
    model = load_model(model_path)
    corpus = load_corpus(corpus_path, token_mode=corpus_mode_for(model))
    return bundle_from_objects(
        corpus, model, style, column_height=column_height, pixel_size=pixel_size
    )
