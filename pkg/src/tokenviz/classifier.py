"""Two-class linear n-gram models and token-level log-odds attribution.

A trained (or imported) model assigns every n-gram feature a weight equal to
its log-odds contribution toward class a. Scoring a document walks all
contiguous spans whose gram carries a weight; a token's attribution psi is
the sum of the weights of the spans that cover it.

All "exact" equalities promised here depend on one fixed summation order:
spans sorted by start ascending, then end ascending. Every accumulation in
this module uses that order.
"""

from __future__ import annotations

import json
import math
from collections import Counter
from dataclasses import dataclass
from typing import Iterable, Sequence

from .corpus import Corpus, Token
from .errors import DataError
from . import jsonio

TOKEN_MODES = ("word", "char")


@dataclass(frozen=True)
class LinearTextModel:
    """Per-gram log-odds weights plus a prior, for classes a versus b."""

    class_a: str
    class_b: str
    prior_logit: float
    ngram_orders: tuple[int, ...]
    weights: dict[str, float]
    token_mode: str

    def __post_init__(self) -> None:
        if not self.ngram_orders or any(n < 1 for n in self.ngram_orders):
            raise DataError(f"ngram orders must be nonempty, each >= 1: {self.ngram_orders}")
        if self.token_mode not in TOKEN_MODES:
            raise DataError(f"unknown token mode {self.token_mode!r}")
        if not math.isfinite(self.prior_logit):
            raise DataError(f"prior_logit must be finite, got {self.prior_logit}")
        for gram, w in self.weights.items():
            if not math.isfinite(w):
                raise DataError(f"non-finite weight for gram {gram!r}: {w}")


@dataclass(frozen=True)
class SpanWeight:
    start: int
    end: int
    gram: str
    weight: float


@dataclass(frozen=True)
class ScalarAttribution:
    """Per-token psi plus the spans and document total they came from."""

    psi: tuple[float, ...]
    spans: tuple[SpanWeight, ...]
    prior_logit: float
    total_log_odds: float


def _texts(tokens: Sequence[Token] | Sequence[str]) -> list[str]:
    return [t.text if isinstance(t, Token) else t for t in tokens]


def _gram(texts: Sequence[str], start: int, end: int, token_mode: str) -> str:
    joiner = " " if token_mode == "word" else ""
    return joiner.join(texts[start:end])


def _doc_grams(texts: Sequence[str], orders: Iterable[int], token_mode: str) -> Iterable[str]:
    for n in orders:
        for i in range(len(texts) - n + 1):
            yield _gram(texts, i, i + n, token_mode)


def train_mnb(
    labeled_corpus: Corpus,
    ngram_orders: Iterable[int] = (1,),
    smoothing: float = 1.0,
    max_features: int | None = None,
) -> LinearTextModel:
    """Fit multinomial naive Bayes over n-gram counts, add-s smoothed.

    The corpus must carry exactly two distinct labels; the lexicographically
    first becomes class a. Each gram's weight is the smoothed log ratio
    log P(gram|a) - log P(gram|b) over the shared gram universe, and the
    prior logit is the log ratio of document counts. ``max_features`` keeps
    only the largest-magnitude weights (ties broken by gram) as a crude
    sparsifier; it does not rescale anything.
    """
    if smoothing <= 0:
        raise DataError(f"smoothing must be positive, got {smoothing}")
    orders = tuple(sorted(set(int(n) for n in ngram_orders)))
    if not orders or orders[0] < 1:
        raise DataError(f"ngram orders must be nonempty, each >= 1: {orders}")

    labels = sorted(set(d.label for d in labeled_corpus.documents if d.label is not None))
    if any(d.label is None for d in labeled_corpus.documents):
        raise DataError("every document needs a label")
    if len(labels) != 2:
        raise DataError(f"need exactly two labels, got {labels}")
    class_a, class_b = labels

    counts = {class_a: Counter(), class_b: Counter()}
    n_docs = {class_a: 0, class_b: 0}
    for doc in labeled_corpus.documents:
        n_docs[doc.label] += 1
        counts[doc.label].update(
            _doc_grams([t.text for t in doc.tokens], orders, labeled_corpus.token_mode)
        )
    if n_docs[class_a] == 0 or n_docs[class_b] == 0:
        raise DataError("both classes need at least one document")

    universe = sorted(counts[class_a].keys() | counts[class_b].keys())
    g = len(universe)
    if g == 0:
        raise DataError("no n-gram features found")
    t_a = sum(counts[class_a].values())
    t_b = sum(counts[class_b].values())

    s = float(smoothing)
    weights = {
        gram: math.log((counts[class_a][gram] + s) / (t_a + s * g))
        - math.log((counts[class_b][gram] + s) / (t_b + s * g))
        for gram in universe
    }
    if max_features is not None and 0 < max_features < len(weights):
        keep = sorted(weights, key=lambda gram: (-abs(weights[gram]), gram))[:max_features]
        weights = {gram: weights[gram] for gram in sorted(keep)}

    return LinearTextModel(
        class_a=class_a,
        class_b=class_b,
        prior_logit=math.log(n_docs[class_a] / n_docs[class_b]),
        ngram_orders=orders,
        weights=weights,
        token_mode=labeled_corpus.token_mode,
    )


def span_weights(
    model: LinearTextModel, tokens: Sequence[Token] | Sequence[str]
) -> tuple[SpanWeight, ...]:
    """All contiguous spans of the model's orders whose gram has a weight.

    Char-mode grams concatenate the token texts; word-mode grams join them
    with single spaces. Result is sorted by start, then end.
    """
    texts = _texts(tokens)
    spans = []
    for n in model.ngram_orders:
        for i in range(len(texts) - n + 1):
            gram = _gram(texts, i, i + n, model.token_mode)
            weight = model.weights.get(gram)
            if weight is not None:
                spans.append(SpanWeight(i, i + n, gram, weight))
    spans.sort(key=lambda sp: (sp.start, sp.end))
    return tuple(spans)


def token_attribution(
    spans: Sequence[SpanWeight], n_tokens: int
) -> ScalarAttribution:
    """Fold span weights down to per-token psi values.

    psi[t] is the sum over spans covering t, accumulated in (start, end)
    span order; tokens under no span stay exactly 0. The returned total is
    the plain span-weight sum with a zero prior.
    """
    ordered = sorted(spans, key=lambda sp: (sp.start, sp.end))
    psi = [0.0] * n_tokens
    total = 0.0
    for sp in ordered:
        if not 0 <= sp.start < sp.end <= n_tokens:
            raise DataError(f"span [{sp.start}, {sp.end}) outside document of {n_tokens} tokens")
        for t in range(sp.start, sp.end):
            psi[t] += sp.weight
        total += sp.weight
    return ScalarAttribution(
        psi=tuple(psi), spans=tuple(ordered), prior_logit=0.0, total_log_odds=total
    )


def doc_log_odds(
    model: LinearTextModel, tokens: Sequence[Token] | Sequence[str]
) -> ScalarAttribution:
    """Score one document: spans, per-token psi, and the posterior log-odds.

    total_log_odds is the prior plus the span weights added in (start, end)
    order, so for a unigram-only model it equals prior plus the psi sum term
    for term.
    """
    texts = _texts(tokens)
    spans = span_weights(model, texts)
    base = token_attribution(spans, len(texts))
    total = model.prior_logit
    for sp in spans:
        total += sp.weight
    return ScalarAttribution(
        psi=base.psi, spans=spans, prior_logit=model.prior_logit, total_log_odds=total
    )


def counterfactual_delete(
    model: LinearTextModel, tokens: Sequence[Token] | Sequence[str], t: int
) -> float:
    """Change in document log-odds if the token at position t were deleted.

    Computed structurally: spans that straddle the gap contribute their new
    bridging grams, spans covering t drop out, and everything else cancels
    term for term. This keeps the unigram case exactly equal to -psi[t]
    instead of drowning it in the rounding of two large totals.
    """
    texts = _texts(tokens)
    if not 0 <= t < len(texts):
        raise DataError(f"token index {t} outside document of {len(texts)} tokens")

    removed = 0.0
    for sp in span_weights(model, texts):
        if sp.start <= t < sp.end:
            removed += sp.weight
    added = 0.0
    # Deleted-coordinate spans with start < t < end cover tokens from both
    # sides of the gap; only those grams are new.
    for sp in span_weights(model, texts[:t] + texts[t + 1 :]):
        if sp.start < t < sp.end:
            added += sp.weight
    return added - removed


def import_linear_model(path: str) -> LinearTextModel:
    """Load a linear model file, validating shape and finiteness."""
    try:
        with open(path, encoding="utf-8") as fh:
            raw = json.load(fh)
    except json.JSONDecodeError as exc:
        raise DataError(f"{path}: invalid JSON ({exc.msg})") from exc
    if not isinstance(raw, dict) or raw.get("type") != "linear":
        raise DataError(f"{path}: expected a model file with type 'linear'")
    try:
        class_a = raw["class_a"]
        class_b = raw["class_b"]
        prior = float(raw["prior_logit"])
        token_mode = raw["token_mode"]
        orders = tuple(sorted(set(int(n) for n in raw["orders"])))
        weights = {str(g): float(w) for g, w in raw["weights"].items()}
    except (KeyError, TypeError, ValueError, AttributeError) as exc:
        raise DataError(f"{path}: malformed linear model file ({exc})") from exc
    if not isinstance(class_a, str) or not isinstance(class_b, str):
        raise DataError(f"{path}: class names must be strings")
    return LinearTextModel(
        class_a=class_a,
        class_b=class_b,
        prior_logit=prior,
        ngram_orders=orders,
        weights=weights,
        token_mode=token_mode,
    )


def export_linear_model(model: LinearTextModel, path: str) -> None:
    """Write the model file; weights under sorted gram keys for byte stability."""
    payload = {
        "type": "linear",
        "class_a": model.class_a,
        "class_b": model.class_b,
        "prior_logit": float(model.prior_logit),
        "token_mode": model.token_mode,
        "orders": list(model.ngram_orders),
        "weights": {gram: float(model.weights[gram]) for gram in sorted(model.weights)},
    }
    jsonio.dump_path(payload, path)
