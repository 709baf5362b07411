"""Collapsed Gibbs sampling for LDA over the modeled tokens of a corpus.

Tokens that survived vocabulary filtering are flattened into corpus order
(document by document, token by token) and resampled one at a time from the
collapsed conditional

    p(z_t = k | rest) ~ (n_dk + alpha) * (n_kw + beta) / (n_k + V*beta)

with token t's own assignment removed from the counts first. Per-token
membership vectors psi are indicator averages over the retained samples;
phi and theta are averages of the usual smoothed point estimates.

Randomness comes from numpy's PCG64 generator seeded from the config, and
the per-sweep uniforms are drawn up front, so a (corpus, config) pair gives
bitwise-identical results on every run and platform.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np
from numba import njit

from .corpus import Corpus, Vocabulary
from .errors import DataError
from . import jsonio


@dataclass(frozen=True)
class TopicModelConfig:
    k: int
    alpha: float = 0.1
    beta: float = 0.01
    sweeps: int = 500
    samples_to_average: int = 100
    seed: int = 0

    def __post_init__(self) -> None:
        if self.k < 1:
            raise DataError(f"topic count must be >= 1, got {self.k}")
        if not self.alpha > 0 or not self.beta > 0:
            raise DataError(f"alpha and beta must be positive, got {self.alpha}, {self.beta}")
        if self.sweeps < 1:
            raise DataError(f"sweeps must be >= 1, got {self.sweeps}")
        if not 1 <= self.samples_to_average <= self.sweeps:
            raise DataError(
                f"samples_to_average must be in [1, sweeps], got {self.samples_to_average}"
            )


@dataclass
class TopicState:
    """Mutable sampler state: assignments, count tables, and the generator.

    ``doc_of`` and ``word_of`` give each modeled token's document index and
    vocabulary id in flat corpus order; they never change after init.
    """

    z: np.ndarray
    n_dk: np.ndarray
    n_kw: np.ndarray
    n_k: np.ndarray
    doc_of: np.ndarray
    word_of: np.ndarray
    rng: np.random.Generator

    def snapshot(self) -> "TopicState":
        """Copy of z and the counts for sample retention; shares the rng."""
        return TopicState(
            z=self.z.copy(),
            n_dk=self.n_dk.copy(),
            n_kw=self.n_kw.copy(),
            n_k=self.n_k.copy(),
            doc_of=self.doc_of,
            word_of=self.word_of,
            rng=self.rng,
        )


@dataclass(frozen=True)
class TopicPosterior:
    """Averaged posterior summaries; immutable and safe to share."""

    psi: np.ndarray
    phi_mean: np.ndarray
    theta_mean: np.ndarray


def _flatten(corpus: Corpus, vocab: Vocabulary) -> tuple[np.ndarray, np.ndarray]:
    doc_ids: list[int] = []
    word_ids: list[int] = []
    for di, doc in enumerate(corpus.documents):
        mask = vocab.modeled_mask[di]
        for ti in np.flatnonzero(mask):
            doc_ids.append(di)
            word_ids.append(vocab.id_of(doc.tokens[ti].text))
    return (
        np.asarray(doc_ids, dtype=np.int32),
        np.asarray(word_ids, dtype=np.int32),
    )


def gibbs_init(corpus: Corpus, vocab: Vocabulary, config: TopicModelConfig) -> TopicState:
    """Assign every modeled token a uniform random topic and tally counts."""
    if vocab.size == 0:
        raise DataError("vocabulary is empty")
    doc_of, word_of = _flatten(corpus, vocab)
    rng = np.random.default_rng(config.seed)
    z = rng.integers(0, config.k, size=doc_of.shape[0], dtype=np.int32)

    n_dk = np.zeros((len(corpus.documents), config.k), dtype=np.int32)
    n_kw = np.zeros((config.k, vocab.size), dtype=np.int32)
    np.add.at(n_dk, (doc_of, z), 1)
    np.add.at(n_kw, (z, word_of), 1)
    n_k = n_kw.sum(axis=1, dtype=np.int32)
    return TopicState(z=z, n_dk=n_dk, n_kw=n_kw, n_k=n_k, doc_of=doc_of, word_of=word_of, rng=rng)


@njit(cache=True)
def _sweep_kernel(z, doc_of, word_of, n_dk, n_kw, n_k, alpha, beta, uniforms):
    k_count = n_k.shape[0]
    vbeta = n_kw.shape[1] * beta
    cumulative = np.empty(k_count, dtype=np.float64)
    for t in range(z.shape[0]):
        d = doc_of[t]
        w = word_of[t]
        old = z[t]
        n_dk[d, old] -= 1
        n_kw[old, w] -= 1
        n_k[old] -= 1
        total = 0.0
        for k in range(k_count):
            total += (n_dk[d, k] + alpha) * (n_kw[k, w] + beta) / (n_k[k] + vbeta)
            cumulative[k] = total
        u = uniforms[t] * total
        new = k_count - 1
        for k in range(k_count):
            if u < cumulative[k]:
                new = k
                break
        z[t] = new
        n_dk[d, new] += 1
        n_kw[new, w] += 1
        n_k[new] += 1


def gibbs_sweep(
    state: TopicState, config: TopicModelConfig, corpus: Corpus, vocab: Vocabulary
) -> TopicState:
    """Resample every modeled token once, in corpus order, in place.

    Returns the same state object for chaining. One uniform per token is
    drawn from the state's generator before the pass; inverse-CDF selection
    inside the kernel consumes them in token order.
    """
    uniforms = state.rng.random(state.z.shape[0])
    _sweep_kernel(
        state.z,
        state.doc_of,
        state.word_of,
        state.n_dk,
        state.n_kw,
        state.n_k,
        float(config.alpha),
        float(config.beta),
        uniforms,
    )
    return state


def estimate_posteriors(
    sample_list: Sequence[TopicState],
    config: TopicModelConfig,
    corpus: Corpus,
    vocab: Vocabulary,
) -> TopicPosterior:
    """Average retained samples into psi, phi_mean, and theta_mean.

    psi[t, k] is the fraction of samples assigning token t to topic k.
    phi_mean and theta_mean average the smoothed point estimates
    (n_kw + beta) / (n_k + V*beta) and (n_dk + alpha) / (n_d + K*alpha)
    over the samples.
    """
    if not sample_list:
        raise DataError("need at least one retained sample")
    k = config.k
    v = vocab.size
    n_docs = len(corpus.documents)
    first = sample_list[0]
    if first.n_kw.shape != (k, v) or first.n_dk.shape != (n_docs, k):
        raise DataError("sample shapes do not match corpus and config")

    n_tokens = first.z.shape[0]
    psi = np.zeros((n_tokens, k), dtype=np.float64)
    phi = np.zeros((k, v), dtype=np.float64)
    theta = np.zeros((n_docs, k), dtype=np.float64)
    rows = np.arange(n_tokens)
    for state in sample_list:
        psi[rows, state.z] += 1.0
        phi += (state.n_kw + config.beta) / (
            (state.n_k + v * config.beta)[:, None]
        )
        n_d = state.n_dk.sum(axis=1)
        theta += (state.n_dk + config.alpha) / ((n_d + k * config.alpha)[:, None])
    s = float(len(sample_list))
    return TopicPosterior(psi=psi / s, phi_mean=phi / s, theta_mean=theta / s)


def token_posterior(theta_d: np.ndarray, phi: np.ndarray, w: int) -> np.ndarray:
    """Posterior over topics for one word under point estimates.

    Normalizes theta_d[k] * phi[k, w] over k.
    """
    theta_d = np.asarray(theta_d, dtype=np.float64)
    phi = np.asarray(phi, dtype=np.float64)
    unnorm = theta_d * phi[:, w]
    total = unnorm.sum()
    if total <= 0.0:
        raise DataError("word has zero probability under all topics")
    return unnorm / total


def top_words(
    phi_mean: np.ndarray, terms: Sequence[str], k: int, n: int
) -> list[tuple[str, float]]:
    """The n most probable terms of topic k, ties broken by term id."""
    phi_mean = np.asarray(phi_mean, dtype=np.float64)
    if not 0 <= k < phi_mean.shape[0]:
        raise DataError(f"topic id {k} out of range for {phi_mean.shape[0]} topics")
    row = phi_mean[k]
    order = sorted(range(len(terms)), key=lambda w: (-row[w], w))
    return [(terms[w], float(row[w])) for w in order[: max(n, 0)]]


@dataclass(frozen=True)
class TrainedTopicModel:
    """A finished LDA run in interchange form.

    ``theta_mean`` rows and the ``psi`` keys follow corpus document order;
    each psi entry holds one K-vector per modeled token of that document,
    in token order.
    """

    k: int
    alpha: float
    beta: float
    terms: tuple[str, ...]
    phi_mean: np.ndarray
    theta_mean: np.ndarray
    psi: dict[str, np.ndarray]

    def doc_ids(self) -> tuple[str, ...]:
        return tuple(self.psi.keys())


def train_lda(corpus: Corpus, vocab: Vocabulary, config: TopicModelConfig) -> TrainedTopicModel:
    """Run the full pipeline: init, sweeps, averaging, per-document split."""
    state = gibbs_init(corpus, vocab, config)
    retained: list[TopicState] = []
    first_kept = config.sweeps - config.samples_to_average
    for sweep in range(config.sweeps):
        gibbs_sweep(state, config, corpus, vocab)
        if sweep >= first_kept:
            retained.append(state.snapshot())
    posterior = estimate_posteriors(retained, config, corpus, vocab)

    psi: dict[str, np.ndarray] = {}
    offset = 0
    for di, doc in enumerate(corpus.documents):
        count = int(vocab.modeled_mask[di].sum())
        psi[doc.id] = posterior.psi[offset : offset + count].copy()
        offset += count
    return TrainedTopicModel(
        k=config.k,
        alpha=config.alpha,
        beta=config.beta,
        terms=vocab.terms,
        phi_mean=posterior.phi_mean,
        theta_mean=posterior.theta_mean,
        psi=psi,
    )


def save_topic_model(model: TrainedTopicModel, path: str) -> None:
    """Write the model file with stable key order and 17-digit floats."""
    payload = {
        "type": "lda",
        "k": model.k,
        "alpha": float(model.alpha),
        "beta": float(model.beta),
        "vocab": list(model.terms),
        "phi_mean": model.phi_mean.tolist(),
        "theta_mean": model.theta_mean.tolist(),
        "psi": {doc_id: vectors.tolist() for doc_id, vectors in model.psi.items()},
    }
    jsonio.dump_path(payload, path)


def load_topic_model(path: str) -> TrainedTopicModel:
    """Read a model file back; values are kept verbatim."""
    try:
        with open(path, encoding="utf-8") as fh:
            raw = json.load(fh)
    except json.JSONDecodeError as exc:
        raise DataError(f"{path}: invalid JSON ({exc.msg})") from exc
    if not isinstance(raw, dict) or raw.get("type") != "lda":
        raise DataError(f"{path}: expected a model file with type 'lda'")
    try:
        k = int(raw["k"])
        alpha = float(raw["alpha"])
        beta = float(raw["beta"])
        terms = tuple(str(t) for t in raw["vocab"])
        phi_mean = np.asarray(raw["phi_mean"], dtype=np.float64)
        theta_mean = np.asarray(raw["theta_mean"], dtype=np.float64)
        psi = {
            str(doc_id): np.asarray(vectors, dtype=np.float64).reshape(-1, k)
            for doc_id, vectors in raw["psi"].items()
        }
    except (KeyError, TypeError, ValueError, AttributeError) as exc:
        raise DataError(f"{path}: malformed topic model file ({exc})") from exc
    if phi_mean.ndim != 2 or phi_mean.shape != (k, len(terms)):
        raise DataError(f"{path}: phi_mean shape {phi_mean.shape} does not match k={k}, V={len(terms)}")
    if theta_mean.ndim != 2 or theta_mean.shape[1] != k or theta_mean.shape[0] != len(psi):
        raise DataError(f"{path}: theta_mean shape {theta_mean.shape} does not match")
    return TrainedTopicModel(
        k=k, alpha=alpha, beta=beta, terms=terms,
        phi_mean=phi_mean, theta_mean=theta_mean, psi=psi,
    )
