"""Acceptance suite: one test per release criterion, A1 through A9.

Every oracle here is recomputed from first principles (exact rational
arithmetic, exhaustive enumeration, independent decoders) rather than
borrowed from the code under test. Criteria with runtime bounds measure
themselves with perf_counter and fail when over budget.
"""

import html
import io
import json
import math
import random
import re
import threading
import time
import urllib.request
from collections import Counter
from fractions import Fraction
from pathlib import Path

import numpy as np
import pytest
from PIL import Image

from tokenviz import (
    Color,
    LinearTextModel,
    TopicModelConfig,
    build_bundle,
    build_vocabulary,
    counterfactual_delete,
    default_palette,
    doc_log_odds,
    encode_scalar,
    encode_topic,
    fit_scale,
    gibbs_init,
    gibbs_sweep,
    hit_test,
    layout_pixels,
    make_server,
    render_intext,
    render_pixels,
    span_weights,
    token_attribution,
    token_posterior,
    train_lda,
    train_mnb,
)
from tokenviz.cli import cli_main

from conftest import char_corpus, word_corpus, word_doc, write_jsonl


def _unigram_instance(rng):
    """A random two-class unigram problem plus an in-universe test doc."""
    vocab = [f"w{j:02d}" for j in range(rng.randint(2, 20))]

    def doc():
        return [rng.choice(vocab) for _ in range(rng.randint(3, 30))]

    docs_a = [doc() for _ in range(rng.randint(2, 6))]
    docs_b = [doc() for _ in range(rng.randint(2, 6))]
    corpus = word_corpus(
        *[(f"a{i}", " ".join(d), "A") for i, d in enumerate(docs_a)],
        *[(f"b{i}", " ".join(d), "B") for i, d in enumerate(docs_b)],
    )
    model = train_mnb(corpus, (1,), smoothing=1.0)
    universe = sorted({w for d in docs_a + docs_b for w in d})
    test_doc = [rng.choice(universe) for _ in range(rng.randint(1, 50))]
    return model, docs_a, docs_b, universe, test_doc


def test_A1_unigram_additivity_and_posterior_sign():
    rng = random.Random(101)
    start = time.perf_counter()
    for _ in range(200):
        model, docs_a, docs_b, universe, test_doc = _unigram_instance(rng)
        att = doc_log_odds(model, test_doc)

        total = model.prior_logit
        for v in att.psi:
            total += v
        assert att.total_log_odds == total  # bitwise, not approx

        counts_a = Counter(w for d in docs_a for w in d)
        counts_b = Counter(w for d in docs_b for w in d)
        g = len(universe)
        t_a = sum(counts_a.values())
        t_b = sum(counts_b.values())
        odds = Fraction(len(docs_a), len(docs_b))
        for w in test_doc:
            odds *= Fraction(counts_a[w] + 1, t_a + g)
            odds /= Fraction(counts_b[w] + 1, t_b + g)
        if odds > 1:
            assert att.total_log_odds > 0
        elif odds < 1:
            assert att.total_log_odds < 0
        else:
            assert abs(att.total_log_odds) < 1e-9
    assert time.perf_counter() - start < 5.0


def test_A2_char_ngram_span_consistency():
    rng = random.Random(202)
    orders = (1, 2, 3, 4)
    start = time.perf_counter()
    for _ in range(200):
        alphabet = "abcdef"[: rng.randint(2, 6)]

        def text(lo, hi):
            return "".join(rng.choice(alphabet) for _ in range(rng.randint(lo, hi)))

        corpus = char_corpus(
            *[(f"a{i}", text(8, 40), "A") for i in range(rng.randint(2, 4))],
            *[(f"b{i}", text(8, 40), "B") for i in range(rng.randint(2, 4))],
        )
        model = train_mnb(corpus, orders, smoothing=0.5)

        doc = text(4, 50)
        spans = span_weights(model, tuple(doc))
        expected = set()
        for n in orders:
            for i in range(len(doc) - n + 1):
                gram = doc[i : i + n]
                if gram in model.weights:
                    expected.add((i, i + n, gram, model.weights[gram]))
        assert {(sp.start, sp.end, sp.gram, sp.weight) for sp in spans} == expected

        att = token_attribution(spans, len(doc))
        per_token_mass = sum(att.psi)
        per_span_mass = sum((sp.end - sp.start) * sp.weight for sp in spans)
        assert per_token_mass == pytest.approx(per_span_mass, abs=1e-9)
    assert time.perf_counter() - start < 10.0


def test_A3_planted_topic_recovery():
    rng = np.random.default_rng(33)
    vocab_a = [f"alpha{j:02d}" for j in range(20)]
    vocab_b = [f"bravo{j:02d}" for j in range(20)]
    entries = []
    truth = []
    for d in range(200):
        topic = d % 2
        words = rng.choice(vocab_a if topic == 0 else vocab_b, size=30)
        entries.append((f"d{d:03d}", " ".join(words)))
        truth.append(topic)
    corpus = word_corpus(*entries)
    vocab = build_vocabulary(corpus, min_count=1, max_doc_fraction=1.0, stopwords=frozenset())
    config = TopicModelConfig(
        k=2, alpha=0.1, beta=0.01, sweeps=500, samples_to_average=100, seed=3
    )

    start = time.perf_counter()
    model = train_lda(corpus, vocab, config)
    elapsed = time.perf_counter() - start

    preds = np.concatenate(
        [np.argmax(model.psi[doc.id], axis=1) for doc in corpus.documents]
    )
    wants = np.concatenate(
        [
            np.full(model.psi[doc.id].shape[0], truth[d], dtype=np.int64)
            for d, doc in enumerate(corpus.documents)
        ]
    )
    agree = int((preds == wants).sum())
    purity = max(agree, preds.size - agree) / preds.size
    assert purity >= 0.9
    assert elapsed < 30.0


def test_A4_tiny_lda_matches_exact_enumeration():
    corpus = word_corpus(("d0", "u v"))
    vocab = build_vocabulary(corpus, min_count=1, max_doc_fraction=1.0, stopwords=frozenset())
    assert vocab.terms == ("u", "v")
    config = TopicModelConfig(
        k=2, alpha=1.0, beta=1.0, sweeps=50_000, samples_to_average=1, seed=12
    )

    words = (0, 1)

    def log_joint(z):
        # Collapsed P(z, w) for one document: Polya factors with theta and
        # phi integrated out, K = V = 2, alpha = beta = 1.
        lp = math.lgamma(2.0) - math.lgamma(len(z) + 2.0)
        for k in range(2):
            n_dk = sum(1 for zt in z if zt == k)
            lp += math.lgamma(n_dk + 1.0) - math.lgamma(1.0)
            n_k = sum(1 for zt in z if zt == k)
            lp += math.lgamma(2.0) - math.lgamma(n_k + 2.0)
            for w in range(2):
                n_kw = sum(1 for zt, wt in zip(z, words) if zt == k and wt == w)
                lp += math.lgamma(n_kw + 1.0) - math.lgamma(1.0)
        return lp

    cells = [(0, 0), (0, 1), (1, 0), (1, 1)]
    mass = [math.exp(log_joint(z)) for z in cells]
    exact = {z: m / sum(mass) for z, m in zip(cells, mass)}
    # the enumeration itself has a closed form to cross-check against
    assert exact[(0, 0)] == pytest.approx(2 / 7, rel=1e-12)
    assert exact[(0, 1)] == pytest.approx(3 / 14, rel=1e-12)

    state = gibbs_init(corpus, vocab, config)
    tally = Counter()
    for _ in range(50_000):
        gibbs_sweep(state, config, corpus, vocab)
        tally[(int(state.z[0]), int(state.z[1]))] += 1
    tv = 0.5 * sum(abs(tally[z] / 50_000 - exact[z]) for z in cells)
    assert tv < 0.02

    rng = np.random.default_rng(44)
    for _ in range(100):
        k = int(rng.integers(1, 6))
        v = int(rng.integers(1, 8))
        theta = rng.random(k) + 1e-3
        theta /= theta.sum()
        phi = rng.random((k, v)) + 1e-3
        phi /= phi.sum(axis=1, keepdims=True)
        w = int(rng.integers(0, v))
        got = token_posterior(theta, phi, w)
        raw = [float(theta[i]) * float(phi[i, w]) for i in range(k)]
        for i in range(k):
            assert abs(got[i] - raw[i] / sum(raw)) <= 1e-12


def test_A5_deletion_counterfactual():
    rng = random.Random(55)
    for _ in range(100):
        model, _, _, _, test_doc = _unigram_instance(rng)
        att = doc_log_odds(model, test_doc)
        for t in range(len(test_doc)):
            assert counterfactual_delete(model, test_doc, t) == -att.psi[t]

    # n-gram models against scratch re-scoring; weights in sixty-fourths
    # keep both computations exact, so equality is literal
    for _ in range(20):
        grams = set()
        for n in (1, 2, 3):
            for _ in range(rng.randint(3, 10)):
                grams.add("".join(rng.choice("abcd") for _ in range(n)))
        model = LinearTextModel(
            class_a="a",
            class_b="b",
            prior_logit=0.0,
            ngram_orders=(1, 2, 3),
            weights={g: rng.randint(-64, 64) / 64 for g in sorted(grams)},
            token_mode="char",
        )
        chars = tuple(rng.choice("abcd") for _ in range(rng.randint(4, 30)))
        base = doc_log_odds(model, chars).total_log_odds
        for t in range(len(chars)):
            delta = counterfactual_delete(model, chars, t)
            scratch = doc_log_odds(model, chars[:t] + chars[t + 1 :]).total_log_odds - base
            assert delta == scratch

    # a gram bridging the deleted position makes the delta differ from -psi
    model = LinearTextModel(
        class_a="a",
        class_b="b",
        prior_logit=0.0,
        ngram_orders=(1, 2),
        weights={"a": 0.125, "b": -0.25, "c": -0.125, "ab": 0.5, "bc": 0.25, "ac": 0.75},
        token_mode="char",
    )
    att = doc_log_odds(model, ("a", "b", "c"))
    delta = counterfactual_delete(model, ("a", "b", "c"), 1)
    scratch = doc_log_odds(model, ("a", "c")).total_log_odds - att.total_log_odds
    assert delta == scratch == 0.25
    assert att.psi[1] == 0.5
    assert delta != -att.psi[1]


def test_A6_color_encoding_contracts():
    scale = fit_scale([0.5, -2.0, 1.0])
    assert encode_scalar(0.0, scale).hex == "#FFFFFF"

    palette = default_palette(4)
    for k in range(4):
        one_hot = np.zeros(4)
        one_hot[k] = 1.0
        assert encode_topic(one_hot, palette) == palette.color_for(k)
        assert encode_topic(one_hot, palette, blend=True) == palette.color_for(k)
    assert encode_topic(np.full(4, 0.25), palette, blend=True) == Color(255, 255, 255)

    mag = scale.scale_magnitude
    assert encode_scalar(mag, scale) == scale.positive_color
    assert encode_scalar(-mag, scale) == scale.negative_color
    assert encode_scalar(5 * mag, scale) == scale.positive_color
    assert encode_scalar(-5 * mag, scale) == scale.negative_color

    # farther from zero means closer to the endpoint color, channel by
    # channel, across 1000 sampled attribution values
    rng = np.random.default_rng(66)
    values = np.sort(rng.uniform(-1.5 * mag, 1.5 * mag, size=1000))
    colors = [encode_scalar(float(v), scale) for v in values]

    def dist(color, endpoint):
        return tuple(
            abs(getattr(color, ch) - getattr(endpoint, ch)) for ch in ("r", "g", "b")
        )

    for (v0, c0), (v1, c1) in zip(zip(values, colors), zip(values[1:], colors[1:])):
        if v0 >= 0 and v1 >= 0:
            assert all(
                d1 <= d0 for d0, d1 in zip(dist(c0, scale.positive_color), dist(c1, scale.positive_color))
            )
        elif v1 <= 0:
            assert all(
                d0 <= d1 for d0, d1 in zip(dist(c0, scale.negative_color), dist(c1, scale.negative_color))
            )


def test_A7_geometry_round_trip():
    layout = layout_pixels(100_000)
    for t in range(100_000):
        x, y = layout.cell_origin(t)
        assert hit_test(layout, x + 1, y + 1) == t

    rng = np.random.default_rng(77)
    n, h, s = 1234, 37, 2
    small = layout_pixels(n, column_height=h, pixel_size=s)
    colors = [Color(int(r), int(g), int(b)) for r, g, b in rng.integers(0, 256, size=(n, 3))]
    with Image.open(io.BytesIO(render_pixels(small, colors))) as img:
        arr = np.asarray(img.convert("RGB"))
    for t in range(n):
        x, y = small.cell_origin(t)
        assert tuple(arr[y + s // 2, x + s // 2]) == (colors[t].r, colors[t].g, colors[t].b)

    text = ' Stripping the <markup> must return évery byte & "space" intact.\n\tTail '
    doc = word_doc("roundtrip", text)
    rendered = render_intext(doc, [Color(200, 220, 240)] * len(doc.tokens))
    assert html.unescape(re.sub(r"<[^>]*>", "", rendered)) == text


def test_A8_suffix_marked_dialect_attribution():
    rng = random.Random(88)
    stems = [
        "".join(rng.choice("bdklmprstv") for _ in range(rng.randint(3, 5)))
        for _ in range(30)
    ]

    def plain_message():
        return " ".join(rng.choice(stems) for _ in range(rng.randint(4, 8)))

    def marked_message():
        words = []
        suffix_spans = []
        pos = 0
        for _ in range(rng.randint(4, 8)):
            stem = rng.choice(stems)
            suffix = rng.choice(("ao", "nna"))
            suffix_spans.append((pos + len(stem), pos + len(stem) + len(suffix)))
            words.append(stem + suffix)
            pos += len(stem) + len(suffix) + 1
        return " ".join(words), suffix_spans

    train = [(f"e{i}", plain_message(), "english") for i in range(60)]
    for i in range(60):
        message, _ = marked_message()
        train.append((f"t{i}", message, "tagalog"))
    model = train_mnb(char_corpus(*train), (1, 2, 3, 4), smoothing=1.0)
    assert (model.class_a, model.class_b) == ("english", "tagalog")

    hits = 0
    held_out = 25
    for _ in range(held_out):
        message, suffix_spans = marked_message()
        att = doc_log_odds(model, tuple(message))
        worst = min(range(len(message)), key=lambda t: att.psi[t])
        hits += any(start <= worst < end for start, end in suffix_spans)
    assert hits >= 0.8 * held_out


def test_A9_cli_end_to_end_determinism(tmp_path):
    labeled = write_jsonl(
        tmp_path / "labeled.jsonl",
        [
            {"id": "p0", "text": "good great fun ride", "label": "pos"},
            {"id": "p1", "text": "great acting, good fun", "label": "pos"},
            {"id": "n0", "text": "dull dull plot", "label": "neg"},
            {"id": "n1", "text": "a dull ride", "label": "neg"},
        ],
    )
    plain = write_jsonl(
        tmp_path / "plain.jsonl",
        [
            {"id": "d0", "text": "apple pear apple pear apple plum"},
            {"id": "d1", "text": "stone iron stone iron stone coal"},
            {"id": "d2", "text": "apple plum pear apple pear apple"},
            {"id": "d3", "text": "iron coal stone iron stone stone"},
        ],
    )

    def run_twice(args, suffix):
        out = [str(tmp_path / f"{suffix}.{run}") for run in "ab"]
        for path in out:
            assert cli_main(args + ["-o", path]) == 0
        blobs = [Path(p).read_bytes() for p in out]
        assert blobs[0] == blobs[1]
        return out[0]

    clf = run_twice(
        ["train-clf", "--corpus", labeled, "--mode", "word", "--ngrams", "1-2",
         "--seed", "17"],
        "clf.json",
    )
    lda = run_twice(
        ["train-lda", "--corpus", plain, "--k", "2", "--sweeps", "40",
         "--avg-samples", "10", "--min-count", "1", "--max-doc-frac", "1.0",
         "--seed", "17"],
        "lda.json",
    )
    run_twice(
        ["annotate", "--model", clf, "--corpus", labeled, "--doc", "p0"], "p0.html"
    )
    run_twice(
        ["annotate", "--model", lda, "--corpus", plain, "--doc", "d1"], "d1.html"
    )
    run_twice(["pixels", "--model", clf, "--corpus", labeled], "clf.png")
    run_twice(
        ["pixels", "--model", lda, "--corpus", plain, "--separators"], "lda.png"
    )

    # the API views are part of the surface: two servers built from the
    # same artifacts must answer with identical bytes
    def snapshot():
        server = make_server(build_bundle(plain, lda))
        thread = threading.Thread(target=server.serve_forever, daemon=True)
        thread.start()
        base = f"http://127.0.0.1:{server.server_port}"
        try:
            pages = []
            for route in ("/api/meta", "/api/layout", "/api/pixels",
                          "/api/token/0", "/api/passage?token=5&window=2"):
                with urllib.request.urlopen(base + route) as resp:
                    pages.append(resp.read())
            return pages
        finally:
            server.shutdown()
            server.server_close()
            thread.join(timeout=5)

    assert snapshot() == snapshot()

    meta = json.loads(snapshot()[0])
    assert meta["modelType"] == "lda" and meta["k"] == 2
