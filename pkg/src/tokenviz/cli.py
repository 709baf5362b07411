"""Command-line pipeline: train models, render views, serve the explorer.

Exit codes: 0 success, 1 usage error, 2 data error (bad files, mismatched
model/corpus pairs, ports that cannot be bound). Every subcommand accepts
--seed; only training consumes randomness, and a fixed seed makes every
output file byte-identical across runs.
"""

from __future__ import annotations

import argparse
import html
import sys

from .bundle import build_bundle
from .classifier import export_linear_model, train_mnb
from .colors import load_style
from .corpus import build_vocabulary, load_corpus
from .errors import DataError
from .render import layout_pixels, render_intext, render_pixels
from .server import serve
from .topics import TopicModelConfig, save_topic_model, train_lda

_ANNOTATE_PAGE = """<!doctype html>
<html><head><meta charset="utf-8"><title>{title}</title>
<style>
body {{ font-family: Georgia, serif; max-width: 48rem; margin: 2rem auto; line-height: 1.7; }}
.tok {{ border-radius: 2px; padding: 0 1px; }}
</style></head>
<body>
{fragment}
</body></html>
"""


def _parse_orders(text: str) -> tuple[int, ...]:
    parts = text.split("-")
    if len(parts) == 1:
        lo = hi = int(parts[0])
    elif len(parts) == 2:
        lo, hi = int(parts[0]), int(parts[1])
    else:
        raise ValueError(text)
    if lo < 1 or hi < lo:
        raise ValueError(text)
    return tuple(range(lo, hi + 1))


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="tokenviz",
        description="Token-level color views of text models.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    lda = sub.add_parser("train-lda", help="train an LDA topic model")
    lda.add_argument("--corpus", required=True, help="JSONL corpus file")
    lda.add_argument("--k", type=int, required=True, help="topic count")
    lda.add_argument("--alpha", type=float, default=0.1)
    lda.add_argument("--beta", type=float, default=0.01)
    lda.add_argument("--sweeps", type=int, default=500)
    lda.add_argument("--avg-samples", type=int, default=100)
    lda.add_argument("--min-count", type=int, default=5, help="vocabulary count floor")
    lda.add_argument("--max-doc-frac", type=float, default=0.5, help="vocabulary spread ceiling")
    lda.add_argument("-o", "--output", required=True)
    lda.set_defaults(func=_cmd_train_lda)

    clf = sub.add_parser("train-clf", help="train a two-class naive Bayes n-gram model")
    clf.add_argument("--corpus", required=True, help="labeled JSONL corpus file")
    clf.add_argument("--mode", choices=("word", "char"), required=True)
    clf.add_argument("--ngrams", type=_parse_orders, required=True, metavar="LO-HI")
    clf.add_argument("--smoothing", type=float, default=1.0)
    clf.add_argument("--max-features", type=int, default=None)
    clf.add_argument("-o", "--output", required=True)
    clf.set_defaults(func=_cmd_train_clf)

    ann = sub.add_parser("annotate", help="render one document as annotated HTML")
    ann.add_argument("--model", required=True)
    ann.add_argument("--corpus", required=True)
    ann.add_argument("--doc", required=True, help="document id")
    ann.add_argument("--fg", action="store_true", help="color the text instead of the background")
    ann.add_argument("-o", "--output", required=True)
    ann.set_defaults(func=_cmd_annotate)

    pix = sub.add_parser("pixels", help="render the words-as-pixels PNG")
    pix.add_argument("--model", required=True)
    pix.add_argument("--corpus", required=True)
    pix.add_argument("--column-height", type=int, default=150)
    pix.add_argument("--pixel-size", type=int, default=3)
    pix.add_argument("--separators", action="store_true", help="mark document starts")
    pix.add_argument(
        "--stride",
        type=int,
        default=1,
        help="keep every Nth modeled token; a coarse sample of huge corpora",
    )
    pix.add_argument("-o", "--output", required=True)
    pix.set_defaults(func=_cmd_pixels)

    srv = sub.add_parser("serve", help="serve the linked-views explorer")
    srv.add_argument("--model", required=True)
    srv.add_argument("--corpus", required=True)
    srv.add_argument("--port", type=int, default=8399)
    srv.add_argument("--host", default="127.0.0.1")
    srv.add_argument("--colors", default=None, help="style override JSON file")
    srv.add_argument("--ui", default=None, help="directory of static UI files to serve at /")
    srv.set_defaults(func=_cmd_serve)

    for command in (lda, clf, ann, pix, srv):
        command.add_argument("--seed", type=int, default=0)
    return parser


def _cmd_train_lda(args: argparse.Namespace) -> int:
    corpus = load_corpus(args.corpus, token_mode="word")
    vocab = build_vocabulary(corpus, min_count=args.min_count, max_doc_fraction=args.max_doc_frac)
    config = TopicModelConfig(
        k=args.k,
        alpha=args.alpha,
        beta=args.beta,
        sweeps=args.sweeps,
        samples_to_average=args.avg_samples,
        seed=args.seed,
    )
    save_topic_model(train_lda(corpus, vocab, config), args.output)
    return 0


def _cmd_train_clf(args: argparse.Namespace) -> int:
    corpus = load_corpus(args.corpus, token_mode=args.mode)
    model = train_mnb(
        corpus, args.ngrams, smoothing=args.smoothing, max_features=args.max_features
    )
    export_linear_model(model, args.output)
    return 0


def _cmd_annotate(args: argparse.Namespace) -> int:
    bundle = build_bundle(args.corpus, args.model)
    doc_index = next(
        (i for i, d in enumerate(bundle.corpus.documents) if d.id == args.doc), None
    )
    if doc_index is None:
        raise DataError(f"no document with id {args.doc!r}")
    fragment = render_intext(
        bundle.corpus.documents[doc_index],
        bundle.doc_colors[doc_index],
        mode="foreground" if args.fg else "background",
    )
    page = _ANNOTATE_PAGE.format(title=html.escape(args.doc), fragment=fragment)
    with open(args.output, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(page)
    return 0


def _cmd_pixels(args: argparse.Namespace) -> int:
    if args.stride < 1:
        raise DataError(f"stride must be >= 1, got {args.stride}")
    bundle = build_bundle(
        args.corpus,
        args.model,
        column_height=args.column_height,
        pixel_size=args.pixel_size,
    )
    colors = bundle.colors[:: args.stride]
    layout = layout_pixels(len(colors), args.column_height, args.pixel_size)
    doc_starts = None
    if args.separators:
        kept = bundle.positions[:: args.stride]
        doc_starts = tuple(
            g for g, (di, _) in enumerate(kept) if g == 0 or kept[g - 1][0] != di
        )
    png = render_pixels(layout, colors, doc_starts)
    with open(args.output, "wb") as fh:
        fh.write(png)
    return 0


def _cmd_serve(args: argparse.Namespace) -> int:
    style = load_style(args.colors) if args.colors else None
    bundle = build_bundle(args.corpus, args.model, style=style)
    serve(bundle, port=args.port, host=args.host, static_dir=args.ui)
    return 0


def cli_main(argv: list[str] | None = None) -> int:
    parser = _build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return 0 if exc.code == 0 else 1
    try:
        return args.func(args)
    except DataError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


def main() -> int:
    return cli_main()
