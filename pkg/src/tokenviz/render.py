"""The two views: in-text annotated HTML and the words-as-pixels raster.

The raster lays modeled tokens out in left-to-right descending columns:
token t sits at column t // H, row t mod H, drawn as an s by s square.
hit_test inverts that mapping for mouse coordinates. The PNG encoder here
is deliberately minimal (8-bit RGB, filter 0, one IDAT, fixed compression
level) so identical inputs always produce identical bytes.
"""

from __future__ import annotations

import html
import struct
import zlib
from dataclasses import dataclass
from typing import Mapping, Sequence

import numpy as np

from .colors import Color
from .corpus import Corpus, Document
from .errors import DataError

RENDER_MODES = ("background", "foreground")

_PNG_SIGNATURE = b"\x89PNG\r\n\x1a\n"
_ZLIB_LEVEL = 6


@dataclass(frozen=True)
class PixelLayout:
    """Geometry of the pixel grid over N modeled tokens in corpus order."""

    column_height: int
    pixel_size: int
    token_count: int

    def __post_init__(self) -> None:
        if self.column_height < 1 or self.pixel_size < 1 or self.token_count < 0:
            raise DataError(
                f"invalid layout: H={self.column_height}, s={self.pixel_size}, N={self.token_count}"
            )

    @property
    def columns(self) -> int:
        return -(-self.token_count // self.column_height)

    @property
    def width(self) -> int:
        return self.columns * self.pixel_size

    @property
    def height(self) -> int:
        return self.column_height * self.pixel_size

    def cell_origin(self, t: int) -> tuple[int, int]:
        """Top-left device pixel of token t's square."""
        col, row = divmod(t, self.column_height)
        return col * self.pixel_size, row * self.pixel_size


def layout_pixels(
    modeled_token_count: int, column_height: int = 150, pixel_size: int = 3
) -> PixelLayout:
    return PixelLayout(
        column_height=column_height, pixel_size=pixel_size, token_count=modeled_token_count
    )


def layout_json(layout: PixelLayout) -> dict:
    return {
        "columnHeight": layout.column_height,
        "pixelSize": layout.pixel_size,
        "tokenCount": layout.token_count,
    }


def hit_test(layout: PixelLayout, x: int, y: int) -> int | None:
    """Token index under device pixel (x, y), or None for misses.

    Padding cells past the last token and coordinates outside the image
    both miss.
    """
    if x < 0 or y < 0 or x >= layout.width or y >= layout.height:
        return None
    t = (x // layout.pixel_size) * layout.column_height + y // layout.pixel_size
    return t if t < layout.token_count else None


def _png_chunk(tag: bytes, payload: bytes) -> bytes:
    return (
        struct.pack(">I", len(payload))
        + tag
        + payload
        + struct.pack(">I", zlib.crc32(tag + payload) & 0xFFFFFFFF)
    )


def encode_png(pixels: np.ndarray) -> bytes:
    """Encode an (height, width, 3) uint8 array as a deterministic PNG."""
    if pixels.ndim != 3 or pixels.shape[2] != 3 or pixels.dtype != np.uint8:
        raise DataError(f"expected (h, w, 3) uint8 pixels, got {pixels.shape} {pixels.dtype}")
    h, w = pixels.shape[:2]
    if h == 0 or w == 0:
        raise DataError("cannot encode an empty image")
    header = struct.pack(">IIBBBBB", w, h, 8, 2, 0, 0, 0)
    # One filter byte (0 = None) in front of each scanline.
    rows = np.concatenate(
        [np.zeros((h, 1), dtype=np.uint8), pixels.reshape(h, w * 3)], axis=1
    )
    return (
        _PNG_SIGNATURE
        + _png_chunk(b"IHDR", header)
        + _png_chunk(b"IDAT", zlib.compress(rows.tobytes(), _ZLIB_LEVEL))
        + _png_chunk(b"IEND", b"")
    )


def render_pixels(
    layout: PixelLayout,
    colors: Sequence[Color],
    doc_starts: Sequence[int] | None = None,
) -> bytes:
    """Draw the token grid as a PNG; padding cells stay white.

    ``doc_starts`` lists the grid indices that begin a document; when given,
    the top pixel row of each such square is drawn black as a separator.
    """
    if len(colors) != layout.token_count:
        raise DataError(
            f"got {len(colors)} colors for {layout.token_count} tokens"
        )
    if layout.token_count == 0:
        raise DataError("no modeled tokens to draw")

    s = layout.pixel_size
    image = np.full((layout.height, layout.width, 3), 255, dtype=np.uint8)
    for t, color in enumerate(colors):
        x, y = layout.cell_origin(t)
        image[y : y + s, x : x + s] = (color.r, color.g, color.b)
    if doc_starts is not None:
        for t in doc_starts:
            if not 0 <= t < layout.token_count:
                raise DataError(f"document start index {t} out of range")
            x, y = layout.cell_origin(t)
            image[y, x : x + s] = 0
    return encode_png(image)


def _span(index: int, text: str, color: Color | None, mode: str, focus: bool) -> str:
    classes = "tok focus" if focus else "tok"
    escaped = html.escape(text)
    if color is None:
        return f'<span class="{classes}" data-t="{index}">{escaped}</span>'
    prop = "background-color" if mode == "background" else "color"
    return f'<span class="{classes}" data-t="{index}" style="{prop}:{color.hex}">{escaped}</span>'


def render_intext(
    doc: Document,
    colors: Sequence[Color | None],
    modeled_mask: Sequence[bool] | None = None,
    mode: str = "background",
    focus: int | None = None,
    start: int = 0,
    end: int | None = None,
) -> str:
    """Render a document (or a token subrange of it) as an HTML fragment.

    Each token becomes a span carrying its in-document index in ``data-t``;
    the text between tokens passes through verbatim apart from HTML
    escaping, so stripping the tags reproduces the source. Tokens that are
    not modeled (mask false, or a None color) get no style attribute.
    """
    if mode not in RENDER_MODES:
        raise DataError(f"unknown render mode {mode!r}")
    if len(colors) != len(doc.tokens):
        raise DataError(
            f"document {doc.id!r}: got {len(colors)} colors for {len(doc.tokens)} tokens"
        )
    end = len(doc.tokens) if end is None else end
    if not (0 <= start <= end <= len(doc.tokens)):
        raise DataError(f"token range [{start}, {end}) invalid for document {doc.id!r}")

    parts = [f'<div class="doc" data-doc="{html.escape(doc.id)}">']
    if start < end:
        cursor = doc.tokens[start].char_start
        for i in range(start, end):
            tok = doc.tokens[i]
            parts.append(html.escape(doc.source_text[cursor : tok.char_start]))
            color = colors[i]
            if modeled_mask is not None and not modeled_mask[i]:
                color = None
            parts.append(
                _span(i, doc.source_text[tok.char_start : tok.char_end], color, mode, i == focus)
            )
            cursor = tok.char_end
        if start == 0 and end == len(doc.tokens):
            # Whole-document render keeps the text outside the token hull too.
            leading = html.escape(doc.source_text[: doc.tokens[0].char_start])
            parts.insert(1, leading)
            parts.append(html.escape(doc.source_text[cursor:]))
    elif start == 0 and end == 0 and not doc.tokens:
        parts.append(html.escape(doc.source_text))
    parts.append("</div>")
    return "".join(parts)


def passage_for_token(
    corpus: Corpus,
    positions: Sequence[tuple[int, int]],
    doc_colors: Mapping[int, Sequence[Color | None]],
    t: int,
    window: int = 0,
    mode: str = "background",
) -> tuple[str, tuple[int, int], str]:
    """Resolve a grid token index to its document and render the passage.

    ``positions`` is the grid-order list of (document index, token index)
    pairs; ``doc_colors`` maps document index to that document's full color
    sequence. Window 0 renders the whole document; window w renders w
    tokens of context on each side of the focus token. Returns the doc id,
    the rendered in-document token range, and the HTML fragment.
    """
    if not 0 <= t < len(positions):
        raise DataError(f"token index {t} out of range for {len(positions)} tokens")
    if window < 0:
        raise DataError(f"window must be >= 0, got {window}")
    doc_index, tok_index = positions[t]
    doc = corpus.documents[doc_index]
    if window == 0:
        start, end = 0, len(doc.tokens)
    else:
        start = max(0, tok_index - window)
        end = min(len(doc.tokens), tok_index + window + 1)
    fragment = render_intext(
        doc,
        doc_colors[doc_index],
        mode=mode,
        focus=tok_index,
        start=start,
        end=end,
    )
    return doc.id, (start, end), fragment
