"""Color encoding for token-level model quantities.

Topic vectors map to categorical hues by argmax, optionally blended toward
white as the distribution's normalized entropy rises. Scalar attributions
map onto a diverging scale that is exactly white at zero. Interpolation is
plain RGB lerp with round-half-up, which keeps every encoded value
bit-reproducible.
"""

from __future__ import annotations

import json
import math
import warnings
from dataclasses import dataclass, field

import numpy as np

from .errors import DataError

_SIMPLEX_TOL = 1e-6


@dataclass(frozen=True)
class Color:
    r: int
    g: int
    b: int

    def __post_init__(self) -> None:
        for channel in (self.r, self.g, self.b):
            if not isinstance(channel, int) or not 0 <= channel <= 255:
                raise DataError(f"color channel out of range: {(self.r, self.g, self.b)}")

    @property
    def hex(self) -> str:
        return f"#{self.r:02X}{self.g:02X}{self.b:02X}"

    @classmethod
    def from_hex(cls, text: str) -> "Color":
        s = text.strip()
        if not (len(s) == 7 and s[0] == "#"):
            raise DataError(f"expected color like '#RRGGBB', got {text!r}")
        try:
            value = int(s[1:], 16)
        except ValueError as exc:
            raise DataError(f"expected color like '#RRGGBB', got {text!r}") from exc
        return cls(value >> 16, (value >> 8) & 0xFF, value & 0xFF)


WHITE = Color(255, 255, 255)

# Ten qualitative hues of similar brightness; cycled with a warning past ten.
DEFAULT_PALETTE_COLORS = (
    Color(31, 119, 180),
    Color(255, 127, 14),
    Color(44, 160, 44),
    Color(214, 39, 40),
    Color(148, 103, 189),
    Color(140, 86, 75),
    Color(227, 119, 194),
    Color(127, 127, 127),
    Color(188, 189, 34),
    Color(23, 190, 207),
)

DEFAULT_NEGATIVE = Color(33, 102, 172)
DEFAULT_POSITIVE = Color(178, 24, 43)


@dataclass(frozen=True)
class CategoricalPalette:
    colors: tuple[Color, ...]

    def __post_init__(self) -> None:
        if not self.colors:
            raise DataError("palette needs at least one color")
        if len(set(self.colors)) != len(self.colors):
            raise DataError("palette colors must be pairwise distinct")

    def color_for(self, index: int) -> Color:
        return self.colors[index % len(self.colors)]


@dataclass(frozen=True)
class DivergingScale:
    negative_color: Color = DEFAULT_NEGATIVE
    positive_color: Color = DEFAULT_POSITIVE
    midpoint_color: Color = WHITE
    scale_magnitude: float = 1.0

    def __post_init__(self) -> None:
        if not (math.isfinite(self.scale_magnitude) and self.scale_magnitude > 0):
            raise DataError(f"scale_magnitude must be positive, got {self.scale_magnitude}")


def default_palette(k: int) -> CategoricalPalette:
    """The built-in palette; warns when k exceeds the distinct hues."""
    if k > len(DEFAULT_PALETTE_COLORS):
        warnings.warn(
            f"{k} topics exceed the {len(DEFAULT_PALETTE_COLORS)}-color palette; hues will repeat",
            stacklevel=2,
        )
    return CategoricalPalette(DEFAULT_PALETTE_COLORS)


def _round_half_up(x: float) -> int:
    return int(math.floor(x + 0.5))


def _lerp(a: Color, b: Color, t: float) -> Color:
    return Color(
        _round_half_up(a.r + t * (b.r - a.r)),
        _round_half_up(a.g + t * (b.g - a.g)),
        _round_half_up(a.b + t * (b.b - a.b)),
    )


def _check_simplex(psi: np.ndarray) -> np.ndarray:
    psi = np.asarray(psi, dtype=float)
    if psi.ndim != 1 or psi.size == 0:
        raise DataError("expected a non-empty 1-d probability vector")
    if psi.min() < -_SIMPLEX_TOL or abs(psi.sum() - 1.0) > _SIMPLEX_TOL:
        raise DataError(f"vector is not on the probability simplex: {psi.tolist()}")
    return psi


def normalized_entropy(psi: np.ndarray) -> float:
    """Shannon entropy of ``psi`` divided by log K, in [0, 1].

    Zero entries contribute nothing (0 log 0 := 0); a one-entry vector has
    entropy 0 by convention. The ratio is independent of the log base.
    """
    psi = _check_simplex(psi)
    if psi.size == 1:
        return 0.0
    h = 0.0
    for p in psi:
        if p > 0.0:
            h -= p * math.log(p)
    return min(1.0, max(0.0, h / math.log(psi.size)))


def encode_topic(psi: np.ndarray, palette: CategoricalPalette, blend: bool = False) -> Color:
    """Color for a topic-membership vector: the argmax topic's hue.

    Ties go to the lowest topic index. With ``blend`` the hue moves toward
    white as the distribution flattens, reaching pure white at uniform.
    """
    psi = _check_simplex(psi)
    base = palette.color_for(int(np.argmax(psi)))
    if not blend:
        return base
    return _lerp(base, WHITE, normalized_entropy(psi))


def encode_scalar(value: float, scale: DivergingScale) -> Color:
    """Diverging color for a scalar attribution, white exactly at zero.

    Magnitudes at or beyond ``scale_magnitude`` saturate at the endpoint
    colors; the sign picks the endpoint.
    """
    if not math.isfinite(value):
        raise DataError(f"attribution value must be finite, got {value}")
    u = max(-1.0, min(1.0, value / scale.scale_magnitude))
    if u == 0.0:
        return scale.midpoint_color
    if u > 0.0:
        return _lerp(scale.midpoint_color, scale.positive_color, u)
    return _lerp(scale.midpoint_color, scale.negative_color, -u)


def fit_scale(
    values,
    percentile: float = 95.0,
    negative_color: Color = DEFAULT_NEGATIVE,
    positive_color: Color = DEFAULT_POSITIVE,
) -> DivergingScale:
    """Pick a saturation magnitude from attribution values.

    Uses the nearest-rank percentile of the nonzero absolute values, which
    keeps one huge feature weight from washing out all contrast.
    """
    if not 0 < percentile <= 100:
        raise DataError(f"percentile must be in (0, 100], got {percentile}")
    magnitudes = np.abs(np.asarray(list(values), dtype=float))
    magnitudes = magnitudes[np.isfinite(magnitudes) & (magnitudes > 0)]
    if magnitudes.size == 0:
        raise DataError("degenerate attribution; nothing to scale")
    magnitudes.sort()
    rank = math.ceil(percentile / 100.0 * magnitudes.size)
    return DivergingScale(
        negative_color=negative_color,
        positive_color=positive_color,
        scale_magnitude=float(magnitudes[max(rank, 1) - 1]),
    )


@dataclass(frozen=True)
class StyleConfig:
    """Optional overrides for palettes, scale endpoints, and blending."""

    palette: CategoricalPalette | None = None
    negative_color: Color = DEFAULT_NEGATIVE
    positive_color: Color = DEFAULT_POSITIVE
    percentile: float = 95.0
    blend: bool = False


def load_style(path: str) -> StyleConfig:
    """Read a style override file (all keys optional).

    Schema: {"palette": ["#RRGGBB", ...], "negative": "#RRGGBB",
    "positive": "#RRGGBB", "percentile": float, "blend": bool}.
    """
    try:
        with open(path, encoding="utf-8") as fh:
            raw = json.load(fh)
    except json.JSONDecodeError as exc:
        raise DataError(f"{path}: invalid JSON ({exc.msg})") from exc
    if not isinstance(raw, dict):
        raise DataError(f"{path}: style file must hold a JSON object")

    palette = None
    if "palette" in raw:
        palette = CategoricalPalette(tuple(Color.from_hex(h) for h in raw["palette"]))
    negative = Color.from_hex(raw["negative"]) if "negative" in raw else DEFAULT_NEGATIVE
    positive = Color.from_hex(raw["positive"]) if "positive" in raw else DEFAULT_POSITIVE
    percentile = float(raw.get("percentile", 95.0))
    blend = bool(raw.get("blend", False))
    return StyleConfig(
        palette=palette,
        negative_color=negative,
        positive_color=positive,
        percentile=percentile,
        blend=blend,
    )
