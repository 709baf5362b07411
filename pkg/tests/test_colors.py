import json
import math

import numpy as np
import pytest
from hypothesis import given, strategies as st

from tokenviz import (
    CategoricalPalette,
    Color,
    DataError,
    DivergingScale,
    default_palette,
    encode_scalar,
    encode_topic,
    fit_scale,
    load_style,
    normalized_entropy,
)
from tokenviz.colors import DEFAULT_NEGATIVE, DEFAULT_PALETTE_COLORS, DEFAULT_POSITIVE, WHITE


def test_color_hex_and_from_hex():
    assert Color(31, 119, 180).hex == "#1F77B4"
    assert Color.from_hex("#1f77b4") == Color(31, 119, 180)
    assert Color.from_hex("#FFFFFF") == WHITE


def test_color_validation():
    with pytest.raises(DataError):
        Color(-1, 0, 0)
    with pytest.raises(DataError):
        Color(0, 256, 0)
    with pytest.raises(DataError):
        Color.from_hex("1F77B4")
    with pytest.raises(DataError):
        Color.from_hex("#FF00ZZ")


def test_palette_rejects_duplicates():
    with pytest.raises(DataError):
        CategoricalPalette((Color(1, 2, 3), Color(1, 2, 3)))
    with pytest.raises(DataError):
        CategoricalPalette(())


def test_default_palette_cycles_with_warning():
    with pytest.warns(UserWarning, match="repeat"):
        palette = default_palette(12)
    assert palette.color_for(10) == palette.color_for(0)
    assert palette.color_for(3) == DEFAULT_PALETTE_COLORS[3]


def test_normalized_entropy_examples():
    assert normalized_entropy(np.array([1.0, 0.0, 0.0])) == 0.0
    assert normalized_entropy(np.array([0.25, 0.25, 0.25, 0.25])) == pytest.approx(1.0)
    assert normalized_entropy(np.array([1.0])) == 0.0
    # the 0 log 0 convention: a zero entry contributes nothing
    assert normalized_entropy(np.array([0.5, 0.25, 0.25, 0.0])) == pytest.approx(0.75)


def test_normalized_entropy_rejects_non_simplex():
    with pytest.raises(DataError):
        normalized_entropy(np.array([0.5, 0.6]))
    with pytest.raises(DataError):
        normalized_entropy(np.array([0.7, -0.1, 0.4]))
    with pytest.raises(DataError):
        normalized_entropy(np.array([]))


@given(st.lists(st.floats(0.001, 1.0), min_size=1, max_size=8))
def test_normalized_entropy_in_unit_interval(raw):
    psi = np.array(raw) / sum(raw)
    assert 0.0 <= normalized_entropy(psi) <= 1.0


def test_encode_topic_argmax_and_ties():
    palette = CategoricalPalette(DEFAULT_PALETTE_COLORS[:4])
    assert encode_topic(np.array([0.1, 0.7, 0.2]), palette) == DEFAULT_PALETTE_COLORS[1]
    # ties go to the lowest index
    assert encode_topic(np.array([0.4, 0.4, 0.2]), palette) == DEFAULT_PALETTE_COLORS[0]


def test_encode_topic_blend():
    palette = CategoricalPalette(DEFAULT_PALETTE_COLORS[:4])
    one_hot = np.array([0.0, 0.0, 1.0, 0.0])
    assert encode_topic(one_hot, palette, blend=True) == DEFAULT_PALETTE_COLORS[2]
    uniform = np.array([0.25, 0.25, 0.25, 0.25])
    assert encode_topic(uniform, palette, blend=True) == WHITE
    skewed = np.array([0.5, 0.25, 0.25, 0.0])
    assert encode_topic(skewed, palette, blend=True) == Color(199, 221, 236)


@given(st.lists(st.floats(0.001, 1.0), min_size=1, max_size=10))
def test_encode_topic_scale_invariant(raw):
    psi = np.array(raw) / sum(raw)
    palette = CategoricalPalette(DEFAULT_PALETTE_COLORS)
    assert encode_topic(psi, palette) == palette.color_for(int(np.argmax(psi)))


def test_encode_scalar_contracts():
    scale = DivergingScale(scale_magnitude=2.0)
    assert encode_scalar(0.0, scale) == WHITE
    assert encode_scalar(2.0, scale) == DEFAULT_POSITIVE
    assert encode_scalar(-2.0, scale) == DEFAULT_NEGATIVE
    assert encode_scalar(5.0, scale) == DEFAULT_POSITIVE  # clamped
    assert encode_scalar(-1.0, scale) == Color(144, 179, 214)


def test_encode_scalar_odd_symmetry():
    swapped = DivergingScale(
        negative_color=DEFAULT_POSITIVE, positive_color=DEFAULT_NEGATIVE, scale_magnitude=1.5
    )
    normal = DivergingScale(scale_magnitude=1.5)
    for value in (-1.5, -0.7, -0.2, 0.0, 0.3, 1.1, 1.5):
        assert encode_scalar(-value, swapped) == encode_scalar(value, normal)


def test_encode_scalar_rejects_non_finite():
    scale = DivergingScale()
    for bad in (float("nan"), float("inf"), float("-inf")):
        with pytest.raises(DataError):
            encode_scalar(bad, scale)


def test_scale_validation():
    with pytest.raises(DataError):
        DivergingScale(scale_magnitude=0.0)
    with pytest.raises(DataError):
        DivergingScale(scale_magnitude=-1.0)
    with pytest.raises(DataError):
        DivergingScale(scale_magnitude=float("nan"))


def test_fit_scale_nearest_rank():
    assert fit_scale([-2.0, 0.0, 1.0], 100).scale_magnitude == 2.0
    assert fit_scale([0.5, 0.5, 0.5], 37.0).scale_magnitude == 0.5
    # nearest rank, not interpolation: ceil(0.5 * 4) = 2nd of (1,2,3,4)
    assert fit_scale([1.0, -2.0, 3.0, -4.0], 50).scale_magnitude == 2.0


def test_fit_scale_matches_sort_oracle():
    rng = np.random.default_rng(11)
    values = rng.normal(size=1000)
    for pct in (5.0, 50.0, 95.0, 99.5, 100.0):
        got = fit_scale(values, pct).scale_magnitude
        magnitudes = sorted(abs(v) for v in values if v != 0)
        rank = math.ceil(pct / 100 * len(magnitudes))
        assert got == magnitudes[rank - 1]


def test_fit_scale_errors():
    with pytest.raises(DataError, match="degenerate"):
        fit_scale([0.0, 0.0])
    with pytest.raises(DataError, match="degenerate"):
        fit_scale([])
    with pytest.raises(DataError, match="percentile"):
        fit_scale([1.0], percentile=0.0)
    with pytest.raises(DataError, match="percentile"):
        fit_scale([1.0], percentile=101.0)


def test_fit_scale_keeps_endpoint_colors():
    scale = fit_scale([1.0, -3.0], 95, Color(0, 0, 10), Color(10, 0, 0))
    assert scale.negative_color == Color(0, 0, 10)
    assert scale.positive_color == Color(10, 0, 0)


def test_load_style_full_and_partial(tmp_path):
    path = tmp_path / "style.json"
    path.write_text(
        json.dumps(
            {
                "palette": ["#112233", "#445566"],
                "negative": "#000080",
                "positive": "#800000",
                "percentile": 90,
                "blend": True,
            }
        ),
        encoding="utf-8",
    )
    style = load_style(str(path))
    assert style.palette.colors == (Color(0x11, 0x22, 0x33), Color(0x44, 0x55, 0x66))
    assert style.negative_color == Color(0, 0, 128)
    assert style.positive_color == Color(128, 0, 0)
    assert style.percentile == 90.0
    assert style.blend is True

    partial = tmp_path / "partial.json"
    partial.write_text("{}", encoding="utf-8")
    style = load_style(str(partial))
    assert style.palette is None
    assert style.negative_color == DEFAULT_NEGATIVE
    assert style.percentile == 95.0
    assert style.blend is False


def test_load_style_rejects_garbage(tmp_path):
    bad = tmp_path / "bad.json"
    bad.write_text("[1,2]", encoding="utf-8")
    with pytest.raises(DataError):
        load_style(str(bad))
    worse = tmp_path / "worse.json"
    worse.write_text('{"negative": "blue"}', encoding="utf-8")
    with pytest.raises(DataError):
        load_style(str(worse))
