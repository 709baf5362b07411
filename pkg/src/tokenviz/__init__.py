"""Token-level color views of text models.

Computes per-token quantities of interest (topic membership vectors from
LDA, log-odds contributions from linear n-gram classifiers), encodes them
as colors, and renders two linked views: in-text annotated passages and a
zoomed-out words-as-pixels raster of the whole corpus.
"""

from .errors import DataError
from .corpus import (
    Corpus,
    Document,
    Token,
    Vocabulary,
    build_vocabulary,
    load_corpus,
    token_positions,
    tokenize_chars,
    tokenize_words,
)
from .classifier import (
    LinearTextModel,
    ScalarAttribution,
    SpanWeight,
    counterfactual_delete,
    doc_log_odds,
    export_linear_model,
    import_linear_model,
    span_weights,
    token_attribution,
    train_mnb,
)
from .topics import (
    TopicModelConfig,
    TopicPosterior,
    TopicState,
    TrainedTopicModel,
    estimate_posteriors,
    gibbs_init,
    gibbs_sweep,
    load_topic_model,
    save_topic_model,
    token_posterior,
    top_words,
    train_lda,
)
from .colors import (
    CategoricalPalette,
    Color,
    DivergingScale,
    StyleConfig,
    default_palette,
    encode_scalar,
    encode_topic,
    fit_scale,
    load_style,
    normalized_entropy,
)
from .render import (
    PixelLayout,
    encode_png,
    hit_test,
    layout_pixels,
    passage_for_token,
    render_intext,
    render_pixels,
)
from .bundle import SessionBundle, build_bundle, bundle_from_objects, load_model
from .server import make_server, serve

__version__ = "0.1.0"

__all__ = [
    "DataError",
    "Corpus",
    "Document",
    "Token",
    "Vocabulary",
    "build_vocabulary",
    "load_corpus",
    "token_positions",
    "tokenize_chars",
    "tokenize_words",
    "LinearTextModel",
    "ScalarAttribution",
    "SpanWeight",
    "counterfactual_delete",
    "doc_log_odds",
    "export_linear_model",
    "import_linear_model",
    "span_weights",
    "token_attribution",
    "train_mnb",
    "TopicModelConfig",
    "TopicPosterior",
    "TopicState",
    "TrainedTopicModel",
    "estimate_posteriors",
    "gibbs_init",
    "gibbs_sweep",
    "load_topic_model",
    "save_topic_model",
    "token_posterior",
    "top_words",
    "train_lda",
    "CategoricalPalette",
    "Color",
    "DivergingScale",
    "StyleConfig",
    "default_palette",
    "encode_scalar",
    "encode_topic",
    "fit_scale",
    "load_style",
    "normalized_entropy",
    "PixelLayout",
    "encode_png",
    "hit_test",
    "layout_pixels",
    "passage_for_token",
    "render_intext",
    "render_pixels",
    "SessionBundle",
    "build_bundle",
    "bundle_from_objects",
    "load_model",
    "make_server",
    "serve",
]
