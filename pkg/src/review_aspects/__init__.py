"""Aspect-level user attention and sentiment over purchase-review time intervals."""

__version__ = "0.1.0"

from .aspects import (  # noqa: E402
    AspectModel,
    AttributeCandidate,
    allocate,
    cluster_attributes,
    cosine_similarity,
    extract_candidates,
    map_mentions,
    transfer,
)
from .corpus import Corpus, ReviewRecord, bin_records, compute_time_interval, load_corpus  # noqa: E402
from .powerfit import FitInput, PowerLawFit, fit_power_law, prepare_fit_input  # noqa: E402
from .sentiment import aspect_sentiment_series, attribute_sentiment, negation_coefficient  # noqa: E402
from .temporal import (  # noqa: E402
    IntervalSeries,
    aspect_count_ratio,
    attention_share,
    attention_y1,
    average_attention,
    mention_counts,
)

__all__ = [
    "AspectModel", "AttributeCandidate", "Corpus", "FitInput", "IntervalSeries", "PowerLawFit",
    "ReviewRecord", "allocate", "aspect_count_ratio", "aspect_sentiment_series", "attention_share",
    "attention_y1", "attribute_sentiment", "average_attention", "bin_records", "cluster_attributes",
    "compute_time_interval", "cosine_similarity", "extract_candidates", "fit_power_law", "load_corpus",
    "map_mentions", "mention_counts", "negation_coefficient", "prepare_fit_input", "transfer",
]
