"""Measure how much slower code gets when it is moved behind a function call.

The workload is term weighting over an inverted index: basic tf-idf, BM25
and a padded BM25 variant, each timed in an inline form and a call form.
"""

__version__ = "0.1.0"

from .bench import (
    ComparisonResult,
    Measurement,
    ScalingFit,
    ScalingPoint,
    linear_fit,
    overhead_pct,
    run_comparison,
    run_scaling,
    time_once,
)
from .corpus import (
    CorpusStats,
    Document,
    InvertedIndex,
    PostingEntry,
    TokenFilterConfig,
    build_index,
    generate_synthetic_corpus,
    load_index,
    replicate_index,
    save_index,
    tokenize,
)
from .errors import (
    CallCostError,
    ClockError,
    CorpusError,
    DegenerateFitError,
    DomainError,
    EquivalenceError,
    IndexFormatError,
    ScalingError,
)
from .kernels import Form, KernelId, KernelOutcome, Model, kernel_pair_equivalence, run_kernel
from .weighting import Bm25Params, bm25_modified_weight, bm25_weight, tfidf_weight
