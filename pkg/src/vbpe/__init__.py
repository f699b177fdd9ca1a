"""Priority-guided 2D byte-pair encoding over vector-quantized image grids.

Train merge vocabularies on grids of VQ indices, tokenize images into
compressed sequences, assemble unified text+image inputs, and run the
desk-scale evaluation utilities (synthetic Markov grids, n-gram loss,
embedding-table expansion, staged training plans).
"""

from ._kernels import NUMBA_ACTIVE
from .embed import EmbeddingSpec, expand_embeddings, init_std
from .errors import (
    EmptyCorpus,
    EmptyStatistics,
    ExhaustedPairs,
    FileFormatError,
    IndexOutOfRange,
    InvalidParameter,
    LayoutMismatch,
    LayoutViolation,
    MalformedSequence,
    PoolExhausted,
    ShapeError,
    TilingViolation,
    UnknownToken,
    VbpeError,
)
from .grid import (
    HORIZONTAL,
    VERTICAL,
    MergeRule,
    Region,
    TokenGrid,
    Vocabulary,
    as_quant_grid,
    region_raster_order,
)
from .layout import IdLayout
from .markov import MarkovGridSource, coupled_source, generate
from .ngram import NgramModel, ngram_nll
from .plan import MaskSpec, StagePlan, default_plan, mask_spec, sample_batch
from .quantize import Codebook, fit_toy_codebook, quantize
from .stats import (
    PairStats,
    frequency,
    pair_table,
    priority,
    scan_adjacencies,
    spatial_consistency,
    total_pairs,
)
from .tokenize import EncodedImage, TokenSequence, assemble, decode, encode
from .train import TrainerConfig, TrainResult, apply_merge, select_candidate, train

__version__ = "0.1.0"

__all__ = [
    "NUMBA_ACTIVE",
    "EmbeddingSpec",
    "expand_embeddings",
    "init_std",
    "VbpeError",
    "UnknownToken",
    "ShapeError",
    "TilingViolation",
    "EmptyCorpus",
    "EmptyStatistics",
    "InvalidParameter",
    "IndexOutOfRange",
    "ExhaustedPairs",
    "MalformedSequence",
    "LayoutViolation",
    "LayoutMismatch",
    "PoolExhausted",
    "FileFormatError",
    "HORIZONTAL",
    "VERTICAL",
    "MergeRule",
    "Region",
    "TokenGrid",
    "Vocabulary",
    "as_quant_grid",
    "region_raster_order",
    "IdLayout",
    "MarkovGridSource",
    "coupled_source",
    "generate",
    "NgramModel",
    "ngram_nll",
    "MaskSpec",
    "StagePlan",
    "default_plan",
    "mask_spec",
    "sample_batch",
    "Codebook",
    "fit_toy_codebook",
    "quantize",
    "PairStats",
    "frequency",
    "pair_table",
    "priority",
    "scan_adjacencies",
    "spatial_consistency",
    "total_pairs",
    "EncodedImage",
    "TokenSequence",
    "assemble",
    "decode",
    "encode",
    "TrainerConfig",
    "TrainResult",
    "apply_merge",
    "select_candidate",
    "train",
]
