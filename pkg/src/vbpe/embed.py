"""Embedding-table expansion for the enlarged id space.

Text rows are zero placeholders (real weights come from a pretrained model,
which this library does not touch). Rows for base VQ ids, extended ids, and
the two boundary specials are drawn i.i.d. Gaussian with standard deviation
sqrt(2/dim), keeping early-training signal magnitude in check.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import InvalidParameter
from .layout import IdLayout


@dataclass(frozen=True)
class EmbeddingSpec:
    n_text: int
    base_k: int
    ext_size: int
    dim: int
    seed: int

    def __post_init__(self):
        if self.dim < 1:
            raise InvalidParameter(f"embedding dim must be >= 1, got {self.dim}")
        if self.n_text < 0 or self.base_k < 1 or self.ext_size < 0:
            raise InvalidParameter("bad id-space sizes in embedding spec")

    @property
    def layout(self) -> IdLayout:
        return IdLayout(self.n_text, self.base_k, self.ext_size)

    @property
    def total_rows(self) -> int:
        return self.layout.total_ids

    @property
    def visual_rows(self) -> int:
        return self.base_k + self.ext_size + 2


def init_std(dim: int) -> float:
    return math.sqrt(2.0 / dim)


def expand_embeddings(spec: EmbeddingSpec) -> np.ndarray:
    """(total_rows, dim) float32 table; deterministic under the seed."""
    rng = np.random.default_rng(spec.seed)
    table = np.zeros((spec.total_rows, spec.dim), dtype=np.float32)
    visual = rng.normal(0.0, init_std(spec.dim), size=(spec.visual_rows, spec.dim))
    table[spec.n_text :] = visual.astype(np.float32)
    return table
