"""Nearest-codebook-entry quantization of patch feature grids.

The codebook is pluggable: load one from disk or fit the toy Lloyd's-
iteration codebook below. The toy fit makes no claim of matching any
learned quantizer; it exists so the full pipeline can run end to end on
synthetic features.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import _kernels
from .errors import EmptyCorpus, InvalidParameter, ShapeError


@dataclass(frozen=True)
class Codebook:
    """K feature vectors of a common dimension."""

    entries: np.ndarray

    def __post_init__(self):
        arr = np.ascontiguousarray(self.entries, dtype=np.float64)
        if arr.ndim != 2 or arr.shape[0] < 1:
            raise ShapeError(f"codebook must be (K, z) with K >= 1, got {arr.shape}")
        object.__setattr__(self, "entries", arr)

    @property
    def size(self) -> int:
        return self.entries.shape[0]

    @property
    def dim(self) -> int:
        return self.entries.shape[1]


def quantize(patches: np.ndarray, codebook: Codebook) -> np.ndarray:
    """Map an (h, w, z) patch grid to (h, w) nearest-entry indices.

    Distance is squared Euclidean; exact ties go to the smallest index,
    so the mapping is total and deterministic.
    """
    arr = np.ascontiguousarray(patches, dtype=np.float64)
    if arr.ndim != 3:
        raise ShapeError(f"patches must be (h, w, z), got shape {arr.shape}")
    if arr.shape[2] != codebook.dim:
        raise ShapeError(
            f"patch dimension {arr.shape[2]} != codebook dimension {codebook.dim}"
        )
    h, w, z = arr.shape
    flat = arr.reshape(h * w, z)
    idx = _kernels.nearest(flat, codebook.entries)
    return idx.reshape(h, w).astype(np.int32)


def fit_toy_codebook(
    patches: np.ndarray, k: int, seed: int, max_iter: int = 50
) -> Codebook:
    """Lloyd's iterations with seeded initialization; deterministic given seed.

    Initial centroids are drawn without replacement from the distinct input
    vectors (with replacement if fewer than k exist). Empty clusters keep
    their previous centroid.
    """
    arr = np.ascontiguousarray(patches, dtype=np.float64)
    if arr.ndim != 2 or arr.shape[0] == 0:
        raise EmptyCorpus("no patches to fit a codebook on")
    if k < 1:
        raise InvalidParameter(f"codebook size must be >= 1, got {k}")
    rng = np.random.default_rng(seed)
    uniq = np.unique(arr, axis=0)
    if len(uniq) >= k:
        centroids = uniq[rng.choice(len(uniq), size=k, replace=False)]
    else:
        centroids = uniq[rng.choice(len(uniq), size=k, replace=True)]
    centroids = centroids.copy()
    assign = np.full(arr.shape[0], -1, dtype=np.int32)
    for _ in range(max_iter):
        new_assign = _kernels.nearest(arr, centroids)
        if (new_assign == assign).all():
            break
        assign = new_assign
        for c in range(k):
            members = arr[assign == c]
            if len(members):
                centroids[c] = members.mean(axis=0)
    return Codebook(centroids)
