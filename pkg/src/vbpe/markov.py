"""Synthetic quantized-grid corpora from a 2D Markov process.

The first cell is uniform; every other cell is drawn conditioned on a single
neighbor: the left neighbor when one exists, otherwise the upper neighbor.
Interior cells therefore follow the right-transition matrix only. This is
the simplest structured source whose spatial regularities a 2D merge
vocabulary can exploit.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import _kernels
from .errors import InvalidParameter

_ROW_SUM_TOL = 1e-9


def _check_stochastic(name: str, mat: np.ndarray, n: int) -> np.ndarray:
    arr = np.asarray(mat, dtype=np.float64)
    if arr.shape != (n, n):
        raise InvalidParameter(f"{name} must be {n}x{n}, got shape {arr.shape}")
    if (arr < 0).any():
        raise InvalidParameter(f"{name} has negative entries")
    if np.abs(arr.sum(axis=1) - 1.0).max() > _ROW_SUM_TOL:
        raise InvalidParameter(f"{name} rows must each sum to 1")
    return arr


@dataclass(frozen=True)
class MarkovGridSource:
    n_symbols: int
    transition_right: np.ndarray
    transition_down: np.ndarray
    seed: int

    def __post_init__(self):
        if self.n_symbols < 1:
            raise InvalidParameter(f"n_symbols must be >= 1, got {self.n_symbols}")
        object.__setattr__(
            self,
            "transition_right",
            _check_stochastic("transition_right", self.transition_right, self.n_symbols),
        )
        object.__setattr__(
            self,
            "transition_down",
            _check_stochastic("transition_down", self.transition_down, self.n_symbols),
        )


def coupled_source(n_symbols: int, stay: float, seed: int) -> MarkovGridSource:
    """Source whose neighbors repeat with probability ``stay`` (rest uniform)."""
    if not 0.0 <= stay <= 1.0:
        raise InvalidParameter(f"stay must be in [0, 1], got {stay}")
    if n_symbols == 1:
        mat = np.ones((1, 1))
    else:
        off = (1.0 - stay) / (n_symbols - 1)
        mat = np.full((n_symbols, n_symbols), off)
        np.fill_diagonal(mat, stay)
    return MarkovGridSource(n_symbols, mat, mat.copy(), seed)


def _cumulative(mat: np.ndarray) -> np.ndarray:
    cum = np.cumsum(mat, axis=1)
    # sentinel keeps the kernels' walk inside the row even if the sum
    # rounds slightly below 1.0
    cum[:, -1] = 1.125
    return np.ascontiguousarray(cum)


def generate(source: MarkovGridSource, h: int, w: int, count: int) -> list[np.ndarray]:
    """Draw ``count`` independent (h, w) grids; deterministic under the seed."""
    if h < 1 or w < 1 or count < 0:
        raise InvalidParameter(f"bad grid request h={h} w={w} count={count}")
    if count == 0:
        return []
    rng = np.random.default_rng(source.seed)
    u = rng.random((count, h, w))
    out = _kernels.markov_fill(
        u, _cumulative(source.transition_right), _cumulative(source.transition_down)
    )
    return [np.ascontiguousarray(out[g]) for g in range(count)]
