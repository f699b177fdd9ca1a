"""Adjacency statistics over token grids: counts, frequency, spatial consistency.

Every shape-compatible right/down neighbor pair is counted, one occurrence
per grid position, overlaps allowed. An occurrence's relative position is
its orientation vector: (0, 1) for horizontal, (1, 0) for vertical.
"""

from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import Iterable, Mapping

import numpy as np

from ._kernels import decode_key
from .errors import EmptyStatistics, InvalidParameter
from .grid import HORIZONTAL, VERTICAL, TokenGrid

PairKey = tuple[int, int]


@dataclass(frozen=True)
class PairStats:
    """Scores for one ordered token pair at one training iteration."""

    left: int
    right: int
    h_count: int
    v_count: int
    frequency: float
    spatial: float
    priority: float

    @property
    def count(self) -> int:
        return self.h_count + self.v_count

    @property
    def dominant_orientation(self) -> str:
        """Orientation bound to the pair at merge time; horizontal wins ties."""
        return HORIZONTAL if self.h_count >= self.v_count else VERTICAL


def scan_adjacencies(
    grids: Iterable[TokenGrid], n_ids: int, threads: int = 1
) -> dict[PairKey, tuple[int, int]]:
    """Count horizontal/vertical adjacencies over a corpus.

    Returns ``{(left, right): (h_count, v_count)}``. The reduction is a
    commutative merge of per-grid counts, so corpus order and thread count
    do not affect the result.
    """
    grids = list(grids)
    if threads > 1 and len(grids) > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            key_arrays = list(pool.map(lambda g: g.scan_keys(n_ids), grids))
    else:
        key_arrays = [g.scan_keys(n_ids) for g in grids]
    key_arrays = [k for k in key_arrays if k.size]
    if not key_arrays:
        return {}
    keys, counts = np.unique(np.concatenate(key_arrays), return_counts=True)
    out: dict[PairKey, tuple[int, int]] = {}
    for key, cnt in zip(keys, counts):
        left, right, orient = decode_key(int(key), n_ids)
        h, v = out.get((left, right), (0, 0))
        if orient == 0:
            h += int(cnt)
        else:
            v += int(cnt)
        out[(left, right)] = (h, v)
    return out


def total_pairs(counts: Mapping[PairKey, tuple[int, int]]) -> int:
    return sum(h + v for h, v in counts.values())


def frequency(count: int, total: int) -> float:
    """Adjacency count normalized by the corpus-wide pair total."""
    if total <= 0:
        raise EmptyStatistics("no adjacencies observed; cannot normalize")
    return count / total


def spatial_consistency(h_count: int, v_count: int, sigma: float) -> float:
    """Mean Gaussian-kernel similarity of occurrence orientations to their mean.

    Occurrence i contributes exp(-||u_i - u_mean||^2 / (2 sigma^2)) with u_i
    the orientation vector. Since u_i takes only the two values (0,1) and
    (1,0), the mean is (v/N, h/N) and the squared distances collapse to
    2(v/N)^2 for horizontal occurrences and 2(h/N)^2 for vertical ones,
    giving a closed form in the two tallies. Equals 1 iff one orientation
    is absent.
    """
    if sigma <= 0:
        raise InvalidParameter(f"sigma must be positive, got {sigma}")
    n = h_count + v_count
    if n < 1:
        raise InvalidParameter("spatial consistency requires at least one occurrence")
    fh = h_count / n
    fv = v_count / n
    inv = 1.0 / (sigma * sigma)
    return (h_count * math.exp(-fv * fv * inv) + v_count * math.exp(-fh * fh * inv)) / n


def priority(freq: float, spatial: float, alpha: float) -> float:
    """Merge score: frequency plus alpha-weighted spatial consistency."""
    if alpha < 0:
        raise InvalidParameter(f"alpha must be non-negative, got {alpha}")
    return freq + alpha * spatial


def pair_table(
    counts: Mapping[PairKey, tuple[int, int]], alpha: float, sigma: float
) -> list[PairStats]:
    """Full scored table, ranked by priority descending.

    Ties break lexicographically on (left, right, orientation) with
    horizontal before vertical, making the ranking total and deterministic.
    """
    total = total_pairs(counts)
    if total == 0:
        return []
    rows = []
    for (left, right), (h, v) in counts.items():
        f = frequency(h + v, total)
        s = spatial_consistency(h, v, sigma)
        rows.append(PairStats(left, right, h, v, f, s, priority(f, s, alpha)))
    rows.sort(
        key=lambda p: (-p.priority, p.left, p.right, p.dominant_orientation == VERTICAL)
    )
    return rows
