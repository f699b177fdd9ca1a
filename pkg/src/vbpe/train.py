"""Vocabulary training: iteratively merge the highest-priority adjacent pair.

Each iteration rescans the corpus, scores every shape-compatible adjacent
pair, picks a winner from the diversity-filtered top-k, mints a new token
bound to the pair's dominant orientation, and greedily rewrites every grid.
Statistics are recomputed from scratch each iteration, so merged tokens
immediately participate as candidates.
"""

from __future__ import annotations

import logging
from collections import Counter
from dataclasses import dataclass, field
from typing import Callable, Iterable, Sequence

import numpy as np

from .errors import EmptyCorpus, ExhaustedPairs, InvalidParameter
from .grid import HORIZONTAL, MergeRule, TokenGrid, Vocabulary
from .layout import DEFAULT_N_TEXT, IdLayout
from .stats import PairStats, pair_table, scan_adjacencies

log = logging.getLogger(__name__)


@dataclass(frozen=True)
class TrainerConfig:
    target_ext_size: int
    alpha: float = 0.3
    sigma: float = 2.0
    top_k: int = 32
    tau: float = 0.9
    seed: int = 0

    def __post_init__(self):
        if self.target_ext_size < 0:
            raise InvalidParameter(f"target_ext_size must be >= 0, got {self.target_ext_size}")
        if self.top_k < 1:
            raise InvalidParameter(f"top_k must be >= 1, got {self.top_k}")
        if not 0.0 <= self.tau <= 1.0:
            raise InvalidParameter(f"tau must be in [0, 1], got {self.tau}")
        if self.sigma <= 0:
            raise InvalidParameter(f"sigma must be positive, got {self.sigma}")
        if self.alpha < 0:
            raise InvalidParameter(f"alpha must be non-negative, got {self.alpha}")


@dataclass(frozen=True)
class IterationInfo:
    """One progress record per minted token."""

    index: int
    left: int
    right: int
    orientation: str
    priority: float
    frequency: float
    spatial: float
    replaced: int
    region_total: int
    filter_fallback: bool


@dataclass
class TrainResult:
    vocab: Vocabulary
    grids: list[TokenGrid]
    exhausted: bool = False
    iterations: list[IterationInfo] = field(default_factory=list)

    @property
    def fallback_count(self) -> int:
        return sum(1 for it in self.iterations if it.filter_fallback)


def _multiset_jaccard(a: Counter, b: Counter) -> float:
    inter = sum(min(a[k], b[k]) for k in a.keys() & b.keys())
    union = sum(a.values()) + sum(b.values()) - inter
    return inter / union if union else 0.0


def _expansion_multiset(vocab: Vocabulary, tid: int) -> Counter:
    return Counter(vocab.expand(tid).ravel().tolist())


def _pick_winner(
    ranked: Sequence[PairStats],
    existing: Iterable[Counter],
    cfg: TrainerConfig,
    multiset_of: Callable[[int], Counter],
) -> tuple[PairStats, bool]:
    """Diversity-filtered argmax over the top-k window.

    A candidate is dropped when the multiset of base indices it would cover
    is more than tau-similar (multiset Jaccard) to any existing extended
    token. If every window entry is dropped, falls back to the unfiltered
    argmax and reports it.
    """
    existing = list(existing)
    window = ranked[: cfg.top_k]
    if existing:
        for cand in window:
            mset = multiset_of(cand.left) + multiset_of(cand.right)
            if all(_multiset_jaccard(mset, other) <= cfg.tau for other in existing):
                return cand, False
        return window[0], True
    return window[0], False


def select_candidate(
    ranked: Sequence[PairStats], vocab: Vocabulary, cfg: TrainerConfig
) -> tuple[PairStats, str, bool]:
    """Winning pair, its bound orientation, and whether the filter fell back.

    ``ranked`` must come from :func:`vbpe.stats.pair_table` (priority
    descending). Raises ExhaustedPairs when no candidate exists.
    """
    if not ranked:
        raise ExhaustedPairs("no adjacent pair left to merge")
    cache: dict[int, Counter] = {}

    def multiset_of(tid: int) -> Counter:
        got = cache.get(tid)
        if got is None:
            got = cache[tid] = _expansion_multiset(vocab, tid)
        return got

    existing = [_expansion_multiset(vocab, r.new_id) for r in vocab.merges]
    winner, fallback = _pick_winner(ranked, existing, cfg, multiset_of)
    return winner, winner.dominant_orientation, fallback


def apply_merge(
    grids: Iterable[TokenGrid], pair: tuple[int, int], orientation: str, new_id: int
) -> int:
    """Rewrite every grid in place; returns the total replacement count."""
    left, right = pair
    return sum(g.apply_merge(left, right, orientation, new_id) for g in grids)


def train(
    corpus: Sequence[np.ndarray],
    base_k: int,
    cfg: TrainerConfig,
    layout: IdLayout | None = None,
    threads: int = 1,
    progress: Callable[[IterationInfo], None] | None = None,
) -> TrainResult:
    """Train a merge vocabulary over quantized grids.

    Returns the vocabulary, the corpus rewritten by all merges, and one
    progress record per iteration. Stops early with ``exhausted=True`` when
    no mergeable pair remains before the target size is reached.
    """
    corpus = list(corpus)
    if not corpus:
        raise EmptyCorpus("training corpus is empty")
    if layout is None:
        layout = IdLayout(
            n_text=DEFAULT_N_TEXT, base_k=base_k, ext_size=max(cfg.target_ext_size, 1)
        )
    if layout.base_k != base_k:
        raise InvalidParameter(f"layout.base_k={layout.base_k} but base_k={base_k}")
    if cfg.target_ext_size > layout.ext_size:
        raise InvalidParameter(
            f"target_ext_size {cfg.target_ext_size} exceeds layout ext_size {layout.ext_size}"
        )

    grids = [TokenGrid.from_base(g, layout) for g in corpus]
    n_ids = layout.total_ids
    merges: list[MergeRule] = []
    shapes: dict[int, tuple[int, int]] = {}
    msets: dict[int, Counter] = {}
    result = TrainResult(vocab=Vocabulary(layout), grids=grids)

    def multiset_of(tid: int) -> Counter:
        got = msets.get(tid)
        if got is None:
            if layout.is_base(tid):
                got = Counter({tid - layout.n_text: 1})
            else:
                rule = merges[tid - layout.ext_start]
                got = multiset_of(rule.left) + multiset_of(rule.right)
            msets[tid] = got
        return got

    def shape_of(tid: int) -> tuple[int, int]:
        return (1, 1) if layout.is_base(tid) else shapes[tid]

    for index in range(cfg.target_ext_size):
        counts = scan_adjacencies(grids, n_ids, threads=threads)
        ranked = pair_table(counts, cfg.alpha, cfg.sigma)
        if not ranked:
            log.warning(
                "mergeable pairs exhausted after %d of %d merges",
                index,
                cfg.target_ext_size,
            )
            result.exhausted = True
            break
        existing = [msets[r.new_id] for r in merges]
        winner, fallback = _pick_winner(ranked, existing, cfg, multiset_of)
        if fallback:
            log.info(
                "iteration %d: all top-%d candidates filtered, using unfiltered argmax",
                index,
                cfg.top_k,
            )
        orientation = winner.dominant_orientation
        new_id = layout.ext_start + len(merges)
        replaced = apply_merge(grids, (winner.left, winner.right), orientation, new_id)
        lr, lc = shape_of(winner.left)
        rr, rc = shape_of(winner.right)
        shapes[new_id] = (lr, lc + rc) if orientation == HORIZONTAL else (lr + rr, lc)
        msets[new_id] = multiset_of(winner.left) + multiset_of(winner.right)
        merges.append(
            MergeRule(
                new_id=new_id,
                left=winner.left,
                right=winner.right,
                orientation=orientation,
                priority=winner.priority,
                frequency=winner.frequency,
                spatial=winner.spatial,
            )
        )
        info = IterationInfo(
            index=index,
            left=winner.left,
            right=winner.right,
            orientation=orientation,
            priority=winner.priority,
            frequency=winner.frequency,
            spatial=winner.spatial,
            replaced=replaced,
            region_total=sum(g.region_count for g in grids),
            filter_fallback=fallback,
        )
        result.iterations.append(info)
        if progress is not None:
            progress(info)

    result.vocab = Vocabulary(layout, merges)
    return result
