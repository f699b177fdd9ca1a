"""Add-lambda-smoothed n-gram scoring of token sequences.

Losses are reported per underlying grid cell, not per token: a sequence's
total negative log-likelihood is divided by the cell count of the grid it
encodes. This keeps numbers comparable across vocabularies that compress
the same image into different sequence lengths.
"""

from __future__ import annotations

import math
from collections import Counter
from typing import Iterable, Sequence

from .errors import EmptyCorpus, InvalidParameter

Record = tuple[int, int, Sequence[int]]  # (h, w, ids)


class NgramModel:
    """Unigram or bigram model over integer ids in [0, vocab_size).

    Bigram contexts include a virtual start-of-sequence symbol so the first
    token of each sequence is conditioned like any other.
    """

    BOS = -1

    def __init__(self, order: int, smoothing: float, vocab_size: int):
        if order not in (1, 2):
            raise InvalidParameter(f"order must be 1 or 2, got {order}")
        if smoothing <= 0:
            raise InvalidParameter(f"smoothing must be positive, got {smoothing}")
        if vocab_size < 1:
            raise InvalidParameter(f"vocab_size must be >= 1, got {vocab_size}")
        self.order = order
        self.lam = float(smoothing)
        self.vocab_size = vocab_size
        self._unigram: Counter = Counter()
        self._total = 0
        self._bigram: Counter = Counter()
        self._context: Counter = Counter()

    def fit(self, sequences: Iterable[Sequence[int]]) -> "NgramModel":
        n_seqs = 0
        for ids in sequences:
            n_seqs += 1
            prev = self.BOS
            for t in ids:
                t = int(t)
                if not 0 <= t < self.vocab_size:
                    raise InvalidParameter(f"id {t} outside model vocabulary")
                self._unigram[t] += 1
                self._total += 1
                if self.order == 2:
                    self._bigram[(prev, t)] += 1
                    self._context[prev] += 1
                    prev = t
        if n_seqs == 0:
            raise EmptyCorpus("n-gram training split is empty")
        return self

    def logprob(self, token: int, context: int = BOS) -> float:
        lam, v = self.lam, self.vocab_size
        if self.order == 1:
            return math.log((self._unigram[token] + lam) / (self._total + lam * v))
        num = self._bigram[(context, token)] + lam
        den = self._context[context] + lam * v
        return math.log(num / den)

    def sequence_nll(self, ids: Sequence[int]) -> float:
        nll = 0.0
        prev = self.BOS
        for t in ids:
            t = int(t)
            nll -= self.logprob(t, prev)
            if self.order == 2:
                prev = t
        return nll


def ngram_nll(
    train_records: Iterable[Record],
    eval_records: Iterable[Record],
    order: int,
    smoothing: float,
    vocab_size: int,
) -> float:
    """Mean eval NLL in nats per base grid cell.

    Fits on the training records and scores the eval records; the two
    splits must be disjoint for the number to mean anything.
    """
    eval_records = list(eval_records)
    model = NgramModel(order, smoothing, vocab_size).fit(
        ids for _, _, ids in train_records
    )
    total_nll = 0.0
    total_cells = 0
    for h, w, ids in eval_records:
        total_nll += model.sequence_nll(ids)
        total_cells += h * w
    if total_cells == 0:
        raise EmptyCorpus("n-gram evaluation split is empty")
    return total_nll / total_cells
