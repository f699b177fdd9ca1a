"""Apply a trained vocabulary: encode grids, decode sequences, assemble inputs.

Encoding replays the vocabulary's merges in training order with the same
greedy raster-order replacement the trainer used, so a training grid encodes
to exactly the state it reached during training. Decoding inverts the raster
serialization by placing each token at the first uncovered cell.
"""

from __future__ import annotations

from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import Iterable, NamedTuple, Sequence

import numpy as np

from .errors import LayoutViolation, MalformedSequence
from .grid import TokenGrid, Vocabulary, as_quant_grid
from .layout import IdLayout


@dataclass(frozen=True)
class TokenSequence:
    """A 1D id sequence plus the layout its ids are interpreted under."""

    ids: tuple[int, ...]
    layout: IdLayout

    def __post_init__(self):
        object.__setattr__(self, "ids", tuple(int(i) for i in self.ids))
        boi_at = [i for i, t in enumerate(self.ids) if t == self.layout.boi]
        eoi_at = [i for i, t in enumerate(self.ids) if t == self.layout.eoi]
        if len(boi_at) > 1 or len(eoi_at) > 1:
            raise LayoutViolation("more than one image boundary span")
        if len(boi_at) != len(eoi_at):
            raise LayoutViolation("unbalanced image boundary tokens")
        if boi_at and boi_at[0] > eoi_at[0]:
            raise LayoutViolation("image-end marker precedes image-start marker")
        for t in self.ids:
            if not self.layout.is_valid(t):
                raise LayoutViolation(f"id {t} is outside the layout id space")

    def __len__(self) -> int:
        return len(self.ids)

    def image_segment(self) -> tuple[int, ...]:
        """Ids strictly between the boundary markers ('' when absent)."""
        if self.layout.boi not in self.ids:
            return ()
        lo = self.ids.index(self.layout.boi) + 1
        hi = self.ids.index(self.layout.eoi)
        return self.ids[lo:hi]


class EncodedImage(NamedTuple):
    """Interchange record matching one tokens.jsonl line."""

    h: int
    w: int
    ids: list[int]


def encode(grid, vocab: Vocabulary) -> tuple[TokenGrid, TokenSequence]:
    """Tokenize one quantized grid; returns the tiling and the id sequence.

    Pure function of (grid, vocab): replays every merge rule in order and
    serializes surviving regions in raster order. The sequence length never
    exceeds the cell count.
    """
    cells = as_quant_grid(grid, vocab.base_size)
    tg = TokenGrid.from_base(cells, vocab.layout)
    present = tg.present_tokens()
    for rule in vocab.merges:
        # a rule can only fire if both sides currently occur somewhere
        if rule.left in present and rule.right in present:
            if tg.apply_merge(rule.left, rule.right, rule.orientation, rule.new_id):
                present.add(rule.new_id)
    ids = tg.token_ids()
    assert len(ids) <= cells.size
    return tg, TokenSequence(tuple(int(i) for i in ids), vocab.layout)


def decode(ids: Sequence[int], vocab: Vocabulary, h: int, w: int) -> np.ndarray:
    """Reconstruct the quantized grid a sequence was encoded from.

    Tokens are placed in order, each anchored at the first free cell in
    raster order, which is exactly where raster serialization read them.
    Raises MalformedSequence when the ids cannot tile an (h, w) grid.
    """
    if isinstance(ids, TokenSequence):
        ids = ids.ids
    layout = vocab.layout
    out = np.empty((h, w), dtype=np.int32)
    filled = np.zeros((h, w), dtype=bool)
    cursor = 0
    for tid in ids:
        tid = int(tid)
        if not layout.is_image(tid):
            raise MalformedSequence(f"id {tid} is not an image token")
        while cursor < h * w and filled[cursor // w, cursor % w]:
            cursor += 1
        if cursor >= h * w:
            raise MalformedSequence(f"sequence has tokens left after the grid is full")
        i, j = cursor // w, cursor % w
        frag = vocab.expand(tid)  # raises UnknownToken for undefined ext ids
        r, c = frag.shape
        if i + r > h or j + c > w:
            raise MalformedSequence(
                f"token {tid} of shape ({r}, {c}) does not fit at ({i}, {j})"
            )
        if filled[i : i + r, j : j + c].any():
            raise MalformedSequence(
                f"token {tid} at ({i}, {j}) overlaps an earlier token"
            )
        out[i : i + r, j : j + c] = frag
        filled[i : i + r, j : j + c] = True
    if not filled.all():
        raise MalformedSequence("sequence ends before the grid is covered")
    return out


def assemble(
    text_ids: Sequence[int], image_token_ids: Sequence[int], layout: IdLayout
) -> TokenSequence:
    """Unified sequence: text ids, then the image span wrapped in boundary markers."""
    for t in text_ids:
        if not layout.is_text(int(t)):
            raise LayoutViolation(f"id {int(t)} is not a text id under this layout")
    for t in image_token_ids:
        if not layout.is_image(int(t)):
            raise LayoutViolation(f"id {int(t)} is not an image token under this layout")
    ids = (
        tuple(int(t) for t in text_ids)
        + (layout.boi,)
        + tuple(int(t) for t in image_token_ids)
        + (layout.eoi,)
    )
    return TokenSequence(ids, layout)


def encode_corpus(
    grids: Iterable[np.ndarray], vocab: Vocabulary, threads: int = 1
) -> list[EncodedImage]:
    grids = list(grids)

    def one(g) -> EncodedImage:
        _, seq = encode(g, vocab)
        return EncodedImage(g.shape[0], g.shape[1], list(seq.ids))

    if threads > 1 and len(grids) > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            return list(pool.map(one, grids))
    return [one(g) for g in grids]


def decode_corpus(
    records: Iterable[EncodedImage | tuple[int, int, list[int]]],
    vocab: Vocabulary,
    threads: int = 1,
) -> list[np.ndarray]:
    records = list(records)

    def one(rec) -> np.ndarray:
        h, w, ids = rec
        return decode(ids, vocab, h, w)

    if threads > 1 and len(records) > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            return list(pool.map(one, records))
    return [one(r) for r in records]
