"""Quantized grids, rectangular token regions, and the merge vocabulary.

A quantized image is a plain 2D int array of base VQ indices in [0, base_k)
(row-major, ``grid[i, j]``). Token ids live in the global id space described
by :class:`~vbpe.layout.IdLayout`; a base cell value ``q`` corresponds to the
global id ``layout.n_text + q``.

Merged tokens occupy axis-aligned rectangles. A horizontal merge glues two
regions with equal row extent side by side; a vertical merge stacks two
regions with equal column extent. Shape-incompatible neighbors are never
merged (and never counted by the statistics scan).
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import _kernels
from .errors import (
    IndexOutOfRange,
    InvalidParameter,
    ShapeError,
    TilingViolation,
    UnknownToken,
)
from .layout import IdLayout

HORIZONTAL = "horizontal"
VERTICAL = "vertical"
ORIENTATIONS = (HORIZONTAL, VERTICAL)


def as_quant_grid(cells, base_k: int | None = None) -> np.ndarray:
    """Validate and normalize a quantized grid to a 2D int32 array."""
    arr = np.asarray(cells)
    if arr.ndim != 2 or arr.size == 0:
        raise ShapeError(f"quantized grid must be 2D and non-empty, got shape {arr.shape}")
    if not np.issubdtype(arr.dtype, np.integer):
        raise ShapeError(f"quantized grid must be integer-typed, got {arr.dtype}")
    if arr.min() < 0:
        raise IndexOutOfRange("negative cell value in quantized grid")
    if base_k is not None and arr.max() >= base_k:
        raise IndexOutOfRange(
            f"cell value {int(arr.max())} exceeds base codebook size {base_k}"
        )
    return np.ascontiguousarray(arr, dtype=np.int32)


@dataclass(frozen=True, order=True)
class Region:
    """One token instance covering the rectangle [row, row+rows) x [col, col+cols)."""

    row: int
    col: int
    rows: int
    cols: int
    token: int


class TokenGrid:
    """A grid exactly tiled by rectangular token regions.

    Stored as five per-cell int32 arrays (token id, anchor row/col, region
    row/col extent, all replicated across each region) so the hot kernels
    can find any cell's region in O(1). A cell is an anchor iff its stored
    anchor equals its own coordinates.
    """

    __slots__ = ("height", "width", "tok", "anc_r", "anc_c", "sh_r", "sh_c")

    def __init__(self, tok, anc_r, anc_c, sh_r, sh_c):
        self.height, self.width = tok.shape
        self.tok = tok
        self.anc_r = anc_r
        self.anc_c = anc_c
        self.sh_r = sh_r
        self.sh_c = sh_c

    @classmethod
    def from_base(cls, cells, layout: IdLayout) -> "TokenGrid":
        """Wrap a quantized grid: every cell becomes a 1x1 base-token region."""
        grid = as_quant_grid(cells, layout.base_k)
        h, w = grid.shape
        tok = grid + np.int32(layout.n_text)
        anc_r = np.broadcast_to(np.arange(h, dtype=np.int32)[:, None], (h, w)).copy()
        anc_c = np.broadcast_to(np.arange(w, dtype=np.int32)[None, :], (h, w)).copy()
        ones = np.ones((h, w), dtype=np.int32)
        return cls(tok, anc_r, anc_c, ones, ones.copy())

    @classmethod
    def from_regions(cls, height: int, width: int, regions) -> "TokenGrid":
        """Build from an explicit region list; raises TilingViolation on gap/overlap."""
        tok = np.full((height, width), -1, dtype=np.int32)
        anc_r = np.empty((height, width), dtype=np.int32)
        anc_c = np.empty((height, width), dtype=np.int32)
        sh_r = np.empty((height, width), dtype=np.int32)
        sh_c = np.empty((height, width), dtype=np.int32)
        for reg in regions:
            r0, c0, r1, c1 = reg.row, reg.col, reg.row + reg.rows, reg.col + reg.cols
            if r0 < 0 or c0 < 0 or r1 > height or c1 > width:
                raise TilingViolation(f"region {reg} leaves the {height}x{width} grid")
            if (tok[r0:r1, c0:c1] != -1).any():
                raise TilingViolation(f"region {reg} overlaps an earlier region")
            tok[r0:r1, c0:c1] = reg.token
            anc_r[r0:r1, c0:c1] = r0
            anc_c[r0:r1, c0:c1] = c0
            sh_r[r0:r1, c0:c1] = reg.rows
            sh_c[r0:r1, c0:c1] = reg.cols
        if (tok == -1).any():
            i, j = np.argwhere(tok == -1)[0]
            raise TilingViolation(f"cell ({i}, {j}) is not covered by any region")
        return cls(tok, anc_r, anc_c, sh_r, sh_c)

    def copy(self) -> "TokenGrid":
        return TokenGrid(
            self.tok.copy(),
            self.anc_r.copy(),
            self.anc_c.copy(),
            self.sh_r.copy(),
            self.sh_c.copy(),
        )

    def anchor_mask(self) -> np.ndarray:
        rows = np.arange(self.height, dtype=np.int32)[:, None]
        cols = np.arange(self.width, dtype=np.int32)[None, :]
        return (self.anc_r == rows) & (self.anc_c == cols)

    @property
    def region_count(self) -> int:
        return int(self.anchor_mask().sum())

    def regions(self) -> list[Region]:
        """All regions in raster order of their anchors (row-major, top-left)."""
        ai, aj = np.nonzero(self.anchor_mask())
        return [
            Region(
                int(i),
                int(j),
                int(self.sh_r[i, j]),
                int(self.sh_c[i, j]),
                int(self.tok[i, j]),
            )
            for i, j in zip(ai, aj)
        ]

    def token_ids(self) -> np.ndarray:
        """Region token ids in raster order (the serialized sequence)."""
        ai, aj = np.nonzero(self.anchor_mask())
        return self.tok[ai, aj].astype(np.int64)

    def present_tokens(self) -> set[int]:
        ai, aj = np.nonzero(self.anchor_mask())
        return set(int(t) for t in np.unique(self.tok[ai, aj]))

    def to_base(self, vocab: "Vocabulary") -> np.ndarray:
        """Expand every region back to the underlying quantized grid."""
        out = np.empty((self.height, self.width), dtype=np.int32)
        for reg in self.regions():
            frag = vocab.expand(reg.token)
            if frag.shape != (reg.rows, reg.cols):
                raise ShapeError(
                    f"token {reg.token} expands to {frag.shape}, region is "
                    f"({reg.rows}, {reg.cols})"
                )
            out[reg.row : reg.row + reg.rows, reg.col : reg.col + reg.cols] = frag
        return out

    def validate(self) -> None:
        """Check the exact-tiling invariant; raises TilingViolation."""
        seen = np.zeros((self.height, self.width), dtype=bool)
        ai, aj = np.nonzero(self.anchor_mask())
        for i, j in zip(ai, aj):
            r, c = int(self.sh_r[i, j]), int(self.sh_c[i, j])
            if i + r > self.height or j + c > self.width:
                raise TilingViolation(f"region at ({i}, {j}) leaves the grid")
            block = (slice(i, i + r), slice(j, j + c))
            if seen[block].any():
                raise TilingViolation(f"region at ({i}, {j}) overlaps another region")
            if (
                (self.tok[block] != self.tok[i, j]).any()
                or (self.anc_r[block] != i).any()
                or (self.anc_c[block] != j).any()
                or (self.sh_r[block] != r).any()
                or (self.sh_c[block] != c).any()
            ):
                raise TilingViolation(f"inconsistent region fields at ({i}, {j})")
            seen[block] = True
        if not seen.all():
            raise TilingViolation("grid has cells not covered by any anchored region")

    def scan_keys(self, n_ids: int) -> np.ndarray:
        """Adjacency keys for this grid (see vbpe._kernels for the encoding)."""
        return _kernels.scan_keys(
            self.tok, self.anc_r, self.anc_c, self.sh_r, self.sh_c, n_ids
        )

    def apply_merge(self, left: int, right: int, orientation: str, new_id: int) -> int:
        """Greedy single-pass in-place replacement; returns replacement count."""
        return int(
            _kernels.merge_pass(
                self.tok,
                self.anc_r,
                self.anc_c,
                self.sh_r,
                self.sh_c,
                left,
                right,
                orientation == HORIZONTAL,
                new_id,
            )
        )


def region_raster_order(grid: TokenGrid) -> list[Region]:
    """Regions sorted by (anchor row, anchor col) ascending."""
    return grid.regions()


@dataclass(frozen=True)
class MergeRule:
    new_id: int
    left: int
    right: int
    orientation: str
    priority: float
    frequency: float
    spatial: float


class Vocabulary:
    """An ordered list of merge rules extending the base VQ id range.

    Immutable after construction; expansion results are memoized, so a single
    instance can be shared across threads for encode/decode.
    """

    def __init__(self, layout: IdLayout, merges=()):
        self.layout = layout
        self.merges: tuple[MergeRule, ...] = tuple(merges)
        if len(self.merges) > layout.ext_size:
            raise InvalidParameter(
                f"{len(self.merges)} merges exceed layout ext_size {layout.ext_size}"
            )
        self._shapes: dict[int, tuple[int, int]] = {}
        self._expansions: dict[int, np.ndarray] = {}
        self._validate()

    @property
    def base_size(self) -> int:
        return self.layout.base_k

    @property
    def n_merges(self) -> int:
        return len(self.merges)

    @property
    def max_id(self) -> int:
        """One past the largest defined (base or extended) id."""
        return self.layout.ext_start + len(self.merges)

    def _validate(self) -> None:
        ext_start = self.layout.ext_start
        for i, rule in enumerate(self.merges):
            if rule.new_id != ext_start + i:
                raise InvalidParameter(
                    f"merge {i} has id {rule.new_id}, expected {ext_start + i}"
                )
            if rule.orientation not in ORIENTATIONS:
                raise InvalidParameter(f"merge {i} has orientation {rule.orientation!r}")
            for side in (rule.left, rule.right):
                if not (self.layout.is_base(side) or ext_start <= side < rule.new_id):
                    raise UnknownToken(
                        f"merge {i} references id {side} which is not yet defined"
                    )
            lr, lc = self.shape_of(rule.left)
            rr, rc = self.shape_of(rule.right)
            if rule.orientation == HORIZONTAL and lr != rr:
                raise InvalidParameter(
                    f"merge {i}: horizontal parts have row extents {lr} != {rr}"
                )
            if rule.orientation == VERTICAL and lc != rc:
                raise InvalidParameter(
                    f"merge {i}: vertical parts have col extents {lc} != {rc}"
                )
            self._shapes[rule.new_id] = (
                (lr, lc + rc) if rule.orientation == HORIZONTAL else (lr + rr, lc)
            )

    def rule_for(self, tid: int) -> MergeRule:
        idx = tid - self.layout.ext_start
        if not 0 <= idx < len(self.merges):
            raise UnknownToken(f"id {tid} is not defined by this vocabulary")
        return self.merges[idx]

    def shape_of(self, tid: int) -> tuple[int, int]:
        """(row extent, col extent) of the region a token occupies."""
        if self.layout.is_base(tid):
            return (1, 1)
        shape = self._shapes.get(tid)
        if shape is None:
            self.rule_for(tid)  # raises UnknownToken for out-of-range ids
            raise UnknownToken(f"id {tid} is not defined by this vocabulary")
        return shape

    def expand(self, tid: int) -> np.ndarray:
        """Rectangular array of base VQ indices covered by ``tid``.

        Base ids expand to a 1x1 array holding their own VQ index. Uses an
        explicit stack so arbitrarily deep merge chains cannot overflow
        Python's recursion limit.
        """
        if self.layout.is_base(tid):
            return np.array([[tid - self.layout.n_text]], dtype=np.int32)
        cached = self._expansions.get(tid)
        if cached is not None:
            return cached
        self.rule_for(tid)  # existence check up front
        stack = [tid]
        while stack:
            top = stack[-1]
            rule = self.rule_for(top)
            deps = []
            for side in (rule.left, rule.right):
                if not self.layout.is_base(side) and side not in self._expansions:
                    deps.append(side)
            if deps:
                stack.extend(deps)
                continue
            stack.pop()
            left = self.expand(rule.left) if self.layout.is_base(rule.left) else self._expansions[rule.left]
            right = self.expand(rule.right) if self.layout.is_base(rule.right) else self._expansions[rule.right]
            axis = 1 if rule.orientation == HORIZONTAL else 0
            self._expansions[top] = np.concatenate([left, right], axis=axis)
        return self._expansions[tid]

    def prefix(self, n: int) -> "Vocabulary":
        """Vocabulary consisting of the first ``n`` merges (same layout)."""
        if not 0 <= n <= len(self.merges):
            raise InvalidParameter(f"prefix length {n} out of range")
        return Vocabulary(self.layout, self.merges[:n])
