from __future__ import annotations

import numpy as np
import pytest

from vbpe.errors import (
    IndexOutOfRange,
    InvalidParameter,
    ShapeError,
    TilingViolation,
    UnknownToken,
)
from vbpe.grid import (
    HORIZONTAL,
    VERTICAL,
    MergeRule,
    Region,
    TokenGrid,
    Vocabulary,
    as_quant_grid,
    region_raster_order,
)
from vbpe.layout import IdLayout

from .conftest import small_layout
from .oracles import expand_replay


def rule(new_id, left, right, orientation):
    return MergeRule(new_id, left, right, orientation, 0.0, 0.0, 0.0)


class TestLayout:
    def test_ranges_partition(self):
        lay = IdLayout(n_text=10, base_k=4, ext_size=3)
        assert lay.vq_start == 10
        assert lay.ext_start == 14
        assert lay.ext_end == 17
        assert lay.boi == 17 and lay.eoi == 18
        for tid in range(lay.total_ids):
            kinds = [lay.is_text(tid), lay.is_base(tid), lay.is_ext(tid)]
            if tid in (lay.boi, lay.eoi):
                assert kinds == [False, False, False]
            else:
                assert sum(kinds) == 1

    def test_bad_layout_rejected(self):
        with pytest.raises(InvalidParameter):
            IdLayout(n_text=-1)
        with pytest.raises(InvalidParameter):
            IdLayout(base_k=0)


class TestQuantGrid:
    def test_validates_shape_and_range(self):
        with pytest.raises(ShapeError):
            as_quant_grid(np.zeros(4, dtype=int))
        with pytest.raises(ShapeError):
            as_quant_grid(np.zeros((2, 2)))  # float dtype
        with pytest.raises(IndexOutOfRange):
            as_quant_grid([[0, 5]], base_k=5)
        with pytest.raises(IndexOutOfRange):
            as_quant_grid([[-1, 0]])
        out = as_quant_grid([[0, 4]], base_k=5)
        assert out.dtype == np.int32


class TestTokenGrid:
    def test_from_base_all_unit_regions(self):
        lay = small_layout()
        tg = TokenGrid.from_base([[3, 1], [2, 0]], lay)
        tg.validate()
        assert tg.region_count == 4
        assert [r.token for r in tg.regions()] == [3, 1, 2, 0]

    def test_raster_order_single_region(self):
        lay = small_layout()
        tg = TokenGrid.from_regions(2, 2, [Region(0, 0, 2, 2, lay.ext_start)])
        assert len(region_raster_order(tg)) == 1

    def test_raster_order_1x2(self):
        lay = small_layout()
        tg = TokenGrid.from_base([[0, 1]], lay)
        assert [(r.row, r.col) for r in region_raster_order(tg)] == [(0, 0), (0, 1)]

    def test_raster_order_mixed_shapes(self):
        # 2x2 grid: one 2x1 vertical region at col 0, two 1x1 at col 1
        regs = [Region(0, 0, 2, 1, 40), Region(0, 1, 1, 1, 5), Region(1, 1, 1, 1, 6)]
        tg = TokenGrid.from_regions(2, 2, regs)
        assert [(r.row, r.col) for r in region_raster_order(tg)] == [
            (0, 0),
            (0, 1),
            (1, 1),
        ]

    def test_overlap_rejected(self):
        with pytest.raises(TilingViolation):
            TokenGrid.from_regions(
                2, 2, [Region(0, 0, 2, 2, 1), Region(1, 1, 1, 1, 2)]
            )

    def test_gap_rejected(self):
        with pytest.raises(TilingViolation):
            TokenGrid.from_regions(2, 2, [Region(0, 0, 2, 1, 1)])

    def test_out_of_bounds_rejected(self):
        with pytest.raises(TilingViolation):
            TokenGrid.from_regions(2, 2, [Region(0, 0, 2, 3, 1)])

    def test_region_count_bounded_by_cells(self, trained):
        for tg in trained.grids:
            tg.validate()
            assert tg.region_count <= tg.height * tg.width
            areas = sum(r.rows * r.cols for r in tg.regions())
            assert areas == tg.height * tg.width


class TestVocabulary:
    def test_base_expansion_is_itself(self):
        lay = small_layout()
        vocab = Vocabulary(lay)
        assert vocab.expand(7).tolist() == [[7]]

    def test_horizontal_pair_expansion(self):
        lay = small_layout()
        vocab = Vocabulary(lay, [rule(lay.ext_start, 2, 3, HORIZONTAL)])
        assert vocab.expand(lay.ext_start).tolist() == [[2, 3]]

    def test_recursive_expansion_matches_replay_oracle(self):
        lay = small_layout()
        c1, c2 = lay.ext_start, lay.ext_start + 1
        vocab = Vocabulary(
            lay, [rule(c1, 0, 1, HORIZONTAL), rule(c2, c1, c1, VERTICAL)]
        )
        expected = expand_replay(
            [(c1, 0, 1, HORIZONTAL), (c2, c1, c1, VERTICAL)], c2, lay.n_text
        )
        assert expected == [[0, 1], [0, 1]]
        assert vocab.expand(c2).tolist() == expected

    def test_expansion_matches_replay_oracle_on_trained_vocab(self, trained):
        vocab = trained.vocab
        rules = [
            (m.new_id, m.left, m.right, m.orientation) for m in vocab.merges
        ]
        for m in vocab.merges:
            assert vocab.expand(m.new_id).tolist() == expand_replay(
                rules, m.new_id, vocab.layout.n_text
            )

    def test_expand_shape_matches_shape_of(self, trained):
        vocab = trained.vocab
        for m in vocab.merges:
            assert vocab.expand(m.new_id).shape == vocab.shape_of(m.new_id)

    def test_unknown_token(self):
        lay = small_layout()
        vocab = Vocabulary(lay)
        with pytest.raises(UnknownToken):
            vocab.expand(lay.ext_start)
        with pytest.raises(UnknownToken):
            vocab.shape_of(lay.ext_start + 3)

    def test_forward_reference_rejected(self):
        lay = small_layout()
        with pytest.raises(UnknownToken):
            Vocabulary(lay, [rule(lay.ext_start, lay.ext_start + 1, 0, HORIZONTAL)])

    def test_wrong_new_id_rejected(self):
        lay = small_layout()
        with pytest.raises(InvalidParameter):
            Vocabulary(lay, [rule(lay.ext_start + 5, 0, 1, HORIZONTAL)])

    def test_shape_incompatible_rule_rejected(self):
        lay = small_layout()
        c1 = lay.ext_start
        with pytest.raises(InvalidParameter):
            Vocabulary(
                lay,
                [rule(c1, 0, 1, HORIZONTAL), rule(c1 + 1, c1, 0, VERTICAL)],
            )

    def test_prefix(self, trained):
        vocab = trained.vocab
        pre = vocab.prefix(3)
        assert pre.n_merges == 3
        assert pre.merges == vocab.merges[:3]
        with pytest.raises(InvalidParameter):
            vocab.prefix(vocab.n_merges + 1)

    def test_deep_chain_expansion(self):
        # vertical chain deeper than the recursion limit would allow
        lay = IdLayout(n_text=0, base_k=2, ext_size=4000)
        rules = [rule(lay.ext_start, 0, 0, VERTICAL)]
        for i in range(1, 3000):
            rules.append(rule(lay.ext_start + i, lay.ext_start + i - 1, 0, VERTICAL))
        vocab = Vocabulary(lay, rules)
        deep = vocab.expand(lay.ext_start + 2999)
        assert deep.shape == (3001, 1)
        assert not deep.any()
