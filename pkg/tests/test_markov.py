from __future__ import annotations

import numpy as np
import pytest

from vbpe.errors import InvalidParameter
from vbpe.markov import MarkovGridSource, coupled_source, generate


class TestSource:
    def test_rejects_non_stochastic_rows(self):
        bad = np.array([[0.5, 0.4], [0.5, 0.5]])
        good = np.eye(2)
        with pytest.raises(InvalidParameter):
            MarkovGridSource(2, bad, good, seed=0)
        with pytest.raises(InvalidParameter):
            MarkovGridSource(2, good, bad, seed=0)

    def test_rejects_negative_entries(self):
        bad = np.array([[1.5, -0.5], [0.0, 1.0]])
        with pytest.raises(InvalidParameter):
            MarkovGridSource(2, bad, np.eye(2), seed=0)

    def test_coupled_source_is_stochastic(self):
        src = coupled_source(5, 0.7, seed=1)
        assert np.allclose(src.transition_right.sum(axis=1), 1.0)
        assert np.allclose(np.diag(src.transition_right), 0.7)


class TestGenerate:
    def test_identity_transitions_give_constant_grids(self):
        src = MarkovGridSource(4, np.eye(4), np.eye(4), seed=5)
        for g in generate(src, 6, 7, 10):
            assert (g == g[0, 0]).all()

    def test_uniform_transitions_match_binomial_bounds(self):
        n = 4
        uni = np.full((n, n), 1.0 / n)
        src = MarkovGridSource(n, uni, uni, seed=2)
        grids = generate(src, 25, 25, 160)  # 1e5 cells
        cells = np.concatenate([g.ravel() for g in grids])
        total = cells.size
        p = 1.0 / n
        sigma = np.sqrt(p * (1 - p) / total)
        for s in range(n):
            emp = (cells == s).mean()
            assert abs(emp - p) <= 3 * sigma

    def test_same_seed_same_corpus(self):
        src = coupled_source(3, 0.8, seed=77)
        a = generate(src, 5, 5, 8)
        b = generate(coupled_source(3, 0.8, seed=77), 5, 5, 8)
        assert all((x == y).all() for x, y in zip(a, b))

    def test_count_zero(self):
        assert generate(coupled_source(2, 0.5, seed=0), 4, 4, 0) == []

    def test_bad_shape_request(self):
        src = coupled_source(2, 0.5, seed=0)
        with pytest.raises(InvalidParameter):
            generate(src, 0, 4, 1)

    def test_values_within_symbol_range(self):
        src = coupled_source(6, 0.4, seed=3)
        for g in generate(src, 9, 9, 12):
            assert g.min() >= 0 and g.max() < 6
