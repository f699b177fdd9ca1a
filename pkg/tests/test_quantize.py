from __future__ import annotations

import numpy as np
import pytest

from vbpe.errors import EmptyCorpus, ShapeError
from vbpe.quantize import Codebook, fit_toy_codebook, quantize


def line_codebook():
    return Codebook(np.array([[0.0], [10.0]]))


class TestQuantize:
    def test_exact_entry_maps_to_itself(self):
        cb = Codebook(np.arange(12.0).reshape(6, 2))
        patch = cb.entries[5].reshape(1, 1, 2)
        assert quantize(patch, cb)[0, 0] == 5

    def test_nearest_on_a_line(self):
        cb = line_codebook()
        patches = np.array([[[4.0]], [[6.0]]])  # 2x1 grid of 1-dim patches
        out = quantize(patches, cb)
        assert out[0, 0] == 0 and out[1, 0] == 1

    def test_equidistant_tie_breaks_to_smallest_index(self):
        cb = line_codebook()
        assert quantize(np.array([[[5.0]]]), cb)[0, 0] == 0

    def test_dimension_mismatch(self):
        cb = line_codebook()
        with pytest.raises(ShapeError):
            quantize(np.zeros((2, 2, 3)), cb)
        with pytest.raises(ShapeError):
            quantize(np.zeros((2, 2)), cb)

    def test_requantizing_centroids_is_idempotent(self, rng):
        cb = Codebook(rng.normal(size=(16, 3)))
        patches = rng.normal(size=(5, 7, 3))
        idx = quantize(patches, cb)
        again = quantize(cb.entries[idx], cb)
        assert (again == idx).all()


class TestFitToyCodebook:
    def test_two_exact_clusters(self):
        pts = np.array([[0.0, 0.0], [4.0, 4.0]] * 10)
        cb = fit_toy_codebook(pts, 2, seed=3)
        got = sorted(cb.entries.tolist())
        assert got == [[0.0, 0.0], [4.0, 4.0]]

    def test_k_one_is_global_mean(self, rng):
        pts = rng.normal(size=(40, 3))
        cb = fit_toy_codebook(pts, 1, seed=0)
        assert np.allclose(cb.entries[0], pts.mean(axis=0))

    def test_deterministic_under_seed(self, rng):
        pts = rng.normal(size=(60, 4))
        a = fit_toy_codebook(pts, 5, seed=9)
        b = fit_toy_codebook(pts, 5, seed=9)
        assert (a.entries == b.entries).all()

    def test_empty_corpus(self):
        with pytest.raises(EmptyCorpus):
            fit_toy_codebook(np.empty((0, 3)), 2, seed=0)

    def test_codebook_validation(self):
        with pytest.raises(ShapeError):
            Codebook(np.zeros(3))
