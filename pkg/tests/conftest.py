from __future__ import annotations

import numpy as np
import pytest

from vbpe.layout import IdLayout
from vbpe.markov import coupled_source, generate
from vbpe.train import TrainerConfig, train


def small_layout(base_k: int = 8, ext_size: int = 32, n_text: int = 0) -> IdLayout:
    return IdLayout(n_text=n_text, base_k=base_k, ext_size=ext_size)


@pytest.fixture(scope="session")
def markov_corpus():
    """Structured 4-symbol corpus shared by training-heavy tests."""
    return generate(coupled_source(4, 0.85, seed=11), 12, 12, 40)


@pytest.fixture(scope="session")
def trained(markov_corpus):
    """A 24-merge vocabulary plus its final grids, trained once per session."""
    layout = small_layout(base_k=4, ext_size=24)
    cfg = TrainerConfig(target_ext_size=24, seed=0)
    return train(markov_corpus, 4, cfg, layout=layout)


@pytest.fixture()
def rng():
    return np.random.default_rng(1234)
