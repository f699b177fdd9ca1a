"""Multi-stage training plans: data-composition ratios and freezing masks.

Three stages with a fixed default curriculum: foundation-heavy alignment,
a balanced middle stage that unfreezes the first quarter of the layers, and
a reasoning/instruction-heavy final stage with everything trainable. Plans
are emitted as data; no training is executed here.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import InvalidParameter, PoolExhausted

DATA_TYPES = ("FD", "PD", "RD", "ID")

NEW_EMBEDDINGS_ONLY = "new_embeddings_only"
LAYERS_UP_TO = "layers_up_to"
ALL_PARAMETERS = "all"

_RATIO_TOL = 1e-9


@dataclass(frozen=True)
class MaskSpec:
    kind: str
    layer_fraction: float | None = None

    def __post_init__(self):
        if self.kind not in (NEW_EMBEDDINGS_ONLY, LAYERS_UP_TO, ALL_PARAMETERS):
            raise InvalidParameter(f"unknown mask kind {self.kind!r}")
        if self.kind == LAYERS_UP_TO:
            if self.layer_fraction is None or not 0.0 < self.layer_fraction <= 1.0:
                raise InvalidParameter(
                    f"layers_up_to needs a fraction in (0, 1], got {self.layer_fraction}"
                )


@dataclass(frozen=True)
class StagePlan:
    stage: int
    ratios: dict[str, float]
    unfrozen: MaskSpec

    def __post_init__(self):
        if self.stage not in (1, 2, 3):
            raise InvalidParameter(f"stage must be 1, 2, or 3, got {self.stage}")
        if set(self.ratios) != set(DATA_TYPES):
            raise InvalidParameter(f"ratios must cover exactly {DATA_TYPES}")
        if any(r < 0 or r > 1 for r in self.ratios.values()):
            raise InvalidParameter("ratios must lie in [0, 1]")
        if abs(sum(self.ratios.values()) - 1.0) > _RATIO_TOL:
            raise InvalidParameter(f"ratios must sum to 1, got {sum(self.ratios.values())}")


def default_plan() -> list[StagePlan]:
    """The default three-stage curriculum."""
    return [
        StagePlan(
            1,
            {"FD": 0.80, "PD": 0.20, "RD": 0.0, "ID": 0.0},
            MaskSpec(NEW_EMBEDDINGS_ONLY),
        ),
        StagePlan(
            2,
            {"FD": 0.40, "PD": 0.30, "RD": 0.20, "ID": 0.10},
            MaskSpec(LAYERS_UP_TO, 0.25),
        ),
        StagePlan(
            3,
            {"FD": 0.15, "PD": 0.15, "RD": 0.30, "ID": 0.40},
            MaskSpec(ALL_PARAMETERS),
        ),
    ]


def sample_batch(
    pools: dict[str, list], plan: StagePlan, batch: int, seed: int
) -> list:
    """Draw ``batch`` items i.i.d.: type by ratio, then uniform within type."""
    if batch < 0:
        raise InvalidParameter(f"batch must be >= 0, got {batch}")
    probs = [plan.ratios[t] for t in DATA_TYPES]
    for t, p in zip(DATA_TYPES, probs):
        if p > 0 and not pools.get(t):
            raise PoolExhausted(f"pool {t} is empty but has ratio {p}")
    if batch == 0:
        return []
    rng = np.random.default_rng(seed)
    type_idx = rng.choice(len(DATA_TYPES), size=batch, p=probs)
    out = []
    for ti in type_idx:
        pool = pools[DATA_TYPES[ti]]
        out.append(pool[int(rng.integers(len(pool)))])
    return out


def mask_spec(plan: StagePlan, n_layers: int) -> dict:
    """Explicit parameter-group mask for a model with ``n_layers`` layers.

    Fractional layer counts round up so stage 2 always unfreezes at least
    one layer. Updatable groups are cumulative across stages: the new
    embedding rows stay trainable once unfrozen.
    """
    if n_layers < 1:
        raise InvalidParameter(f"n_layers must be >= 1, got {n_layers}")
    kind = plan.unfrozen.kind
    if kind == NEW_EMBEDDINGS_ONLY:
        layers: list[int] = []
        everything = False
    elif kind == LAYERS_UP_TO:
        layers = list(range(1, math.ceil(plan.unfrozen.layer_fraction * n_layers) + 1))
        everything = False
    else:
        layers = list(range(1, n_layers + 1))
        everything = True
    return {
        "stage": plan.stage,
        "new_embeddings": True,
        "unfrozen_layers": layers,
        "all_parameters": everything,
    }


def plan_to_doc(plans: list[StagePlan], n_layers: int) -> dict:
    return {
        "format": "vbpe-plan",
        "version": 1,
        "n_layers": n_layers,
        "stages": [
            {
                "stage": p.stage,
                "ratios": {t: p.ratios[t] for t in DATA_TYPES},
                "mask": mask_spec(p, n_layers),
            }
            for p in plans
        ],
    }
