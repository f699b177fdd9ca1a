from __future__ import annotations

import numpy as np
import pytest

from vbpe.errors import InvalidParameter, PoolExhausted
from vbpe.plan import (
    ALL_PARAMETERS,
    DATA_TYPES,
    LAYERS_UP_TO,
    NEW_EMBEDDINGS_ONLY,
    MaskSpec,
    StagePlan,
    default_plan,
    mask_spec,
    plan_to_doc,
    sample_batch,
)


class TestDefaultPlan:
    def test_stage_ratios_match_defaults(self):
        plans = default_plan()
        assert [p.stage for p in plans] == [1, 2, 3]
        assert plans[0].ratios == {"FD": 0.80, "PD": 0.20, "RD": 0.0, "ID": 0.0}
        assert plans[1].ratios == {"FD": 0.40, "PD": 0.30, "RD": 0.20, "ID": 0.10}
        assert plans[2].ratios == {"FD": 0.15, "PD": 0.15, "RD": 0.30, "ID": 0.40}

    def test_ratios_sum_to_one(self):
        for p in default_plan():
            assert sum(p.ratios.values()) == pytest.approx(1.0, abs=1e-9)

    def test_mask_kinds(self):
        plans = default_plan()
        assert plans[0].unfrozen.kind == NEW_EMBEDDINGS_ONLY
        assert plans[1].unfrozen == MaskSpec(LAYERS_UP_TO, 0.25)
        assert plans[2].unfrozen.kind == ALL_PARAMETERS

    def test_invalid_plans_rejected(self):
        with pytest.raises(InvalidParameter):
            StagePlan(4, {"FD": 1.0, "PD": 0, "RD": 0, "ID": 0}, MaskSpec(ALL_PARAMETERS))
        with pytest.raises(InvalidParameter):
            StagePlan(1, {"FD": 0.9, "PD": 0, "RD": 0, "ID": 0}, MaskSpec(ALL_PARAMETERS))
        with pytest.raises(InvalidParameter):
            MaskSpec("half_layers")
        with pytest.raises(InvalidParameter):
            MaskSpec(LAYERS_UP_TO, 0.0)


class TestMaskSpec:
    def test_stage1_only_new_embeddings(self):
        mask = mask_spec(default_plan()[0], 32)
        assert mask["new_embeddings"] is True
        assert mask["unfrozen_layers"] == []
        assert mask["all_parameters"] is False

    def test_stage2_quarter_of_32_layers(self):
        mask = mask_spec(default_plan()[1], 32)
        assert mask["unfrozen_layers"] == list(range(1, 9))
        assert mask["new_embeddings"] is True

    def test_stage2_ceil_on_10_layers(self):
        mask = mask_spec(default_plan()[1], 10)
        assert mask["unfrozen_layers"] == [1, 2, 3]  # ceil(2.5)

    def test_stage3_all_ones(self):
        for n in (1, 7, 48):
            mask = mask_spec(default_plan()[2], n)
            assert mask["all_parameters"] is True
            assert mask["unfrozen_layers"] == list(range(1, n + 1))

    def test_monotone_updatable_groups(self):
        for n_layers in (1, 4, 32):
            masks = [mask_spec(p, n_layers) for p in default_plan()]
            for earlier, later in zip(masks, masks[1:]):
                assert set(earlier["unfrozen_layers"]) <= set(later["unfrozen_layers"])
                assert earlier["new_embeddings"] <= later["new_embeddings"]

    def test_n_layers_validation(self):
        with pytest.raises(InvalidParameter):
            mask_spec(default_plan()[0], 0)


class TestSampleBatch:
    def pools(self, size=50):
        return {t: [f"{t}-{i}" for i in range(size)] for t in DATA_TYPES}

    def test_degenerate_ratio_draws_single_type(self):
        plan = StagePlan(
            1, {"FD": 1.0, "PD": 0.0, "RD": 0.0, "ID": 0.0}, MaskSpec(NEW_EMBEDDINGS_ONLY)
        )
        items = sample_batch(self.pools(), plan, 200, seed=0)
        assert len(items) == 200
        assert all(x.startswith("FD-") for x in items)

    def test_marginals_within_multinomial_bounds(self):
        plan = default_plan()[1]
        n = 100_000
        items = sample_batch(self.pools(), plan, n, seed=123)
        for t in DATA_TYPES:
            p = plan.ratios[t]
            emp = sum(1 for x in items if x.startswith(t)) / n
            bound = 3 * np.sqrt(p * (1 - p) / n)
            assert abs(emp - p) <= bound, (t, emp, p)

    def test_batch_zero(self):
        assert sample_batch(self.pools(), default_plan()[0], 0, seed=0) == []

    def test_pool_exhausted(self):
        pools = self.pools()
        pools["PD"] = []
        with pytest.raises(PoolExhausted):
            sample_batch(pools, default_plan()[0], 5, seed=0)

    def test_empty_pool_with_zero_ratio_is_fine(self):
        pools = self.pools()
        pools["RD"] = []
        pools["ID"] = []
        items = sample_batch(pools, default_plan()[0], 10, seed=5)
        assert len(items) == 10

    def test_deterministic_under_seed(self):
        a = sample_batch(self.pools(), default_plan()[2], 64, seed=9)
        b = sample_batch(self.pools(), default_plan()[2], 64, seed=9)
        assert a == b


class TestPlanDoc:
    def test_doc_shape(self):
        doc = plan_to_doc(default_plan(), 16)
        assert doc["format"] == "vbpe-plan" and doc["version"] == 1
        assert [s["stage"] for s in doc["stages"]] == [1, 2, 3]
        assert doc["stages"][1]["mask"]["unfrozen_layers"] == [1, 2, 3, 4]
