import numpy as np
import pytest

from salatt.core.rng import RngState
from salatt.core.tensor import inject_backward_fault
from salatt.models.enums import Variant
from salatt.models.vqa_model import expected_shapes
from salatt.services.gradcheck_service import (
    DEFAULT_TOLERANCE,
    GRADIENT_FLOOR,
    POINT_RANGE,
    GradCheckService,
    random_params,
    random_samples,
    smallest_gradient,
)


class TestRandomSamples:
    def test_samples_match_configured_dimensions(self, small_config):
        samples = random_samples(small_config, 3, RngState(0))

        assert len(samples) == 3
        for sample in samples:
            assert sample.features.features.shape == (small_config.grid.region_total, small_config.d_i)
            assert all(0 <= t < small_config.vocab_size for t in sample.question)
            assert 0 <= sample.answer_label < small_config.answer_count


class TestRandomParams:
    def test_every_block_is_drawn_including_biases(self, small_config):
        params = random_params(small_config, RngState(0))

        assert {name: t.shape for name, t in params.items()} == expected_shapes(small_config)
        for name, tensor in params.items():
            assert np.abs(tensor.data).max() < POINT_RANGE
            assert np.any(tensor.data != 0.0), name


class TestCheckPoint:
    @pytest.mark.parametrize("variant", list(Variant))
    def test_accepted_point_clears_the_gradient_floor(self, small_config, variant):
        point = GradCheckService(small_config).check_point(variant)

        assert smallest_gradient(point.config, point.params, point.samples) >= GRADIENT_FLOOR
        assert point.config.dropout_rate == 0.0

    def test_same_seed_same_point(self, small_config):
        first = GradCheckService(small_config, seed=4).check_point(Variant.SALATT)
        second = GradCheckService(small_config, seed=4).check_point(Variant.SALATT)

        assert first.draw == second.draw
        for name, tensor in first.params.items():
            np.testing.assert_array_equal(tensor.data, second.params[name].data)


class TestGradCheckService:
    @pytest.mark.parametrize("variant", list(Variant))
    def test_every_block_passes(self, small_config, variant):
        results = GradCheckService(small_config).check_variant(variant)

        assert results
        assert all(r.passed(DEFAULT_TOLERANCE) for r in results), [(r.block, r.max_relative_error) for r in results]

    @pytest.mark.slow
    @pytest.mark.parametrize("seed", [1, 2, 3])
    def test_worst_error_across_variants_stays_below_tolerance(self, small_config, seed):
        results = GradCheckService(small_config, seed=seed).check(list(Variant))

        worst = max(results, key=lambda r: r.max_relative_error)
        assert worst.max_relative_error < DEFAULT_TOLERANCE, (worst.variant, worst.block, worst.max_relative_error)

    def test_one_result_per_parameter_block(self, small_config):
        results = GradCheckService(small_config).check([Variant.SALATT, Variant.HOLISTIC])

        salatt = {r.block for r in results if r.variant is Variant.SALATT}
        holistic = {r.block for r in results if r.variant is Variant.HOLISTIC}
        assert salatt == set(expected_shapes(small_config.model_copy(update={"variant": Variant.SALATT})))
        assert any(b.startswith("preselect.fwd.") for b in salatt)
        assert not any(b.startswith("preselect.") for b in holistic)

    def test_injected_fault_is_caught(self, small_config):
        with inject_backward_fault("linear"):
            results = GradCheckService(small_config).check_variant(Variant.SALATT)

        assert not all(r.passed(DEFAULT_TOLERANCE) for r in results)
