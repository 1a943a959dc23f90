import numpy as np
import pytest

from salatt.core import ops
from salatt.core.exceptions import EvaluationError
from salatt.core.gradcheck import analytic_gradient, grad_check, numeric_gradient, relative_error
from salatt.core.tensor import Tensor, inject_backward_fault


class TestGradCheck:
    def test_dot_square_hand_case(self):
        x = Tensor([1.0, 2.0])

        np.testing.assert_allclose(analytic_gradient(lambda t: ops.dot(t, t), x), [2.0, 4.0])
        assert grad_check(lambda t: ops.dot(t, t), x) < 1e-8

    def test_numeric_gradient_leaves_input_untouched(self):
        x = Tensor([0.5, -1.5])

        numeric_gradient(lambda t: ops.dot(t, t), x)

        np.testing.assert_array_equal(x.data, [0.5, -1.5])

    def test_relative_error_floor_at_zero_gradients(self):
        assert relative_error(np.zeros(3), np.zeros(3)) == 0.0
        assert relative_error(np.array([0.0]), np.array([1e-12])) == pytest.approx(1e-4)

    def test_non_finite_value_raises(self):
        with pytest.raises(EvaluationError):
            grad_check(lambda t: ops.scale(ops.sum_all(t), float("nan")), Tensor([1.0]))

    def test_corrupted_backward_is_detected(self):
        x = Tensor([0.3, -0.7, 1.1])

        with inject_backward_fault("tanh"):
            error = grad_check(lambda t: ops.sum_all(ops.tanh_op(t)), x)

        assert error > 1e-4
