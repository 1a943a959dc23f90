import numpy as np
import pytest

from salatt.core import ops
from salatt.core.exceptions import ArgumentError
from salatt.core.tensor import Tape, Tensor, active_tape, inject_backward_fault


class TestTensor:
    def test_data_is_read_only(self):
        t = Tensor([1.0, 2.0])

        with pytest.raises(ValueError):
            t.data[0] = 5.0

    def test_numpy_returns_writable_copy(self):
        t = Tensor([1.0, 2.0])
        copy = t.numpy()
        copy[0] = 9.0

        assert t.data[0] == 1.0

    def test_integer_input_is_widened_to_float64(self):
        assert Tensor([1, 2, 3]).data.dtype == np.float64

    def test_is_finite(self):
        assert Tensor([0.0, 1.0]).is_finite()
        assert not Tensor([np.nan]).is_finite()


class TestTape:
    def test_records_nodes_in_execution_order(self):
        # Arrange
        x = Tensor([1.0, 2.0], requires_grad=True)

        # Act
        with Tape() as tape:
            y = ops.scale(x, 2.0)
            ops.sum_all(ops.ewmul(y, y))

        # Assert
        assert [node.op for node in tape.nodes] == ["scale", "ewmul", "sum"]

    def test_untracked_inputs_are_not_recorded(self):
        with Tape() as tape:
            ops.add(Tensor([1.0]), Tensor([2.0]))

        assert tape.nodes == []

    def test_no_tape_outside_context(self):
        with Tape():
            assert active_tape() is not None
        assert active_tape() is None

    def test_backward_of_dot_product(self):
        # Arrange
        x = Tensor([1.0, 2.0], requires_grad=True)

        # Act
        with Tape() as tape:
            loss = ops.dot(x, x)
        tape.backward(loss)

        # Assert
        np.testing.assert_allclose(tape.gradient(x).data, [2.0, 4.0])

    def test_gradients_accumulate_over_reuse(self):
        x = Tensor([3.0], requires_grad=True)

        with Tape() as tape:
            loss = ops.sum_all(ops.add(ops.scale(x, 2.0), ops.scale(x, 5.0)))
        tape.backward(loss)

        np.testing.assert_allclose(tape.gradient(x).data, [7.0])

    def test_unreached_tensor_gets_zero_gradient(self):
        x = Tensor([1.0, 2.0], requires_grad=True)
        unused = Tensor([[1.0, 2.0]], requires_grad=True)

        with Tape() as tape:
            loss = ops.sum_all(x)
        tape.backward(loss)

        np.testing.assert_array_equal(tape.gradient(unused).data, np.zeros((1, 2)))

    def test_backward_requires_scalar(self):
        x = Tensor([1.0, 2.0], requires_grad=True)

        with Tape() as tape:
            y = ops.scale(x, 1.0)

        with pytest.raises(ArgumentError):
            tape.backward(y)

    def test_backward_fault_scales_gradient(self):
        # Arrange
        x = Tensor([1.0, 2.0], requires_grad=True)
        with Tape() as tape:
            loss = ops.sum_all(ops.scale(x, 3.0))

        # Act
        with inject_backward_fault("scale", factor=2.0):
            tape.backward(loss)

        # Assert
        np.testing.assert_allclose(tape.gradient(x).data, [6.0, 6.0])
