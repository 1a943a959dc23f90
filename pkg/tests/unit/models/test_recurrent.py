import numpy as np
import pytest

from salatt.core import ops
from salatt.core.exceptions import ArgumentError, DimensionError
from salatt.core.gradcheck import grad_check
from salatt.core.tensor import Tensor
from salatt.models.recurrent import (
    BiLstmParams,
    LstmCellParams,
    LstmState,
    bilstm_forward,
    lstm_cell_step,
    lstm_forward,
    question_final_encoding,
)
from tests.utils.test_helpers import random_lstm_params, reference_bilstm, reference_lstm_step

TRANSCRIPTION_TOLERANCE = 1e-12


class TestLstmCellStep:
    def test_matches_direct_transcription(self, np_rng):
        for _ in range(100):
            # Arrange
            input_size, hidden = int(np_rng.integers(1, 6)), int(np_rng.integers(1, 6))
            p = random_lstm_params(np_rng, input_size, hidden)
            x = np_rng.normal(size=input_size)
            h_prev, c_prev = np_rng.normal(size=hidden), np_rng.normal(size=hidden)

            # Act
            state = lstm_cell_step(p, Tensor(x), LstmState(Tensor(h_prev), Tensor(c_prev)))

            # Assert
            h_ref, c_ref = reference_lstm_step(p, x, h_prev, c_prev)
            np.testing.assert_allclose(state.h.data, h_ref, rtol=0, atol=TRANSCRIPTION_TOLERANCE)
            np.testing.assert_allclose(state.c.data, c_ref, rtol=0, atol=TRANSCRIPTION_TOLERANCE)

    def test_zero_weights_give_half_candidate(self):
        # i = f = o = 0.5, u = 0 -> c = 0.5 * c_prev, h = 0.5 * tanh(c)
        p = LstmCellParams.zeros(input_size=3, hidden_size=2)
        prev = LstmState(Tensor.zeros(2), Tensor([1.0, -2.0]))

        state = lstm_cell_step(p, Tensor(np.ones(3)), prev)

        np.testing.assert_allclose(state.c.data, [0.5, -1.0])
        np.testing.assert_allclose(state.h.data, 0.5 * np.tanh([0.5, -1.0]))

    def test_wrong_input_size_raises(self):
        p = LstmCellParams.zeros(input_size=3, hidden_size=2)

        with pytest.raises(DimensionError):
            lstm_cell_step(p, Tensor(np.ones(4)), LstmState.zeros(2))

    def test_gradient_with_respect_to_input(self, np_rng):
        p = random_lstm_params(np_rng, 4, 3)
        prev = LstmState(Tensor(np_rng.normal(size=3)), Tensor(np_rng.normal(size=3)))

        def loss(x: Tensor) -> Tensor:
            state = lstm_cell_step(p, x, prev)
            return ops.sum_all(ops.add(state.h, state.c))

        assert grad_check(loss, Tensor(np_rng.normal(size=4))) < 1e-6


class TestLstmForward:
    def test_empty_sequence_raises(self):
        with pytest.raises(ArgumentError):
            lstm_forward([LstmCellParams.zeros(2, 2)], [])

    def test_layer_sizes_must_chain(self):
        with pytest.raises(DimensionError):
            lstm_forward([LstmCellParams.zeros(2, 3), LstmCellParams.zeros(4, 3)], [Tensor(np.ones(2))])

    def test_question_encoding_has_size_two_l_r(self, np_rng):
        layers = [random_lstm_params(np_rng, 4, 5), random_lstm_params(np_rng, 5, 5)]
        tokens = [Tensor(np_rng.normal(size=4)) for _ in range(3)]

        encoding = question_final_encoding(layers, tokens)

        assert encoding.shape == (2 * 2 * 5,)
        _, finals = lstm_forward(layers, tokens)
        np.testing.assert_array_equal(encoding.data[:5], finals[0].h.data)
        np.testing.assert_array_equal(encoding.data[10:15], finals[0].c.data)


class TestBiLstm:
    def test_matches_two_pass_composition(self, np_rng):
        for length in (1, 2, 5, 9):
            p = BiLstmParams(random_lstm_params(np_rng, 3, 2), random_lstm_params(np_rng, 3, 2))
            seq = [np_rng.normal(size=3) for _ in range(length)]

            outputs = bilstm_forward(p, [Tensor(x) for x in seq])

            expected = reference_bilstm(p.forward, p.backward, seq)
            for got, want in zip(outputs, expected, strict=True):
                np.testing.assert_allclose(got.data, want, rtol=0, atol=TRANSCRIPTION_TOLERANCE)

    def test_reversing_input_and_swapping_directions_reverses_output(self, np_rng):
        p = BiLstmParams(random_lstm_params(np_rng, 3, 1), random_lstm_params(np_rng, 3, 1))
        seq = [Tensor(np_rng.normal(size=3)) for _ in range(6)]

        outputs = bilstm_forward(p, seq)
        mirrored = bilstm_forward(p.swapped(), seq[::-1])

        for got, want in zip(mirrored, outputs[::-1], strict=True):
            np.testing.assert_allclose(got.data, want.data, rtol=0, atol=TRANSCRIPTION_TOLERANCE)

    def test_zero_backward_parameters_reduce_to_the_forward_lstm(self, np_rng):
        # Arrange
        forward = random_lstm_params(np_rng, 4, 3)
        p = BiLstmParams(forward, LstmCellParams.zeros(4, 3))
        seq = [Tensor(np_rng.normal(size=4)) for _ in range(9)]

        # Act
        outputs = bilstm_forward(p, seq)

        # Assert
        expected, _ = lstm_forward([forward], seq)
        for got, want in zip(outputs, expected, strict=True):
            np.testing.assert_array_equal(got.data, want.data)

    def test_mismatched_directions_are_rejected(self):
        with pytest.raises(DimensionError):
            BiLstmParams(LstmCellParams.zeros(3, 1), LstmCellParams.zeros(3, 2))
