import numpy as np

from salatt.core.rng import RngState


class TestRngState:
    def test_same_seed_same_stream(self):
        np.testing.assert_array_equal(RngState(7).normal((5,)), RngState(7).normal((5,)))

    def test_derived_streams_are_reproducible(self):
        first = RngState(7).derive("dropout", 12).random((4,))
        second = RngState(7).derive("dropout", 12).random((4,))

        np.testing.assert_array_equal(first, second)

    def test_derived_streams_differ_by_key(self):
        a = RngState(7).derive("init").random((8,))
        b = RngState(7).derive("batches").random((8,))

        assert not np.array_equal(a, b)

    def test_derive_does_not_consume_parent(self):
        parent = RngState(3)
        parent.derive("child").random((10,))

        np.testing.assert_array_equal(parent.random((3,)), RngState(3).random((3,)))

    def test_integers_are_in_range(self):
        draws = RngState(1).integers(9, 500)

        assert draws.min() >= 0
        assert draws.max() < 9
