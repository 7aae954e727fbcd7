import numpy as np
import pytest

from rpcf.memory import SampleMemory, insert_sample, should_update


def fake_sample(seed=0, shape=(2, 4, 4)):
    return np.fft.fft2(np.random.default_rng(seed).standard_normal(shape), axes=(-2, -1))


class TestInsert:
    def test_first_insert_weight_one(self):
        mem = SampleMemory(capacity=3, learning_rate=0.02)
        insert_sample(mem, fake_sample(0), 1)
        assert len(mem) == 1 and mem.samples[0].weight == 1.0

    def test_second_insert_decay(self):
        mem = SampleMemory(capacity=3, learning_rate=0.02)
        insert_sample(mem, fake_sample(0), 1)
        insert_sample(mem, fake_sample(1), 2)
        np.testing.assert_allclose(mem.weights, [0.98, 0.02])

    def test_eviction_excludes_newest_and_renormalizes(self):
        from rpcf.memory import TrainingSample

        mem = SampleMemory(capacity=3, learning_rate=0.02)
        mem.samples = [
            TrainingSample(fake_sample(i), w, i + 1)
            for i, w in enumerate([0.5, 0.3, 0.2])
        ]
        insert_sample(mem, fake_sample(9), 4)
        # decayed: 0.49, 0.294, 0.196, new 0.02; evict 0.196 (not the newest)
        assert len(mem) == 3
        frames = [s.frame_index for s in mem.samples]
        assert 4 in frames and 3 not in frames
        expect = np.array([0.49, 0.294, 0.02])
        np.testing.assert_allclose(mem.weights, expect / expect.sum(), atol=1e-12)

    def test_weights_always_sum_to_one(self):
        mem = SampleMemory(capacity=5, learning_rate=0.1)
        for k in range(20):
            insert_sample(mem, fake_sample(k), k + 1)
            assert mem.weights.sum() == pytest.approx(1.0, abs=1e-9)
            assert np.all(mem.weights >= 0)
            assert len(mem) <= 5

    def test_recency_ordering_without_eviction(self):
        omega = 0.05
        mem = SampleMemory(capacity=10, learning_rate=omega)
        for k in range(6):
            insert_sample(mem, fake_sample(k), k + 1)
        w = mem.weights
        assert w[-1] == pytest.approx(omega)
        assert w[0] == pytest.approx((1 - omega) ** 5)

    def test_eviction_never_removes_newest(self):
        mem = SampleMemory(capacity=2, learning_rate=0.9)  # newest gets big weight
        for k in range(10):
            insert_sample(mem, fake_sample(k), k + 1)
            assert mem.samples[-1].frame_index == k + 1

    def test_shape_mismatch_rejected(self):
        mem = SampleMemory(capacity=3)
        insert_sample(mem, fake_sample(0, (2, 4, 4)), 1)
        with pytest.raises(ValueError, match="shape"):
            insert_sample(mem, fake_sample(1, (2, 4, 6)), 2)


class TestShouldUpdate:
    def test_first_frame_mandatory(self):
        assert should_update(SampleMemory(update_interval=6), 1)

    def test_modulo(self):
        mem = SampleMemory(update_interval=6)
        assert not should_update(mem, 7)
        assert should_update(mem, 12)
