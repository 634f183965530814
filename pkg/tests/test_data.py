"""Container round trips, chunk extraction counts, normalization properties."""

import numpy as np
import pytest

from a2aflow.data import (
    Episode,
    NormStats,
    denormalize,
    extract_chunks,
    normalize,
    read_container,
    write_container,
)
from a2aflow.data.chunks import chunk_anchors
from a2aflow.errors import BadMagicError, StatsError, TruncatedError, VersionError


def _episode(rng, t=20, d=3, hw=8):
    return Episode(
        actions=rng.normal(size=(t, d)).astype(np.float32),
        frames=rng.integers(0, 256, size=(t, hw, hw), dtype=np.uint8),
        seed=int(rng.integers(0, 2**63)),
        level=int(rng.integers(0, 4)),
    )


class TestContainer:
    def test_empty_round_trip(self):
        blob = write_container([])
        assert read_container(blob) == []
        assert write_container([]) == blob

    def test_three_episode_round_trip_byte_identical(self):
        rng = np.random.default_rng(0)
        eps = [_episode(rng) for _ in range(3)]
        blob = write_container(eps)
        back = read_container(blob)
        assert len(back) == 3
        for a, b in zip(eps, back):
            np.testing.assert_array_equal(a.actions, b.actions)
            np.testing.assert_array_equal(a.frames, b.frames)
            assert (a.seed, a.level) == (b.seed, b.level)
        assert write_container(back) == blob

    def test_truncation_is_reported(self):
        rng = np.random.default_rng(1)
        blob = write_container([_episode(rng)])
        with pytest.raises(TruncatedError):
            read_container(blob[: len(blob) - 7])

    def test_bad_magic(self):
        with pytest.raises(BadMagicError):
            read_container(b"NOPE" + b"\x00" * 40)

    def test_future_version_rejected(self):
        rng = np.random.default_rng(2)
        blob = bytearray(write_container([_episode(rng)]))
        blob[4] = 9
        with pytest.raises(VersionError):
            read_container(bytes(blob))

    def test_zero_action_dim(self):
        rng = np.random.default_rng(3)
        ep = Episode(
            actions=np.zeros((5, 0), dtype=np.float32),
            frames=rng.integers(0, 256, size=(5, 4, 4), dtype=np.uint8),
            seed=1,
            level=0,
        )
        back = read_container(write_container([ep]))
        assert back[0].actions.shape == (5, 0)
        np.testing.assert_array_equal(back[0].frames, ep.frames)


class TestChunks:
    def _chunks(self, t, n=8, m=8, stride=1):
        rng = np.random.default_rng(t)
        actions = rng.normal(size=(t, 3)).astype(np.float32)
        frames = rng.integers(0, 256, size=(t, 4, 4), dtype=np.uint8)
        return actions, frames, extract_chunks(actions, frames, n, m, stride)

    def test_minimal_length_single_chunk(self):
        _, _, chunks = self._chunks(16)
        assert len(chunks) == 1
        assert chunks[0].anchor == 7

    def test_too_short_gives_empty(self):
        _, _, chunks = self._chunks(15)
        assert chunks == []

    def test_count_formula_t100(self):
        _, _, chunks = self._chunks(100)
        assert len(chunks) == 85

    @pytest.mark.parametrize("seed", range(20))
    def test_count_formula_matches_anchor_enumeration(self, seed):
        rng = np.random.default_rng(seed)
        t = int(rng.integers(1, 60))
        n = int(rng.integers(1, 12))
        m = int(rng.integers(1, n + 1))
        # independent enumeration of valid anchors
        expected = [t_ for t_ in range(t) if t_ >= max(n, m) - 1 and t_ + n <= t - 1]
        assert list(chunk_anchors(t, n, m)) == expected
        if m <= n:
            assert len(expected) == max(0, t - 2 * n + 1)

    def test_history_ends_at_anchor(self):
        actions, _, chunks = self._chunks(40)
        for c in chunks:
            np.testing.assert_array_equal(c.history[-1], actions[c.anchor])
            np.testing.assert_array_equal(c.future[0], actions[c.anchor + 1])

    def test_stride(self):
        _, _, chunks = self._chunks(40, stride=4)
        anchors = [c.anchor for c in chunks]
        assert anchors == list(range(7, 32, 4))


class TestNormalization:
    def _stats(self):
        return NormStats(lo=np.array([-1.0, 0.0, 2.0]), hi=np.array([1.0, 4.0, 3.0]))

    def test_endpoints(self):
        st = self._stats()
        np.testing.assert_allclose(normalize(st.lo, st), [-1, -1, -1])
        np.testing.assert_allclose(normalize(st.hi, st), [1, 1, 1])

    def test_midpoint_is_zero(self):
        st = self._stats()
        mid = (st.lo + st.hi) / 2
        np.testing.assert_allclose(normalize(mid, st), [0, 0, 0], atol=1e-7)

    def test_round_trip(self):
        st = self._stats()
        rng = np.random.default_rng(4)
        x = rng.uniform(-2, 5, size=(100, 3)).astype(np.float32)
        np.testing.assert_allclose(denormalize(normalize(x, st), st), x, atol=1e-5)

    def test_degenerate_stats_rejected(self):
        with pytest.raises(StatsError):
            NormStats(lo=np.array([0.0, 1.0]), hi=np.array([1.0, 1.0]))

    def test_from_actions_bounds(self):
        rng = np.random.default_rng(5)
        arrays = [rng.normal(size=(10, 2)) for _ in range(3)]
        st = NormStats.from_actions(arrays)
        normed = np.concatenate([normalize(a, st) for a in arrays])
        assert normed.min() >= -1.0 - 1e-6 and normed.max() <= 1.0 + 1e-6
