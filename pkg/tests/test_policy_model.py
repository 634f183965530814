"""Policy building blocks: encoders, flow sources, one-step generation identity."""

import numpy as np
import pytest

from a2aflow.data import NormStats, denormalize, normalize
from a2aflow.errors import ConfigError, InputError
from a2aflow.nn import Tensor, precision, grad_check
from a2aflow.policy import ALGOS, Policy, PolicyConfig
from a2aflow.seeding import substream


def small_cfg(**kw):
    base = dict(
        n=8, m=4, action_dim=3, d_lat=16, d_cond=12, time_dim=8, enc_hidden=8,
        flow_width=24, flow_depth=2, decoder_width=24, decoder_depth=1,
        vis_channels=(4, 8, 8), image_height=16, image_width=16,
    )
    base.update(kw)
    return PolicyConfig(**base)


def make_stats(d=3):
    return NormStats(lo=-np.ones(d), hi=np.ones(d))


@pytest.fixture
def policy():
    return Policy.init(small_cfg(), seed=0, stats=make_stats())


class TestActionEncoder:
    def test_deterministic(self, policy):
        chunk = substream(1, "c").normal(size=(2, 8, 3)).astype(np.float32)
        a = policy.encode_actions(chunk).data
        b = policy.encode_actions(chunk).data
        np.testing.assert_array_equal(a, b)

    def test_output_dim(self, policy):
        z = policy.encode_actions(np.zeros((5, 8, 3), dtype=np.float32))
        assert z.shape == (5, 16)

    def test_wrong_chunk_shape(self, policy):
        with pytest.raises(ConfigError):
            policy.encode_actions(np.zeros((2, 5, 3), dtype=np.float32))

    def test_input_gradient_matches_fd(self):
        with precision("float64"):
            pol = Policy.init(small_cfg(), seed=3)
            x = Tensor(substream(2, "x").normal(size=(1, 8, 3)), requires_grad=True)
            report = grad_check(
                lambda: pol.encoder(x).square().mean(), [("x", x)], tol=1e-5
            )
        assert report.passed, str(report)


class TestActionDecoder:
    def test_output_shape(self, policy):
        out = policy.decode_latent(np.zeros((4, 16), dtype=np.float32))
        assert out.shape == (4, 8, 3)

    def test_untrained_output_bounded(self, policy):
        z = substream(3, "z").normal(size=(8, 16)).astype(np.float32)
        out = policy.decode_latent(z).data
        assert np.all(np.isfinite(out))
        assert np.abs(out).max() < 50.0


class TestVisionEncoder:
    def test_deterministic_and_dim(self, policy):
        frames = substream(4, "f").integers(0, 256, size=(2, 4, 16, 16)).astype(np.uint8)
        a = policy.encode_obs(frames)
        assert a.shape == (2, 12)
        np.testing.assert_array_equal(a.data, policy.encode_obs(frames).data)

    def test_distinct_stacks_give_distinct_conditions(self, policy):
        rng = substream(5, "f")
        hits = 0
        for _ in range(8):
            f1 = rng.integers(0, 256, size=(1, 4, 16, 16)).astype(np.uint8)
            f2 = rng.integers(0, 256, size=(1, 4, 16, 16)).astype(np.uint8)
            c1 = policy.encode_obs(f1).data
            c2 = policy.encode_obs(f2).data
            hits += not np.allclose(c1, c2)
        assert hits == 8

    def test_wrong_frame_count(self, policy):
        with pytest.raises(ConfigError):
            policy.encode_obs(np.zeros((3, 16, 16), dtype=np.uint8))


class TestSources:
    def test_a2a_source_is_encoded_history(self, policy):
        hist = substream(6, "h").normal(size=(2, 8, 3)).astype(np.float32)
        src = policy.source(hist)
        np.testing.assert_array_equal(src.data, policy.encode_actions(hist).data)

    def test_fm_noise_source_statistics(self):
        pol = Policy.init(small_cfg(algo="fm-noise", d_lat=4), seed=1)
        rng = substream(7, "noise")
        draws = pol.source(np.zeros((25000, 8, 3), dtype=np.float32), rng).data
        assert abs(draws.mean()) < 0.05
        assert abs(draws.var() - 1.0) < 0.05

    def test_fm_noise_requires_rng(self):
        pol = Policy.init(small_cfg(algo="fm-noise"), seed=1)
        with pytest.raises(InputError):
            pol.source(np.zeros((1, 8, 3), dtype=np.float32))

    def test_flow_action_source_dimension(self):
        for algo in ("flow-action-mlp", "flow-action-unet"):
            pol = Policy.init(small_cfg(algo=algo), seed=1)
            src = pol.source(np.zeros((2, 8, 3), dtype=np.float32))
            assert src.shape == (2, 24)

    def test_unknown_algo_rejected(self):
        with pytest.raises(ConfigError):
            small_cfg(algo="ddpm")


class TestRegLatent:
    def test_zero_net_returns_source(self):
        pol = Policy.init(small_cfg(algo="reg-latent"), seed=2)
        # zero the whole velocity head chain output by zeroing the head
        pol.flow.head.w.data[:] = 0.0
        pol.flow.head.b.data[:] = 0.0
        z0 = Tensor(substream(8, "z").normal(size=(3, 16)).astype(np.float32))
        cond = Tensor(substream(8, "c").normal(size=(3, 12)).astype(np.float32))
        out = pol.predict_target(z0, cond, k_steps=5)
        np.testing.assert_array_equal(out.data, z0.data)

    def test_repeat_calls_identical(self):
        pol = Policy.init(small_cfg(algo="reg-latent"), seed=2, stats=make_stats())
        hist = substream(9, "h").normal(size=(8, 3)).astype(np.float32) * 0.4
        frames = substream(9, "f").integers(0, 256, size=(4, 16, 16)).astype(np.uint8)
        a = pol.generate_chunk(hist, frames, k_steps=1)
        b = pol.generate_chunk(hist, frames, k_steps=1)
        np.testing.assert_array_equal(a, b)


class TestGenerateChunk:
    def test_one_step_equals_hand_composition(self, policy):
        rng = substream(10, "gen")
        hist_raw = rng.uniform(-0.8, 0.8, size=(8, 3)).astype(np.float32)
        frames = rng.integers(0, 256, size=(4, 16, 16)).astype(np.uint8)
        got = policy.generate_chunk(hist_raw, frames, k_steps=1)

        hist = normalize(hist_raw, policy.stats)[None]
        cond = policy.encode_obs(frames)
        z0 = policy.encode_actions(hist)
        z1 = z0 + policy.flow(z0, 0.0, cond)
        expect = denormalize(policy.decode_latent(z1).data[0], policy.stats)
        np.testing.assert_array_equal(got, expect)

    def test_repeat_determinism(self, policy):
        rng = substream(11, "gen")
        hist = rng.uniform(-0.5, 0.5, size=(8, 3)).astype(np.float32)
        frames = rng.integers(0, 256, size=(4, 16, 16)).astype(np.uint8)
        a = policy.generate_chunk(hist, frames, k_steps=4)
        b = policy.generate_chunk(hist, frames, k_steps=4)
        np.testing.assert_array_equal(a, b)

    def test_requires_stats(self):
        pol = Policy.init(small_cfg(), seed=0)
        with pytest.raises(InputError):
            pol.generate_chunk(np.zeros((8, 3)), np.zeros((4, 16, 16), dtype=np.uint8), 1)

    def test_bad_history_shape(self, policy):
        with pytest.raises(InputError):
            policy.generate_chunk(np.zeros((5, 3)), np.zeros((4, 16, 16), dtype=np.uint8), 1)


class TestLossBatch:
    @pytest.mark.parametrize("algo", ALGOS)
    def test_all_algos_finite_losses(self, algo):
        pol = Policy.init(small_cfg(algo=algo), seed=4, stats=make_stats())
        rng = substream(12, algo)
        hist = rng.uniform(-1, 1, size=(6, 8, 3)).astype(np.float32)
        fut = rng.uniform(-1, 1, size=(6, 8, 3)).astype(np.float32)
        obs = rng.integers(0, 256, size=(6, 4, 16, 16)).astype(np.uint8)
        total, parts = pol.loss_batch(hist, obs, fut, rng)
        assert np.isfinite(total.item())
        for v in parts.values():
            assert np.isfinite(v)
        total.backward()
        grads = [p.grad for _, p in pol.named_parameters() if p.grad is not None]
        assert grads, "no gradients reached any parameter"

    def test_full_model_gradcheck(self):
        # endpoint detaching is disabled here: finite differences measure the
        # total derivative, so the check needs the fully differentiable variant
        with precision("float64"):
            pol = Policy.init(small_cfg(n=4, m=2, d_lat=6, d_cond=4, time_dim=4,
                                        enc_hidden=4, flow_width=8, flow_depth=1,
                                        decoder_width=8, vis_channels=(2, 2, 2),
                                        image_height=8, image_width=8,
                                        detach_flow_endpoints=False),
                              seed=5, stats=make_stats())
            rng = substream(13, "gc")
            hist = rng.uniform(-1, 1, size=(2, 4, 3))
            fut = rng.uniform(-1, 1, size=(2, 4, 3))
            obs = rng.integers(0, 256, size=(2, 2, 8, 8)).astype(np.uint8)
            frozen = substream(14, "fixed")

            def loss():
                return pol.loss_batch(hist, obs, fut, substream(99, "tau"))[0]

            _ = frozen
            report = grad_check(loss, pol.named_parameters(), tol=1e-4, max_elems=6,
                                rng=substream(15, "pick"))
        assert report.passed, str(report)
