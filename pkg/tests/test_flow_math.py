"""Transport-path math against scalar-loop and closed-form oracles."""

import numpy as np
import pytest

from a2aflow.errors import ConfigError, InputError
from a2aflow.nn import Tensor, precision
from a2aflow.policy import (
    euler_integrate,
    inject_history_noise,
    loss_ae,
    loss_fm,
    loss_ic,
    loss_total,
    ot_interpolate,
    target_velocity,
)
from a2aflow.seeding import substream


class TestInterpolation:
    def test_endpoints(self):
        rng = np.random.default_rng(0)
        z0, z1 = rng.normal(size=8), rng.normal(size=8)
        np.testing.assert_array_equal(ot_interpolate(z0, z1, 0.0), z0)
        np.testing.assert_array_equal(ot_interpolate(z0, z1, 1.0), z1)

    def test_midpoint(self):
        z0, z1 = np.zeros(4), np.ones(4)
        np.testing.assert_allclose(ot_interpolate(z0, z1, 0.5), 0.5 * np.ones(4))

    def test_matches_scalar_loop_oracle(self):
        rng = np.random.default_rng(1)
        z0, z1 = rng.normal(size=6), rng.normal(size=6)
        tau = rng.uniform()
        got = ot_interpolate(z0, z1, tau)
        expect = np.array([(1 - tau) * a + tau * b for a, b in zip(z0, z1)])
        np.testing.assert_allclose(got, expect, rtol=1e-12)

    def test_out_of_range_tau(self):
        with pytest.raises(InputError):
            ot_interpolate(np.zeros(2), np.ones(2), 1.5)

    @pytest.mark.parametrize("tau", [0.1, 0.37, 0.5, 0.9])
    def test_fd_derivative_equals_target_velocity(self, tau):
        rng = np.random.default_rng(int(tau * 100))
        z0, z1 = rng.normal(size=16), rng.normal(size=16)
        h = 1e-7
        fd = (ot_interpolate(z0, z1, tau + h) - ot_interpolate(z0, z1, tau - h)) / (2 * h)
        np.testing.assert_allclose(fd, target_velocity(z0, z1), atol=1e-6)


class TestTargetVelocity:
    def test_equal_endpoints_zero(self):
        z = np.random.default_rng(0).normal(size=5)
        np.testing.assert_array_equal(target_velocity(z, z), np.zeros(5))

    def test_zero_source(self):
        z1 = np.random.default_rng(1).normal(size=5)
        np.testing.assert_array_equal(target_velocity(np.zeros(5), z1), z1)


class TestEuler:
    def test_zero_field_returns_source(self):
        z0 = Tensor(np.random.default_rng(0).normal(size=(2, 4)).astype(np.float32))
        for k in (1, 3, 10):
            out = euler_integrate(z0, lambda z, t: z * 0.0, k)
            np.testing.assert_array_equal(out.data, z0.data)

    def test_constant_field_telescopes_exactly(self):
        rng = np.random.default_rng(2)
        z0 = Tensor(rng.normal(size=(2, 4)))
        v = Tensor(rng.normal(size=(2, 4)))
        results = []
        for k in (1, 2, 5, 8):
            out = euler_integrate(z0, lambda z, t: v, k)
            results.append(out.data)
            np.testing.assert_allclose(out.data, z0.data + v.data, rtol=1e-12)

    @pytest.mark.parametrize("k", [1, 2, 4, 8, 64])
    def test_linear_contraction_closed_form(self, k):
        # dz/dt = -z integrates to (1 - 1/K)^K z0 under the K-step scheme
        z0 = np.full((1, 3), 2.0)
        out = euler_integrate(Tensor(z0), lambda z, t: -z, k)
        np.testing.assert_allclose(out.data, (1 - 1 / k) ** k * z0, rtol=1e-10)

    def test_error_vs_exact_flow_shrinks_monotonically(self):
        errors = [abs((1 - 1 / k) ** k - np.exp(-1.0)) for k in (1, 2, 4, 8, 64)]
        assert all(a > b for a, b in zip(errors, errors[1:]))

    def test_zero_steps_rejected(self):
        with pytest.raises(InputError):
            euler_integrate(Tensor(np.zeros((1, 2))), lambda z, t: z, 0)

    def test_gradient_flows_through_unrolled_steps(self):
        with precision("float64"):
            z0 = Tensor(np.array([[1.0, 2.0]]), requires_grad=True)
            scale = Tensor(np.array(-1.0), requires_grad=True)
            out = euler_integrate(z0, lambda z, t: z * scale, 4)
            out.sum().backward()
            # d/dz0 of (1 - 1/4)^4 z0 summed
            np.testing.assert_allclose(z0.grad, np.full((1, 2), 0.75**4), rtol=1e-12)


class TestLosses:
    def test_fm_zero_at_fixed_point(self):
        rng = np.random.default_rng(3)
        z0, z1 = rng.normal(size=(4, 8)), rng.normal(size=(4, 8))
        pred = Tensor(z1 - z0)
        assert loss_fm(pred, z0, z1).item() == 0.0

    def test_fm_unit_rows_reduction(self):
        # zero prediction against unit-norm rows: mean over elements = 1/d
        d = 16
        rng = np.random.default_rng(4)
        diff = rng.normal(size=(5, d))
        diff /= np.linalg.norm(diff, axis=1, keepdims=True)
        z0 = np.zeros((5, d))
        val = loss_fm(Tensor(z0), z0, diff).item()
        assert val == pytest.approx(1.0 / d, rel=1e-5)

    def test_fm_matches_loop_oracle(self):
        rng = np.random.default_rng(5)
        pred, z0, z1 = rng.normal(size=(3, 6)), rng.normal(size=(3, 6)), rng.normal(size=(3, 6))
        got = loss_fm(Tensor(pred), z0, z1).item()
        acc = 0.0
        for i in range(3):
            for j in range(6):
                acc += (pred[i, j] - (z1[i, j] - z0[i, j])) ** 2
        assert got == pytest.approx(acc / 18, rel=1e-6)

    def test_ae_zero_and_offset(self):
        x = np.random.default_rng(6).normal(size=(2, 8, 3))
        assert loss_ae(Tensor(x), x).item() == 0.0
        assert loss_ae(Tensor(x + 0.25), x).item() == pytest.approx(0.25, rel=1e-6)

    def test_ae_matches_loop_oracle(self):
        rng = np.random.default_rng(7)
        rec, chunk = rng.normal(size=(2, 4, 3)), rng.normal(size=(2, 4, 3))
        got = loss_ae(Tensor(rec), chunk).item()
        expect = np.mean([abs(a - b) for a, b in zip(rec.ravel(), chunk.ravel())])
        assert got == pytest.approx(expect, rel=1e-6)

    def test_ic_zero_at_fixed_point(self):
        rng = np.random.default_rng(8)
        z = rng.normal(size=(2, 8))
        chunk = rng.normal(size=(2, 4, 2))
        assert loss_ic(Tensor(z), z, Tensor(chunk), chunk, 0.5).item() == 0.0

    def test_ic_weighted_arithmetic(self):
        # latent term 2, action term 4, lambda0 = 0.5 -> 2 + 0.5*4 = 4
        z_hat = Tensor(np.full((1, 4), 2.0))
        z_tgt = np.zeros((1, 4))
        dec = Tensor(np.full((1, 2, 2), 4.0))
        chunk = np.zeros((1, 2, 2))
        assert loss_ic(z_hat, z_tgt, dec, chunk, 0.5).item() == pytest.approx(4.0)

    def test_ic_matches_loop_oracle(self):
        rng = np.random.default_rng(9)
        z_hat, z_tgt = rng.normal(size=(3, 5)), rng.normal(size=(3, 5))
        dec, chunk = rng.normal(size=(3, 2, 2)), rng.normal(size=(3, 2, 2))
        got = loss_ic(Tensor(z_hat), z_tgt, Tensor(dec), chunk, 0.5).item()
        expect = np.abs(z_hat - z_tgt).mean() + 0.5 * np.abs(dec - chunk).mean()
        assert got == pytest.approx(expect, rel=1e-6)

    def test_total_zero_components(self):
        assert loss_total(Tensor(np.zeros(())), Tensor(np.zeros(())), Tensor(np.zeros(()))).item() == 0.0

    def test_total_arithmetic(self):
        got = loss_total(Tensor(np.array(1.0)), Tensor(np.array(2.0)), Tensor(np.array(3.0)),
                         1.0, 0.5, 1.0)
        assert got.item() == pytest.approx(5.0)

    def test_total_negative_weight_rejected(self):
        z = Tensor(np.zeros(()))
        with pytest.raises(ConfigError):
            loss_total(z, z, z, lambda1=-0.1)

    def test_total_gradient_is_weighted_sum(self):
        with precision("float64"):
            x = Tensor(np.array([0.7]), requires_grad=True)
            lam = (1.0, 0.5, 1.0)

            def comps():
                return (x * x).sum(), (x * 3.0).sum(), (x * x * x).sum()

            total = loss_total(*comps(), *lam)
            total.backward()
            h = 1e-6
            grads = []
            for i in range(3):
                x.data[0] = 0.7 + h
                hi = comps()[i].item()
                x.data[0] = 0.7 - h
                lo = comps()[i].item()
                x.data[0] = 0.7
                grads.append((hi - lo) / (2 * h))
            expect = sum(l * g for l, g in zip(lam, grads))
            np.testing.assert_allclose(x.grad, [expect], rtol=1e-6)


class TestHistoryNoise:
    def test_sigma_zero_identity(self):
        rng = substream(0, "noise")
        x = np.random.default_rng(1).normal(size=(4, 8, 3)).astype(np.float32)
        out = inject_history_noise(x, 0.0, rng)
        assert out is x

    def test_sample_variance_within_5_percent(self):
        rng = substream(1, "noise")
        x = np.zeros((100_000, 1), dtype=np.float32)
        noise = inject_history_noise(x, 0.1, rng)
        assert abs(noise.var() - 0.01) / 0.01 < 0.05

    def test_mean_within_3_standard_errors(self):
        rng = substream(2, "noise")
        n = 100_000
        noise = inject_history_noise(np.zeros((n, 1), dtype=np.float32), 0.1, rng)
        se = 0.1 / np.sqrt(n)
        assert abs(noise.mean()) < 3 * se
