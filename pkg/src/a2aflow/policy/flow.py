"""Flow-matching math: straight-path interpolation, Euler sampling, losses.

The transport path between paired source and target points is the straight
line z_tau = (1 - tau) z0 + tau z1, whose velocity z1 - z0 is constant in
tau. Sampling integrates the learned velocity field with K equal Euler steps
on the grid tau_k = k/K. All losses are scalar Tensors with exact gradients.
"""

import numpy as np

from ..errors import ConfigError, InputError
from ..nn import Tensor


def ot_interpolate(z0, z1, tau):
    """Point on the straight path at time tau (scalar or per-row column)."""
    t = np.asarray(tau, dtype=float)
    if np.any((t < 0.0) | (t > 1.0)):
        raise InputError(f"interpolation time must be in [0, 1], got {tau}")
    if isinstance(z0, Tensor) or isinstance(z1, Tensor):
        z0, z1 = Tensor._lift(z0), Tensor._lift(z1)
        t = t.astype(z0.data.dtype)
        return z0 * (1.0 - t) + z1 * t
    return (1.0 - t) * z0 + t * z1


def target_velocity(z0, z1):
    """Velocity of the straight path; constant along it."""
    if isinstance(z0, Tensor) or isinstance(z1, Tensor):
        return Tensor._lift(z1) - Tensor._lift(z0)
    return z1 - z0


def euler_integrate(z0, velocity_fn, k_steps: int):
    """Integrate dz/dtau = velocity_fn(z, tau) from tau=0 to 1 in K steps.

    Differentiable through every unrolled step. velocity_fn receives the
    current state and the scalar grid time k/K.
    """
    if k_steps < 1:
        raise InputError(f"k_steps must be >= 1, got {k_steps}")
    z = z0
    dt = 1.0 / k_steps
    for k in range(k_steps):
        z = z + velocity_fn(z, k / k_steps) * dt
    return z


def loss_fm(pred_velocity: Tensor, z0, z1) -> Tensor:
    """Mean squared error to the straight-path velocity, averaged over elements."""
    diff = pred_velocity - target_velocity(Tensor._lift(z0), Tensor._lift(z1))
    return diff.square().mean()


def loss_ae(reconstructed: Tensor, chunk) -> Tensor:
    """Mean absolute reconstruction error over elements."""
    return (reconstructed - Tensor._lift(chunk)).abs().mean()


def loss_ic(z_hat: Tensor, z_target, decoded: Tensor, chunk, lambda0: float) -> Tensor:
    """Consistency of the integrated latent and its decoding with ground truth."""
    latent_term = (z_hat - Tensor._lift(z_target)).abs().mean()
    action_term = (decoded - Tensor._lift(chunk)).abs().mean()
    return latent_term + lambda0 * action_term


def loss_total(fm, ae, ic, lambda1=1.0, lambda2=0.5, lambda3=1.0):
    for name, lam in (("lambda1", lambda1), ("lambda2", lambda2), ("lambda3", lambda3)):
        if lam < 0:
            raise ConfigError(f"{name} must be non-negative, got {lam}")
    return fm * lambda1 + ae * lambda2 + ic * lambda3


def inject_history_noise(history: np.ndarray, sigma_h: float, rng) -> np.ndarray:
    """Add iid Gaussian perturbations (std sigma_h) in normalized action space."""
    if sigma_h == 0.0:
        return history
    return history + rng.normal(scale=sigma_h, size=history.shape).astype(history.dtype)
