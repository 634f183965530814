"""Finite-difference verification of analytic gradients.

Runs a forward/backward pass, then perturbs every parameter element by a
central difference and compares. Meant to run under ``precision('float64')``;
failures are reported, not raised.
"""

from dataclasses import dataclass, field

import numpy as np


@dataclass
class GradReport:
    tol: float
    per_param: dict = field(default_factory=dict)  # name -> max relative error

    @property
    def max_error(self) -> float:
        return max(self.per_param.values()) if self.per_param else 0.0

    @property
    def passed(self) -> bool:
        return self.max_error < self.tol

    def __str__(self):
        lines = [f"grad check (tol {self.tol:g}): {'PASS' if self.passed else 'FAIL'}"]
        for name, err in sorted(self.per_param.items(), key=lambda kv: -kv[1]):
            lines.append(f"  {err:.3e}  {name}")
        return "\n".join(lines)


def _rel_err(a: float, f: float) -> float:
    return abs(a - f) / max(abs(a), abs(f), 1e-6)


def grad_check(loss_fn, named_params, tol=1e-4, step=1e-5, max_elems=None, rng=None):
    """Compare analytic gradients of ``loss_fn()`` against central differences.

    loss_fn: nullary callable returning a scalar Tensor (rebuilds the graph).
    named_params: iterable of (name, Tensor) to verify.
    max_elems: optionally subsample at most this many elements per parameter.
    """
    params = list(named_params)
    for _, p in params:
        p.zero_grad()
    loss = loss_fn()
    loss.backward()
    analytic = [p.grad.copy() if p.grad is not None else np.zeros_like(p.data)
                for _, p in params]

    report = GradReport(tol=tol)
    for (name, p), grad in zip(params, analytic):
        flat = p.data.reshape(-1)
        n = flat.size
        if max_elems is not None and n > max_elems:
            idx = (rng or np.random.default_rng(0)).choice(n, size=max_elems, replace=False)
        else:
            idx = range(n)
        worst = 0.0
        ga = grad.reshape(-1)
        for i in idx:
            orig = flat[i]
            flat[i] = orig + step
            hi = loss_fn().item()
            flat[i] = orig - step
            lo = loss_fn().item()
            flat[i] = orig
            fd = (hi - lo) / (2.0 * step)
            worst = max(worst, _rel_err(float(ga[i]), fd))
        key = name if name not in report.per_param else f"{name}#{len(report.per_param)}"
        report.per_param[key] = worst
    return report
