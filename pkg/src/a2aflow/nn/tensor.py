"""Reverse-mode automatic differentiation on numpy arrays.

A Tensor wraps a numpy array plus an optional gradient and a backward
closure. Calling ``backward()`` on a scalar output walks the tape in reverse
topological order and accumulates exact gradients into every reachable
tensor that requires them.

The module-wide default dtype is float32; the ``precision`` context switches
freshly created tensors to float64 for gradient verification.
"""

from contextlib import contextmanager

import numpy as np

from ..errors import ConfigError

_DEFAULT_DTYPE = np.float32


def default_dtype():
    return _DEFAULT_DTYPE


@contextmanager
def precision(dtype):
    """Temporarily change the dtype used for new tensors ('float32'/'float64')."""
    global _DEFAULT_DTYPE
    prev = _DEFAULT_DTYPE
    _DEFAULT_DTYPE = np.dtype(dtype).type
    try:
        yield
    finally:
        _DEFAULT_DTYPE = prev


def _unbroadcast(grad: np.ndarray, shape: tuple) -> np.ndarray:
    """Reduce ``grad`` back to ``shape`` by summing broadcast dimensions."""
    if grad.shape == shape:
        return grad
    extra = grad.ndim - len(shape)
    if extra > 0:
        grad = grad.sum(axis=tuple(range(extra)))
    axes = tuple(i for i, s in enumerate(shape) if s == 1 and grad.shape[i] != 1)
    if axes:
        grad = grad.sum(axis=axes, keepdims=True)
    return grad


class Tensor:
    __slots__ = ("data", "grad", "requires_grad", "_parents", "_backward")

    def __init__(self, data, requires_grad=False, _parents=(), _backward=None):
        if isinstance(data, Tensor):
            data = data.data
        arr = np.asarray(data)
        if arr.dtype not in (np.float32, np.float64):
            arr = arr.astype(_DEFAULT_DTYPE)
        self.data = arr
        self.grad = None
        self.requires_grad = requires_grad or any(p.requires_grad for p in _parents)
        self._parents = _parents if self.requires_grad else ()
        self._backward = _backward if self.requires_grad else None

    # -- bookkeeping -------------------------------------------------------

    @property
    def shape(self):
        return self.data.shape

    @property
    def ndim(self):
        return self.data.ndim

    def __repr__(self):
        return f"Tensor(shape={self.data.shape}, grad={self.requires_grad})"

    def detach(self):
        return Tensor(self.data)

    def zero_grad(self):
        self.grad = None

    def _accumulate(self, g):
        if self.grad is None:
            self.grad = g.copy() if isinstance(g, np.ndarray) else np.asarray(g)
        else:
            self.grad += g

    def backward(self):
        if self.data.size != 1:
            raise ConfigError(f"backward() requires a scalar, got shape {self.data.shape}")
        # Iterative topological sort; graphs from unrolled integrators can be
        # deep enough to make recursion risky.
        order, seen, stack = [], set(), [(self, False)]
        while stack:
            node, expanded = stack.pop()
            if expanded:
                order.append(node)
                continue
            if id(node) in seen or not node.requires_grad:
                continue
            seen.add(id(node))
            stack.append((node, True))
            for p in node._parents:
                stack.append((p, False))
        self.grad = np.ones_like(self.data)
        for node in reversed(order):
            if node._backward is not None:
                node._backward(node.grad)

    # -- arithmetic --------------------------------------------------------

    @staticmethod
    def _lift(x):
        if isinstance(x, Tensor):
            return x
        arr = np.asarray(x)
        # Scalars follow the active default dtype so they never upcast float32
        # graphs; float arrays keep their own precision.
        if arr.dtype not in (np.float32, np.float64) or arr.ndim == 0:
            arr = arr.astype(_DEFAULT_DTYPE)
        return Tensor(arr)

    def __add__(self, other):
        if isinstance(other, (int, float)):
            # plain Python scalars never upcast the array dtype
            other = float(other)
            out = Tensor(self.data + other, _parents=(self,))
            out._backward = lambda g: self._accumulate(g)
            return out
        other = Tensor._lift(other)
        out = Tensor(self.data + other.data, _parents=(self, other))

        def bw(g):
            if self.requires_grad:
                self._accumulate(_unbroadcast(g, self.data.shape))
            if other.requires_grad:
                other._accumulate(_unbroadcast(g, other.data.shape))

        out._backward = bw
        return out

    __radd__ = __add__

    def __mul__(self, other):
        if isinstance(other, (int, float)):
            other = float(other)
            out = Tensor(self.data * other, _parents=(self,))
            out._backward = lambda g: self._accumulate(g * other)
            return out
        other = Tensor._lift(other)
        out = Tensor(self.data * other.data, _parents=(self, other))

        def bw(g):
            if self.requires_grad:
                self._accumulate(_unbroadcast(g * other.data, self.data.shape))
            if other.requires_grad:
                other._accumulate(_unbroadcast(g * self.data, other.data.shape))

        out._backward = bw
        return out

    __rmul__ = __mul__

    def __neg__(self):
        return self * (-1.0)

    def __sub__(self, other):
        return self + (-Tensor._lift(other))

    def __rsub__(self, other):
        return Tensor._lift(other) + (-self)

    def __matmul__(self, other):
        """Matrix product; batched when both operands share leading dims."""
        other = Tensor._lift(other)
        out = Tensor(self.data @ other.data, _parents=(self, other))
        a, b = self.data, other.data

        def bw(g):
            if self.requires_grad:
                self._accumulate(_unbroadcast(g @ b.swapaxes(-1, -2), a.shape))
            if other.requires_grad:
                other._accumulate(_unbroadcast(a.swapaxes(-1, -2) @ g, b.shape))

        out._backward = bw
        return out

    # -- shape manipulation --------------------------------------------------

    def reshape(self, *shape):
        if len(shape) == 1 and isinstance(shape[0], (tuple, list)):
            shape = tuple(shape[0])
        src = self.data.shape
        out = Tensor(self.data.reshape(shape), _parents=(self,))

        def bw(g):
            self._accumulate(g.reshape(src))

        out._backward = bw
        return out

    def transpose(self, *axes):
        axes = tuple(axes)
        inv = tuple(np.argsort(axes))
        out = Tensor(self.data.transpose(axes), _parents=(self,))

        def bw(g):
            self._accumulate(g.transpose(inv))

        out._backward = bw
        return out

    def __getitem__(self, idx):
        out = Tensor(self.data[idx], _parents=(self,))

        def bw(g):
            full = np.zeros_like(self.data)
            full[idx] = g
            self._accumulate(full)

        out._backward = bw
        return out

    def repeat_axis(self, reps: int, axis: int):
        """Nearest-neighbour upsampling along one axis."""
        out = Tensor(np.repeat(self.data, reps, axis=axis), _parents=(self,))
        src = self.data.shape

        def bw(g):
            shp = list(src)
            shp.insert(axis + 1, reps)
            self._accumulate(g.reshape(shp).sum(axis=axis + 1))

        out._backward = bw
        return out

    # -- reductions & elementwise -------------------------------------------

    def sum(self, axis=None, keepdims=False):
        out = Tensor(self.data.sum(axis=axis, keepdims=keepdims), _parents=(self,))
        src = self.data.shape

        def bw(g):
            if axis is None:
                self._accumulate(np.broadcast_to(g, src).astype(g.dtype))
                return
            if not keepdims:
                g = np.expand_dims(g, axis)
            self._accumulate(np.broadcast_to(g, src).astype(g.dtype))

        out._backward = bw
        return out

    def mean(self, axis=None, keepdims=False):
        n = self.data.size if axis is None else self.data.shape[axis]
        return self.sum(axis=axis, keepdims=keepdims) * (1.0 / n)

    def abs(self):
        out = Tensor(np.abs(self.data), _parents=(self,))
        sign = np.sign(self.data)

        def bw(g):
            self._accumulate(g * sign)

        out._backward = bw
        return out

    def square(self):
        return self * self

    def exp(self):
        val = np.exp(self.data)
        out = Tensor(val, _parents=(self,))

        def bw(g):
            self._accumulate(g * val)

        out._backward = bw
        return out

    def sigmoid(self):
        val = 1.0 / (1.0 + np.exp(-self.data))
        out = Tensor(val, _parents=(self,))

        def bw(g):
            self._accumulate(g * val * (1.0 - val))

        out._backward = bw
        return out

    def softmax(self):
        """Softmax over the last axis."""
        shifted = self.data - self.data.max(axis=-1, keepdims=True)
        e = np.exp(shifted)
        val = e / e.sum(axis=-1, keepdims=True)
        out = Tensor(val, _parents=(self,))

        def bw(g):
            inner = (g * val).sum(axis=-1, keepdims=True)
            self._accumulate(val * (g - inner))

        out._backward = bw
        return out

    def item(self) -> float:
        return float(self.data.reshape(()))


def concat(tensors, axis=0):
    tensors = [Tensor._lift(t) for t in tensors]
    out = Tensor(np.concatenate([t.data for t in tensors], axis=axis), _parents=tuple(tensors))
    sizes = [t.data.shape[axis] for t in tensors]
    offsets = np.cumsum([0] + sizes)

    def bw(g):
        for t, lo, hi in zip(tensors, offsets[:-1], offsets[1:]):
            if t.requires_grad:
                idx = [slice(None)] * g.ndim
                idx[axis] = slice(lo, hi)
                t._accumulate(g[tuple(idx)])

    out._backward = bw
    return out


def stack_rows(tensors):
    """Stack 1-D tensors of equal length into a 2-D tensor (rows)."""
    return concat([t.reshape(1, -1) for t in tensors], axis=0)
