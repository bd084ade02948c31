"""Flat-parameter MLPs with hand-derived backprop, plus Adam.

Networks store all weights and biases in one flat float vector so that
checkpoints, finite-difference checks, and Polyak blends are single array
operations. Hidden activations are tanh; outputs are linear. Training math
runs in float32 by default and float64 in gradient-check mode.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np


class NonFiniteLoss(Exception):
    """A loss or gradient went non-finite; carries a diagnostic dump."""

    def __init__(self, where: str, diagnostics: dict):
        self.where = where
        self.diagnostics = diagnostics
        details = ", ".join(f"{k}={v}" for k, v in diagnostics.items())
        super().__init__(f"non-finite loss in {where}: {details}")


def param_count(sizes: tuple[int, ...]) -> int:
    return sum(sizes[i] * sizes[i + 1] + sizes[i + 1] for i in range(len(sizes) - 1))


def init_params(sizes: tuple[int, ...], rng: np.random.Generator, dtype=np.float32) -> np.ndarray:
    """Glorot-uniform weights, zero biases, flattened layer by layer."""
    chunks = []
    for i in range(len(sizes) - 1):
        fan_in, fan_out = sizes[i], sizes[i + 1]
        bound = np.sqrt(6.0 / (fan_in + fan_out))
        chunks.append(rng.uniform(-bound, bound, size=fan_in * fan_out))
        chunks.append(np.zeros(fan_out))
    return np.concatenate(chunks).astype(dtype)


def _layers(flat: np.ndarray, sizes: tuple[int, ...]):
    """Yield (W, b) views into the flat vector."""
    offset = 0
    for i in range(len(sizes) - 1):
        n_in, n_out = sizes[i], sizes[i + 1]
        w = flat[offset : offset + n_in * n_out].reshape(n_in, n_out)
        offset += n_in * n_out
        b = flat[offset : offset + n_out]
        offset += n_out
        yield w, b


def mlp_forward(flat: np.ndarray, sizes: tuple[int, ...], x: np.ndarray):
    """Returns (y, cache); x is (B, sizes[0])."""
    h = x
    cache = [x]
    n_layers = len(sizes) - 1
    for i, (w, b) in enumerate(_layers(flat, sizes)):
        z = h @ w + b
        h = np.tanh(z) if i < n_layers - 1 else z
        cache.append(h)
    return h, cache


def mlp_backward(
    flat: np.ndarray, sizes: tuple[int, ...], cache: list[np.ndarray], dy: np.ndarray
):
    """Returns (dflat, dx) for upstream gradient dy of shape (B, sizes[-1])."""
    n_layers = len(sizes) - 1
    grads: list[np.ndarray | None] = [None] * (2 * n_layers)
    weights = [w for w, _ in _layers(flat, sizes)]
    delta = dy
    for i in range(n_layers - 1, -1, -1):
        h_in = cache[i]
        if i < n_layers - 1:
            h_out = cache[i + 1]          # tanh(z); d tanh = 1 - tanh^2
            delta = delta * (1.0 - h_out * h_out)
        grads[2 * i] = (h_in.T @ delta).ravel()
        grads[2 * i + 1] = delta.sum(axis=0)
        delta = delta @ weights[i].T
    dflat = np.concatenate([g for g in grads])
    return dflat.astype(flat.dtype), delta


@dataclass
class MlpNet:
    """A network: layer sizes plus its flat parameter vector."""

    sizes: tuple[int, ...]
    params: np.ndarray

    @classmethod
    def create(cls, sizes, rng: np.random.Generator, dtype=np.float32) -> "MlpNet":
        sizes = tuple(int(s) for s in sizes)
        net = cls(sizes=sizes, params=init_params(sizes, rng, dtype))
        assert net.params.size == param_count(sizes)
        return net

    def forward(self, x: np.ndarray):
        return mlp_forward(self.params, self.sizes, x)

    def copy(self) -> "MlpNet":
        return MlpNet(self.sizes, self.params.copy())


def polyak_update(target: np.ndarray, online: np.ndarray, tau: float) -> None:
    """theta' <- (1 - tau) theta' + tau theta, elementwise, in place."""
    target *= 1.0 - tau
    target += tau * online


class Adam:
    def __init__(self, size: int, lr: float, betas=(0.9, 0.999), eps: float = 1e-8,
                 dtype=np.float32):
        self.lr = lr
        self.b1, self.b2 = betas
        self.eps = eps
        self.m = np.zeros(size, dtype=dtype)
        self.v = np.zeros(size, dtype=dtype)
        self.t = 0

    def step(self, params: np.ndarray, grad: np.ndarray) -> None:
        self.t += 1
        self.m = self.b1 * self.m + (1.0 - self.b1) * grad
        self.v = self.b2 * self.v + (1.0 - self.b2) * grad * grad
        m_hat = self.m / (1.0 - self.b1 ** self.t)
        v_hat = self.v / (1.0 - self.b2 ** self.t)
        params -= self.lr * m_hat / (np.sqrt(v_hat) + self.eps)


def check_finite(where: str, **arrays) -> None:
    bad = {k: float(np.sum(~np.isfinite(v))) for k, v in arrays.items()
           if not np.all(np.isfinite(v))}
    if bad:
        summary = {k: f"{v} non-finite entries" for k, v in bad.items()}
        summary.update({f"{k}_norm": float(np.linalg.norm(np.nan_to_num(arrays[k]))) for k in bad})
        raise NonFiniteLoss(where, summary)
