"""Small dense networks with hand-written backprop, plus Adam.

Everything trains through explicit forward caches and reverse passes; there
is no autograd anywhere in the package, which keeps the gradient-check
oracle meaningful.
"""

from __future__ import annotations

import numpy as np


class Mlp:
    """Fully connected net, tanh on every layer except the last (linear head)."""

    def __init__(self, sizes, rng: np.random.Generator, out_scale: float = 1.0):
        if len(sizes) < 2:
            raise ValueError("need at least input and output sizes")
        self.sizes = [int(s) for s in sizes]
        self.weights: list[np.ndarray] = []
        self.biases: list[np.ndarray] = []
        n_layers = len(self.sizes) - 1
        for i in range(n_layers):
            fan_in, fan_out = self.sizes[i], self.sizes[i + 1]
            std = np.sqrt(2.0 / (fan_in + fan_out))
            if i == n_layers - 1:
                std *= out_scale
            self.weights.append(rng.normal(0.0, std, size=(fan_in, fan_out)))
            self.biases.append(np.zeros(fan_out))

    def forward(self, x: np.ndarray):
        """Batch forward. Returns (output (B, out), cache of activations)."""
        h = np.atleast_2d(np.asarray(x, dtype=float))
        cache = [h]
        last = len(self.weights) - 1
        for i, (w, b) in enumerate(zip(self.weights, self.biases)):
            h = h @ w + b
            if i < last:
                h = np.tanh(h)
            cache.append(h)
        return h, cache

    def backward(self, cache, grad_out: np.ndarray):
        """Gradient of a scalar loss wrt all weights, given dL/d(output).

        cache[i] holds the post-activation input to layer i, so the tanh
        derivative is 1 - cache[i]**2.
        """
        grads_w = [np.empty(0)] * len(self.weights)
        grads_b = [np.empty(0)] * len(self.biases)
        g = np.asarray(grad_out, dtype=float)
        for i in range(len(self.weights) - 1, -1, -1):
            grads_w[i] = cache[i].T @ g
            grads_b[i] = g.sum(axis=0)
            if i > 0:
                g = (g @ self.weights[i].T) * (1.0 - cache[i] ** 2)
        return grads_w, grads_b

    def params(self) -> list[np.ndarray]:
        """Flat list [W0, b0, W1, b1, ...]; arrays are live references."""
        out = []
        for w, b in zip(self.weights, self.biases):
            out.append(w)
            out.append(b)
        return out

    def n_params(self) -> int:
        return sum(p.size for p in self.params())


class Adam:
    """Adam over a fixed list of parameter arrays, updated in place."""

    def __init__(self, params: list[np.ndarray], lr: float,
                 beta1: float = 0.9, beta2: float = 0.999, eps: float = 1e-8):
        self.lr = lr
        self.beta1 = beta1
        self.beta2 = beta2
        self.eps = eps
        self.m = [np.zeros_like(p) for p in params]
        self.v = [np.zeros_like(p) for p in params]
        self.t = 0

    def step(self, params: list[np.ndarray], grads: list[np.ndarray]) -> None:
        if len(params) != len(self.m) or len(grads) != len(self.m):
            raise ValueError("parameter/gradient count does not match optimizer state")
        self.t += 1
        b1c = 1.0 - self.beta1 ** self.t
        b2c = 1.0 - self.beta2 ** self.t
        for p, g, m, v in zip(params, grads, self.m, self.v):
            m *= self.beta1
            m += (1.0 - self.beta1) * g
            v *= self.beta2
            v += (1.0 - self.beta2) * g * g
            p -= self.lr * (m / b1c) / (np.sqrt(v / b2c) + self.eps)

    def state_dict(self) -> dict:
        return {"t": self.t, "m": [a.copy() for a in self.m], "v": [a.copy() for a in self.v]}

    def load_state_dict(self, state: dict) -> None:
        self.t = int(state["t"])
        if len(state["m"]) != len(self.m):
            raise ValueError("optimizer state shape mismatch")
        for dst, src in zip(self.m, state["m"]):
            dst[:] = src
        for dst, src in zip(self.v, state["v"]):
            dst[:] = src
