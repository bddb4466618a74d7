"""Dense network with manual backprop and oscillator-neuron activations."""

from __future__ import annotations

from dataclasses import dataclass, field
from enum import Enum

import numpy as np

from ..neuron import ActivationModel, custom_activation, custom_activation_grad
from ..variation import truncated_normal


class ActivationMode(Enum):
    Software = "software"
    HardwareInference = "hardware_inference"
    HardwareTrainInference = "hardware_train_inference"

    @classmethod
    def parse(cls, v):
        if isinstance(v, cls):
            return v
        for m in cls:
            if v in (m.value, m.name):
                return m
        raise ValueError(f"unknown activation mode {v!r}")


@dataclass(frozen=True)
class NetworkSpec:
    hidden: tuple = (800, 300)
    n_classes: int = 10
    mode: ActivationMode = ActivationMode.Software

    def __post_init__(self):
        object.__setattr__(self, "mode", ActivationMode.parse(self.mode))
        object.__setattr__(self, "hidden", tuple(int(h) for h in self.hidden))
        if not self.hidden or min(self.hidden) < 1:
            raise ValueError("hidden layers must be non-empty and positive")
        if self.n_classes < 2:
            raise ValueError("need at least two classes")

    def sizes(self, n_inputs: int) -> list[int]:
        return [n_inputs, *self.hidden, self.n_classes]


@dataclass(frozen=True)
class TrainConfig:
    epochs: int = 30
    batch_size: int = 32
    lr: float = 1e-3
    beta1: float = 0.9
    beta2: float = 0.999
    eps: float = 1e-8
    seed: int = 0
    trials: int = 3

    def __post_init__(self):
        if self.epochs < 1 or self.batch_size < 1 or self.trials < 1:
            raise ValueError("epochs, batch_size and trials must be >= 1")
        if not self.lr > 0:
            raise ValueError("lr must be positive")


class Diverged(RuntimeError):
    pass


@dataclass
class NeuronBank:
    """Per-neuron activation state of every hidden layer.

    Slopes are fixed when the bank is built (static mismatch); noise is drawn
    fresh on every forward pass.  ``gains`` optionally scales each neuron's
    output (supply perturbation).
    """

    m1: list
    m2: list
    boundary: float = 1.0
    jitter_sigma: float = 0.0
    noise_rng: np.random.Generator | None = None
    gains: list | None = None
    clamp: bool = False

    @classmethod
    def ideal(cls, widths, boundary: float = 1.0) -> "NeuronBank":
        return cls([np.ones(w) for w in widths], [np.ones(w) for w in widths], boundary)

    @classmethod
    def sample(cls, model: ActivationModel, widths, slope_rng, noise_rng=None, clamp=False) -> "NeuronBank":
        slope_rng = np.random.default_rng(slope_rng)
        m1 = [truncated_normal(model.mu1, model.sigma1, w, slope_rng) for w in widths]
        m2 = [truncated_normal(model.mu2, model.sigma2, w, slope_rng) for w in widths]
        return cls(m1, m2, model.boundary, model.jitter_sigma, np.random.default_rng(noise_rng), None, clamp)

    def with_noise(self, noise_rng) -> "NeuronBank":
        return NeuronBank(self.m1, self.m2, self.boundary, self.jitter_sigma, np.random.default_rng(noise_rng), self.gains, self.clamp)

    def with_gains(self, gains) -> "NeuronBank":
        return NeuronBank(self.m1, self.m2, self.boundary, self.jitter_sigma, self.noise_rng, gains, self.clamp)

    def forward(self, layer: int, z: np.ndarray):
        noise = None
        if self.jitter_sigma > 0:
            noise = self.noise_rng.normal(0.0, self.jitter_sigma, size=z.shape)
        a = custom_activation(z, self.boundary, self.m1[layer], self.m2[layer], noise, self.clamp)
        if self.gains is not None:
            a = a * self.gains[layer]
        return a

    def grad(self, layer: int, z: np.ndarray):
        return custom_activation_grad(z, self.boundary, self.m1[layer], self.m2[layer])


class MLP:
    def __init__(self, sizes, rng):
        rng = np.random.default_rng(rng)
        self.sizes = list(sizes)
        self.W = [rng.normal(0.0, np.sqrt(2.0 / a), size=(a, b)) for a, b in zip(sizes[:-1], sizes[1:])]
        self.b = [np.zeros(b) for b in sizes[1:]]

    @property
    def params(self):
        return self.W + self.b

    @property
    def hidden_widths(self):
        return self.sizes[1:-1]

    def forward(self, x, bank: NeuronBank):
        zs, acts = [], [x]
        a = x
        last = len(self.W) - 1
        for k, (W, b) in enumerate(zip(self.W, self.b)):
            z = a @ W + b
            if k == last:
                return z, (zs, acts)
            zs.append(z)
            a = bank.forward(k, z)
            acts.append(a)

    def backward(self, logits, cache, y, bank: NeuronBank):
        """Gradients of mean cross-entropy; noise passes straight through."""
        zs, acts = cache
        n = len(y)
        p = softmax(logits)
        p[np.arange(n), y] -= 1.0
        delta = p / n
        gW = [None] * len(self.W)
        gb = [None] * len(self.b)
        for k in range(len(self.W) - 1, -1, -1):
            gW[k] = acts[k].T @ delta
            gb[k] = delta.sum(axis=0)
            if k > 0:
                delta = (delta @ self.W[k].T) * bank.grad(k - 1, zs[k - 1])
        return gW + gb

    def loss(self, x, y, bank):
        logits, _ = self.forward(x, bank)
        return cross_entropy(logits, y)

    def predict(self, x, bank, batch: int = 1024):
        out = [np.argmax(self.forward(x[i : i + batch], bank)[0], axis=1) for i in range(0, len(x), batch)]
        return np.concatenate(out)

    def accuracy(self, x, y, bank) -> float:
        return float(np.mean(self.predict(x, bank) == y))


def softmax(z):
    z = z - z.max(axis=1, keepdims=True)
    e = np.exp(z)
    return e / e.sum(axis=1, keepdims=True)


def cross_entropy(logits, y) -> float:
    z = logits - logits.max(axis=1, keepdims=True)
    logp = z - np.log(np.exp(z).sum(axis=1, keepdims=True))
    return float(-logp[np.arange(len(y)), y].mean())


@dataclass
class Adam:
    lr: float = 1e-3
    beta1: float = 0.9
    beta2: float = 0.999
    eps: float = 1e-8
    t: int = 0
    m: list = field(default_factory=list)
    v: list = field(default_factory=list)

    def step(self, params, grads):
        if not self.m:
            self.m = [np.zeros_like(p) for p in params]
            self.v = [np.zeros_like(p) for p in params]
        self.t += 1
        c1 = 1 - self.beta1**self.t
        c2 = 1 - self.beta2**self.t
        for p, g, m, v in zip(params, grads, self.m, self.v):
            m *= self.beta1
            m += (1 - self.beta1) * g
            v *= self.beta2
            v += (1 - self.beta2) * g * g
            p -= self.lr * (m / c1) / (np.sqrt(v / c2) + self.eps)


def train(net: MLP, x, y, tcfg: TrainConfig, bank: NeuronBank, batch_rng) -> list[float]:
    """Minibatch Adam on cross-entropy; returns the mean loss of each epoch."""
    batch_rng = np.random.default_rng(batch_rng)
    opt = Adam(tcfg.lr, tcfg.beta1, tcfg.beta2, tcfg.eps)
    history = []
    for _ in range(tcfg.epochs):
        order = batch_rng.permutation(len(x))
        total = 0.0
        for i in range(0, len(x), tcfg.batch_size):
            idx = order[i : i + tcfg.batch_size]
            logits, cache = net.forward(x[idx], bank)
            loss = cross_entropy(logits, y[idx])
            if not np.isfinite(loss):
                raise Diverged(f"non-finite loss at step {opt.t}")
            total += loss * len(idx)
            opt.step(net.params, net.backward(logits, cache, y[idx], bank))
        history.append(total / len(x))
    return history
