"""Software vs hardware-activation experiments on a digit set."""

from __future__ import annotations

import csv
import io
from dataclasses import dataclass, field

import numpy as np

from ..neuron import ActivationModel, custom_activation, custom_activation_grad
from ..rng import substream
from ..variation import SupplyPerturbation, sample_supply_perturbation
from .data import Dataset
from .mlp import MLP, ActivationMode, Diverged, NetworkSpec, NeuronBank, TrainConfig, train


@dataclass
class Trial:
    mode: ActivationMode
    trial: int
    accuracy: float
    net: MLP | None = None
    bank: NeuronBank | None = None
    diverged: bool = False


@dataclass
class BenchResult:
    mode: ActivationMode
    trials: list = field(default_factory=list)

    @property
    def accuracies(self) -> np.ndarray:
        return np.array([t.accuracy for t in self.trials if not t.diverged])

    @property
    def flagged(self) -> list[int]:
        return [t.trial for t in self.trials if t.diverged]

    @property
    def mean(self) -> float:
        a = self.accuracies
        return float(a.mean()) if len(a) else float("nan")

    @property
    def std(self) -> float:
        a = self.accuracies
        return float(a.std()) if len(a) else float("nan")


def _streams(seed: int, trial: int):
    tag = f"nn.trial{trial}"
    return {k: substream(seed, f"{tag}.{k}") for k in ("init", "batches", "slopes", "noise", "eval")}


def _train_bank(mode: ActivationMode, model: ActivationModel, widths, s) -> NeuronBank:
    if mode is ActivationMode.HardwareTrainInference:
        return NeuronBank.sample(model, widths, s["slopes"], s["noise"])
    # ReLU(m x) with the normalised mean slope m = 1
    return NeuronBank.ideal(widths, model.boundary)


def _eval_bank(mode: ActivationMode, model: ActivationModel, widths, s, train_bank) -> NeuronBank:
    if mode is ActivationMode.Software:
        return train_bank
    if mode is ActivationMode.HardwareTrainInference:
        return train_bank.with_noise(s["eval"])
    return NeuronBank.sample(model, widths, s["slopes"], s["eval"])


def run_trial(spec: NetworkSpec, data: Dataset, tcfg: TrainConfig, model: ActivationModel, trial: int) -> Trial:
    """Train and evaluate one trial of ``spec.mode`` with paired seeds.

    ``model`` must be normalised (mean slope 1).  All modes of one trial share
    weight init, batch order, sampled slopes and noise streams.
    """
    s = _streams(tcfg.seed, trial)
    widths = list(spec.hidden)
    net = MLP(spec.sizes(data.n_features), s["init"])
    bank = _train_bank(spec.mode, model, widths, s)
    try:
        train(net, data.x_train, data.y_train, tcfg, bank, s["batches"])
    except Diverged:
        return Trial(spec.mode, trial, float("nan"), net, bank, diverged=True)
    ebank = _eval_bank(spec.mode, model, widths, s, bank)
    return Trial(spec.mode, trial, net.accuracy(data.x_test, data.y_test, ebank), net, ebank)


def train_and_eval(spec: NetworkSpec, data: Dataset, tcfg: TrainConfig, model: ActivationModel) -> BenchResult:
    res = BenchResult(spec.mode)
    for k in range(tcfg.trials):
        res.trials.append(run_trial(spec, data, tcfg, model, k))
    return res


def compare_modes(spec: NetworkSpec, data: Dataset, tcfg: TrainConfig, model: ActivationModel) -> dict:
    """All three modes; software training is reused for hardware inference."""
    out = {m: BenchResult(m) for m in ActivationMode}
    sw_spec = NetworkSpec(spec.hidden, spec.n_classes, ActivationMode.Software)
    hti_spec = NetworkSpec(spec.hidden, spec.n_classes, ActivationMode.HardwareTrainInference)
    for k in range(tcfg.trials):
        sw = run_trial(sw_spec, data, tcfg, model, k)
        out[ActivationMode.Software].trials.append(sw)
        if sw.diverged:
            out[ActivationMode.HardwareInference].trials.append(Trial(ActivationMode.HardwareInference, k, float("nan"), diverged=True))
        else:
            s = _streams(tcfg.seed, k)
            hb = _eval_bank(ActivationMode.HardwareInference, model, list(spec.hidden), s, None)
            acc = sw.net.accuracy(data.x_test, data.y_test, hb)
            out[ActivationMode.HardwareInference].trials.append(Trial(ActivationMode.HardwareInference, k, acc, sw.net, hb))
        out[ActivationMode.HardwareTrainInference].trials.append(run_trial(hti_spec, data, tcfg, model, k))
    return out


def slope_resample_eval(net: MLP, data: Dataset, model: ActivationModel, n: int = 20, seed: int = 0) -> np.ndarray:
    """Accuracy of fixed weights under ``n`` fresh per-neuron slope draws."""
    widths = net.hidden_widths
    accs = []
    for k in range(n):
        bank = NeuronBank.sample(model, widths, substream(seed, f"nn.resample{k}.slopes"), substream(seed, f"nn.resample{k}.noise"))
        accs.append(net.accuracy(data.x_test, data.y_test, bank))
    return np.array(accs)


def supply_perturbation_eval(net: MLP, bank: NeuronBank, data: Dataset, p: SupplyPerturbation, seed: int = 0) -> float:
    """Accuracy drop when each neuron's output is scaled by (1 + draw / 100).

    Both evaluations replay the same noise stream, so a zero perturbation
    gives exactly zero drop.
    """
    rng = substream(seed, "nn.supply")
    gains = [1.0 + sample_supply_perturbation(p, rng, size=w) / 100.0 for w in net.hidden_widths]
    base = net.accuracy(data.x_test, data.y_test, bank.with_noise(substream(seed, "nn.supply.noise")))
    pert = net.accuracy(data.x_test, data.y_test, bank.with_noise(substream(seed, "nn.supply.noise")).with_gains(gains))
    return base - pert


def gradient_check(model: ActivationModel, n_points: int = 1000, seed: int = 0, h: float = 1e-6, margin: float = 1e-4) -> float:
    """Max relative error of the analytic activation slope vs central differences.

    Points within ``margin`` of 0 or the boundary are excluded (kinks).
    """
    rng = substream(seed, "nn.gradcheck")
    b = model.boundary
    span = 3.0 * max(abs(b), 1.0)
    x = rng.uniform(-span, span, size=4 * n_points)
    x = x[(np.abs(x) > margin) & (np.abs(x - b) > margin)][:n_points]
    m1 = np.abs(rng.normal(model.mu1, model.sigma1, size=len(x))) + 1e-12
    m2 = np.abs(rng.normal(model.mu2, model.sigma2, size=len(x))) + 1e-12
    num = (custom_activation(x + h, b, m1, m2) - custom_activation(x - h, b, m1, m2)) / (2 * h)
    ana = custom_activation_grad(x, b, m1, m2)
    denom = np.maximum(np.abs(ana), np.abs(num))
    rel = np.where(denom > 0, np.abs(num - ana) / np.where(denom > 0, denom, 1.0), 0.0)
    return float(rel.max())


def network_gradient_check(net: MLP, x, y, bank: NeuronBank, n_checks: int = 50, seed: int = 0, h: float = 1e-6) -> float:
    """Max relative error of backprop weight gradients vs central differences."""
    if bank.jitter_sigma:
        raise ValueError("gradient check needs a noiseless bank")
    rng = substream(seed, "nn.netgrad")
    logits, cache = net.forward(x, bank)
    grads = net.backward(logits, cache, y, bank)
    worst = 0.0
    for _ in range(n_checks):
        k = int(rng.integers(len(net.params)))
        p, g = net.params[k], grads[k]
        idx = tuple(int(rng.integers(s)) for s in p.shape)
        old = p[idx]
        p[idx] = old + h
        lp = net.loss(x, y, bank)
        p[idx] = old - h
        lm = net.loss(x, y, bank)
        p[idx] = old
        num = (lp - lm) / (2 * h)
        denom = max(abs(num), abs(g[idx]), 1e-8)
        worst = max(worst, abs(num - g[idx]) / denom)
    return worst


def results_csv(dataset: str, results: dict) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["dataset", "mode", "trial", "accuracy"])
    for mode, res in results.items():
        for t in res.trials:
            w.writerow([dataset, mode.value, t.trial, f"{t.accuracy:.8e}"])
    return buf.getvalue()
