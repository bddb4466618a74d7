"""Accuracy of software, hardware-inference and hardware-train networks."""

import argparse

from ccosim.cli import hardware_activation
from ccosim.config import RunConfig
from ccosim.nn.bench import compare_modes
from ccosim.nn.data import load_dataset
from ccosim.nn.mlp import NetworkSpec, TrainConfig


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--trials", type=int, default=3)
    ap.add_argument("--epochs", type=int, default=30)
    ap.add_argument("--seed", type=int, default=0)
    ap.add_argument("--dataset", default="digits")
    args = ap.parse_args()
    run = RunConfig(seed=args.seed)
    model = hardware_activation(run)[0].normalised()
    print(model.to_json())
    data = load_dataset(args.dataset, args.seed)
    res = compare_modes(NetworkSpec(), data, TrainConfig(epochs=args.epochs, trials=args.trials, seed=args.seed), model)
    for mode, r in res.items():
        accs = " ".join(f"{a:.4f}" for a in r.accuracies)
        print(f"{mode.value:26s} mean {r.mean:.4f} std {r.std:.4f}  [{accs}]  diverged {r.flagged}")


if __name__ == "__main__":
    main()
