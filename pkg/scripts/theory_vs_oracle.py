"""Phase-average frequency against the node-voltage ODE over a current sweep."""

import argparse

import numpy as np

from ccosim.device import DeviceParams
from ccosim.ring import RingConfig, frequency
from ccosim.stage import StageTopology
from ccosim.transient import transient_oracle


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--i-min", type=float, default=0.15e-6)
    ap.add_argument("--i-max", type=float, default=1.5e-6)
    ap.add_argument("--points", type=int, default=5)
    ap.add_argument("--alpha", type=float, default=1.3)
    args = ap.parse_args()
    base = RingConfig(device=DeviceParams(alpha=args.alpha))
    print("current_a,topology,theory_hz,oracle_hz,ratio")
    for i in np.geomspace(args.i_min, args.i_max, args.points):
        for t in (StageTopology.Conventional8T, StageTopology.ProposedBothStartup):
            ring = base.with_topology(t).with_current(i)
            th, od = frequency(ring), transient_oracle(ring).frequency
            print(f"{i:.3e},{t.value},{th:.4e},{od:.4e},{th / od:.3f}")


if __name__ == "__main__":
    main()
