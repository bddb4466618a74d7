"""Compare the tabulated per-phase charging currents with alpha-power sweeps.

Each device is swept along a straight line between the start and end
(v_gs, v_ds) of its phase in the region the table names, and the mean
current is printed next to the tabulated value (units of beta).
"""

import argparse

from ccosim.device import DeviceParams, OperatingRegion, trajectory_average
from ccosim.stage import PHASE_CURRENTS, PHASES, Rails

SAT, LIN = OperatingRegion.Saturation, OperatingRegion.Linear


def sweeps(r: Rails):
    hi, lo, cm = r.vmax, r.vmin, r.vcm
    sw = hi - lo
    d = r.dv[0]
    return {
        ("MP1", "A"): (SAT, (hi - cm, sw - d), (sw, sw - d)),
        ("MN3", "A"): (LIN, (sw, sw - d), (0.0, d)),
        ("MP1", "B"): (SAT, (hi - cm - d, sw), (sw - d, sw - cm)),
        ("MN3", "B"): (LIN, (sw - d, hi - cm), (d, cm - lo)),
        ("MP1", "C"): (SAT, (sw, sw), (hi - cm, d)),
        ("MP3", "C"): (SAT, (hi - cm, sw - d), (hi - cm, d)),
        ("MP1", "D"): (LIN, (sw, sw), (hi - cm, d)),
        ("MP3", "D"): (LIN, (hi - cm, sw - d), (hi - cm, d)),
    }


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--alpha", type=float, nargs="+", default=[1.2, 1.3, 1.5])
    ap.add_argument("--vt", type=float, default=0.3)
    args = ap.parse_args()
    rails = Rails()
    print(f"{'device':6s} {'phase':5s} {'table':>7s} " + " ".join(f"a={a:<5g}  dev%" for a in args.alpha))
    for (dev, ph), (region, vgs, vds) in sweeps(rails).items():
        ref = PHASE_CURRENTS[dev][PHASES.index(ph)]
        cells = []
        for a in args.alpha:
            avg = trajectory_average(region, vgs, vds, DeviceParams(beta=1.0, vt=args.vt, alpha=a))
            cells.append(f"{avg:7.4f} {100 * (avg / ref - 1):+5.0f}")
        print(f"{dev:6s} {ph:5s} {ref:7.3f} " + "  ".join(cells))


if __name__ == "__main__":
    main()
