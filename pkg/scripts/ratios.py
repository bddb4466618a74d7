"""Print the closed-form proposed/conventional ratios of the default ring."""

from ccosim.jitter import jitter_ratio_prediction
from ccosim.power import equal_frequency_power_gap
from ccosim.ring import RingConfig, frequency_ratio, startup_variant_comparison, tail_current_ratio_equal_frequency
from ccosim.stage import StageCaps, StageTopology, load_capacitance, phase_currents


def main():
    caps = StageCaps()
    c = load_capacitance(StageTopology.ProposedBothStartup, caps) / load_capacitance(StageTopology.Conventional8T, caps)
    i = tail_current_ratio_equal_frequency()
    print(f"load capacitance ratio      {c:.4f}")
    print(f"frequency ratio (equal I)   {frequency_ratio():.4f}")
    print(f"tail current ratio (equal f){i:.4f}")
    print(f"period variance ratio       {jitter_ratio_prediction(c, i):.4f}")
    print(f"power gap at 40 MHz         {equal_frequency_power_gap(RingConfig()):.4f}")
    for t in (StageTopology.Conventional8T, StageTopology.ProposedBothStartup):
        led = phase_currents(t)
        print(f"{t.value:24s} {led.rule():16s} per-phase {tuple(round(x, 4) for x in led.composed)}")
    f = startup_variant_comparison(RingConfig())
    conv = f[StageTopology.Conventional8T]
    for t, v in f.items():
        print(f"{t.value:24s} {v / 1e6:7.2f} MHz  {100 * (v / conv - 1):+6.1f}%")


if __name__ == "__main__":
    main()
