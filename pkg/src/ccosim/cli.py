"""Command-line front end.

Every subcommand reads one RunConfig, writes its tables to --out together with
the resolved configuration, and exits 0 (ok), 1 (invariant violated) or
2 (bad configuration).
"""

from __future__ import annotations

import argparse
import logging
import sys
from dataclasses import asdict, replace
from pathlib import Path

import numpy as np

from . import jitter as jm
from . import power as pw
from . import tdc
from .config import ConfigError, RunConfig, load_config, load_config_file
from .io import write_json, write_table
from .lockstate import lock_state_analysis
from .neuron import (
    ActivationModel,
    SpikingConfig,
    extract_activation,
    pulse_train,
    spiking_response,
    step_input,
)
from .ring import current_for_frequency, edge_stream, frequency
from .rng import substream
from .stage import StageTopology
from .variation import MismatchModel, mc_if_curves, sample_cv

log = logging.getLogger("ccosim")


class InvariantViolation(RuntimeError):
    pass


def _check(cond: bool, msg: str) -> None:
    if not cond:
        raise InvariantViolation(msg)


def _currents(lo, hi, n, log_spacing=True):
    if not (0 < lo < hi) or n < 2:
        raise ConfigError("current range must satisfy 0 < i_min < i_max with >= 2 points")
    return np.geomspace(lo, hi, n) if log_spacing else np.linspace(lo, hi, n)


# --- subcommands -----------------------------------------------------------------


def cmd_sweep_if(cfg: RunConfig, out: Path, fmt: str) -> None:
    s = cfg.sweep
    currents = _currents(s.i_min, s.i_max, s.points, s.log_spacing)
    base = cfg.ring.build()
    rows, freqs = [], {}
    for name in s.topologies:
        topo = StageTopology.parse(name)
        ring = base.with_topology(topo)
        f = np.array([frequency(ring.with_current(i)) for i in currents])
        _check(bool(np.all(np.diff(f) > 0)), f"{topo.value}: frequency not increasing in current")
        freqs[topo] = f
        oracle = None
        if s.oracle:
            from .transient import transient_oracle

            oracle = [transient_oracle(ring.with_current(i)).frequency for i in currents]
        for k, i in enumerate(currents):
            row = [topo.value, i, f[k]]
            if s.oracle:
                row.append(oracle[k])
            rows.append(row)
    prop, conv = StageTopology.ProposedBothStartup, StageTopology.Conventional8T
    if prop in freqs and conv in freqs:
        _check(bool(np.all(freqs[prop] > freqs[conv])), "proposed ring not faster than conventional")
    header = ["topology", "current_a", "freq_hz"] + (["oracle_hz"] if s.oracle else [])
    write_table(out, "if_curve", header, rows, fmt)


def cmd_jitter(cfg: RunConfig, out: Path, fmt: str) -> None:
    j = cfg.jitter
    prop = cfg.ring.build().with_topology(StageTopology.ProposedBothStartup)
    conv_base = prop.with_topology(StageTopology.Conventional8T)
    gamma = j.gamma
    if gamma is None:
        gamma = jm.calibrate_gamma(prop.with_current(j.calib_current), j.target_pct, j.window, j.vdd, j.temperature)
    rows = []
    for i in j.currents:
        p_cfg = prop.with_current(i)
        f = frequency(p_cfg)
        c_cfg = conv_base.with_current(current_for_frequency(conv_base, f))
        pct = {}
        for tag, ring in (("proposed", p_cfg), ("conventional", c_cfg)):
            params = jm.jitter_params_for(ring, gamma, j.vdd, j.temperature)
            rng = substream(cfg.seed, f"jitter.{tag}.{i:.6e}")
            pct[tag] = jm.window_count_jitter(ring, params, j.window, j.trials, rng)
            var = jm.period_jitter_variance(params)
            rows.append([tag, ring.i_tail, frequency(ring), var, pct[tag]])
        pred = jm.jitter_ratio_prediction(p_cfg.c_load / c_cfg.c_load, p_cfg.i_tail / c_cfg.i_tail)
        ratio = pct["proposed"] / pct["conventional"]
        _check(abs(ratio / np.sqrt(pred) - 1) <= 0.10, f"jitter ratio {ratio:.3f} off prediction {np.sqrt(pred):.3f}")
    write_table(out, "jitter", ["topology", "current_a", "freq_hz", "period_var_s2", "jitter_pct"], rows, fmt)
    calib = prop.with_current(j.calib_current)
    counts = jm.window_counts(calib, jm.jitter_params_for(calib, gamma, j.vdd, j.temperature), j.window, j.trials, substream(cfg.seed, "jitter.counts"))
    write_table(out, "counts", ["trial", "count", "window_s"], [[k, int(c), j.window] for k, c in enumerate(counts)], fmt)
    write_json(out, "jitter_calibration.json", {"gamma": gamma, "calib_current_a": j.calib_current, "target_pct": j.target_pct})


def cmd_tdc_sim(cfg: RunConfig, out: Path, fmt: str) -> None:
    t = cfg.tdc
    frames, windows, rows = [], [], []
    rng = substream(cfg.seed, "tdc.aperture")
    for f in t.frequencies:
        edges = edge_stream(f, t.window, 4)
        frame = tdc.convert(edges, t.window, t.width, t.aperture, rng)
        frames.append(frame)
        windows.append(t.window)
        f_hat = tdc.decode_frequency(frame, t.window)
        if frame.saturated:
            log.warning("coarse counter saturated at %.3e Hz", f)
        else:
            steps = 1 + np.ceil(t.aperture * 8 * f)
            _check(abs(f_hat - f) <= steps / (8 * t.window) * (1 + 1e-9), f"decode error at {f:.3e} Hz")
        rows.append([t.window, f"{frame.gc:03x}", frame.pc, f_hat, f, int(frame.saturated)])
    write_table(out, "frames", ["window_s", "gc_hex", "pc", "f_hz", "f_true_hz", "saturated"], rows, fmt)
    if t.width + tdc.PHASE_BITS <= 16:
        (out / "frames.bin").write_bytes(tdc.dump_frames(frames))


def cmd_lockstate(cfg: RunConfig, out: Path, fmt: str) -> None:
    n = cfg.lockstate.n_stages
    rows, counts = [], {}
    for name in cfg.lockstate.topologies:
        topo = StageTopology.parse(name)
        fixed = sorted(lock_state_analysis(topo, n), key=lambda s: s.bits)
        counts[topo] = len(fixed)
        for s in fixed:
            floating = ";".join(f"{k}:{node}" for k, node in s.floating_nodes(topo))
            rows.append([topo.value, str(s), floating])
        if not fixed:
            rows.append([topo.value, "", ""])
    write_table(out, "lockstate", ["topology", "state", "floating_nodes"], rows, fmt)
    for topo, c in counts.items():
        if topo is StageTopology.Proposed4T:
            _check(c >= 1, "cell without startup devices shows no lock state")
        else:
            _check(c == 0, f"{topo.value} has {c} lock states")


def cmd_mc(cfg: RunConfig, out: Path, fmt: str) -> None:
    m = cfg.mc
    model = MismatchModel(m.mean_f_ref, m.sigma_f_ref)
    ring = cfg.ring.build()
    i_ref = model.reference_current(ring)
    currents = np.unique(np.concatenate([_currents(m.i_min, m.i_max, m.points, False), [i_ref]]))
    curves = mc_if_curves(ring, model, m.n_runs, currents, substream(cfg.seed, "mc.slopes"))
    k = int(np.searchsorted(currents, i_ref))
    f_ref = curves[:, k]
    rows = [[r, i, f] for r, row in enumerate(curves) for i, f in zip(currents, row)]
    write_table(out, "mc_curves", ["run_id", "current_a", "freq_hz"], rows, fmt)
    cv = sample_cv(f_ref)
    write_json(out, "mc_summary.json", {
        "reference_current_a": i_ref,
        "mean_hz": float(f_ref.mean()),
        "std_hz": float(f_ref.std(ddof=1)),
        "sample_cv": cv,
        "configured_cv": model.cv,
    })
    if m.n_runs >= 100:
        _check(abs(cv - model.cv) <= 0.005, f"sample CV {cv:.4f} far from configured {model.cv:.4f}")


def hardware_activation(cfg: RunConfig) -> tuple[ActivationModel, object]:
    a = cfg.activation
    ring = replace(cfg.ring.build(), i_knee=a.i_knee)
    model = MismatchModel(cfg.mc.mean_f_ref, cfg.mc.sigma_f_ref)
    currents = _currents(a.i_min, a.i_max, a.points, False)
    return extract_activation(ring, model, currents, a.n_runs, substream(cfg.seed, "activation.mc"), a.jitter_pct / 100.0)


def cmd_extract_activation(cfg: RunConfig, out: Path, fmt: str) -> None:
    model, fit = hardware_activation(cfg)
    out.mkdir(parents=True, exist_ok=True)
    (out / "activation.json").write_text(model.to_json() + "\n")
    (out / "activation_normalised.json").write_text(model.normalised().to_json() + "\n")
    rows = [[k, a, b] for k, (a, b) in enumerate(zip(fit.slopes1, fit.slopes2))]
    write_table(out, "region_slopes", ["run_id", "slope1_hz_per_a", "slope2_hz_per_a"], rows, fmt)
    _check(model.sigma1 >= 0 and model.sigma2 >= 0 and model.mu1 > 0 and model.mu2 > 0, "invalid fitted slopes")


def cmd_nn_train(cfg: RunConfig, out: Path, fmt: str) -> None:
    from .nn.bench import compare_modes, gradient_check, slope_resample_eval, supply_perturbation_eval
    from .nn.data import load_dataset
    from .nn.mlp import ActivationMode, NetworkSpec, TrainConfig
    from .variation import SupplyPerturbation

    n = cfg.nn
    if n.activation_path:
        model = ActivationModel.from_json(Path(n.activation_path).read_text())
    else:
        model, _ = hardware_activation(cfg)
    nmodel = model if model.mean_slope == 1.0 else model.normalised()
    data = load_dataset(n.dataset, cfg.seed)
    spec = NetworkSpec(n.hidden, data.n_classes)
    tcfg = TrainConfig(n.epochs, n.batch_size, n.lr, seed=cfg.seed, trials=n.trials)
    results = compare_modes(spec, data, tcfg, nmodel)
    rows = [[data.name, m.value, t.trial, t.accuracy] for m, r in results.items() for t in r.trials]
    write_table(out, "accuracy", ["dataset", "mode", "trial", "accuracy"], rows, fmt)
    hti = results[ActivationMode.HardwareTrainInference].trials[0]
    summary = {m.value: {"mean": r.mean, "std": r.std, "flagged": r.flagged} for m, r in results.items()}
    if not hti.diverged:
        resample = slope_resample_eval(hti.net, data, nmodel, n.resamples, cfg.seed)
        summary["resample_std"] = float(resample.std())
        summary["supply_drop"] = supply_perturbation_eval(hti.net, hti.bank, data, SupplyPerturbation(), cfg.seed)
    summary["gradient_check"] = gradient_check(replace(nmodel, jitter_sigma=0.0), seed=cfg.seed)
    summary["activation"] = asdict(nmodel)
    write_json(out, "nn_summary.json", summary)
    for m, r in results.items():
        if r.flagged:
            log.warning("%s: diverged trials %s excluded", m.value, r.flagged)
    _check(summary["gradient_check"] < 1e-5, "activation gradient check failed")


def cmd_spike_sim(cfg: RunConfig, out: Path, fmt: str) -> None:
    s = cfg.spike
    ring = cfg.ring.build()
    scfg = SpikingConfig(s.i_leak, s.c_int, None, s.spike_phase)
    rows = []
    t, i = step_input(s.dc_current, 0.0, s.t_end, s.t_end)
    dc = spiking_response(t, i, scfg, ring)
    t, i = step_input(s.step_current, s.step_on, s.step_off, s.t_end)
    step = spiking_response(t, i, scfg, ring)
    width = scfg.pulse_width(ring, s.pulse_amplitude)
    starts = s.pulse_period * np.arange(s.n_pulses) + 0.5 * (s.pulse_period - width)
    t, i = pulse_train(starts, s.pulse_amplitude, width, s.t_end)
    pulses = spiking_response(t, i, scfg, ring)
    for name, spikes in (("dc", dc), ("step", step), ("pulses", pulses)):
        rows += [[name, k, ts] for k, ts in enumerate(spikes)]
    write_table(out, "spikes", ["scenario", "index", "spike_time_s"], rows, fmt)
    write_json(out, "spike_summary.json", {
        "pulse_charge_c": scfg.resolved_pulse_charge(ring),
        "pulse_width_s": width,
        "dc_spikes": len(dc),
        "step_spikes": len(step),
        "pulse_spikes": len(pulses),
    })
    period = 1.0 / frequency(ring.with_current(s.step_current))
    if s.dc_current <= s.i_leak:
        _check(len(dc) == 0, "spikes below the leak current")
    _check(all(s.step_on <= x <= s.step_off + period for x in step), "spikes outside the step")
    _check(len(pulses) == s.n_pulses // scfg.pulses_per_spike, "pulse-to-spike ratio broken")


def cmd_fom(cfg: RunConfig, out: Path, fmt: str) -> None:
    f = cfg.fom
    enob = f.enob if f.enob is not None else pw.enob_for_fom(f.power, f.bandwidth, f.fom_target)
    value = pw.fom(pw.FomInputs(f.power, enob, f.bandwidth))
    model = pw.PowerModel(f.vdd, f.branches, f.p_static)
    ring = cfg.ring.build()
    rows = pw.energy_per_cycle_report(ring, _currents(f.i_min, f.i_max, f.points), model)
    write_table(out, "energy", ["current_a", "freq_hz", "power_w", "energy_j"], [[r.current, r.frequency, r.power, r.energy] for r in rows], fmt)
    lo, hi = pw.energy_band(rows)
    write_json(out, "fom.json", {
        "power_w": f.power,
        "bandwidth_hz": f.bandwidth,
        "enob": enob,
        "enob_derived": f.enob is None,
        "fom_j_per_step": value,
        "energy_band_j": [lo, hi],
        "equal_frequency_power_gap": pw.equal_frequency_power_gap(ring, model=model),
    })
    _check(value > 0 and lo > 0, "non-positive figure of merit")


def cmd_vi_map(cfg: RunConfig, out: Path, fmt: str) -> None:
    rows = [[v, r, pw.vi_map(v, r)] for r in cfg.vi.r_total for v in cfg.vi.vdac]
    write_table(out, "vi_map", ["vdac_v", "r_total_ohm", "current_a"], rows, fmt)


COMMANDS = {
    "sweep-if": (cmd_sweep_if, "frequency vs tail current per topology"),
    "jitter": (cmd_jitter, "windowed-count jitter, proposed vs conventional"),
    "tdc-sim": (cmd_tdc_sim, "convert synthetic edge streams into TDC frames"),
    "lockstate": (cmd_lockstate, "enumerate non-oscillating fixed points"),
    "mc": (cmd_mc, "Monte-Carlo mismatched I-F curves"),
    "extract-activation": (cmd_extract_activation, "fit the two-region activation model"),
    "nn-train": (cmd_nn_train, "software vs hardware-activation network bench"),
    "spike-sim": (cmd_spike_sim, "spiking-mode scenarios"),
    "fom": (cmd_fom, "figure of merit and energy per cycle"),
    "vi-map": (cmd_vi_map, "V-I converter current map"),
}


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="ccosim", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)
    for name, (_, help_text) in COMMANDS.items():
        p = sub.add_parser(name, help=help_text)
        p.add_argument("--config", type=Path, help="RunConfig JSON (defaults when omitted)")
        p.add_argument("--seed", type=int, help="root seed, overrides the config")
        p.add_argument("--out", type=Path, default=Path("out"), help="output directory")
        p.add_argument("--format", choices=("csv", "json"), default="csv")
        p.add_argument("-v", "--verbose", action="store_true")
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING, format="%(levelname)s %(message)s")
    try:
        cfg = load_config_file(args.config) if args.config else load_config({})
        if args.seed is not None:
            data = cfg.to_dict()
            data["seed"] = args.seed
            cfg = load_config(data)
    except (ConfigError, OSError) as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return 2
    out = args.out
    out.mkdir(parents=True, exist_ok=True)
    (out / "config.resolved.json").write_text(cfg.to_json() + "\n")
    func = COMMANDS[args.command][0]
    try:
        func(cfg, out, args.format)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return 2
    except InvariantViolation as exc:
        print(f"invariant violated: {exc}", file=sys.stderr)
        return 1
    except (ValueError, OSError) as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return 2
    return 0


if __name__ == "__main__":
    sys.exit(main())
