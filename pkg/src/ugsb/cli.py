"""Command-line front end.

Each reproduced figure-class run maps to one subcommand; every command
is deterministic given (config, seed) and writes plain CSV data files
plus a JSON manifest (the manifest carries the only timestamp).

    ugsb derive   --preset swap-holonomic
    ugsb swap     --preset swap-dynamical --out out/
    ugsb sweep    --preset scan-doppler --which doppler --out out/
    ugsb fredkin  --preset fredkin-holonomic --out out/
    ugsb list-presets
"""

import argparse
import sys

import numpy as np

from .config import ScenarioConfig
from .dynamics import DecayModel
from .errors import UgsbError
from .gates import (
    InitialStateGrid,
    average_fidelity,
    fidelity_series,
    fredkin_gate,
    fredkin_schedule,
    gate_fidelity,
    initial_state,
    run_schedule,
    swap_gate,
    swap_schedule,
    truth_table,
)
from .params import distance_for_strength
from .perturbation import derive_effective, choose_v_for_delta, dispersive_rate
from .presets import PRESETS
from .robustness import (
    NoiseSpec,
    decay_scan,
    default_workers,
    distance_scan,
    doppler_scan,
    sweep_delta,
    sweep_detunings,
)
from .tables import write_csv, write_manifest, write_sweep
from .units import TWO_PI, to_mhz


def _add_common(sub):
    sub.add_argument("--config", help="scenario YAML file")
    sub.add_argument("--preset", help="bundled preset name")
    sub.add_argument("--seed", type=int, help="override the master seed")
    sub.add_argument("--samples", type=int, help="override the sample count")
    sub.add_argument("--grid", type=int, default=0,
                     help="average-fidelity grid points per angle (0 = off)")
    sub.add_argument("--out", default="ugsb-out", help="output directory")
    sub.add_argument("--mode", choices=("holonomic", "dynamical"),
                     help="override the gate type")
    sub.add_argument("--aux", choices=("off", "ideal", "explicit"),
                     help="override the compensation mode")
    sub.add_argument("--workers", type=int, default=None,
                     help="thread workers for sweeps (default: all cores)")


def _load_config(args) -> ScenarioConfig:
    if bool(args.config) == bool(args.preset):
        raise UgsbError("give exactly one of --config or --preset")
    cfg = (
        ScenarioConfig.from_file(args.config)
        if args.config
        else ScenarioConfig.from_preset(args.preset)
    )
    raw = dict(cfg.raw)
    if args.seed is not None:
        raw["seed"] = args.seed
    if args.samples is not None:
        raw.setdefault("noise", {})["samples"] = args.samples
    if args.mode is not None:
        raw["gate"] = dict(raw.get("gate", {}), type=args.mode)
    if args.aux is not None:
        raw["drive"] = dict(raw["drive"], aux=args.aux)
    return ScenarioConfig(raw)


def _gate_and_delta(cfg):
    return cfg.gate_type, cfg.gate_delta


def cmd_derive(args) -> int:
    cfg = _load_config(args)
    params = cfg.paramset()
    if params.control is not None:
        params = params.without_control()
    model = derive_effective(params)
    gate, delta = _gate_and_delta(cfg)
    v_req = choose_v_for_delta(params, delta)

    print(f"scenario: {cfg.scenario}  (config hash {cfg.hash})")
    print("stark shifts, nu = omega/2pi (MHz):")
    for name in ("shift_00", "shift_01", "shift_10", "shift_11", "shift_rr"):
        print(f"  {name:9s} {to_mhz(getattr(model, name)):+.6f}")
    print("singly-excited shifts, dropped from the model (MHz):")
    for name in ("shift_r0", "shift_0r", "shift_r1", "shift_1r"):
        print(f"  {name:9s} {to_mhz(getattr(model, name)):+.6f}")
    print(f"omega_eff/2pi: {to_mhz(model.omega_eff):+.6f} MHz")
    if model.omega_eff == 0:
        print("  WARNING: omega_eff = 0 -> no swap coupling at these detunings")
    print(f"target residual detuning delta/2pi: {to_mhz(delta):.6f} MHz")
    if v_req > 0:
        print(f"required pair shift v/2pi: {to_mhz(v_req):.6f} MHz")
        c6 = params.coupling.c6
        if c6:
            print(f"separation d: {distance_for_strength(c6, v_req):.6f} um")
    else:
        print(f"required pair shift v/2pi: {to_mhz(v_req):.6f} MHz "
              "(<= 0: no antiblockade point)")
    if model.omega_eff != 0:
        t_hol = float(np.sqrt(2) * np.pi / abs(model.omega_eff))
        omega = max(abs(params.drive.omega0), abs(params.drive.omega1))
        print(f"resonant gate time: {t_hol:.6f} us "
              f"(omega*T/2pi = {omega * t_hol / TWO_PI:.4f})")
        if delta != 0:
            model_d = derive_effective(params.with_v(v_req))
            omega_d, _ = dispersive_rate(model_d)
            print(f"dispersive rate omega_d/2pi: {to_mhz(omega_d):.6f} MHz")
            print(f"dispersive gate time: {float(np.pi / abs(omega_d)):.6f} us")
    return 0


def _schedule_from_config(cfg, with_leak=False):
    params = cfg.paramset(with_leak=with_leak)
    gate, delta = _gate_and_delta(cfg)
    if params.control is not None:
        return fredkin_schedule(params, gate, delta)
    return swap_schedule(params, gate, delta)


def cmd_swap(args) -> int:
    cfg = _load_config(args)
    noise = cfg.noise()
    decay = None
    params = cfg.paramset()
    if noise.tau is not None and args.decay:
        params = params.with_leak()
        decay = DecayModel(noise.tau)
    gate, delta = _gate_and_delta(cfg)
    schedule = swap_schedule(params.without_control() if params.control else params,
                             gate, delta)
    scheme = schedule.params.scheme
    psi0 = initial_state(scheme, cfg.initial_state_spec)
    comp = scheme.computational_indices
    target = np.zeros_like(psi0)
    target[comp] = swap_gate().matrix @ psi0[comp]

    if decay is None:
        res = run_schedule(schedule, psi0=psi0, n_snapshots=args.points)
    else:
        rho0 = np.outer(psi0, psi0.conj())
        res = run_schedule(schedule, rho0=rho0, decay=decay,
                           n_snapshots=args.points)
    fid = fidelity_series(res, target)
    pops = {
        f"p{lbl}": (
            res.trajectory.populations([scheme.ket_index(lbl)])[:, 0]
        )
        for lbl in ("00", "01", "10", "11", "rr")
    }
    columns = {"time_us": res.times, "fidelity": fid, **pops}
    if args.grid and res.comp_blocks is not None:
        columns["avg_fidelity"] = average_fidelity(
            res.comp_blocks, InitialStateGrid(args.grid)
        )
    header = {
        "scenario": cfg.scenario,
        "config_hash": cfg.hash,
        "gate": gate,
        "delta_mhz": to_mhz(delta),
        "gate_time_us": schedule.total_time,
        "units": "frequencies nu/2pi in MHz, times in us",
    }
    out = write_csv(f"{args.out}/swap_timeseries.csv", columns, header)
    write_manifest(
        f"{args.out}/manifest.json",
        {
            "command": "swap",
            "config": cfg.raw,
            "config_hash": cfg.hash,
            "final_fidelity": float(fid[-1]),
            "gate_time_us": schedule.total_time,
            "decay": bool(decay),
        },
    )
    print(f"gate time {schedule.total_time:.4f} us, "
          f"final fidelity {fid[-1]:.6f} -> {out}")
    return 0


def cmd_sweep(args) -> int:
    cfg = _load_config(args)
    noise = cfg.noise()
    if args.samples is not None:
        noise = NoiseSpec(noise.doppler, noise.distance, noise.tau,
                          args.samples, noise.seed)
    params = cfg.paramset()
    if params.control is not None:
        params = params.without_control()
    gate, delta = _gate_and_delta(cfg)
    workers = args.workers or default_workers()
    psi0 = cfg.initial_state_spec

    if args.which == "detunings":
        result = sweep_detunings(
            params,
            cfg.sweep_axis("ratio0"),
            cfg.sweep_axis("ratio1"),
            psi0=psi0,
            workers=workers,
        )
    elif args.which == "delta":
        from .units import mhz as _mhz

        result = sweep_delta(
            params, _mhz(cfg.sweep_axis("delta_mhz")), psi0=psi0, workers=workers
        )
    elif args.which == "decay":
        result = decay_scan(
            params, cfg.sweep_axis("tau_us"), gate, psi0=psi0,
            delta=delta, workers=workers,
        )
    elif args.which == "doppler":
        result = doppler_scan(
            params, cfg.sweep_axis("temperature_uk"), noise, gate,
            psi0=psi0, delta=delta, workers=workers,
        )
    elif args.which == "distance":
        result = distance_scan(
            params, cfg.sweep_axis("sigma_nm") * 1e-3, noise, gate,
            psi0=psi0, delta=delta, workers=workers,
        )
    else:
        raise UgsbError(f"unknown sweep {args.which!r}")

    out = write_sweep(
        f"{args.out}/sweep_{result.name}.csv",
        result,
        {"scenario": cfg.scenario, "config_hash": cfg.hash},
    )
    write_manifest(
        f"{args.out}/manifest.json",
        {
            "command": f"sweep {args.which}",
            "config": cfg.raw,
            "config_hash": cfg.hash,
            "metadata": result.metadata,
        },
    )
    print(f"{result.name}: {np.prod(result.shape)} points -> {out}")
    return 0


def cmd_fredkin(args) -> int:
    cfg = _load_config(args)
    params = cfg.paramset()
    if params.control is None:
        raise UgsbError("fredkin needs a control section in the configuration")
    gate, delta = _gate_and_delta(cfg)
    schedule = fredkin_schedule(params, gate, delta)
    scheme = schedule.params.scheme
    psi0 = initial_state(scheme, cfg.initial_state_spec)
    res = run_schedule(schedule, psi0=psi0, n_snapshots=args.points)
    u = res.final_comp_block
    table = truth_table(u)
    fid = gate_fidelity(u, fredkin_gate())
    labels = res.comp_labels
    columns = {"input": np.array(labels)}
    for o, lbl in enumerate(labels):
        columns[f"to_{lbl}"] = table[:, o]
    columns["leakage"] = 1.0 - table.sum(axis=1)
    out = write_csv(
        f"{args.out}/fredkin_truth_table.csv",
        columns,
        {
            "scenario": cfg.scenario,
            "config_hash": cfg.hash,
            "gate": gate,
            "gate_fidelity": fid,
            "gate_time_us": schedule.total_time,
        },
    )
    write_manifest(
        f"{args.out}/manifest.json",
        {
            "command": "fredkin",
            "config": cfg.raw,
            "config_hash": cfg.hash,
            "gate_fidelity": fid,
            "gate_time_us": schedule.total_time,
        },
    )
    print(f"fredkin ({gate}): gate fidelity {fid:.6f}, "
          f"T = {schedule.total_time:.4f} us -> {out}")
    return 0


def cmd_list_presets(_args) -> int:
    for name in sorted(PRESETS):
        cfg = PRESETS[name]
        gate = cfg.get("gate", {}).get("type", "?")
        print(f"{name:20s} gate={gate:10s} scenario={cfg.get('scenario')}")
    return 0


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(
        prog="ugsb",
        description="Simulator for ground-state-blockade SWAP and Fredkin "
        "gates of driven Rydberg atoms",
    )
    sub = ap.add_subparsers(dest="command", required=True)

    p = sub.add_parser("derive", help="print the reduced-model report")
    _add_common(p)
    p.set_defaults(fn=cmd_derive)

    p = sub.add_parser("swap", help="run a SWAP gate, write the time series")
    _add_common(p)
    p.add_argument("--points", type=int, default=201, help="snapshot count")
    p.add_argument("--decay", action="store_true",
                   help="include Rydberg decay (uses noise.decay.tau_us)")
    p.set_defaults(fn=cmd_swap)

    p = sub.add_parser("sweep", help="run a parameter or noise sweep")
    _add_common(p)
    p.add_argument("--which", required=True,
                   choices=("detunings", "delta", "decay", "doppler", "distance"))
    p.set_defaults(fn=cmd_sweep)

    p = sub.add_parser("fredkin", help="run the controlled-SWAP protocol")
    _add_common(p)
    p.add_argument("--points", type=int, default=61, help="snapshot count")
    p.set_defaults(fn=cmd_fredkin)

    p = sub.add_parser("list-presets", help="enumerate bundled presets")
    p.set_defaults(fn=cmd_list_presets)
    return ap


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.fn(args)
    except UgsbError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
