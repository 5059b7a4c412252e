import json

import numpy as np
import pytest
import yaml

from ugsb.cli import main
from ugsb.config import ScenarioConfig, grid_values
from ugsb.errors import ConfigurationError
from ugsb.gates import fredkin_schedule, swap_schedule
from ugsb.presets import PRESETS, preset
from ugsb.units import mhz


def test_presets_enumerate_and_build():
    assert set(PRESETS) == {
        "swap-holonomic", "swap-dynamical", "sweep-detunings", "sweep-delta",
        "scan-decay", "scan-doppler", "scan-distance",
        "fredkin-holonomic", "fredkin-dynamical",
    }
    for name in PRESETS:
        cfg = ScenarioConfig.from_preset(name)
        params = cfg.paramset()
        if params.control is not None:
            fredkin_schedule(params, cfg.gate_type, cfg.gate_delta)
        else:
            swap_schedule(params, cfg.gate_type, cfg.gate_delta)
    with pytest.raises(KeyError):
        preset("swap-imaginary")


def test_unknown_keys_rejected():
    cfg = preset("swap-holonomic")
    cfg["lazer"] = {"power": 9000}
    with pytest.raises(ConfigurationError):
        ScenarioConfig(cfg)
    cfg2 = preset("swap-holonomic")
    cfg2["drive"]["omega7_mhz"] = 1.0
    with pytest.raises(ConfigurationError):
        ScenarioConfig(cfg2)


def test_required_sections():
    with pytest.raises(ConfigurationError):
        ScenarioConfig({"scenario": "x"})


def test_roundtrip_lossless(tmp_path):
    cfg = ScenarioConfig.from_preset("scan-doppler")
    path = tmp_path / "scenario.yaml"
    cfg.to_file(path)
    back = ScenarioConfig.from_file(path)
    assert back.raw == cfg.raw
    assert back.hash == cfg.hash


def test_paramset_units():
    cfg = ScenarioConfig.from_preset("swap-holonomic")
    p = cfg.paramset()
    assert p.drive.omega0 == pytest.approx(mhz(10.0))
    assert p.drive.delta1 == pytest.approx(mhz(300.0))
    assert p.coupling.c6 == pytest.approx(mhz(858400.0))
    assert cfg.gate_type == "holonomic" and cfg.gate_delta == 0.0


def test_noise_spec_construction():
    cfg = ScenarioConfig.from_preset("scan-distance")
    noise = cfg.noise()
    assert noise.n == 201 and noise.tau == 400.0
    assert noise.distance.sigma_um == pytest.approx(5e-3)
    assert noise.doppler.k_eff_per_m == 8.76e6


def test_grid_values_forms():
    assert np.allclose(grid_values([1.0, 2.0]), [1.0, 2.0])
    assert np.allclose(
        grid_values({"start": 0.0, "stop": 1.0, "num": 3}), [0.0, 0.5, 1.0]
    )
    with pytest.raises(ConfigurationError):
        grid_values({"start": 0.0, "end": 1.0, "num": 3})


def test_cli_list_presets(capsys):
    assert main(["list-presets"]) == 0
    out = capsys.readouterr().out
    assert "swap-holonomic" in out and "fredkin-dynamical" in out


def test_cli_requires_one_source(capsys):
    assert main(["derive"]) == 1
    assert "exactly one" in capsys.readouterr().err


def test_cli_derive_report(capsys):
    assert main(["derive", "--preset", "swap-holonomic"]) == 0
    out = capsys.readouterr().out
    # report values equal the library values through the same formatting
    assert f"{200.333333:.6f}" in out  # required pair shift (MHz)
    assert "4.030" in out  # separation (um)
    assert f"{-1 / 3:+.6f}" in out  # omega_eff (MHz)
    assert "21.21" in out


def test_cli_derive_flags_degenerate(capsys, tmp_path):
    cfg = preset("swap-holonomic")
    cfg["drive"]["delta1_mhz"] = cfg["drive"]["delta0_mhz"]
    path = tmp_path / "deg.yaml"
    with open(path, "w") as f:
        yaml.safe_dump(cfg, f)
    assert main(["derive", "--config", str(path)]) == 0
    out = capsys.readouterr().out
    assert "WARNING: omega_eff = 0" in out


def test_cli_swap_writes_deterministic_files(tmp_path, capsys):
    out1 = tmp_path / "a"
    out2 = tmp_path / "b"
    args = ["swap", "--preset", "swap-holonomic", "--points", "41", "--grid", "2"]
    assert main(args + ["--out", str(out1)]) == 0
    assert main(args + ["--out", str(out2)]) == 0
    csv1 = (out1 / "swap_timeseries.csv").read_text()
    csv2 = (out2 / "swap_timeseries.csv").read_text()
    assert csv1 == csv2  # byte-identical data
    man1 = json.loads((out1 / "manifest.json").read_text())
    man2 = json.loads((out2 / "manifest.json").read_text())
    man1.pop("timestamp"), man2.pop("timestamp")
    assert man1 == man2
    assert man1["final_fidelity"] == pytest.approx(0.9966, abs=0.003)
    header = [l for l in csv1.splitlines() if l.startswith("#")]
    assert any("config_hash" in l for l in header)
    cols = next(l for l in csv1.splitlines() if not l.startswith("#"))
    assert cols.split(",") == [
        "time_us", "fidelity", "p00", "p01", "p10", "p11", "prr",
        "avg_fidelity",
    ]


def test_cli_swap_rr_population_bounded(tmp_path):
    out = tmp_path / "c"
    main(["swap", "--preset", "swap-holonomic", "--points", "41",
          "--out", str(out)])
    rows = [
        l.split(",") for l in (out / "swap_timeseries.csv").read_text().splitlines()
        if not l.startswith("#")
    ][1:]
    prr = np.array([float(r[6]) for r in rows])
    assert np.all(prr <= 1.0) and prr.max() > 0.1  # the pair state works


def test_cli_sweep_doppler_small(tmp_path):
    out = tmp_path / "d"
    cfg = preset("scan-doppler")
    cfg["sweep"]["temperature_uk"] = [10.0]
    path = out / "cfg.yaml"
    path.parent.mkdir(parents=True)
    with open(path, "w") as f:
        yaml.safe_dump(cfg, f)
    assert main(["sweep", "--which", "doppler", "--config", str(path),
                 "--samples", "2", "--out", str(out), "--mode", "holonomic"]) == 0
    data = (out / "sweep_doppler-holonomic.csv").read_text()
    assert "temperature_uk,fidelity_mean,fidelity_se,sigma_delta_mhz" in data


def test_cli_fredkin(tmp_path):
    out = tmp_path / "e"
    assert main(["fredkin", "--preset", "fredkin-holonomic", "--points", "7",
                 "--out", str(out)]) == 0
    man = json.loads((out / "manifest.json").read_text())
    assert man["gate_fidelity"] == pytest.approx(0.9944, abs=0.005)
    table = (out / "fredkin_truth_table.csv").read_text()
    assert "input,to_000" in table and "leakage" in table


def test_cli_rejects_bad_config(tmp_path, capsys):
    path = tmp_path / "bad.yaml"
    cfg = preset("swap-holonomic")
    cfg["typo_section"] = 1
    with open(path, "w") as f:
        yaml.safe_dump(cfg, f)
    assert main(["derive", "--config", str(path)]) == 1
    assert "unknown configuration key" in capsys.readouterr().err


def test_cli_fredkin_requires_control(capsys):
    assert main(["fredkin", "--preset", "swap-holonomic"]) == 1
    assert "control" in capsys.readouterr().err
