from __future__ import annotations

import csv
import json
import math

import pytest

from qdphonon import cli, scenario
from qdphonon.errors import ConfigError

SMALL_CAVITY = {
    "name": "small",
    "mode": "cavity-full",
    "pulse": {"amplitude": 10.0, "width": 2.0, "center": 0.0},
    "system": {"g": 0.1, "delta": 0.0, "n_trunc": 6},
    "grid": {"t_max": 4.0, "dt": 0.002, "stride": 100},
}


@pytest.fixture
def out(tmp_path, monkeypatch):
    monkeypatch.setenv(scenario.OUTPUT_ENV, str(tmp_path / "out"))
    return tmp_path / "out"


def test_every_preset_validates():
    names = scenario.preset_names()
    assert {"fig1a", "fig1b", "fig3", "fig4", "fig7", "fig8", "vacuum-rabi"} <= set(names)
    for n in names:
        assert scenario.check(n)["valid"], n


def test_presets_flag_unspecified_values():
    for n in ("fig1a", "fig3", "fig7"):
        cfg = scenario.load_config(n)
        assert "pulse.amplitude" in cfg.paper_unspecified
        assert "pulse.center" in cfg.paper_unspecified
    assert "system.g" in scenario.load_config("fig3").paper_unspecified


def test_fig3_variants():
    runs = scenario.load_config("fig3").expand()
    assert [r.system.delta for r in runs] == [0.0, 1.0]
    assert all(r.pulse.width == 10.0 and r.material.temperature == 30.0 and r.system.n_trunc == 90 for r in runs)


def test_check_reports_units():
    rep = scenario.check("fig3")
    assert rep["resolved"]["cutoff_rad_per_ps"] == pytest.approx(0.934, abs=5e-4)
    assert rep["warnings"] == []


def test_check_names_width_field():
    rep = scenario.check({"mode": "exciton-only", "pulse": {"width": 0.0}})
    assert not rep["valid"]
    assert rep["errors"][0]["field"] == "PulseParams.width"


def test_check_warns_short_window():
    rep = scenario.check({"mode": "exciton-only", "pulse": {"width": 10.0, "center": 30.0},
                          "grid": {"t_max": 40.0}})
    assert rep["valid"] and rep["warnings"]


@pytest.mark.parametrize("bad,field", [
    ({"mode": "quantum"}, "mode"),
    ({"frobnicate": 1}, "frobnicate"),
    ({"grid": {"stride": 0}}, "grid.stride"),
    ({"grid": {"t_max": 1.0005, "dt": 0.001}}, "grid.t_max"),
    ({"system": {"n_trunc": 0}}, "SystemParams.n_trunc"),
    ({"system": {"g": "big"}}, "system.g"),
    ({"material": {"temperature": -3}}, "MaterialParams.temperature"),
    ({"initial": "e7", "system": {"n_trunc": 3}}, "initial"),
    ({"pulse": {"area": 1.0, "amplitude": 1.0}}, "pulse.area"),
    ({"variants": [{"label": "x", "system": {"delta": 1}}, {"label": "x"}]}, "variants"),
])
def test_config_errors_name_field(bad, field):
    with pytest.raises(ConfigError) as exc:
        scenario.ScenarioConfig.from_dict(bad)
    assert exc.value.field == field


def test_pulse_area_key():
    cfg = scenario.ScenarioConfig.from_dict({"pulse": {"area": math.pi, "width": 5.0}})
    assert cfg.pulse.amplitude == pytest.approx(math.pi * math.sqrt(2))


def test_config_dict_round_trip():
    cfg = scenario.load_config("fig7")
    again = scenario.ScenarioConfig.from_dict(cfg.to_dict())
    assert again == cfg
    assert again.config_hash() == cfg.config_hash()


def test_run_deterministic(out, tmp_path):
    a = scenario.run(SMALL_CAVITY)[0]
    b = scenario.run(SMALL_CAVITY, out=tmp_path / "again")[0]
    assert (out / "small.csv").read_bytes() == (tmp_path / "again" / "small.csv").read_bytes()
    ma = json.loads((out / "small.manifest.json").read_text())
    mb = json.loads((tmp_path / "again" / "small.manifest.json").read_text())
    ma.pop("wall_time_s"), mb.pop("wall_time_s")
    assert ma == mb
    assert a.manifest.status == "ok" and b.manifest.outputs == a.manifest.outputs
    assert not list(out.glob(".*.tmp"))


def test_manifest_contents(out):
    res = scenario.run("vacuum-rabi")[0]
    m = json.loads((out / "vacuum-rabi.manifest.json").read_text())
    for key in ("config", "tool_version", "wall_time_s", "invariants", "status", "config_hash", "notes"):
        assert key in m
    assert m["invariants"]["max_trace_drift"] <= 1e-9
    assert m["status"] == "ok"
    assert res.manifest.config["system"]["n_trunc"] == 5


def test_exciton_csv_columns(out):
    cfg = {"name": "ex", "mode": "exciton-only", "pulse": {"amplitude": 10.0, "width": 2.0, "center": 0.0},
           "grid": {"t_max": 10.0, "dt": 0.001, "stride": 1000}}
    scenario.run(cfg)
    rows = list(csv.reader((out / "ex.csv").open()))
    assert rows[0] == ["t", "N_e", "inversion", "ReP", "ImP"]
    assert len(rows) == 12


def test_kernel_only_bit_identical(out, tmp_path):
    cfg = dict(SMALL_CAVITY, name="k")
    scenario.kernel_only(cfg)
    scenario.kernel_only(cfg, out=tmp_path / "b")
    a = (out / "k_kernel.csv").read_bytes()
    assert a == (tmp_path / "b" / "k_kernel.csv").read_bytes()
    assert a.splitlines()[6] == b"t,ReK,ImK,ReGamma,ImGamma"


def test_kernel_cache_reused(out):
    scenario.run(SMALL_CAVITY)
    cached = list((out / ".kernel_cache").glob("kernel_*.csv"))
    assert len(cached) == 1
    scenario._TABLES.clear()
    before = cached[0].stat().st_mtime_ns
    scenario.run(SMALL_CAVITY)
    assert cached[0].stat().st_mtime_ns == before


def test_sweep_delta(out):
    ms = scenario.sweep(SMALL_CAVITY, "Δ", [0.0, 1.0])
    assert [m.config["system"]["delta"] for m in ms] == [0.0, 1.0]
    summary = out / "sweep_small_delta" / "sweep_delta.csv"
    rows = list(csv.DictReader(summary.open()))
    assert len(rows) == 2 and rows[1]["delta_vs_previous_n_mean"] != ""


def test_sweep_n_trunc_convergence(out):
    ms = scenario.sweep(SMALL_CAVITY, "N_trunc", [4, 6, 8])
    deltas = [m.convergence["max_abs_delta_n_mean"] for m in ms[1:]]
    assert deltas[1] < deltas[0]


def test_sweep_empty(out):
    assert scenario.sweep(SMALL_CAVITY, "A", []) == []
    text = (out / "sweep_small_A" / "sweep_A.csv").read_text()
    assert text.strip() == ",".join(scenario.SUMMARY_COLUMNS)


def test_sweep_unknown_axis():
    with pytest.raises(ConfigError):
        scenario.sweep(SMALL_CAVITY, "mass", [1.0])


def test_cli_exit_codes(out, tmp_path, capsys):
    bad = tmp_path / "bad.json"
    bad.write_text(json.dumps({"pulse": {"width": 0}}))
    assert cli.main(["check", str(bad)]) == cli.EXIT_CONFIG
    assert cli.main(["run", str(bad)]) == cli.EXIT_CONFIG
    assert cli.main(["run", "no-such-preset"]) == cli.EXIT_CONFIG
    good = tmp_path / "good.json"
    good.write_text(json.dumps(SMALL_CAVITY))
    assert cli.main(["check", str(good)]) == cli.EXIT_OK
    assert cli.main(["run", str(good)]) == cli.EXIT_OK
    assert cli.main(["kernel", str(good)]) == cli.EXIT_OK
    assert cli.main(["sweep", str(good), "--axis", "g", "--values", "0.05,0.1"]) == cli.EXIT_OK
    assert cli.main(["sweep", str(good), "--axis", "nope", "--values", "1"]) == cli.EXIT_CONFIG
    assert cli.main(["presets"]) == cli.EXIT_OK
    assert (out / "small.csv").exists()
    assert "fig3" in capsys.readouterr().out


def test_cli_numerical_failure_exit_code(out, tmp_path):
    cfg = dict(SMALL_CAVITY, pulse={"amplitude": 0.0}, system={"g": 500.0, "n_trunc": 8},
               grid={"t_max": 4.0, "dt": 0.05, "stride": 1}, initial="e0", phonons=False)
    path = tmp_path / "blow.json"
    path.write_text(json.dumps(cfg))
    assert cli.main(["run", str(path)]) == cli.EXIT_NUMERICAL


def test_output_env_override(tmp_path, monkeypatch):
    monkeypatch.setenv(scenario.OUTPUT_ENV, str(tmp_path / "elsewhere"))
    scenario.run(dict(SMALL_CAVITY, output=str(tmp_path / "ignored")))
    assert (tmp_path / "elsewhere" / "small.csv").exists()
    assert not (tmp_path / "ignored").exists()
