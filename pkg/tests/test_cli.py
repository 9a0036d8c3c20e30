import json
import subprocess
import sys
from importlib import resources

import pytest
import yaml

from heraldpdc.cli import main
from heraldpdc.config import ExperimentConfig, load_config
from heraldpdc.errors import ConfigError


def default_dict():
    return yaml.safe_load(resources.files("heraldpdc").joinpath("data/reference.yaml").read_text())


def write_cfg(path, data):
    path.write_text(yaml.safe_dump(data))
    return str(path)


def test_budget_reports_83_percent(tmp_path, capsys):
    assert main(["budget", "--out", str(tmp_path)]) == 0
    doc = json.loads((tmp_path / "budget.json").read_text())
    assert round(doc["heralding_efficiency"], 2) == 0.83
    assert round(doc["eta_d_wide"], 2) == 0.31
    assert doc["schema"].startswith("budget/")
    assert json.loads(capsys.readouterr().out)["subcommand"] == "budget"


def test_tuning_curve_byte_identical(tmp_path):
    a, b = tmp_path / "a", tmp_path / "b"
    assert main(["tuning-curve", "--out", str(a)]) == 0
    assert main(["tuning-curve", "--out", str(b)]) == 0
    for name in ("tuning_curves.csv", "tuning_curves.json"):
        assert (a / name).read_bytes() == (b / name).read_bytes()
    first = (a / "tuning_curves.csv").read_text().splitlines()[0]
    assert first.startswith("# schema=tuning_curve/")


def test_simulate_seed_contract(tmp_path):
    a, b = tmp_path / "a", tmp_path / "b"
    assert main(["simulate", "--out", str(a), "--seed", "5"]) == 0
    assert main(["simulate", "--out", str(b), "--seed", "6"]) == 0
    ra = json.loads((a / "counts.json").read_text())
    rb = json.loads((b / "counts.json").read_text())
    assert ra.keys() == rb.keys()
    assert (ra["trigger_counts"], ra["coincidences"]) != (rb["trigger_counts"], rb["coincidences"])
    assert ra["seed"] == 5 and ra["config"]["seed"] == 5


def test_config_round_trip(tmp_path):
    assert main(["acceptance", "--out", str(tmp_path)]) == 0
    doc = json.loads((tmp_path / "acceptance.json").read_text())
    assert ExperimentConfig.from_dict(doc["config"]) == load_config()
    assert doc["tool_version"]


def test_unknown_key_named(tmp_path):
    data = default_dict()
    data["pump"]["wavelenght"] = 390.0
    with pytest.raises(ConfigError, match="wavelenght"):
        load_config(write_cfg(tmp_path / "c.yaml", data))
    data = default_dict()
    data["extra_section"] = {}
    with pytest.raises(ConfigError, match="extra_section"):
        load_config(write_cfg(tmp_path / "d.yaml", data))


def test_missing_filter_rejected(tmp_path):
    data = default_dict()
    del data["filters"]["F3"]
    with pytest.raises(ConfigError, match="F3"):
        load_config(write_cfg(tmp_path / "c.yaml", data))


def test_error_json_and_exit_code(tmp_path, capsys):
    data = default_dict()
    data["crystal"]["sellmeier_set"] = "no-such-set"
    rc = main(["budget", "--config", write_cfg(tmp_path / "c.yaml", data), "--out", str(tmp_path)])
    assert rc != 0
    err = json.loads(capsys.readouterr().err)
    assert err["error"] == "ConfigError" and "no-such-set" in err["message"]


def test_inline_sellmeier_set(tmp_path):
    data = default_dict()
    data["sellmeier_sets"] = {"mine": {"ordinary": [2.7359, 0.01878, 0.01822, 0.01354],
                                       "extraordinary": [2.3753, 0.01224, 0.01667, 0.01516]}}
    data["crystal"]["sellmeier_set"] = "mine"
    cfg = load_config(write_cfg(tmp_path / "c.yaml", data))
    assert cfg.sellmeier().id == "mine"
    assert 29.0 < cfg.cut().cut_angle < 32.0


def test_grid_scale_override():
    cfg = load_config().with_overrides(grid_scale=2)
    assert cfg.grid.n_points == 721


def test_spectrum_and_dips_write_outputs(tmp_path):
    for cmd in ("spectrum", "hom", "rt"):
        assert main([cmd, "--out", str(tmp_path)]) == 0
    for name in ("joint_spectrum.csv", "marginal_F1_1nm.csv", "marginal_F1_10nm.csv", "spectrometer_F1_1nm.csv",
                 "spectrum.json", "hom_dip.csv", "hom_dip.json", "rt_dip.csv", "rt_dip.json"):
        assert (tmp_path / name).exists(), name
    rt = json.loads((tmp_path / "rt_dip.json").read_text())
    assert rt["visibility_at_zero"] == pytest.approx(0.78, abs=1e-9)


def test_module_entry_point(tmp_path):
    out = subprocess.run([sys.executable, "-m", "heraldpdc.cli", "budget", "--out", str(tmp_path)],
                         capture_output=True, text=True, check=True)
    assert json.loads(out.stdout)["subcommand"] == "budget"
