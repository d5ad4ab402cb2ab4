import json

import pytest

from landau_cylinder.cli import DEFAULT_CONFIG, main, resolve_config
from landau_cylinder.core import ConfigError


QUICK = {
    "experiment": {"T": 25.0, "min_fidelity": 0.0},
    "sweep": {"phi_min": 0.0, "phi_max": 3.141592653589793, "num": 3},
    "study": {"T_values": [25.0]},
    "eigen": {"n_max": 1, "j_max": 1},
}


def write_config(tmp_path, payload):
    p = tmp_path / "config.json"
    p.write_text(json.dumps(payload))
    return p


# --- config resolution -------------------------------------------------


def test_defaults_resolve():
    conf = resolve_config({})
    assert conf["physics"]["B"] == 1.0
    assert conf["experiment"]["kind"] == "ab_loop"


def test_default_config_is_self_consistent():
    resolve_config(json.loads(json.dumps(DEFAULT_CONFIG)))


def test_missing_physics_key_is_named():
    phys = {k: v for k, v in DEFAULT_CONFIG["physics"].items() if k != "B"}
    with pytest.raises(ConfigError, match=r"physics\.B"):
        resolve_config({"physics": phys})


def test_unknown_keys_are_named():
    with pytest.raises(ConfigError, match=r"physics\.zeta"):
        resolve_config({"physics": {**DEFAULT_CONFIG["physics"], "zeta": 1.0}})
    with pytest.raises(ConfigError, match="unknown section"):
        resolve_config({"physic": {}})


def test_type_and_range_diagnostics():
    with pytest.raises(ConfigError, match=r"experiment\.T"):
        resolve_config({"experiment": {"T": -3.0}})
    with pytest.raises(ConfigError, match=r"experiment\.kind"):
        resolve_config({"experiment": {"kind": "mystery"}})
    with pytest.raises(ConfigError, match=r"grid\.Nx"):
        resolve_config({"grid": {**DEFAULT_CONFIG["grid"], "Nx": 64.5}})
    with pytest.raises(ConfigError, match=r"study\.T_values\[1\]"):
        resolve_config({"study": {"T_values": [10.0, -1.0]}})
    with pytest.raises(ConfigError, match=r"sweep\.num"):
        resolve_config({"sweep": {"num": 1}})


def test_nonpositive_field_rejected_with_section():
    bad = {**DEFAULT_CONFIG["physics"], "B": -2.0}
    conf = resolve_config({"physics": bad})
    from landau_cylinder.cli import build_physics

    with pytest.raises(ConfigError, match="physics"):
        build_physics(conf)


# --- main() ----------------------------------------------------------------


def test_print_default_config(capsys):
    assert main(["--print-default-config"]) == 0
    out = capsys.readouterr().out
    assert resolve_config(json.loads(out))["physics"]["l"] == DEFAULT_CONFIG["physics"]["l"]


def test_no_command_shows_help(capsys):
    assert main([]) == 2


def test_missing_config_file(tmp_path, capsys):
    assert main(["--config", str(tmp_path / "absent.json"), "eigen"]) == 2


def test_invalid_json_config(tmp_path, capsys):
    p = tmp_path / "bad.json"
    p.write_text("{not json")
    assert main(["--config", str(p), "eigen"]) == 2


def test_eigen_output(tmp_path, capsys):
    cfgfile = write_config(tmp_path, QUICK)
    assert main(["--config", str(cfgfile), "--out", str(tmp_path), "eigen"]) == 0
    lines = (tmp_path / "eigen.csv").read_text().splitlines()
    assert lines[0].startswith("# config: ")
    embedded = json.loads(lines[0][len("# config: "):])
    assert embedded["physics"]["B"] == 1.0
    assert lines[1] == "n,j,kappa,y_center,energy,residual"
    assert len(lines) == 2 + 2 * 3  # (n_max+1)(2 j_max+1) rows
    first = lines[2].split(",")
    assert int(first[0]) == 0 and int(first[1]) == -1


def test_run_deterministic(tmp_path, capsys):
    cfgfile = write_config(tmp_path, QUICK)
    a, b = tmp_path / "a", tmp_path / "b"
    assert main(["--config", str(cfgfile), "--out", str(a), "run"]) == 0
    assert main(["--config", str(cfgfile), "--out", str(b), "run"]) == 0
    assert (a / "run.csv").read_bytes() == (b / "run.csv").read_bytes()
    assert (a / "run.json").read_bytes() == (b / "run.json").read_bytes()
    payload = json.loads((a / "run.json").read_text())
    assert payload["config"]["experiment"]["T"] == 25.0
    (result,) = payload["results"]
    assert result["kind"] == "ab_loop"
    assert abs(result["gamma_measured"] - result["gamma_predicted"]) < 0.1


def test_run_csv_column_order(tmp_path, capsys):
    cfgfile = write_config(tmp_path, QUICK)
    assert main(["--config", str(cfgfile), "--out", str(tmp_path), "run"]) == 0
    lines = (tmp_path / "run.csv").read_text().splitlines()
    assert lines[1] == "phi,phi_B,gamma_measured,gamma_predicted,fidelity,T,n,kind"
    cells = lines[2].split(",")
    assert cells[-1] == "ab_loop"
    # floats carry 17 significant digits and round-trip exactly
    assert float(cells[0]) == DEFAULT_CONFIG["physics"]["phi0"]


def test_sweep_output(tmp_path, capsys):
    cfgfile = write_config(tmp_path, QUICK)
    assert main(["--config", str(cfgfile), "--out", str(tmp_path), "--threads", "2", "sweep"]) == 0
    payload = json.loads((tmp_path / "sweep.json").read_text())
    assert abs(payload["slope"] - 1.0) < 1e-5
    lines = (tmp_path / "sweep.csv").read_text().splitlines()
    assert len(lines) == 2 + 3


def test_study_output(tmp_path, capsys):
    cfgfile = write_config(tmp_path, QUICK)
    assert main(["--config", str(cfgfile), "--out", str(tmp_path), "adiabatic-study"]) == 0
    lines = (tmp_path / "study.csv").read_text().splitlines()
    assert lines[1] == "T,gamma_error,infidelity,gamma_raw_error,discrepancy_norm"
    assert len(lines) == 3


def test_fig1_run_emits_both_rows(tmp_path, capsys):
    payload = dict(QUICK)
    payload["experiment"] = {"kind": "fig1", "T": 25.0, "phi_B": 0.5, "min_fidelity": 0.0}
    cfgfile = write_config(tmp_path, payload)
    assert main(["--config", str(cfgfile), "--out", str(tmp_path), "run"]) == 0
    results = json.loads((tmp_path / "run.json").read_text())["results"]
    assert [r["kind"] for r in results] == ["fig1_blue", "fig1_green"]
    assert results[0]["phi_B"] == pytest.approx(0.5)
    assert results[1]["phi_B"] == pytest.approx(-0.5)


def test_bad_threads_rejected(capsys):
    assert main(["--threads", "0", "verify"]) == 2
