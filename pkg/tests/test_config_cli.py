import json
from pathlib import Path

import numpy as np
import pytest

from nsp_outflow import Case, ConfigError
from nsp_outflow.cli import main
from nsp_outflow.config import from_dict, load_config, preset, save_config
from nsp_outflow.runner import run_simulation, verify_manifest


def test_empty_config_file_gives_defaults(tmp_path):
    path = tmp_path / "empty.json"
    path.write_text("")
    cfg = load_config(path)
    assert cfg.label == "caseIV-2"
    assert cfg.gas.gamma == 3.0
    assert cfg.rarefaction.eps == 0.1
    assert cfg.sim.cfl == 0.5


def test_config_round_trip(tmp_path):
    cfg = preset("caseIII-2")
    path = tmp_path / "cfg.json"
    save_config(cfg, path)
    again = load_config(path)
    assert again.to_dict() == cfg.to_dict()


def test_unknown_keys_rejected():
    with pytest.raises(ConfigError, match="unknown top-level"):
        from_dict({"gasses": {}})
    with pytest.raises(ConfigError, match="unknown keys in section"):
        from_dict({"gas": {"gamm": 3.0}})


def test_invalid_physics_names_precondition():
    with pytest.raises(Exception, match="outflow requires u_b < 0"):
        from_dict({"boundary": {"u_b": 0.5}})


def test_unsupported_pattern_rejected_when_simulated():
    # supersonic incoming data are classifiable but not simulable
    cfg = from_dict({"far_field": {"rho_plus": 1.0, "u_plus": -2.0},
                     "boundary": {"u_b": -3.0}})
    assert cfg.classification().case is Case.UNSUPPORTED
    with pytest.raises(ConfigError, match="not simulable|layer\\+fan"):
        cfg.make_background()


@pytest.mark.parametrize(
    "name,case",
    [
        ("caseIV-2", Case.IV_2),
        ("caseIII-2", Case.III_2),
        ("pure-rarefaction", Case.IV_1),
        ("pure-boundary-layer", Case.II),
    ],
)
def test_presets_classify_as_advertised(name, case):
    cfg = preset(name)
    assert cfg.classification().case is case


def test_pure_presets_are_degenerate():
    from nsp_outflow.phase_plane import wave_strengths

    cfg = preset("pure-rarefaction")
    cls = cfg.classification()
    ws = wave_strengths(cls.transonic, cfg.far_field, cfg.boundary, cfg.gas)
    assert ws.delta_tilde == 0.0
    cfg = preset("pure-boundary-layer")
    cls = cfg.classification()
    ws = wave_strengths(cls.transonic, cfg.far_field, cfg.boundary, cfg.gas)
    assert ws.delta_r == pytest.approx(0.0, abs=1e-13)
    assert ws.delta_bar == pytest.approx(0.0, abs=1e-13)


def test_quasineutral_preset_is_constant_background():
    cfg = preset("quasineutral-sanity")
    assert cfg.background == "constant"
    assert cfg.classification() is None
    assert cfg.sim.max_steps == 10000


def test_unknown_preset():
    with pytest.raises(ConfigError):
        preset("caseV")


# ---------------------------------------------------------------------------
# CLI surface
# ---------------------------------------------------------------------------


def test_cli_classify_preset(capsys):
    assert main(["classify", "--preset", "caseIV-2"]) == 0
    out = capsys.readouterr().out
    assert "IV-2" in out
    assert "rho_b: 0.2" in out
    assert "delta_tilde=0.4" in out


def test_cli_classify_flag_overrides(capsys):
    assert main(["classify", "--preset", "caseIV-2", "--u-b", "-0.2"]) == 0
    assert "IV-1" in capsys.readouterr().out


def test_cli_rejects_inflow(capsys):
    code = main(["classify", "--u-b", "0.5"])
    assert code == 1
    report = json.loads(capsys.readouterr().out)
    assert report["status"] == "failed"
    assert "u_b < 0" in report["reason"]


def test_cli_usage_error_exit_two(capsys):
    assert main(["bogus"]) == 2
    assert main(["classify", "--no-such-flag"]) == 2


def test_cli_build_profiles(tmp_path, capsys):
    out = tmp_path / "prof"
    assert main(["build-profiles", "--preset", "caseIV-2", "--out", str(out),
                 "--N", "200", "--L", "100"]) == 0
    for name in ("boundary_layer.csv", "rarefaction.csv", "phase_curves.csv",
                 "phase_markers.csv"):
        assert (out / "profiles" / name).exists()
    markers = (out / "profiles" / "phase_markers.csv").read_text().splitlines()
    assert markers[0] == "name,v,u"
    names = {line.split(",")[0] for line in markers[1:]}
    assert names == {"far_field", "transonic", "boundary"}
    # canonical marker values: v+ = 1, v* = 2.5, u_b = -0.8
    rows = {line.split(",")[0]: line.split(",")[1:] for line in markers[1:]}
    assert float(rows["far_field"][0]) == pytest.approx(1.0)
    assert float(rows["transonic"][0]) == pytest.approx(2.5)
    assert float(rows["boundary"][1]) == pytest.approx(-0.8)


def test_cli_simulate_quasineutral(tmp_path, capsys):
    out = tmp_path / "run"
    code = main(["simulate", "--preset", "quasineutral-sanity", "--out", str(out),
                 "--N", "64", "--L", "6.4", "--t-final", "5.0"])
    assert code == 0
    text = capsys.readouterr().out
    assert "drift" in text
    drift = float(text.split("drift:")[1].strip())
    assert drift <= 1e-11
    manifest = json.loads((out / "run_manifest.json").read_text())
    assert manifest["status"] == "completed"
    assert verify_manifest(out)


def test_cli_verify_lemmas_bl_decay(capsys):
    assert main(["verify-lemmas", "--preset", "caseIV-2", "--lemma", "2.1"]) == 0
    out = capsys.readouterr().out
    assert "bl-decay: PASS" in out


def test_run_artifacts_deterministic(tmp_path):
    import hashlib

    cfg_data = preset("caseIV-2").to_dict()
    cfg_data["solver"]["t_final"] = 2.0
    cfg_data["grid"] = {"L": 400.0, "N": 1000}
    digests = []
    for sub in ("a", "b"):
        cfg = from_dict(cfg_data)
        bg = cfg.make_background()
        out = tmp_path / sub
        run_simulation(cfg.gas, cfg.grid, cfg.sim, bg,
                       classification=cfg.classification(),
                       out_dir=out, config_echo=cfg.to_dict())
        digests.append({
            str(p.relative_to(out)): hashlib.sha256(p.read_bytes()).hexdigest()
            for p in sorted(out.rglob("*.csv"))
        })
    assert digests[0] == digests[1]
    assert len(digests[0]) >= 5


def test_run_manifest_lists_all_files(tmp_path):
    cfg_data = preset("caseIV-2").to_dict()
    cfg_data["solver"]["t_final"] = 1.0
    cfg_data["grid"] = {"L": 400.0, "N": 800}
    cfg = from_dict(cfg_data)
    out = tmp_path / "run"
    run_simulation(cfg.gas, cfg.grid, cfg.sim, cfg.make_background(),
                   classification=cfg.classification(),
                   out_dir=out, config_echo=cfg.to_dict())
    manifest = json.loads((out / "run_manifest.json").read_text())
    listed = set(manifest["files"])
    on_disk = {str(p.relative_to(out)) for p in out.rglob("*.csv")}
    assert on_disk == listed
    assert manifest["classification"]["case"] == "IV-2"
    assert verify_manifest(out)


def test_timeseries_columns_contract(tmp_path):
    from nsp_outflow.runner import TIMESERIES_COLUMNS

    cfg_data = preset("caseIV-2").to_dict()
    cfg_data["solver"]["t_final"] = 1.0
    cfg_data["grid"] = {"L": 400.0, "N": 800}
    cfg = from_dict(cfg_data)
    out = tmp_path / "run"
    run_simulation(cfg.gas, cfg.grid, cfg.sim, cfg.make_background(),
                   classification=cfg.classification(),
                   out_dir=out, config_echo=cfg.to_dict())
    header = (out / "timeseries.csv").read_text().splitlines()[0]
    assert header == ",".join(TIMESERIES_COLUMNS)
    assert header.split(",")[0] == "t"
    snap = next((out / "snapshots").glob("snapshot_*.csv"))
    assert snap.read_text().splitlines()[0] == "x,rho_i,u_i,rho_e,u_e,E,rho_hat,u_hat"


def test_failed_run_leaves_failure_manifest(tmp_path):
    from nsp_outflow import PositivityError
    from nsp_outflow.profiles import ConstantBackground
    from nsp_outflow.solver import Grid, SimConfig, initial_data

    # near-vacuum wall gradient provokes a positivity abort; the run must
    # leave a failure manifest plus the last valid snapshot behind
    gas = preset("quasineutral-sanity").gas
    grid = Grid(L=40.0, N=400)
    sim = SimConfig(cfl=0.5, t_final=10.0)

    class Sabotaged(ConstantBackground):
        def evaluate(self, x, t):
            vals = super().evaluate(x, t)
            if np.ndim(x) > 0:
                vals.rho[1] = 0.2  # wall-adjacent crater
            return vals

    out = tmp_path / "run"
    with pytest.raises(PositivityError):
        run_simulation(gas, grid, sim, Sabotaged(rho0=1.0, u0=-0.8),
                       out_dir=out, config_echo={})
    manifest = json.loads((out / "run_manifest.json").read_text())
    assert manifest["status"] == "failed"
    assert "failure" in manifest
    assert (out / "snapshots" / "failure_snapshot.csv").exists()


def test_simulate_zero_final_time_initial_snapshot_only(tmp_path):
    cfg_data = preset("caseIV-2").to_dict()
    cfg_data["solver"]["t_final"] = 0.0
    cfg_data["grid"] = {"L": 400.0, "N": 800}
    cfg = from_dict(cfg_data)
    out = tmp_path / "run"
    result = run_simulation(cfg.gas, cfg.grid, cfg.sim, cfg.make_background(),
                            classification=cfg.classification(),
                            out_dir=out, config_echo=cfg.to_dict())
    assert result.n_steps == 0
    assert len(list((out / "snapshots").glob("snapshot_*.csv"))) == 1
