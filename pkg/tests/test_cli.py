import json
import math

import numpy as np
import pytest

from qcheshire import model as m
from qcheshire.cli import main, parse_scenario, simulate_one
from qcheshire.config import ExperimentConfig, RunConfig
from qcheshire.fitting import fit_interferogram
from qcheshire.io import read_interferogram
from qcheshire.reproduce import reproduce
from qcheshire.selftest import SUITES, run_selftest


def ideal_config(tmp_path):
    p = tmp_path / "ideal.json"
    p.write_text(RunConfig(ExperimentConfig.ideal()).to_json())
    return str(p)


def test_simulate_prep_noise_off_is_constant(tmp_path, capsys):
    assert main(["simulate", "--config", ideal_config(tmp_path), "--scenario", "prep", "--noise", "off",
                 "--out", str(tmp_path)]) == 0
    ifg = read_interferogram(tmp_path / "prep_I.csv")
    assert np.max(np.abs(ifg.value - 1 / 9)) <= 1e-15


def test_simulate_weak_dc_contrast_is_alpha(tmp_path):
    main(["simulate", "--config", ideal_config(tmp_path), "--scenario", "weak:dc:I", "--noise", "off",
          "--out", str(tmp_path)])
    f = fit_interferogram(read_interferogram(tmp_path / "weak_dc_I_I.csv"), fixed_omega=1.0)
    s = math.sin(math.pi / 18)
    # exact contrast 2s/(1+s^2) equals alpha * c_empty (= 1) to first order
    assert f.b / f.i0 == pytest.approx(2 * s / (1 + s * s), abs=1e-12)
    assert f.b / f.i0 == pytest.approx(math.pi / 9, abs=(math.pi / 9) ** 2)


def test_simulate_empty_front_contrast(tmp_path):
    main(["simulate", "--scenario", "empty:front", "--noise", "off", "--out", str(tmp_path)])
    f = fit_interferogram(read_interferogram(tmp_path / "empty_front.csv"))
    assert f.b / f.i0 == pytest.approx(0.57, abs=1e-9)


def test_simulate_deterministic_and_round_trips(tmp_path):
    a, b = tmp_path / "a", tmp_path / "b"
    for out in (a, b):
        assert main(["simulate", "--scenario", "weak:rf:III", "--scenario", "empty:rear", "--seed", "5",
                     "--out", str(out)]) == 0
    for name in ("weak_rf_III_III.csv", "empty_rear.csv"):
        assert (a / name).read_bytes() == (b / name).read_bytes()
    cfg = ExperimentConfig().with_seed(5)
    mem = simulate_one(parse_scenario("weak:rf:III", cfg), cfg, noise=True)
    assert read_interferogram(a / "weak_rf_III_III.csv").equals(mem)


def test_output_dir_env_override(tmp_path, monkeypatch):
    monkeypatch.setenv("QCHESHIRE_OUTPUT_DIR", str(tmp_path / "env"))
    assert main(["simulate", "--scenario", "prep:II", "--noise", "off"]) == 0
    assert (tmp_path / "env" / "prep_II.csv").exists()


def test_exit_codes(tmp_path, capsys):
    assert main(["simulate", "--scenario", "weak:xx:I"]) == 1
    with pytest.raises(SystemExit) as exc:
        main(["reproduce", "--target", "table9"])
    assert exc.value.code == 1
    with pytest.raises(SystemExit) as exc:
        main([])
    assert exc.value.code == 1
    bad = tmp_path / "bad.csv"
    bad.write_text("chi_rad,counts,sigma\n0.0,1,1\n0.5,oops,1\n")
    assert main(["fit", str(bad)]) == 2
    assert "line 3" in capsys.readouterr().err
    cfg = tmp_path / "c.json"
    cfg.write_text('{"experiment": {"alpha_rot": -1}}')
    assert main(["simulate", "--config", str(cfg)]) == 2
    assert main(["fit", str(tmp_path / "missing.csv")]) == 2


def test_fit_noiseless_exact(tmp_path, capsys):
    main(["simulate", "--scenario", "empty:outer", "--noise", "off", "--out", str(tmp_path)])
    capsys.readouterr()
    assert main(["fit", str(tmp_path / "empty_outer.csv"), "--fix-omega", "1.0"]) == 0
    d = json.loads(capsys.readouterr().out)
    assert d["contrast"] == pytest.approx(0.53, abs=1e-12)
    assert d["omega_fixed"] is True


def test_fit_realistic_prep_contrast_small(tmp_path, capsys):
    main(["simulate", "--scenario", "prep:III", "--seed", "3", "--out", str(tmp_path)])
    capsys.readouterr()
    main(["fit", str(tmp_path / "prep_III.csv"), "--fix-omega", "1.0"])
    d = json.loads(capsys.readouterr().out)
    assert d["contrast"] <= 0.04 + 3 * d["contrast_error"]


def test_reproduce_table2_ideal_identity(tmp_path, capsys):
    assert main(["reproduce", "--target", "table2", "--mode", "ideal", "--out", str(tmp_path)]) == 0
    rep = json.loads((tmp_path / "table2_ideal.json").read_text())
    assert list(rep)[:5] == ["target", "mode", "seed", "runs", "config_hash"]
    v = np.array(rep["weak_values"]["values"])
    assert np.max(np.abs(v - np.diag(np.diag(v)))) <= 1e-9
    assert rep["flags"]["weak_values_theory"] is True
    assert (tmp_path / "table2_ideal.txt").read_text().startswith("target: table2")


def test_reproduce_table3_ideal_pattern():
    rep = reproduce("table3", mode="ideal")
    v = np.array(rep["mean_intensity_ratios"]["values"])
    want = np.array([[1.0305, 0.9695, 1.0305], [1.0, 0.9, 1.0], [1.0305, 0.9695, 1.0305]])
    assert np.max(np.abs(v - want)) <= 0.006
    assert v[1, 1] == pytest.approx(0.9, abs=1e-12)


def test_reproduce_fig8_csv(tmp_path):
    assert main(["reproduce", "--target", "fig8", "--out", str(tmp_path)]) == 0
    lines = (tmp_path / "fig8_realistic.csv").read_text().splitlines()
    assert lines[0] == "current_A,contrast"
    rows = np.array([[float(x) for x in l.split(",")] for l in lines[1:]])
    assert rows[np.argmin(rows[:, 1]), 0] == pytest.approx(1.5, abs=0.02)


def test_reproduce_reports_are_deterministic():
    assert json.dumps(reproduce("table1", seed=4)) == json.dumps(reproduce("table1", seed=4))


@pytest.mark.parametrize("target", ["table1", "fig6", "fig7"])
def test_reproduce_other_targets(target):
    rep = reproduce(target, mode="realistic", seed=1)
    assert rep["target"] == target
    assert "empty_contrasts" in rep


def test_selftest_passes(capsys):
    assert main(["selftest"]) == 0
    out = capsys.readouterr().out
    assert out.count("PASS") == len(SUITES)


@pytest.mark.parametrize("suite", SUITES)
def test_selftest_fault_injection_names_suite(suite, capsys):
    assert main(["selftest", "--inject-fault", suite]) == 3
    out = capsys.readouterr().out
    failed = [l for l in out.splitlines() if l.startswith("FAIL")]
    assert len(failed) == 1 and suite in failed[0]


def test_selftest_runtime():
    results = run_selftest()
    assert sum(r.seconds for r in results) < 60
