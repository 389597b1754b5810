import numpy as np
import pytest

from qcheshire import model as m
from qcheshire.config import CountingModel, ExperimentConfig, RunConfig, ConfigError
from qcheshire.io import DataError, format_csv, parse_csv, published_values, read_interferogram, write_interferogram
from qcheshire.synth import poissonize, prep_scenario, sweep_ideal, weak_scenario

CFG = ExperimentConfig()


def ifg_expected():
    return sweep_ideal(weak_scenario(m.Kind.DC, 0, CFG), m.Selection(), CFG)


@pytest.mark.parametrize("fmt", ["csv", "json"])
def test_round_trip_expected_and_counts(tmp_path, fmt):
    for ifg in (ifg_expected(), poissonize(ifg_expected(), CFG.counting)):
        path = write_interferogram(ifg, tmp_path / f"a.{fmt}", fmt)
        assert read_interferogram(path).equals(ifg)


def test_csv_layout():
    text = format_csv(poissonize(ifg_expected(), CountingModel(4000, 2)))
    lines = text.split("\n")
    assert "\r" not in text and text.endswith("\n")
    meta = [l for l in lines if l.startswith("#")]
    assert {l.split("=")[0] for l in meta} >= {"# scenario", "# seed", "# config_hash", "# kind"}
    header = lines[len(meta)]
    assert header == "chi_rad,counts,sigma"
    assert "." not in lines[len(meta) + 1].split(",")[1]


def test_malformed_rows_report_line_numbers():
    good = "# scenario=x\nchi_rad,counts,sigma\n0.0,1,1.0\n"
    with pytest.raises(DataError, match="line 4"):
        parse_csv(good + "1.0,abc,1.0\n")
    with pytest.raises(DataError, match="line 4"):
        parse_csv(good + "1.0,2\n")
    with pytest.raises(DataError, match="line 1"):
        parse_csv("chi,counts\n0,1\n")
    with pytest.raises(DataError, match="sigma"):
        parse_csv(good + "1.0,2,0.0\n")
    with pytest.raises(DataError):
        parse_csv("# only=meta\n")


def test_config_round_trip():
    run = RunConfig(CFG.with_seed(42), output_dir="x", format="json")
    assert RunConfig.from_json(run.to_json()) == run
    assert CFG.digest() == ExperimentConfig().digest()
    assert CFG.digest() != CFG.with_seed(1).digest()


def test_config_rejects_bad_values():
    with pytest.raises(ConfigError):
        RunConfig.from_json('{"experiment": {"absorption": 2.0}}')
    with pytest.raises(ConfigError):
        RunConfig.from_json("[1, 2]")
    with pytest.raises(ConfigError):
        RunConfig.from_json('{"format": "xml"}')


def test_published_values_file_is_labelled():
    pub = published_values()
    assert "Published" in pub["_note"]
    assert np.shape(pub["table2_weak_values"]["values"]) == (3, 3)
    assert np.shape(pub["table1_prep_contrasts"]["values"]) == (3, 3)
