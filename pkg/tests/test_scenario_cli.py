"""Scenario parsing, experiment orchestration and the CLI surface."""

import json
from pathlib import Path

import pytest

from celliot import cli, experiments
from celliot.scenario import (default_scenario, default_scenario_path,
                              normalize, parse_scenario, scenario_from_dict,
                              scenario_hash)
from celliot.types import ConfigurationError, Technology, ValidationError

MINIMAL = """
[city]
ue_count = 10

[traffic]
reporting_period_s = 30.0
packet_bytes = 12
"""


def write_scenario(tmp_path, text, name="scenario.toml"):
    path = tmp_path / name
    path.write_text(text)
    return path


# ---------------------------------------------------------------- scenario

def test_bundled_default_parses_and_round_trips():
    scenario = default_scenario()
    assert scenario.city.ue_count == 300
    assert scenario.traffic.packet_bytes == 12
    again = parse_scenario(default_scenario_path())
    assert normalize(scenario) == normalize(again)
    assert scenario_hash(scenario) == scenario_hash(again)
    # normalized form rebuilds to the same scenario
    raw = dict(normalize(scenario))
    raw.pop("name")
    rebuilt = scenario_from_dict(raw, name=scenario.name)
    assert scenario_hash(rebuilt) == scenario_hash(scenario)


def test_minimal_scenario_defaults(tmp_path):
    scenario = parse_scenario(write_scenario(tmp_path, MINIMAL))
    assert scenario.radio_for(Technology.EMTC).n_rb == 6
    assert scenario.radio_for(Technology.NBIOT).rbu == 1
    assert scenario.energy.battery_j == 18000.0


def test_missing_required_field_named(tmp_path):
    path = write_scenario(tmp_path, "[city]\nue_count = 10\n")
    with pytest.raises(ConfigurationError, match="reporting_period_s"):
        parse_scenario(path)


def test_unknown_key_rejected(tmp_path):
    path = write_scenario(tmp_path, MINIMAL + "\n[city2]\nx = 1\n")
    with pytest.raises(ConfigurationError, match="city2"):
        parse_scenario(path)
    path2 = write_scenario(tmp_path, MINIMAL.replace(
        "ue_count = 10", "ue_count = 10\nue_cuont = 3"), "typo.toml")
    with pytest.raises(ConfigurationError, match="ue_cuont"):
        parse_scenario(path2)


def test_rbu_exceeding_n_rb_rejected(tmp_path):
    path = write_scenario(tmp_path, MINIMAL + """
[radio.emtc]
n_rb = 2
rbu = 6
bandwidth_hz = 1.08e6
""")
    with pytest.raises(ValidationError, match="n_rb >= rbu"):
        parse_scenario(path)


def test_unsupported_scheduler_rejected(tmp_path):
    scenario_text = MINIMAL.replace(
        'packet_bytes = 12', 'packet_bytes = 12\nscheduler = "edf"')
    path = write_scenario(tmp_path, scenario_text, "sched.toml")
    with pytest.raises(ConfigurationError, match="round_robin"):
        parse_scenario(path)


# ------------------------------------------------------------- experiments

def small_spec(tmp_path, **kw):
    scenario = default_scenario()
    defaults = dict(name="latency_vs_indoor", scenario=scenario,
                    seeds=(3,), out_dir=tmp_path / "out",
                    axes={"indoor_ratio": [0.5]})
    defaults.update(kw)
    return experiments.ExperimentSpec(**defaults)


def test_unknown_experiment_rejected(tmp_path):
    with pytest.raises(ValidationError, match="unknown experiment"):
        small_spec(tmp_path, name="latency_vs_typo")
    with pytest.raises(ValidationError, match="jobs"):
        small_spec(tmp_path, jobs=0)


def test_run_experiment_writes_reports(tmp_path):
    result = experiments.run_experiment(small_spec(tmp_path))
    assert result.exit_code == 0
    out = tmp_path / "out"
    csv = (out / "latency_vs_indoor.csv").read_text().splitlines()
    assert csv[0] == experiments.CSV_SCHEMA_LINE
    assert csv[1].startswith("indoor_ratio,technology,seed")
    assert len(csv) == 2 + len(result.rows)
    summary = json.loads((out / "latency_vs_indoor_summary.json").read_text())
    assert summary["rows"] == len(result.rows)
    manifest = json.loads(
        (out / "latency_vs_indoor_manifest.json").read_text())
    assert manifest["scenario_hash"] == scenario_hash(default_scenario())
    assert set(manifest["tables"]) == {"tbs", "coverage", "bler"}


def test_empty_sweep_gives_header_only_csv(tmp_path):
    spec = small_spec(tmp_path, axes={"indoor_ratio": []})
    result = experiments.run_experiment(spec)
    assert result.exit_code == 0
    lines = (tmp_path / "out" / "latency_vs_indoor.csv").read_text()
    assert lines.splitlines() == [experiments.CSV_SCHEMA_LINE,
                                  "indoor_ratio,technology,seed,"
                                  "mean_latency_s,delivered,late,"
                                  "discarded,failed"]


def test_manifest_reproduces_byte_identical(tmp_path):
    experiments.run_experiment(small_spec(tmp_path))
    manifest = json.loads(
        (tmp_path / "out" / "latency_vs_indoor_manifest.json").read_text())
    spec2 = experiments.spec_from_manifest(manifest, tmp_path / "out2",
                                           jobs=2)
    experiments.run_experiment(spec2)
    first = (tmp_path / "out" / "latency_vs_indoor.csv").read_bytes()
    second = (tmp_path / "out2" / "latency_vs_indoor.csv").read_bytes()
    assert first == second


def test_compare_identical_columns_all_ones():
    header = ["x", "simulated", "analytical"]
    rows = [[1, 2.0, 2.0], [2, 5.0, 5.0]]
    comparison = experiments.compare_analytical_sim(header, rows)
    assert all(r.ok for r in comparison)
    assert all(r.ratio == pytest.approx(1.0) for r in comparison)


def test_compare_flags_out_of_tolerance():
    header = ["x", "simulated", "analytical"]
    rows = [[1, 2.6, 2.0], [2, 1.9, 2.0]]
    comparison = experiments.compare_analytical_sim(header, rows,
                                                    tolerance=1.25)
    assert [r.ok for r in comparison] == [False, False]


def test_compare_missing_column_errors():
    with pytest.raises(ConfigurationError, match="analytical"):
        experiments.compare_analytical_sim(["x", "simulated"], [[1, 2.0]])
    with pytest.raises(ConfigurationError, match="row length"):
        experiments.compare_analytical_sim(
            ["simulated", "analytical"], [[1.0]])


# -------------------------------------------------------------------- CLI

def test_cli_validate_ok(capsys):
    assert cli.main(["validate", str(default_scenario_path())]) == 0
    assert "ok:" in capsys.readouterr().out


def test_cli_validate_bad_file(tmp_path, capsys):
    bad = write_scenario(tmp_path, "[city]\nue_count = 10\n")
    assert cli.main(["validate", str(bad)]) == 1
    assert "error:" in capsys.readouterr().err
    assert cli.main(["validate", str(tmp_path / "missing.toml")]) == 1


def test_cli_run_and_compare(tmp_path, capsys):
    sc = write_scenario(tmp_path, MINIMAL)
    out = tmp_path / "run"
    code = cli.main(["run", "airtime_vs_indoor", "--scenario", str(sc),
                     "--seed", "3", "--out", str(out)])
    assert code == 0
    report = out / "airtime_vs_indoor.csv"
    assert report.exists()
    assert cli.main(["compare", str(report)]) == 0
    assert "points within" in capsys.readouterr().out


def test_cli_compare_failure_exit_code(tmp_path):
    report = tmp_path / "bad.csv"
    report.write_text("# schema=1\nx,simulated,analytical\n1,1.0,2.0\n")
    assert cli.main(["compare", str(report)]) == 2


def test_cli_lifetime_and_analytics_json(capsys):
    assert cli.main(["lifetime", "--tech", "NBIOT", "--coverage", "POOR",
                     "--data-bytes", "200", "--format", "json"]) == 0
    payload = json.loads(capsys.readouterr().out)
    assert payload["lifetime_years"] > 0
    assert cli.main(["analytics", "--tech", "EMTC", "--coverage", "GOOD",
                     "--data-bytes", "12", "--format", "json"]) == 0
    payload = json.loads(capsys.readouterr().out)
    assert payload["n_blocks"] >= 1
    assert payload["max_ue"] >= payload["n_blocks"]


def test_cli_run_requires_experiment(capsys):
    assert cli.main(["run"]) == 1
    assert "experiment" in capsys.readouterr().err


def test_cli_plot_renders_figure(tmp_path):
    out = tmp_path / "plots"
    code = cli.main(["run", "lifetime_vs_edrx", "--out", str(out), "--plot"])
    assert code == 0
    assert (out / "lifetime_vs_edrx.png").stat().st_size > 0
