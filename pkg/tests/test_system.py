"""
End-to-end tests of the command line runner: flags and scenarios in,
datasets and exit codes out
"""

import json

import pytest

from ringphoton.cli import list_scenarios, load_scenario, main
from ringphoton.datasets import read_dataset, write_dataset
from ringphoton.errors import ConfigurationError
from ringphoton.models import Dataset

SMALL_RING = ["--n-sites", "6", "--spacing", "0.5"]


@pytest.fixture(autouse=True)
def isolated(tmp_path, monkeypatch):
    """Run every CLI call from an empty directory with a clean environment"""
    monkeypatch.chdir(tmp_path)
    for name in ("RINGPHOTON_OUTPUT_DIR", "RINGPHOTON_WORKERS", "RINGPHOTON_LOG_LEVEL"):
        monkeypatch.delenv(name, raising=False)
    return tmp_path


def run_intensity(path, *extra):
    return main(["intensity", *SMALL_RING, "--grid", "24", "24", "--out", str(path), *extra])


def test_list(capsys):
    assert main(["--list"]) == 0
    output = capsys.readouterr().out
    assert "spin_wave_a1" in output
    assert "oracle-check" in output


def test_bundled_scenarios_are_valid():
    names = list_scenarios()
    assert "g2_p1" in names
    for name in names:
        config = load_scenario(name)
        assert "command" in config
        assert config["out"].startswith("results/")


def test_missing_scenario():
    with pytest.raises(ConfigurationError):
        load_scenario("no_such_scenario")


def test_intensity_run(isolated, capsys):
    out = isolated / "intensity.csv"
    assert run_intensity(out) == 0
    assert "wrote 576 rows" in capsys.readouterr().out

    dataset = read_dataset(str(out))
    assert dataset.columns == ["theta", "phi", "value"]
    assert len(dataset.rows) == 24 * 24
    assert dataset.metadata["total"] == pytest.approx(1.0, abs=1e-5)
    assert dataset.metadata["n_sites"] == 6
    assert dataset.metadata["units"]


def test_identical_runs_write_identical_files(isolated):
    first, second = isolated / "first.csv", isolated / "second.csv"
    assert run_intensity(first) == 0
    assert run_intensity(second) == 0
    assert first.read_text().replace("first.csv", "") == second.read_text().replace("second.csv", "")


def test_golden_check_exit_codes(isolated, capsys):
    reference = isolated / "reference.csv"
    assert run_intensity(reference) == 0
    assert run_intensity(isolated / "again.csv", "--golden", str(reference)) == 0
    assert "Golden check PASS" in capsys.readouterr().out

    dataset = read_dataset(str(reference))
    scaled = Dataset(columns=dataset.columns, metadata=dataset.metadata,
                     rows=[[t, p, 1.1 * v] for t, p, v in dataset.rows])
    write_dataset(scaled, str(isolated / "scaled.csv"))
    assert run_intensity(isolated / "third.csv", "--golden", str(isolated / "scaled.csv")) == 1
    assert "Golden check FAIL" in capsys.readouterr().out


def test_default_output_path(isolated, monkeypatch):
    monkeypatch.setenv("RINGPHOTON_OUTPUT_DIR", str(isolated / "datasets"))
    assert main(["modes", *SMALL_RING]) == 0
    assert (isolated / "datasets" / "modes_N6_a0.5.csv").exists()


def test_json_output(isolated):
    out = isolated / "modes.json"
    assert main(["modes", *SMALL_RING, "--format", "json", "--out", str(out)]) == 0
    document = json.loads(out.read_text())
    assert document["columns"] == ["k", "l", "decay_rate", "frequency_shift", "kind"]
    assert len(document["nodes"]) == 6
    assert document["metadata"]["dense_mismatch"] < 1e-10


def test_scenario_by_name_with_flag_override(isolated):
    out = isolated / "modes.csv"
    assert main(["--config", "modes_n15", "--n-sites", "8", "--out", str(out)]) == 0
    dataset = read_dataset(str(out))
    assert dataset.metadata["n_sites"] == 8
    assert dataset.metadata["spacing"] == 0.5
    assert len(dataset.rows) == 8


def test_scenario_file_without_wrapper(isolated):
    config = isolated / "overlaps.json"
    config.write_text(json.dumps({"command": "overlaps", "n_sites": 20, "ps": [1, 5, 30]}))
    out = isolated / "overlaps.csv"
    assert main(["--config", str(config), "--out", str(out)]) == 0
    dataset = read_dataset(str(out))
    assert len(dataset.rows) == 2 * 11
    assert set(dataset.metadata["completeness"]) == {"1", "5"}


def test_g2_map_picks_reference_at_intensity_maximum(isolated):
    out = isolated / "g2.csv"
    args = ["g2-map", *SMALL_RING, "--theta-l", "0.7853981633974483", "--phi-l", "3.141592653589793",
            "--p", "1", "--grid", "12", "12", "--out", str(out)]
    assert main(args) == 0
    metadata = read_dataset(str(out)).metadata
    assert 0.0 < metadata["theta_ref"] < 3.15
    assert metadata["reference_intensity"] > 0.0


@pytest.mark.slow
def test_oracle_check(isolated):
    out = isolated / "oracle.csv"
    args = ["oracle-check", "--n-sites", "4", "--spacing", "0.5", "--grid", "4", "6",
            "--n-frequencies", "300", "--out", str(out)]
    assert main(args) == 0
    dataset = read_dataset(str(out))
    assert dataset.columns == ["theta", "phi", "closed_form", "oracle"]
    assert dataset.metadata["passed"] is True


@pytest.mark.parametrize("args, message", [
    (["intensity", "--n-sites", "0"], "invalid configuration"),
    (["pair-intensity", "--n-sites", "10", "--p", "6"], "invalid configuration"),
    (["intensity-perp", "--theta-l", "0.5", "--grid", "4", "4"], "intensity-perp needs the laser"),
    (["--n-sites", "5"], "No command given"),
    (["--config", "no_such_scenario"], "not found"),
])
def test_errors_exit_with_code_two(args, message, capsys):
    assert main(args) == 2
    error = capsys.readouterr().err
    assert error.startswith("Error:")
    assert message in error
