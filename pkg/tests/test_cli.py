import json
import math

import pytest

from starsync.cli import main

UNIFORM_N2 = """
[network]
n = 2
mass = 1.0
hooke = [1.0, 1.0, 1.0]
couplings = [1.0, 1.0]
bath_rate = 0.1
"""

FIG1_SWEEP = """
[network]
n = 3
mass = 1.0
hooke = [1.0, 0.2, 10.0, 1.0]
couplings = [2.9, 3.0, 3.1]

[sweep]
g_min = 1.0
g_max = 100.0
steps = 25
offsets = [0.9, 1.0, 1.1]
"""

EVOLVE = UNIFORM_N2 + """
[initial_state]
frame = "normal"
preparations = [
  {kind = "coherent", alpha = 0.5},
  {kind = "vacuum"},
  {kind = "coherent", alpha = 0.4},
]

[time]
t_max = 150.0
samples = 3001
"""

ORACLE = EVOLVE + """
[oracle]
cutoff = 5
"""


def write(tmp_path, text, name="run.toml"):
    path = tmp_path / name
    path.write_text(text, encoding="utf-8")
    return str(path)


class TestModesCommand:
    def test_uniform_spectrum(self, tmp_path, capsys):
        cfg = write(tmp_path, UNIFORM_N2)
        out = tmp_path / "out"
        assert main(["modes", "--config", cfg, "--out", str(out)]) == 0
        report = json.loads((out / "report.json").read_text())
        freqs = [row["freq_perturbative"] for row in report["modes"]]
        tags = [row["tag"] for row in report["modes"]]
        assert freqs == pytest.approx([1.0, math.sqrt(2.0), 2.0])
        assert tags == ["leaking-", "protected", "leaking+"]
        assert (out / "modes.csv").exists()

    def test_byte_identical_reruns(self, tmp_path):
        cfg = write(tmp_path, UNIFORM_N2)
        out1, out2 = tmp_path / "a", tmp_path / "b"
        assert main(["modes", "--config", cfg, "--out", str(out1)]) == 0
        assert main(["modes", "--config", cfg, "--out", str(out2)]) == 0
        assert (out1 / "modes.csv").read_bytes() == (out2 / "modes.csv").read_bytes()
        assert (out1 / "report.json").read_bytes() == (out2 / "report.json").read_bytes()

    def test_missing_field_exit_1(self, tmp_path, capsys):
        cfg = write(tmp_path, UNIFORM_N2.replace("mass = 1.0\n", ""))
        assert main(["modes", "--config", cfg, "--out", str(tmp_path / "out")]) == 1
        err = capsys.readouterr().err
        assert "network.mass" in err

    def test_missing_config_file_exit_1(self, tmp_path):
        assert main(["modes", "--config", str(tmp_path / "nope.toml")]) == 1


class TestSweepCommand:
    def test_fig1_gap_monotone(self, tmp_path):
        cfg = write(tmp_path, FIG1_SWEEP)
        out = tmp_path / "out"
        assert main(["sweep", "--config", cfg, "--out", str(out)]) == 0
        lines = (out / "sweep.csv").read_text().strip().split("\n")
        header = lines[0].split(",")
        gi = header.index("g")
        si = header.index("spread")
        rows = [list(map(float, line.split(","))) for line in lines[1:]]
        gaps = [row[si] for row in rows if row[gi] >= 10.0]
        assert all(b < a for a, b in zip(gaps, gaps[1:]))
        report = json.loads((out / "report.json").read_text())
        assert report["fit"]["exponent"] < 0

    def test_missing_sweep_section_exit_1(self, tmp_path):
        cfg = write(tmp_path, UNIFORM_N2)
        assert main(["sweep", "--config", cfg, "--out", str(tmp_path / "out")]) == 1


class TestEvolveCommand:
    def test_trajectory_artifacts(self, tmp_path):
        cfg = write(tmp_path, EVOLVE)
        out = tmp_path / "out"
        assert main(["evolve", "--config", cfg, "--out", str(out)]) == 0
        lines = (out / "trajectory.csv").read_text().strip().split("\n")
        assert lines[0].startswith("t,")
        assert len(lines) == 3002
        report = json.loads((out / "report.json").read_text())
        assert "metrics" in report
        assert "x_1:x_2" in report["metrics"]["correlations"]

    def test_config_echo_round_trips(self, tmp_path):
        from starsync.config import RunConfig, load_config

        cfg_path = write(tmp_path, EVOLVE)
        out = tmp_path / "out"
        assert main(["evolve", "--config", cfg_path, "--out", str(out)]) == 0
        report = json.loads((out / "report.json").read_text())
        assert RunConfig.model_validate(report["config"]) == load_config(cfg_path)


class TestOracleCommand:
    def test_resource_error_exit_2(self, tmp_path, capsys):
        cfg = write(tmp_path, ORACLE.replace("cutoff = 5", "cutoff = 30"))
        out = tmp_path / "out"
        assert main(["oracle", "--config", cfg, "--out", str(out)]) == 2
        error = json.loads((out / "error.json").read_text())
        assert error["error"]["code"] == "resource_limit"
