"""Command-line entry points: exit codes, flag handling, emitted files.

Exit code contract: 0 success, 2 threshold failure, 3 configuration or
usage error, 4 numeric failure during integration.
"""
import ast
import textwrap

import pytest

from nhcd.cli import main

RUN_OK = textwrap.dedent("""\
    [model]
    case = pseudo-real
    [drive]
    mode = full-cd
    [initial]
    state = eigenstate-0
    [integration]
    window = -1,1
    [output]
    label = smoke
""")

RUN_THRESHOLD_FAIL = textwrap.dedent("""\
    [model]
    case = antipseudo
    [drive]
    mode = bare
    [initial]
    state = eigenstate-0
    [output]
    label = leaky
    [thresholds]
    final_p3 = 0.99
    norm_tol = 1e-6
""")

RUN_BAD_STEP = RUN_OK.replace("window = -1,1", "window = -1,1\nstep = 0.1")

RUN_NUMERIC_FAIL = textwrap.dedent("""\
    [model]
    case = custom-matrix
    matrix = 0,1e6; 1e6,0
    [drive]
    mode = bare
    [initial]
    state = bare-1
    reference = none
    [integration]
    window = 0,1
    step = 0.05
""")

SWEEP = textwrap.dedent("""\
    [sweep]
    model = antipseudo
    samples = 40
    [output]
    label = ladder
""")


def write(tmp_path, text, name="cfg.ini"):
    path = tmp_path / name
    path.write_text(text)
    return str(path)


class TestExitCodes:
    def test_run_success(self, tmp_path):
        code = main(["run", "--config", write(tmp_path, RUN_OK),
                     "--out", str(tmp_path)])
        assert code == 0
        assert (tmp_path / "smoke.csv").exists()
        assert (tmp_path / "smoke-schedule.csv").exists()
        assert (tmp_path / "smoke-report.txt").exists()

    def test_threshold_failure(self, tmp_path):
        code = main(["run", "--config",
                     write(tmp_path, RUN_THRESHOLD_FAIL),
                     "--out", str(tmp_path)])
        assert code == 2
        report = (tmp_path / "leaky-report.txt").read_text()
        assert "overall: fail" in report

    def test_config_error(self, tmp_path):
        code = main(["run", "--config", write(tmp_path, RUN_BAD_STEP),
                     "--out", str(tmp_path)])
        assert code == 3

    def test_missing_config_file(self, tmp_path):
        code = main(["run", "--config", str(tmp_path / "absent.ini"),
                     "--out", str(tmp_path)])
        assert code == 3

    def test_numeric_error(self, tmp_path):
        code = main(["run", "--config",
                     write(tmp_path, RUN_NUMERIC_FAIL),
                     "--out", str(tmp_path)])
        assert code == 4

    def test_unrecognized_argument(self, tmp_path):
        # A leading dash makes the bound look like a flag, so the parser
        # rejects it; the equals form in TestFlags is the supported path.
        with pytest.raises(SystemExit) as err:
            main(["run", "--config", write(tmp_path, RUN_OK),
                  "--window", "-3,3"])
        assert err.value.code == 3


class TestFlags:
    def test_window_equals_form(self, tmp_path):
        code = main(["run", "--config", write(tmp_path, RUN_OK),
                     "--out", str(tmp_path), "--window=-0.5,0.5",
                     "--step", "2e-3"])
        assert code == 0
        report = (tmp_path / "smoke-report.txt").read_text()
        assert "window_abs: -0.5 0.5" in report

    def test_out_dir_from_environment(self, tmp_path, monkeypatch):
        env_dir = tmp_path / "from_env"
        env_dir.mkdir()
        monkeypatch.setenv("NHCD_OUT_DIR", str(env_dir))
        code = main(["run", "--config", write(tmp_path, RUN_OK)])
        assert code == 0
        assert (env_dir / "smoke.csv").exists()

    def test_out_flag_beats_environment(self, tmp_path, monkeypatch):
        env_dir = tmp_path / "from_env"
        flag_dir = tmp_path / "from_flag"
        env_dir.mkdir()
        flag_dir.mkdir()
        monkeypatch.setenv("NHCD_OUT_DIR", str(env_dir))
        code = main(["run", "--config", write(tmp_path, RUN_OK),
                     "--out", str(flag_dir)])
        assert code == 0
        assert (flag_dir / "smoke.csv").exists()
        assert not (env_dir / "smoke.csv").exists()

    def test_help_lists_subcommands(self, capsys):
        with pytest.raises(SystemExit):
            main(["--help"])
        out = capsys.readouterr().out
        for sub in ("run", "sweep", "plot", "verify"):
            assert sub in out


class TestSweepAndPlot:
    def test_seedless_sweep(self, tmp_path):
        code = main(["sweep", "--config",
                     write(tmp_path, SWEEP, "sweep.ini"),
                     "--out", str(tmp_path), "--seedless"])
        assert code == 0
        assert (tmp_path / "sweep-antipseudo.csv").exists()

    def test_plot_script_emission(self, tmp_path):
        assert main(["run", "--config", write(tmp_path, RUN_OK),
                     "--out", str(tmp_path)]) == 0
        code = main(["plot", str(tmp_path / "smoke.csv"),
                     "--schedule", str(tmp_path / "smoke-schedule.csv"),
                     "--out", str(tmp_path), "--name", "figure"])
        assert code == 0
        script = tmp_path / "figure.py"
        assert script.exists()
        ast.parse(script.read_text())
