"""Config parsing, run orchestration, CSV and report emission, sweeps.

Known values:
- The gain-loss transport run (cd-only drive, lowest eigenpath) ends with
  P3 = 0.997526769533 at unit norm, so the default thresholds pass.
- The eigenvalue sweep ratio grid never hits the coalescence point, and
  the zero-coupling gain-loss sample is flagged degenerate.
- Formatting uses 12 significant digits and normalizes the sign of zero.
"""
import ast
import textwrap

import numpy as np
import pytest

from conftest import multiset_residual
from nhcd import (ConfigError, ExperimentConfig, SchemaError, emit_plots,
                  load_config, load_sweep_config, run_experiment,
                  spectrum_sweep)
from nhcd.experiments import _fmt

BASE_CONFIG = textwrap.dedent("""\
    [model]
    case = antipseudo
    [drive]
    mode = cd-only
    [initial]
    state = eigenstate-0
    [thresholds]
    final_p3 = 0.99
    norm_tol = 1e-6
""")


def write_config(tmp_path, text, name="run.ini"):
    path = tmp_path / name
    path.write_text(text)
    return path


class TestLoadConfig:
    def test_full_round_trip(self, tmp_path):
        text = textwrap.dedent("""\
            [model]
            case = pseudo-real
            frequency_unit = 2.0
            [drive]
            mode = full-cd
            [initial]
            state = eigenstate-1
            reference = eigenstate-0
            [integration]
            step = 5e-4
            window = -4,4
            method = rk4-adaptive
            tolerance = 1e-9
            [output]
            label = roundtrip
        """)
        cfg = load_config(write_config(tmp_path, text))
        assert cfg.case == "pseudo-real"
        assert cfg.drive == "full-cd"
        assert cfg.initial == ("eigenstate", 1)
        assert cfg.reference_level == 0
        assert cfg.frequency_unit == 2.0
        assert cfg.step == 5e-4
        assert cfg.window == (-4.0, 4.0)
        assert cfg.method == "rk4-adaptive"
        assert cfg.tolerance == 1e-9
        assert cfg.resolved_label() == "roundtrip"

    def test_amplitude_initial_state(self, tmp_path):
        text = textwrap.dedent("""\
            [model]
            case = pseudo-real
            [drive]
            mode = bare
            [initial]
            state = amplitudes
            amplitudes = 0.5, 0, -0.5j
        """)
        cfg = load_config(write_config(tmp_path, text))
        kind, vec = cfg.initial
        assert kind == "amplitudes"
        np.testing.assert_allclose(vec, [0.5, 0.0, -0.5j], atol=1e-12)

    @pytest.mark.parametrize("old, new, message", [
        ("case = antipseudo", "case = unknown", "unknown model case"),
        ("mode = cd-only", "mode = warp", "unknown drive"),
        ("state = eigenstate-0", "state = basis-0", "unknown initial state"),
        ("state = eigenstate-0", "state = bare-0", "bare level"),
        ("state = eigenstate-0",
         "state = eigenstate-0\n[integration]\nstep = 0.1", "step"),
        ("case = antipseudo", "case = antipseudo\nmatrix = 0,1; 1,0",
         "matrix is only valid"),
    ])
    def test_rejections(self, tmp_path, old, new, message):
        text = BASE_CONFIG.replace(old, new, 1)
        with pytest.raises(ConfigError, match=message):
            load_config(write_config(tmp_path, text))

    def test_unknown_key_rejected(self, tmp_path):
        text = BASE_CONFIG.replace("[drive]", "solver = magic\n[drive]", 1)
        with pytest.raises(ConfigError):
            load_config(write_config(tmp_path, text))

    def test_custom_matrix_requires_window(self, tmp_path):
        text = textwrap.dedent("""\
            [model]
            case = custom-matrix
            matrix = 0,1; 1,0
            [drive]
            mode = bare
            [initial]
            state = bare-1
        """)
        with pytest.raises(ConfigError, match="window"):
            load_config(write_config(tmp_path, text))


@pytest.fixture(scope="module")
def result(tmp_path_factory):
    out = tmp_path_factory.mktemp("runs")
    cfg = ExperimentConfig(case="antipseudo", drive="cd-only",
                           initial=("eigenstate", 0), out_dir=str(out),
                           label="transport",
                           thresholds={"final_p3": 0.99,
                                       "norm_tol": 1e-6})
    return run_experiment(cfg)


class TestRunExperiment:
    def test_outputs_exist(self, result):
        assert result.csv_path.exists()
        assert result.schedule_csv_path.exists()
        assert result.report_path.exists()

    def test_csv_schema(self, result):
        header = result.csv_path.read_text().splitlines()[0]
        assert header == ("t,re_c1,im_c1,re_c2,im_c2,re_c3,im_c3,"
                          "p1,p2,p3,p1_renorm,p2_renorm,p3_renorm,"
                          "norm,fidelity_sym,fidelity_plain,alpha,beta")

    def test_final_population(self, result):
        np.testing.assert_allclose(result.trajectory.populations[-1, 2],
                                   0.997526769533, atol=1e-9)

    def test_report_checks_pass(self, result):
        lines = result.report_path.read_text().splitlines()
        assert "overall: pass" in lines
        checks = [l for l in lines if l.startswith("check_")]
        assert len(checks) == 2
        assert all(l.endswith(" pass") for l in checks)
        assert any(l.startswith("check_final_p3: threshold 0.99 observed ")
                   for l in checks)

    def test_rerun_is_byte_identical(self, result, tmp_path):
        cfg = ExperimentConfig(case="antipseudo", drive="cd-only",
                               initial=("eigenstate", 0),
                               out_dir=str(tmp_path), label="transport",
                               thresholds={"final_p3": 0.99,
                                           "norm_tol": 1e-6})
        again = run_experiment(cfg)
        assert again.csv_path.read_bytes() == result.csv_path.read_bytes()
        assert (again.schedule_csv_path.read_bytes()
                == result.schedule_csv_path.read_bytes())

    def test_truncated_run_fails_checks(self, tmp_path):
        cfg = ExperimentConfig(case="custom-matrix", drive="bare",
                               initial=("bare", 1), window=(0.0, 80.0),
                               out_dir=str(tmp_path), label="blowup",
                               custom_matrix=np.array([[5.0j]]),
                               thresholds={"min_fidelity": 0.0})
        result = run_experiment(cfg)
        assert result.trajectory.truncated
        assert all(not ok for _, _, _, ok in result.report.checks)

    def test_norm_threshold_fails_on_bare_gain_loss(self, tmp_path):
        cfg = ExperimentConfig(case="antipseudo", drive="bare",
                               initial=("eigenstate", 0),
                               out_dir=str(tmp_path), label="bare",
                               thresholds={"final_p3": 0.99,
                                           "norm_tol": 1e-6})
        result = run_experiment(cfg)
        status = {name: ok for name, _, _, ok in result.report.checks}
        assert status["final_p3"]
        assert not status["norm_deviation"]


class TestFormatting:
    def test_negative_zero_normalized(self):
        assert _fmt(-0.0) == "0"

    def test_twelve_significant_digits(self):
        assert _fmt(np.pi) == "3.14159265359"


class TestSweep:
    def test_gain_loss_closed_form(self):
        sweep = spectrum_sweep("antipseudo", samples=100)
        assert not sweep.ok[0]  # zero coupling collapses two eigenvalues
        assert sweep.ok[1:].all()
        for ratio, row in zip(sweep.ratios[1:], sweep.values[1:]):
            rho = np.sqrt(1.0 - ratio ** 2 + 0.0j)
            expected = [0.0, 0.5j * (1.0 - rho), 0.5j * (1.0 + rho)]
            assert multiset_residual(row, expected) <= 1e-10

    def test_csv_status_column(self, tmp_path):
        sweep = spectrum_sweep("antipseudo", samples=5)
        path = tmp_path / "sweep.csv"
        sweep.write_csv(path)
        rows = path.read_text().splitlines()
        assert rows[0].endswith(",status")
        assert rows[1].endswith("degenerate")
        assert all(r.endswith("ok") for r in rows[2:])

    def test_sweep_config_parsed(self, tmp_path):
        text = textwrap.dedent("""\
            [sweep]
            model = pseudo
            ratio_min = 0.2
            ratio_max = 1.8
            samples = 50
        """)
        parsed = load_sweep_config(write_config(tmp_path, text, "sweep.ini"))
        assert parsed["model"] == "pseudo"
        assert parsed["samples"] == 50


class TestEmitPlots:
    def test_script_is_valid_python(self, tmp_path):
        cfg = ExperimentConfig(case="antipseudo", drive="cd-only",
                               initial=("eigenstate", 0),
                               out_dir=str(tmp_path), label="plotsrc")
        result = run_experiment(cfg)
        script = emit_plots([result.csv_path], tmp_path / "plot.py",
                            schedule_csv=result.schedule_csv_path)
        source = script.read_text()
        ast.parse(source)
        assert "matplotlib" in source

    def test_empty_input_rejected(self, tmp_path):
        with pytest.raises(SchemaError):
            emit_plots([], tmp_path / "plot.py")
