"""Command-line front end: run, sweep, plot, verify.

Exit codes are script-friendly: 0 all checks pass, 2 a declared threshold
failed, 3 configuration or usage error, 4 numeric failure (integration
blow-up outside the expected cases, degeneracies, or an RNG-use assertion
tripped by --seedless).

The output directory resolves as: --out flag, then the NHCD_OUT_DIR
environment variable, then the config's [output] dir, then the working
directory. The environment can override nothing else.
"""

from __future__ import annotations

import argparse
import os
import random
import sys
from pathlib import Path

import numpy as np

from .errors import ConfigError, NhcdError, SchemaError
from .experiments import (
    ExperimentConfig,
    _parse_window,
    emit_plots,
    load_config,
    load_sweep_config,
    run_experiment,
    spectrum_sweep,
)

EXIT_OK = 0
EXIT_THRESHOLD = 2
EXIT_CONFIG = 3
EXIT_NUMERIC = 4

#: Runs executed by the verify subcommand, all on default thresholds.
VERIFY_SUITE = (
    ("pseudo-real", "full-cd"),
    ("pseudo-complex", "cd-only"),
    ("antipseudo", "cd-only"),
)


class _Parser(argparse.ArgumentParser):
    """Argparse variant whose usage errors exit with the config code."""

    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_CONFIG, f"{self.prog}: error: {message}\n")


def _rng_fingerprint():
    kind, keys, pos, has_gauss, cached = np.random.get_state()
    return (kind, keys.tobytes(), pos, has_gauss, cached, random.getstate())


def _resolve_out(flag_value, config_value):
    if flag_value:
        return flag_value
    env = os.environ.get("NHCD_OUT_DIR")
    if env:
        return env
    return config_value


def _apply_overrides(config: ExperimentConfig, args) -> None:
    if getattr(args, "step", None) is not None:
        if not 1e-6 <= args.step <= 0.05:
            raise ConfigError(f"--step {args.step} outside [1e-6, 0.05] "
                              "(units of the passage time)")
        config.step = args.step
    if getattr(args, "window", None) is not None:
        config.window = _parse_window(args.window)
    config.out_dir = _resolve_out(args.out, config.out_dir)


def cmd_run(args) -> int:
    config = load_config(args.config)
    _apply_overrides(config, args)
    result = run_experiment(config)
    sys.stdout.write(result.report.text())
    return EXIT_OK if result.report.passed else EXIT_THRESHOLD


def cmd_sweep(args) -> int:
    spec = load_sweep_config(args.config)
    out_dir = Path(_resolve_out(args.out, spec["out_dir"]))
    out_dir.mkdir(parents=True, exist_ok=True)
    result = spectrum_sweep(spec["model"], spec["ratio_min"],
                            spec["ratio_max"], spec["samples"])
    path = result.write_csv(out_dir / f"{spec['label']}.csv")
    skipped = int(np.count_nonzero(~result.ok))
    sys.stdout.write(f"model: {spec['model']}\n"
                     f"samples: {result.ratios.size}\n"
                     f"skipped: {skipped}\n"
                     f"csv: {path}\n")
    return EXIT_OK


def cmd_plot(args) -> int:
    out_dir = Path(_resolve_out(args.out, "."))
    out_dir.mkdir(parents=True, exist_ok=True)
    name = args.name or (Path(args.csv[0]).stem + "-plot")
    path = emit_plots(args.csv, out_dir / f"{name}.py",
                      schedule_csv=args.schedule)
    sys.stdout.write(f"script: {path}\n")
    return EXIT_OK


def _verify_sweeps(out_dir: Path) -> list:
    """Sweep both models and check the closed-form branch values."""
    from scipy.optimize import linear_sum_assignment

    lines = []
    all_ok = True
    for kind in ("pseudo", "antipseudo"):
        result = spectrum_sweep(kind, 0.0, 2.0, 400)
        result.write_csv(out_dir / f"verify-sweep-{kind}.csv")
        worst = 0.0
        for i in np.nonzero(result.ok)[0]:
            r = result.ratios[i]
            rho = np.sqrt(complex(1.0 - r * r))
            if kind == "pseudo":
                expected = np.array([0.0, 0.5 * rho, -0.5 * rho])
            else:
                expected = np.array([0.0, 0.5j * (1.0 + rho),
                                     0.5j * (1.0 - rho)])
            cost = np.abs(result.values[i][None, :] - expected[:, None])
            rows, cols = linear_sum_assignment(cost)
            worst = max(worst, float(cost[rows, cols].max()))
        ok = worst < 1e-10
        all_ok = all_ok and ok
        lines.append(f"sweep_{kind}: max_error {worst:.3e} "
                     f"{'pass' if ok else 'fail'}")
    lines.append(f"sweeps: {'pass' if all_ok else 'fail'}")
    return lines


def cmd_verify(args) -> int:
    out_dir = Path(_resolve_out(args.out, "."))
    out_dir.mkdir(parents=True, exist_ok=True)
    failed = False
    for case, drive in VERIFY_SUITE:
        config = ExperimentConfig(case=case, drive=drive,
                                  initial=("eigenstate", 0),
                                  out_dir=str(out_dir),
                                  label=f"verify-{case}")
        _apply_overrides(config, args)
        result = run_experiment(config)
        verdict = "pass" if result.report.passed else "fail"
        sys.stdout.write(f"run_{case}_{drive}: {verdict}\n")
        for name, threshold, observed, ok in result.report.checks:
            sys.stdout.write(f"  {name}: threshold {threshold:.12g} "
                             f"observed {observed:.12g} "
                             f"{'pass' if ok else 'fail'}\n")
        failed = failed or not result.report.passed
    sweep_lines = _verify_sweeps(out_dir)
    for line in sweep_lines:
        sys.stdout.write(line + "\n")
    failed = failed or sweep_lines[-1].endswith("fail")
    sys.stdout.write(f"overall: {'fail' if failed else 'pass'}\n")
    return EXIT_THRESHOLD if failed else EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="nhcd",
                     description="Counterdiabatic driving experiments for "
                                 "pseudo- and antipseudo-Hermitian models.")
    sub = parser.add_subparsers(dest="command", required=True,
                                parser_class=_Parser)

    def common(p, config_required=False, steps=False):
        if config_required:
            p.add_argument("--config", required=True, metavar="PATH",
                           help="experiment config file")
        p.add_argument("--out", metavar="DIR", default=None,
                       help="output directory (overrides config and "
                            "NHCD_OUT_DIR)")
        if steps:
            p.add_argument("--step", type=float, default=None,
                           help="integration step in units of the passage "
                                "time")
            p.add_argument("--window", default=None, metavar="A,B",
                           help="time window in units of the passage time; "
                                "use --window=-6,6 for negative bounds")
        p.add_argument("--seedless", action="store_true",
                       help="assert that no random-number state is consumed")

    run_p = sub.add_parser("run", help="execute one configured run")
    common(run_p, config_required=True, steps=True)
    run_p.set_defaults(func=cmd_run)

    sweep_p = sub.add_parser("sweep", help="sweep eigenvalues against the "
                                           "regime ratio")
    common(sweep_p, config_required=True)
    sweep_p.set_defaults(func=cmd_sweep)

    plot_p = sub.add_parser("plot", help="emit a plotting script for run "
                                         "CSVs (never renders)")
    plot_p.add_argument("csv", nargs="+", help="trajectory CSV files")
    plot_p.add_argument("--schedule", default=None, metavar="PATH",
                        help="schedule CSV for the fourth panel")
    plot_p.add_argument("--name", default=None,
                        help="script stem (default: first CSV stem + -plot)")
    common(plot_p)
    plot_p.set_defaults(func=cmd_plot)

    verify_p = sub.add_parser("verify", help="run the reproduction suite on "
                                             "default thresholds")
    common(verify_p, steps=True)
    verify_p.set_defaults(func=cmd_verify)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    before = _rng_fingerprint() if args.seedless else None
    try:
        code = args.func(args)
    except (ConfigError, SchemaError) as exc:
        sys.stderr.write(f"nhcd: config error: {exc}\n")
        return EXIT_CONFIG
    except NhcdError as exc:
        sys.stderr.write(f"nhcd: numeric error: {exc}\n")
        return EXIT_NUMERIC
    if before is not None and _rng_fingerprint() != before:
        sys.stderr.write("nhcd: --seedless violated: random-number state "
                         "changed during the command\n")
        return EXIT_NUMERIC
    return code


if __name__ == "__main__":
    sys.exit(main())
