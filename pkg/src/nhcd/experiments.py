"""Config-driven experiment runner for the three-level transfer cases.

A run is: build the model, pick the drive Hamiltonian (bare = H0,
full-cd = Htotal, cd-only = HcdOnly), integrate from the configured initial
state, attach observables against the analytic eigenpath, decompose the
projective phases, and emit a CSV trajectory plus a machine-parseable
report. Everything is deterministic: no RNG is consulted anywhere, and the
CSV formatting is fixed at 12 significant digits so repeated invocations are
byte-identical.

The config format is INI-style sections with a strict schema; unknown
sections or keys are rejected rather than ignored, because silently dropped
options are how wrong physics gets published.
"""

from __future__ import annotations

import configparser
import time
from dataclasses import dataclass, field
from pathlib import Path
from typing import Optional

import numpy as np
from scipy.optimize import linear_sum_assignment

from .adiabatic import adiabatic_reference, metric_profile, schedule_from_hamiltonian
from .dynamics import (
    Trajectory,
    integrate,
    observables,
    project_phase_decomposition,
)
from .errors import ConfigError, DegenerateSpectrum, NhcdError, SchemaError
from .linalg import eig
from .models import (
    CASES,
    ModelBundle,
    StirapParams,
    build_model,
    reference_schedules,
    stirap_hamiltonian,
)

__all__ = [
    "ExperimentConfig",
    "RunReport",
    "RunResult",
    "SweepResult",
    "load_config",
    "load_sweep_config",
    "run_experiment",
    "spectrum_sweep",
    "emit_plots",
    "trajectory_header",
    "write_trajectory_csv",
]

#: Adiabatic-metric level above which a run report raises a warning flag.
ETA_FLAG_LEVEL = 0.1

_MODELS = CASES + ("custom-matrix",)
_DRIVES = ("bare", "full-cd", "cd-only")
_METHODS = ("rk4-fixed", "rk4-adaptive")

_SCHEMA = {
    "model": {"case", "frequency_unit", "matrix"},
    "drive": {"mode"},
    "initial": {"state", "amplitudes", "reference"},
    "integration": {"step", "window", "method", "tolerance"},
    "output": {"dir", "label"},
    "thresholds": {"min_fidelity", "final_p3", "norm_tol", "max_eta"},
    "sweep": {"model", "ratio_min", "ratio_max", "samples", "label"},
}

_DEFAULT_THRESHOLDS = {
    ("pseudo-real", "full-cd"): {"min_fidelity": 0.999},
    ("pseudo-complex", "cd-only"): {"min_fidelity": 0.999},
    ("antipseudo", "cd-only"): {"final_p3": 0.99, "norm_tol": 1e-6},
}


@dataclass
class ExperimentConfig:
    """Validated settings of one run (windows and steps in units of T)."""

    case: str
    drive: str
    initial: tuple
    frequency_unit: float = 1.0
    step: float = 1e-3
    window: Optional[tuple] = None
    method: str = "rk4-fixed"
    tolerance: float = 1e-10
    reference_level: Optional[int] = 0
    out_dir: str = "."
    label: Optional[str] = None
    thresholds: Optional[dict] = None
    custom_matrix: Optional[np.ndarray] = None

    def resolved_label(self) -> str:
        if self.label:
            return self.label
        name = "-".join(str(p) for p in self.initial)
        return f"{self.case}-{self.drive}-{name}"


def _read_ini(path) -> configparser.ConfigParser:
    parser = configparser.ConfigParser(interpolation=None, strict=True)
    try:
        with open(path, "r", encoding="utf-8") as fh:
            parser.read_file(fh)
    except OSError as exc:
        raise ConfigError(f"cannot read config {path}: {exc}") from exc
    except configparser.Error as exc:
        raise ConfigError(f"malformed config {path}: {exc}") from exc
    for section in parser.sections():
        if section not in _SCHEMA:
            raise ConfigError(f"unknown config section [{section}]")
        extra = set(parser[section]) - _SCHEMA[section]
        if extra:
            raise ConfigError(
                f"unknown keys in [{section}]: {', '.join(sorted(extra))}"
            )
    return parser


def _get_float(section, key, default=None, minimum=None, maximum=None):
    raw = section.get(key, None)
    if raw is None or raw == "":
        if default is None:
            raise ConfigError(f"missing required value {key}")
        value = default
    else:
        try:
            value = float(raw)
        except ValueError as exc:
            raise ConfigError(f"{key} = {raw!r} is not a number") from exc
    if minimum is not None and value < minimum:
        raise ConfigError(f"{key} = {value} below allowed minimum {minimum}")
    if maximum is not None and value > maximum:
        raise ConfigError(f"{key} = {value} above allowed maximum {maximum}")
    return value


def _parse_window(raw: str) -> tuple:
    parts = [p.strip() for p in raw.split(",")]
    if len(parts) != 2:
        raise ConfigError(f"window must be 'start,end', got {raw!r}")
    try:
        a, b = float(parts[0]), float(parts[1])
    except ValueError as exc:
        raise ConfigError(f"window must be numeric, got {raw!r}") from exc
    if not a < b:
        raise ConfigError(f"window start {a} must precede end {b}")
    return (a, b)


def _parse_initial(state: str, amplitudes: Optional[str]) -> tuple:
    if state == "amplitudes":
        if not amplitudes:
            raise ConfigError("initial amplitudes required when "
                              "state = amplitudes")
        try:
            vec = np.array([complex(p.strip().replace(" ", ""))
                            for p in amplitudes.split(",")])
        except ValueError as exc:
            raise ConfigError(f"bad amplitudes {amplitudes!r}") from exc
        return ("amplitudes", vec)
    for prefix in ("eigenstate", "bare"):
        if state.startswith(prefix + "-"):
            try:
                idx = int(state[len(prefix) + 1:])
            except ValueError as exc:
                raise ConfigError(f"bad initial state {state!r}") from exc
            if prefix == "eigenstate" and not 0 <= idx <= 2:
                raise ConfigError("eigenstate index must be 0, 1, or 2")
            if prefix == "bare" and not 1 <= idx <= 3:
                raise ConfigError("bare level must be 1, 2, or 3")
            return (prefix, idx)
    raise ConfigError(f"unknown initial state {state!r}; expected "
                      "eigenstate-n, bare-k, or amplitudes")


def _parse_matrix(raw: str) -> np.ndarray:
    try:
        rows = [[complex(entry.strip().replace(" ", ""))
                 for entry in row.split(",")]
                for row in raw.split(";")]
        mat = np.array(rows, dtype=complex)
    except ValueError as exc:
        raise ConfigError(f"bad matrix literal: {exc}") from exc
    if mat.ndim != 2 or mat.shape[0] != mat.shape[1]:
        raise ConfigError(f"matrix must be square, got shape {mat.shape}")
    return mat


def load_config(path) -> ExperimentConfig:
    """Parse and validate a run config file.

    Raises
    ------
    ConfigError
        On unreadable files, unknown sections or keys, missing required
        values, or out-of-range overrides.
    """
    parser = _read_ini(path)
    if "model" not in parser or "case" not in parser["model"]:
        raise ConfigError("config needs [model] case = ...")
    model = parser["model"]
    case = model["case"].strip()
    if case not in _MODELS:
        raise ConfigError(f"unknown model case {case!r}; expected one of "
                          f"{_MODELS}")
    if "drive" not in parser or "mode" not in parser["drive"]:
        raise ConfigError("config needs [drive] mode = ...")
    drive = parser["drive"]["mode"].strip()
    if drive not in _DRIVES:
        raise ConfigError(f"unknown drive {drive!r}; expected one of {_DRIVES}")

    custom = None
    if case == "custom-matrix":
        if "matrix" not in model:
            raise ConfigError("custom-matrix model needs [model] matrix = ...")
        custom = _parse_matrix(model["matrix"])
        if drive != "bare":
            raise ConfigError("custom-matrix supports only drive mode bare")
    elif "matrix" in model:
        raise ConfigError("[model] matrix is only valid for custom-matrix")

    initial_section = parser["initial"] if "initial" in parser else {}
    initial = _parse_initial(initial_section.get("state", "eigenstate-0"),
                             initial_section.get("amplitudes"))
    reference = initial_section.get("reference", "") or ""
    reference = reference.strip()
    if reference == "none":
        reference_level = None
    elif reference == "":
        reference_level = initial[1] if initial[0] == "eigenstate" else 0
    elif reference.startswith("eigenstate-"):
        try:
            reference_level = int(reference[len("eigenstate-"):])
        except ValueError as exc:
            raise ConfigError(f"bad reference {reference!r}") from exc
        if not 0 <= reference_level <= 2:
            raise ConfigError("reference eigenstate index must be 0, 1, or 2")
    else:
        raise ConfigError(f"reference must be eigenstate-n or none, "
                          f"got {reference!r}")
    integ = parser["integration"] if "integration" in parser else {}
    step = _get_float(integ, "step", default=1e-3, minimum=1e-6, maximum=0.05)
    window = _parse_window(integ["window"]) if "window" in integ else None
    if case == "custom-matrix" and window is None:
        raise ConfigError("custom-matrix runs need [integration] window")
    method = integ.get("method", "rk4-fixed").strip()
    if method not in _METHODS:
        raise ConfigError(f"unknown method {method!r}; expected {_METHODS}")
    tolerance = _get_float(integ, "tolerance", default=1e-10,
                           minimum=1e-14, maximum=1e-2)
    out = parser["output"] if "output" in parser else {}
    thresholds = None
    if "thresholds" in parser:
        thresholds = {}
        for key in _SCHEMA["thresholds"]:
            if key in parser["thresholds"] and parser["thresholds"][key] != "":
                thresholds[key] = _get_float(parser["thresholds"], key,
                                             minimum=0.0)
    return ExperimentConfig(
        case=case, drive=drive, initial=initial,
        frequency_unit=_get_float(model, "frequency_unit", default=1.0,
                                  minimum=1e-12),
        step=step, window=window, method=method, tolerance=tolerance,
        reference_level=reference_level,
        out_dir=out.get("dir", "."), label=out.get("label") or None,
        thresholds=thresholds, custom_matrix=custom,
    )


def load_sweep_config(path) -> dict:
    """Parse the [sweep] section (plus [output]) of a config file."""
    parser = _read_ini(path)
    if "sweep" not in parser:
        raise ConfigError("config needs a [sweep] section")
    sweep = parser["sweep"]
    kind = sweep.get("model", "").strip()
    if kind not in ("pseudo", "antipseudo"):
        raise ConfigError("sweep model must be pseudo or antipseudo")
    ratio_min = _get_float(sweep, "ratio_min", default=0.0, minimum=0.0)
    ratio_max = _get_float(sweep, "ratio_max", default=2.0)
    if not ratio_min < ratio_max:
        raise ConfigError("sweep needs ratio_min < ratio_max")
    samples = int(_get_float(sweep, "samples", default=400, minimum=2,
                             maximum=1_000_000))
    out = parser["output"] if "output" in parser else {}
    return {"model": kind, "ratio_min": ratio_min, "ratio_max": ratio_max,
            "samples": samples, "label": sweep.get("label") or f"sweep-{kind}",
            "out_dir": out.get("dir", ".")}


# -------------------------------------------------------------- reporting ---

@dataclass
class RunReport:
    """Per-run summary with pass/fail checks against declared thresholds."""

    fields: dict
    checks: list = field(default_factory=list)

    @property
    def passed(self) -> bool:
        return all(ok for _, _, _, ok in self.checks)

    def lines(self) -> list:
        out = [f"{k}: {v}" for k, v in self.fields.items()]
        for name, threshold, observed, ok in self.checks:
            verdict = "pass" if ok else "fail"
            out.append(f"check_{name}: threshold {threshold:.12g} "
                       f"observed {observed:.12g} {verdict}")
        out.append(f"overall: {'pass' if self.passed else 'fail'}")
        return out

    def text(self) -> str:
        return "\n".join(self.lines()) + "\n"


@dataclass
class RunResult:
    config: ExperimentConfig
    trajectory: Trajectory
    report: RunReport
    csv_path: Optional[Path] = None
    schedule_csv_path: Optional[Path] = None
    report_path: Optional[Path] = None


def _fmt(value) -> str:
    return "%.12g" % (value + 0.0)


def trajectory_header(dim: int = 3) -> str:
    cols = ["t"]
    for k in range(1, dim + 1):
        cols += [f"re_c{k}", f"im_c{k}"]
    cols += [f"p{k}" for k in range(1, dim + 1)]
    cols += [f"p{k}_renorm" for k in range(1, dim + 1)]
    cols += ["norm", "fidelity_sym", "fidelity_plain", "alpha", "beta"]
    return ",".join(cols)


def write_trajectory_csv(traj: Trajectory, path) -> Path:
    """Emit the fixed-schema trajectory table (12 significant digits)."""
    path = Path(path)
    n, dim = traj.states.shape
    renorm = traj.populations_renormalized()
    nan = np.full(n, np.nan)
    fid_u = traj.fidelity_sym if traj.fidelity_sym is not None else nan
    fid_p = traj.fidelity_plain if traj.fidelity_plain is not None else nan
    alpha = traj.alpha if traj.alpha is not None else nan
    beta = traj.beta if traj.beta is not None else nan
    lines = [trajectory_header(dim)]
    for i in range(n):
        row = [_fmt(traj.t[i])]
        for k in range(dim):
            row += [_fmt(traj.states[i, k].real), _fmt(traj.states[i, k].imag)]
        row += [_fmt(traj.populations[i, k]) for k in range(dim)]
        row += [_fmt(renorm[i, k]) for k in range(dim)]
        row += [_fmt(traj.norm[i]), _fmt(fid_u[i]), _fmt(fid_p[i]),
                _fmt(alpha[i]), _fmt(beta[i])]
        lines.append(",".join(row))
    path.write_text("\n".join(lines) + "\n", encoding="utf-8")
    return path


def _write_schedule_csv(bundle: ModelBundle, grid, path) -> Path:
    path = Path(path)
    keys = list(bundle.schedule.parameters(float(grid[0])).keys())
    lines = [",".join(["t"] + keys)]
    for t in grid:
        values = bundle.schedule.parameters(float(t))
        lines.append(",".join([_fmt(float(t))] + [_fmt(values[k])
                                                  for k in keys]))
    path.write_text("\n".join(lines) + "\n", encoding="utf-8")
    return path


# ------------------------------------------------------------------- runs ---

def _build_grid(window, step_abs):
    t0, t1 = window
    count = int(round((t1 - t0) / step_abs)) + 1
    return np.linspace(t0, t1, count)


def _default_thresholds(case: str, drive: str) -> dict:
    return dict(_DEFAULT_THRESHOLDS.get((case, drive), {}))


def run_experiment(config: ExperimentConfig) -> RunResult:
    """Execute one configured run and emit CSV(s) plus a report.

    Output files land in ``config.out_dir``: ``<label>.csv`` (trajectory),
    ``<label>-schedule.csv`` (pulse profiles; model cases only), and
    ``<label>-report.txt``. Returns the trajectory and report in memory
    alongside the paths.

    Raises
    ------
    ConfigError
        For invalid configurations not caught at parse time.
    NhcdError subclasses
        Propagated from the library with their original context.
    """
    t_begin = time.perf_counter()
    bundle = None
    if config.case == "custom-matrix":
        T = 1.0 / config.frequency_unit
        window = (config.window[0] * T, config.window[1] * T)
        mat = np.asarray(config.custom_matrix, dtype=complex)
        schedule = schedule_from_hamiltonian(lambda t: mat, window)
        dim = mat.shape[0]
        u_arg = None
    else:
        T = reference_schedules(config.case, config.frequency_unit)["T"]
        if config.window is None:
            window = (-6.0 * T, 6.0 * T)
        else:
            if config.window[0] < -12.0 or config.window[1] > 12.0:
                raise ConfigError("window override must stay within "
                                  "[-12, 12] passage times")
            window = (config.window[0] * T, config.window[1] * T)
        bundle = build_model(config.case, config.frequency_unit, window=window)
        schedule = bundle.schedule
        dim = 3
        u_arg = (bundle.symmetry.U if bundle.symmetry is not None
                 else (lambda t: bundle.symmetry_at(t).U))

    step_abs = config.step * T
    grid = _build_grid(window, step_abs)

    kind, idx = (config.initial[0], config.initial[1])
    ref_level = config.reference_level if bundle is not None else None
    reference = None
    if ref_level is not None:
        reference = adiabatic_reference(schedule, grid, ref_level,
                                        include_phases=False)
    if kind == "eigenstate":
        if reference is not None and idx == ref_level:
            psi0 = reference.states[0]
        else:
            psi0 = schedule.eigensystem(float(grid[0])).rights[:, idx]
    elif kind == "bare":
        psi0 = np.zeros(dim, dtype=complex)
        psi0[idx - 1] = 1.0
    else:
        psi0 = np.asarray(config.initial[1], dtype=complex)
        if psi0.shape != (dim,):
            raise ConfigError(
                f"amplitudes have dim {psi0.shape[0]}, model needs {dim}"
            )

    n_grid = grid.shape[0]
    if bundle is not None:
        nodes = np.empty(2 * n_grid - 1)
        nodes[0::2] = grid
        nodes[1::2] = 0.5 * (grid[:-1] + grid[1:])
        h_stack = bundle.drive_batch(nodes, config.drive)
        h_of_t = bundle.drive_hamiltonian(config.drive)
    else:
        h_stack = None
        h_of_t = schedule.hamiltonian

    traj = integrate(h_of_t, psi0, grid, method=config.method,
                     H_stack=h_stack if config.method == "rk4-fixed" else None,
                     adaptive_tol=config.tolerance)
    traj = observables(traj, U=u_arg, reference=reference)
    if traj.t.shape[0] >= 3:
        traj = project_phase_decomposition(traj)

    max_eta = None
    if bundle is not None:
        sub = grid[1:-1:max(1, (n_grid - 2) // 96)]
        try:
            max_eta = float(np.max(metric_profile(schedule, sub)))
        except NhcdError:
            max_eta = None

    report = _build_report(config, traj, window, step_abs, max_eta,
                           time.perf_counter() - t_begin)

    out_dir = Path(config.out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    label = config.resolved_label()
    csv_path = write_trajectory_csv(traj, out_dir / f"{label}.csv")
    schedule_path = None
    if bundle is not None:
        schedule_path = _write_schedule_csv(bundle, grid,
                                            out_dir / f"{label}-schedule.csv")
    report_path = out_dir / f"{label}-report.txt"
    report_path.write_text(report.text(), encoding="utf-8")
    return RunResult(config=config, trajectory=traj, report=report,
                     csv_path=csv_path, schedule_csv_path=schedule_path,
                     report_path=report_path)


def _build_report(config, traj, window, step_abs, max_eta, wall) -> RunReport:
    fields = {
        "case": config.case,
        "drive": config.drive,
        "initial": "-".join(str(p) for p in config.initial[:2])
                   if config.initial[0] != "amplitudes" else "amplitudes",
        "label": config.resolved_label(),
        "method": config.method,
        "tolerance": _fmt(config.tolerance),
        "window_abs": f"{window[0]:.12g} {window[1]:.12g}",
        "step_abs": f"{step_abs:.12g}",
        "samples": str(traj.t.shape[0]),
        "truncated": "true" if traj.truncated else "false",
    }
    renorm = traj.populations_renormalized()

    def minmax(name, arr):
        if arr is None:
            fields[f"min_{name}"] = "nan"
            fields[f"max_{name}"] = "nan"
        else:
            fields[f"min_{name}"] = _fmt(float(np.min(arr)))
            fields[f"max_{name}"] = _fmt(float(np.max(arr)))

    minmax("fidelity_sym", traj.fidelity_sym)
    minmax("fidelity_plain", traj.fidelity_plain)
    minmax("norm", traj.norm)
    minmax("alpha", traj.alpha)
    for k in range(traj.dim):
        fields[f"final_p{k + 1}"] = _fmt(float(traj.populations[-1, k]))
    for k in range(traj.dim):
        fields[f"final_p{k + 1}_renorm"] = _fmt(float(renorm[-1, k]))
    fields["max_eta"] = _fmt(max_eta) if max_eta is not None else "not-computed"
    fields["eta_flag"] = ("true" if (max_eta is not None
                                     and max_eta > ETA_FLAG_LEVEL) else "false")
    fields["wall_time_s"] = f"{wall:.3f}"

    thresholds = (config.thresholds if config.thresholds is not None
                  else _default_thresholds(config.case, config.drive))
    checks = []
    if "min_fidelity" in thresholds:
        fid = traj.fidelity_sym if traj.fidelity_sym is not None else traj.fidelity_plain
        observed = float(np.min(fid)) if fid is not None else float("nan")
        ok = (not traj.truncated) and np.isfinite(observed) \
            and observed >= thresholds["min_fidelity"]
        checks.append(("min_fidelity", thresholds["min_fidelity"], observed, ok))
    if "final_p3" in thresholds:
        observed = float(traj.populations[-1, 2]) if traj.dim >= 3 else float("nan")
        ok = (not traj.truncated) and observed >= thresholds["final_p3"]
        checks.append(("final_p3", thresholds["final_p3"], observed, ok))
    if "norm_tol" in thresholds:
        observed = float(np.max(np.abs(traj.norm - 1.0)))
        ok = (not traj.truncated) and observed <= thresholds["norm_tol"]
        checks.append(("norm_deviation", thresholds["norm_tol"], observed, ok))
    if "max_eta" in thresholds:
        observed = max_eta if max_eta is not None else float("nan")
        ok = np.isfinite(observed) and observed <= thresholds["max_eta"]
        checks.append(("max_eta", thresholds["max_eta"], observed, ok))
    return RunReport(fields=fields, checks=checks)


# ------------------------------------------------------------------ sweep ---

@dataclass
class SweepResult:
    """Eigenvalues against a swept ratio with continuity-ordered columns."""

    kind: str
    ratios: np.ndarray
    values: np.ndarray
    ok: np.ndarray

    def write_csv(self, path) -> Path:
        path = Path(path)
        nst = self.values.shape[1]
        header = ["ratio"]
        for k in range(1, nst + 1):
            header += [f"re_e{k}", f"im_e{k}"]
        header.append("status")
        lines = [",".join(header)]
        for i, r in enumerate(self.ratios):
            row = [_fmt(float(r))]
            for k in range(nst):
                row += [_fmt(self.values[i, k].real),
                        _fmt(self.values[i, k].imag)]
            row.append("ok" if self.ok[i] else "degenerate")
            lines.append(",".join(row))
        path.write_text("\n".join(lines) + "\n", encoding="utf-8")
        return path


def _sweep_matrix(kind: str, ratio: float) -> np.ndarray:
    if kind == "pseudo":
        coupling = np.exp(0j) / np.sqrt(2.0)
        return stirap_hamiltonian(StirapParams(
            omega_p=coupling, omega_s=coupling,
            gamma1=ratio, gamma2=0.0, gamma3=-ratio))
    omega = ratio / np.sqrt(2.0)
    return stirap_hamiltonian(StirapParams(
        omega_p=omega, omega_s=omega, gamma1=0.0, gamma2=2.0, gamma3=0.0))


def spectrum_sweep(kind: str, ratio_min: float = 0.0, ratio_max: float = 2.0,
                   samples: int = 400) -> SweepResult:
    """Eigenvalues of one model pattern against its regime ratio.

    For ``kind="pseudo"`` the ratio is gamma/omega at omega = 1; for
    ``kind="antipseudo"`` it is Omega/gamma at gamma = 1 with equal pulses
    (theta = pi/4). Columns are ordered by continuity: each sample's
    eigenvalues are matched to the previous sample by nearest distance.
    Samples where the solver reports a degeneracy (the exceptional point
    itself, or the one-parameter crossings at the range edges) are flagged
    and skipped, not interpolated.
    """
    if kind not in ("pseudo", "antipseudo"):
        raise ConfigError(f"unknown sweep model {kind!r}")
    ratios = np.linspace(float(ratio_min), float(ratio_max), int(samples))
    values = np.full((ratios.size, 3), np.nan + 0j, dtype=complex)
    ok = np.zeros(ratios.size, dtype=bool)
    prev = None
    for i, r in enumerate(ratios):
        try:
            vals, _ = eig(_sweep_matrix(kind, float(r)))
        except DegenerateSpectrum:
            continue
        if prev is not None:
            cost = np.abs(vals[None, :] - prev[:, None])
            _, cols = linear_sum_assignment(cost)
            vals = vals[cols]
        values[i] = vals
        ok[i] = True
        prev = vals
    return SweepResult(kind=kind, ratios=ratios, values=values, ok=ok)


# ------------------------------------------------------------------- plots ---

_PLOT_TEMPLATE = '''\
#!/usr/bin/env python3
"""Rendering script emitted by the experiment runner; run it yourself.

Reads the fixed-schema trajectory CSVs listed below and draws the
population/fidelity panels. The runner never renders images.
"""
import csv

import matplotlib
matplotlib.use("Agg")
import matplotlib.pyplot as plt


def read_csv(path):
    with open(path, newline="") as fh:
        rows = list(csv.DictReader(fh))
    cols = {{name: [float(r[name]) for r in rows] for name in rows[0]}}
    return cols


TRAJECTORIES = {traj_paths!r}
SCHEDULE = {schedule_path!r}

fig, axes = plt.subplots(2, 2, figsize=(9, 7))
panels = [axes[0][0], axes[0][1]]
for ax, path in zip(panels, TRAJECTORIES[:2]):
    data = read_csv(path)
    for k, style in ((1, "-"), (2, "--"), (3, ":")):
        ax.plot(data["t"], data[f"p{{k}}_renorm"], style, label=f"P{{k}}")
    ax.set_xlabel("t")
    ax.set_ylabel("renormalized population")
    ax.set_title(path.rsplit("/", 1)[-1])
    ax.legend(fontsize=8)

ax = axes[1][0]
for path in TRAJECTORIES:
    data = read_csv(path)
    fid = data["fidelity_sym"]
    if all(f != f for f in fid):
        fid = data["fidelity_plain"]
    ax.plot(data["t"], fid, label=path.rsplit("/", 1)[-1])
ax.set_xlabel("t")
ax.set_ylabel("fidelity")
ax.set_ylim(0.0, 1.05)
ax.legend(fontsize=8)

ax = axes[1][1]
if SCHEDULE:
    sched = read_csv(SCHEDULE)
    for name, vals in sched.items():
        if name != "t":
            ax.plot(sched["t"], vals, label=name)
    ax.set_xlabel("t")
    ax.set_ylabel("schedule value (frequency units)")
    ax.legend(fontsize=8)
else:
    data = read_csv(TRAJECTORIES[0])
    ax.plot(data["t"], data["norm"], label="norm")
    ax.plot(data["t"], data["alpha"], label="alpha")
    ax.set_xlabel("t")
    ax.legend(fontsize=8)

fig.tight_layout()
fig.savefig({png_path!r}, dpi=160)
print("wrote", {png_path!r})
'''


def emit_plots(csv_paths, out_path, schedule_csv=None) -> Path:
    """Write a self-contained plotting script for a set of run CSVs.

    The script (not this function) renders a four-panel figure:
    populations of up to two runs, overlaid fidelities, and the pulse
    schedules (or norm/alpha when no schedule CSV is given).

    Raises
    ------
    SchemaError
        When no CSVs are given, a file is missing, or a header does not
        match the documented trajectory schema.
    """
    paths = [Path(p) for p in csv_paths]
    if not paths:
        raise SchemaError("emit_plots needs at least one trajectory CSV")
    for p in paths:
        if not p.is_file():
            raise SchemaError(f"missing CSV {p}")
        header = p.open(encoding="utf-8").readline().strip()
        dim = (len(header.split(",")) - 6) // 4
        if dim < 1 or header != trajectory_header(dim):
            raise SchemaError(f"{p} does not carry the trajectory schema")
    if schedule_csv is not None:
        schedule_csv = Path(schedule_csv)
        if not schedule_csv.is_file():
            raise SchemaError(f"missing schedule CSV {schedule_csv}")
        if not schedule_csv.open(encoding="utf-8").readline().startswith("t,"):
            raise SchemaError(f"{schedule_csv} does not look like a "
                              "schedule CSV")
    out_path = Path(out_path)
    script = _PLOT_TEMPLATE.format(
        traj_paths=[str(p) for p in paths],
        schedule_path=str(schedule_csv) if schedule_csv else None,
        png_path=str(out_path.with_suffix(".png")),
    )
    out_path.write_text(script, encoding="utf-8")
    return out_path
