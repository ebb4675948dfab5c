"""End-to-end reproduction suite for the three-level transfer experiments.

Each test prints one `criterion-NN pass|fail` line. The criteria:
 1. eigenvalue sweep matches +-sqrt(omega^2-gamma^2)/2 to 1e-10, < 1 s
 2. real-regime transfer: assisted fidelity >= 0.999 everywhere, bare drive
    loses by a margin pinned with a quarter-step reference, < 10 s
 3. complex-regime transfer: transport-only drive tracks the eigenpath at
    >= 0.999; total and bare drives overflow or fall under 0.9, < 10 s
 4. gain-loss transfer: final P3 >= 0.99 at norm 1 +- 1e-6; bare drive
    fails the same conjunction, < 10 s
 5. finite-difference connections match the closed forms to 1e-6 over ten
    mixing angles; gain-loss connections vanish to 1e-8
 6. assembled correction matrices match the closed forms to 1e-8 at 50
    schedule samples per case
 7. equation-of-motion residual <= 1e-5 at step 1e-3 T, shrinking >= 4x
    per step halving
 8. 100 random class instances (dims 2-6): biorthonormality and closure
    to 1e-9, conjugation-pairing multisets to 1e-9
 9. exp(2 alpha) equals the norm to 1e-8 on every emitted trajectory;
    pure loss alpha = -kappa t to 1e-10; Hermitian alpha = 0 to 1e-9
10. gain-loss eigenpath self-normalized (residuals <= 1e-9) at every grid
    point; the pi/3 dark state fails with bare norm 2 +- 1e-9
11. verification subcommand finishes < 60 s; repeated runs byte-identical
"""
import subprocess
import sys
import time

import numpy as np
import pytest

from conftest import multiset_residual, well_separated_instance
from nhcd import (ExperimentConfig, adiabatic_reference, berry_connection,
                  build_model, cd_antipseudo, cd_pseudo,
                  check_self_normalized, full_eigensystem, integrate,
                  project_phase_decomposition, pseudo_instance,
                  run_experiment, spectrum_sweep, verify_cd)


def _line(num, ok, detail):
    print(f"criterion-{num:02d} {'pass' if ok else 'fail'} - {detail}")
    assert ok, detail


@pytest.fixture(scope="module")
def out_root(tmp_path_factory):
    return tmp_path_factory.mktemp("acceptance")


@pytest.fixture(scope="module")
def emitted():
    return []


def _run(case, drive, initial, out_root, label, step=1e-3):
    cfg = ExperimentConfig(case=case, drive=drive, initial=initial,
                           step=step, out_dir=str(out_root), label=label)
    return run_experiment(cfg)


@pytest.fixture(scope="module")
def real_regime_runs(out_root, emitted):
    t0 = time.perf_counter()
    runs = {
        "cd": _run("pseudo-real", "full-cd", ("eigenstate", 0), out_root,
                   "fig3-cd"),
        "bare": _run("pseudo-real", "bare", ("eigenstate", 0), out_root,
                     "fig3-bare"),
        "bare_quarter": _run("pseudo-real", "bare", ("eigenstate", 0),
                             out_root, "fig3-bare-q", step=2.5e-4),
    }
    runs["elapsed"] = time.perf_counter() - t0
    emitted.extend(r.trajectory for k, r in runs.items() if k != "elapsed")
    return runs


@pytest.fixture(scope="module")
def complex_regime_runs(out_root, emitted):
    t0 = time.perf_counter()
    dark_at_zero = (build_model("pseudo-complex")
                    .schedule.eigensystem(0.0).rights[:, 0])
    runs = {
        "cd_only": _run("pseudo-complex", "cd-only", ("eigenstate", 0),
                        out_root, "fig4-cdonly"),
        "full": _run("pseudo-complex", "full-cd",
                     ("amplitudes", dark_at_zero), out_root, "fig4-full"),
        "bare": _run("pseudo-complex", "bare",
                     ("amplitudes", dark_at_zero), out_root, "fig4-bare"),
    }
    runs["elapsed"] = time.perf_counter() - t0
    emitted.extend(r.trajectory for k, r in runs.items() if k != "elapsed")
    return runs


@pytest.fixture(scope="module")
def gain_loss_runs(out_root, emitted):
    t0 = time.perf_counter()
    runs = {
        "cd_only": _run("antipseudo", "cd-only", ("eigenstate", 0),
                        out_root, "fig6-cdonly"),
        "bare": _run("antipseudo", "bare", ("eigenstate", 0), out_root,
                     "fig6-bare"),
    }
    runs["elapsed"] = time.perf_counter() - t0
    emitted.extend(r.trajectory for k, r in runs.items() if k != "elapsed")
    return runs


def test_criterion_01_eigenvalue_sweep():
    t0 = time.perf_counter()
    pseudo = spectrum_sweep("pseudo", samples=400)
    anti = spectrum_sweep("antipseudo", samples=400)
    elapsed = time.perf_counter() - t0
    worst = 0.0
    for ratio, row, ok in zip(pseudo.ratios, pseudo.values, pseudo.ok):
        if not ok:
            continue
        root = 0.5 * np.sqrt(1.0 - ratio ** 2 + 0.0j)
        worst = max(worst, multiset_residual(row, [0.0, root, -root]))
        if ratio < 1.0:
            worst = max(worst, np.max(np.abs(row.imag)))
        elif ratio > 1.0:
            worst = max(worst, np.max(np.abs(row.real)))
    worst_anti = 0.0
    for ratio, row, ok in zip(anti.ratios, anti.values, anti.ok):
        if not ok:
            continue
        rho = np.sqrt(1.0 - ratio ** 2 + 0.0j)
        worst_anti = max(worst_anti, multiset_residual(
            row, [0.0, 0.5j * (1.0 - rho), 0.5j * (1.0 + rho)]))
    ok = (worst <= 1e-10 and worst_anti <= 1e-10 and elapsed < 1.0
          and pseudo.ok.all() and not anti.ok[0])
    _line(1, ok, f"closed-form residuals {worst:.2e}/{worst_anti:.2e}, "
                 f"{elapsed:.2f}s")


def test_criterion_02_real_regime_transfer(real_regime_runs):
    runs = real_regime_runs
    cd_min = runs["cd"].trajectory.fidelity_sym.min()
    cd_plain = runs["cd"].trajectory.fidelity_plain.min()
    bare_min = runs["bare"].trajectory.fidelity_plain.min()
    pin = abs(bare_min - runs["bare_quarter"].trajectory.fidelity_plain.min())
    margin = cd_plain - bare_min
    ok = (cd_min >= 0.999 and pin <= 1e-6 and margin >= 0.25
          and runs["elapsed"] < 10.0)
    _line(2, ok, f"assisted min {cd_min:.6f}, bare min {bare_min:.6f} "
                 f"(margin {margin:.3f}, quarter-step shift {pin:.1e}), "
                 f"{runs['elapsed']:.1f}s")


def test_criterion_03_complex_regime_instability(complex_regime_runs):
    runs = complex_regime_runs

    def fails(trajectory):
        return trajectory.truncated or trajectory.fidelity_plain.min() < 0.9

    tracked = runs["cd_only"].trajectory.fidelity_sym.min()
    ok = (tracked >= 0.999 and fails(runs["full"].trajectory)
          and fails(runs["bare"].trajectory) and runs["elapsed"] < 10.0)
    _line(3, ok, f"transport-only min {tracked:.6f}; total/bare minima "
                 f"{runs['full'].trajectory.fidelity_plain.min():.2e}/"
                 f"{runs['bare'].trajectory.fidelity_plain.min():.2e}, "
                 f"{runs['elapsed']:.1f}s")


def test_criterion_04_gain_loss_transfer(gain_loss_runs):
    runs = gain_loss_runs

    def conjunction(trajectory):
        final_p3 = trajectory.populations[-1, 2]
        norm_dev = np.max(np.abs(trajectory.norm - 1.0))
        return final_p3 >= 0.99 and norm_dev <= 1e-6, final_p3, norm_dev

    cd_ok, p3, dev = conjunction(runs["cd_only"].trajectory)
    bare_ok, bare_p3, bare_dev = conjunction(runs["bare"].trajectory)
    ok = cd_ok and not bare_ok and runs["elapsed"] < 10.0
    _line(4, ok, f"final P3 {p3:.6f} at norm dev {dev:.1e}; bare "
                 f"P3 {bare_p3:.4f} at norm dev {bare_dev:.1e}, "
                 f"{runs['elapsed']:.1f}s")


def test_criterion_05_connection_oracle():
    thetas = np.linspace(np.pi / 4 + 0.1, np.pi / 2, 12)[1:-1]
    worst = 0.0
    for theta in thetas:
        s = np.sqrt(-np.cos(2.0 * theta))
        bright = 1.0 / (np.sin(theta) * s)
        along_theta = pseudo_instance(
            lambda t, th=theta: np.tan(th + t), 1.0, (-0.05, 0.05)).schedule
        along_phi = pseudo_instance(
            np.tan(theta), 1.0, (-0.05, 0.05),
            phi=lambda t: np.asarray(t, dtype=float),
            rates={"omega": 0.0, "gamma": 0.0, "phi": 1.0}).schedule
        expected_theta = np.array([0.0, -bright, bright])
        expected_phi = np.array([1.0,
                                 1.0 - 1j * np.cos(theta) / s,
                                 1.0 + 1j * np.cos(theta) / s])
        for n in range(3):
            worst = max(worst, abs(berry_connection(along_theta, 0.0, n,
                                                    delta=1e-5)
                                   - expected_theta[n]))
            worst = max(worst, abs(berry_connection(along_phi, 0.0, n,
                                                    delta=1e-5)
                                   - expected_phi[n]))
    anti = build_model("antipseudo").schedule
    worst_anti = max(abs(berry_connection(anti, float(t), n, delta=1e-5))
                     for t in np.linspace(-25.0, 25.0, 10)
                     for n in range(3))
    ok = worst <= 1e-6 and worst_anti <= 1e-8
    _line(5, ok, f"connection errors {worst:.2e} over {len(thetas)} angles; "
                 f"gain-loss magnitude {worst_anti:.2e}")


def test_criterion_06_assembly_equivalence():
    worst = 0.0
    for case in ("pseudo-real", "pseudo-complex", "antipseudo"):
        bundle = build_model(case)
        assemble = cd_pseudo if bundle.kind == "pseudo" else cd_antipseudo
        t0, t1 = bundle.schedule.window
        for t in np.linspace(t0 + 0.5, t1 - 0.5, 50):
            analytic = bundle.analytic_cd(float(t))
            numeric = assemble(bundle.schedule, float(t),
                               eigenpath=bundle.state_derivatives)
            for field in ("H1", "Htotal", "HcdOnly"):
                worst = max(worst, np.max(np.abs(
                    getattr(numeric, field) - getattr(analytic, field))))
    ok = worst <= 1e-8
    _line(6, ok, f"matrix mismatch {worst:.2e} over 150 samples")


def test_criterion_07_residual_convergence():
    bundle = build_model("pseudo-real")
    residuals = []
    for n in (12001, 24001, 48001):
        grid = np.linspace(-6.0, 6.0, n)
        reference = adiabatic_reference(bundle.schedule, grid, 0, delta=1e-5)
        residuals.append(verify_cd(bundle.analytic_cd,
                                   reference).max_residual)
    ratios = (residuals[0] / residuals[1], residuals[1] / residuals[2])
    ok = residuals[0] <= 1e-5 and min(ratios) >= 4.0
    _line(7, ok, f"residuals {residuals[0]:.2e} -> {residuals[1]:.2e} -> "
                 f"{residuals[2]:.2e} (ratios {ratios[0]:.3f}, "
                 f"{ratios[1]:.3f})")


def test_criterion_08_biorthonormal_property_suite():
    rng = np.random.RandomState(8)
    worst_basis = 0.0
    worst_pairing = 0.0
    for i in range(100):
        dim = int(rng.randint(2, 7))
        kind = "pseudo" if i % 2 == 0 else "antipseudo"
        h, _ = well_separated_instance(rng, dim, kind)
        es = full_eigensystem(h)
        worst_basis = max(worst_basis, es.biorthonormality_residual(),
                          es.closure_residual())
        partner = (np.conj(es.values) if kind == "pseudo"
                   else -np.conj(es.values))
        worst_pairing = max(worst_pairing,
                            multiset_residual(es.values, partner))
    ok = worst_basis <= 1e-9 and worst_pairing <= 1e-9
    _line(8, ok, f"basis residual {worst_basis:.2e}, pairing residual "
                 f"{worst_pairing:.2e} over 100 draws")


def test_criterion_09_exponent_identity(real_regime_runs,
                                        complex_regime_runs, gain_loss_runs,
                                        emitted):
    worst = max(np.max(np.abs(np.exp(2.0 * trajectory.alpha)
                              - trajectory.norm))
                for trajectory in emitted)
    grid = np.linspace(0.0, 1.0, 1001)
    loss = project_phase_decomposition(integrate(
        lambda t: -1j * np.eye(3, dtype=complex),
        np.array([1.0, 0.0, 0.0], dtype=complex), grid))
    loss_err = np.max(np.abs(loss.alpha + grid))
    sx = np.array([[0.0, 1.0], [1.0, 0.0]], dtype=complex)
    hermitian = project_phase_decomposition(integrate(
        lambda t: sx, np.array([1.0, 0.0], dtype=complex),
        np.linspace(0.0, np.pi, 1201)))
    hermitian_err = np.max(np.abs(hermitian.alpha))
    ok = worst <= 1e-8 and loss_err <= 1e-10 and hermitian_err <= 1e-9
    _line(9, ok, f"exp(2a)-norm {worst:.2e} over {len(emitted)} runs; "
                 f"pure loss {loss_err:.2e}; Hermitian {hermitian_err:.2e}")


def test_criterion_10_self_normalization(gain_loss_runs):
    bundle = build_model("antipseudo")
    grid = gain_loss_runs["cd_only"].trajectory.t
    worst = 0.0
    all_ok = True
    for t in grid:
        h = np.asarray(bundle.schedule.hamiltonian(float(t)))
        es = bundle.schedule.eigensystem(float(t))
        passed, info = check_self_normalized(h, bundle.symmetry.U,
                                             es.rights[:, 0], es.values[0],
                                             "antipseudo")
        all_ok = all_ok and passed
        worst = max(worst, info["primary_residual"],
                    info["secondary_residual"])
    inst = pseudo_instance(np.sqrt(3.0), 1.0, (-1.0, 1.0))
    es = inst.schedule.eigensystem(0.0)
    failed, info = check_self_normalized(
        np.asarray(inst.schedule.hamiltonian(0.0)), inst.symmetry.U,
        es.rights[:, 0], es.values[0], "pseudo")
    overlap = info["self_overlap"]
    ok = (all_ok and worst <= 1e-9 and not failed
          and abs(overlap - 2.0) <= 1e-9)
    _line(10, ok, f"gain-loss residual {worst:.2e} over {grid.size} points; "
                  f"pi/3 overlap {overlap.real:.9f}")


def test_criterion_11_determinism_and_wall_time(tmp_path, out_root):
    t0 = time.perf_counter()
    proc = subprocess.run(
        [sys.executable, "-c",
         "import sys; from nhcd.cli import main; "
         f"sys.exit(main(['verify', '--out', {str(tmp_path)!r}]))"],
        capture_output=True, text=True)
    elapsed = time.perf_counter() - t0
    first = _run("antipseudo", "cd-only", ("eigenstate", 0),
                 tmp_path / "a", "det")
    second = _run("antipseudo", "cd-only", ("eigenstate", 0),
                  tmp_path / "b", "det")
    identical = (first.csv_path.read_bytes() == second.csv_path.read_bytes())
    ok = proc.returncode == 0 and elapsed < 60.0 and identical
    _line(11, ok, f"verification suite exit {proc.returncode} in "
                  f"{elapsed:.1f}s; repeated run byte-identical: "
                  f"{identical}")
