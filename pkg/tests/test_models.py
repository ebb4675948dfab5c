"""Three-level model builders, schedules, and analytic eigenpaths.

Known values:
- The arrow Hamiltonian at omega=2, gamma=1 (couplings omega/(2 sqrt 2)),
  with corner gains +-i gamma/2, has spectrum {0, +-sqrt(3)/2}.
- The gain-loss ladder with equal couplings omega/2 and center gain
  i gamma has spectrum {0, i(gamma +- sqrt(gamma^2 - 2 omega^2))/2};
  at omega=0.6, gamma=1 that is {0, i(1 +- sqrt(0.28))/2}.
- Hyperbolic reference schedules: omega(0)=3, gamma(0)=2 tanh(3/2),
  omega(6T)=3 sech(6); the gain-loss case uses displaced sech pulses of
  height 5 and a tanh-difference gain with passage time T=5.
"""
import numpy as np
import pytest

from conftest import multiset_residual
from nhcd import (CASES, EPCrossing, StirapParams, antipseudo_instance,
                  berry_connection, build_model, full_eigensystem,
                  pseudo_instance, reference_schedules, stirap_hamiltonian)


class TestStirapHamiltonian:
    def test_arrow_form(self):
        h = stirap_hamiltonian(StirapParams(np.sqrt(2.0), np.sqrt(2.0),
                                            1.0, 0.0, -1.0))
        expected = np.array([[0.5j, 2 ** -0.5, 0.0],
                             [2 ** -0.5, 0.0, 2 ** -0.5],
                             [0.0, 2 ** -0.5, -0.5j]], dtype=complex)
        np.testing.assert_allclose(h, expected, atol=1e-12)

    def test_complex_coupling_conjugated_below_diagonal(self):
        h = stirap_hamiltonian(StirapParams(2.0, 2.0j, 1.0, 0.5, -1.0))
        expected = np.array([[0.5j, 1.0, 0.0],
                             [1.0, 0.25j, 1.0j],
                             [0.0, -1.0j, -0.5j]], dtype=complex)
        np.testing.assert_allclose(h, expected, atol=1e-12)


class TestInstances:
    def test_real_regime_spectrum(self):
        inst = pseudo_instance(2.0, 1.0, (-1.0, 1.0))
        assert (inst.kind, inst.regime) == ("pseudo", "real")
        values = np.sort(inst.schedule.eigensystem(0.0).values.real)
        root = 0.5 * np.sqrt(3.0)
        np.testing.assert_allclose(values, [-root, 0.0, root], atol=1e-10)

    def test_complex_regime_detected(self):
        inst = pseudo_instance(1.0, 2.0, (-1.0, 1.0))
        assert inst.regime == "complex"

    def test_gain_loss_spectrum(self):
        # gamma exceeds sqrt(2) omega, so the spectrum is self-paired
        # (purely imaginary), the analogue of the real regime.
        inst = antipseudo_instance(0.6, 0.6, 1.0, (-1.0, 1.0))
        assert (inst.kind, inst.regime) == ("antipseudo", "real")
        values = sorted(inst.schedule.eigensystem(0.0).values,
                        key=lambda z: z.imag)
        rho = np.sqrt(1.0 - 0.72)
        np.testing.assert_allclose(
            values, [0.0, 0.5j * (1 - rho), 0.5j * (1 + rho)], atol=1e-10)

    def test_exceptional_point_rejected(self):
        with pytest.raises(EPCrossing):
            pseudo_instance(1.0, 1.0, (-1.0, 1.0))

    def test_exceptional_crossing_in_window_rejected(self):
        with pytest.raises(EPCrossing):
            pseudo_instance(lambda t: 2.0 - 0.5 * t, 1.0, (0.0, 3.0))

    def test_nonpositive_rates_rejected(self):
        with pytest.raises(ValueError):
            pseudo_instance(lambda t: 2.0 - t, 1.0, (0.0, 3.0))


class TestReferenceSchedules:
    def test_arrow_case_values(self):
        sch = reference_schedules("pseudo-real")
        assert sch["T"] == 1.0
        np.testing.assert_allclose(sch["omega"](0.0), 3.0, atol=1e-12)
        np.testing.assert_allclose(sch["gamma"](0.0), 2.0 * np.tanh(1.5),
                                   atol=1e-12)
        np.testing.assert_allclose(sch["omega"](6.0), 3.0 / np.cosh(6.0),
                                   atol=1e-12)
        np.testing.assert_allclose(sch["gamma"](6.0), 2.461773475e-4,
                                   atol=1e-12)

    def test_passage_times(self):
        assert reference_schedules("pseudo-complex")["T"] == 2.0
        assert reference_schedules("antipseudo")["T"] == 5.0

    def test_gain_loss_case_values(self):
        sch = reference_schedules("antipseudo")
        np.testing.assert_allclose(sch["omega1"](0.0), 5.0 / np.cosh(1.5),
                                   atol=1e-12)
        np.testing.assert_allclose(sch["omega2"](0.0), 5.0 / np.cosh(1.5),
                                   atol=1e-12)
        np.testing.assert_allclose(
            sch["gamma"](0.0), (np.tanh(1.5) - np.tanh(-1.5)) / 5.0,
            atol=1e-12)
        assert sch["window"] == (-30.0, 30.0)

    def test_all_cases_buildable(self):
        for case in CASES:
            bundle = build_model(case)
            assert bundle.case == case


class TestAnalyticEigenpath:
    def test_values_match_direct_solver(self):
        for case in CASES:
            bundle = build_model(case)
            t0, t1 = bundle.schedule.window
            for t in np.linspace(t0 + 0.3, t1 - 0.3, 20):
                h = np.asarray(bundle.schedule.hamiltonian(float(t)))
                analytic = bundle.schedule.eigensystem(float(t)).values
                direct = full_eigensystem(h).values
                assert multiset_residual(analytic, direct) <= 1e-10

    def test_eigenpath_is_biorthonormal(self):
        bundle = build_model("pseudo-real")
        for t in (-4.0, 0.0, 3.5):
            es = bundle.schedule.eigensystem(t)
            assert es.biorthonormality_residual() <= 1e-9

    def test_connections_match_finite_differences(self):
        # analytic_connections returns per-angle coefficients; the total
        # connection contracts them with the angle rates (theta', phi').
        bundle = build_model("pseudo-real")
        for t in (-2.0, 0.5, 1.5):
            coefficients = np.asarray(bundle.analytic_connections(t))
            rates = np.asarray(bundle.angle_rates(t))
            expected = coefficients @ rates
            for n in range(3):
                got = berry_connection(bundle.schedule, t, n, delta=1e-5)
                np.testing.assert_allclose(got, expected[n], atol=1e-6)


class TestDriveMapping:
    def test_drives_alias_bundle_matrices(self):
        bundle = build_model("pseudo-real")
        t = 0.3
        parts = bundle.analytic_cd(t)
        np.testing.assert_allclose(bundle.drive_hamiltonian("bare")(t),
                                   parts.H0, atol=1e-12)
        np.testing.assert_allclose(bundle.drive_hamiltonian("full-cd")(t),
                                   parts.Htotal, atol=1e-12)
        np.testing.assert_allclose(bundle.drive_hamiltonian("cd-only")(t),
                                   parts.HcdOnly, atol=1e-12)


class TestFrequencyScaling:
    def test_window_and_rates_scale(self):
        base = build_model("pseudo-real")
        fast = build_model("pseudo-real", frequency_unit=2.0)
        assert fast.schedule.window == (-3.0, 3.0)
        np.testing.assert_allclose(
            fast.schedule.parameters(0.0)["omega"],
            2.0 * base.schedule.parameters(0.0)["omega"], atol=1e-12)
        np.testing.assert_allclose(
            fast.schedule.parameters(0.0)["theta"],
            base.schedule.parameters(0.0)["theta"], atol=1e-12)
