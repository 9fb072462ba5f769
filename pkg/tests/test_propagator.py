"""Spectral-interpolation exponential, drive phases, populations, sweeps."""

import numpy as np
import pytest

from rabisim.charpoly import build_coupling_matrix
from rabisim.eigensolver import Spectrum, eigenvalues_closed, eigenvalues_general
from rabisim.exceptions import DegenerateSpectrumError
from rabisim.propagator import (
    DriveConfig,
    evolution_operator,
    expm_sylvester,
    matrix_powers,
    phase_matrix,
    population_sweep,
    populations,
    sylvester_coeffs,
)
from rabisim.reference import series_expm

from literal_forms import sylvester_f_n3, sylvester_f_n4


class TestDriveConfig:
    def test_zero(self):
        d = DriveConfig.zero(4)
        assert d.n_levels == 4
        assert np.all(d.omegas == 0.0) and np.all(d.phis == 0.0) and d.e0 == 0.0

    def test_from_energies_decreasing_gaps(self):
        d = DriveConfig.from_energies([0.0, 10.0, 18.0, 24.0])
        assert np.allclose(d.omegas, [10.0, 8.0, 6.0], atol=0.0)
        assert d.e0 == 0.0
        assert np.all(d.phis == 0.0)

    def test_from_energies_warns_on_bad_ordering(self):
        with pytest.warns(UserWarning):
            DriveConfig.from_energies([0.0, 1.0, 3.0])

    def test_rejects_mismatched_lengths(self):
        with pytest.raises(ValueError):
            DriveConfig(omegas=[1.0, 2.0], phis=[0.0])

    def test_rejects_nonfinite(self):
        with pytest.raises(ValueError):
            DriveConfig(omegas=[np.inf], phis=[0.0])


class TestSylvesterCoeffs:
    def test_two_level_analytic(self):
        s = eigenvalues_closed([2.0])
        for t in (0.0, 0.4, 2.5, -1.1):
            f = sylvester_coeffs(s, t).f
            assert abs(f[0] - np.cos(2.0 * t)) < 1e-14
            assert abs(f[1] - (-1j) * np.sin(2.0 * t) / 2.0) < 1e-14

    def test_matches_literal_three_level_form(self):
        rng = np.random.default_rng(45)
        for _ in range(30):
            g = rng.uniform(0.1, 10.0, 2)
            t = rng.uniform(-3.0, 3.0)
            s = eigenvalues_closed(g)
            got = sylvester_coeffs(s, t).f
            want = sylvester_f_n3(s.eigenvalues, t)
            assert np.max(np.abs(got - want)) < 1e-11 * max(1.0, np.max(np.abs(want)))

    def test_matches_literal_four_level_form(self):
        rng = np.random.default_rng(47)
        for _ in range(30):
            g = rng.uniform(0.1, 10.0, 3)
            t = rng.uniform(-3.0, 3.0)
            s = eigenvalues_closed(g)
            got = sylvester_coeffs(s, t).f
            want = sylvester_f_n4(s.eigenvalues, t)
            assert np.max(np.abs(got - want)) < 1e-11 * max(1.0, np.max(np.abs(want)))

    def test_rejects_near_degenerate_spectrum(self):
        s = Spectrum.from_values([1.0 + 5e-10, 1.0, -1.0, -1.0 - 5e-10])
        with pytest.raises(DegenerateSpectrumError):
            sylvester_coeffs(s, 1.0)

    def test_time_zero_gives_identity_coefficients(self):
        rng = np.random.default_rng(59)
        for n in (2, 4, 5, 7):
            s = eigenvalues_general(rng.uniform(0.1, 10.0, n - 1))
            f = sylvester_coeffs(s, 0.0).f
            want = np.zeros(n, dtype=complex)
            want[0] = 1.0
            assert np.max(np.abs(f - want)) < 1e-12

    def test_negative_time_conjugates_coefficients(self):
        rng = np.random.default_rng(61)
        for n in (2, 3, 6):
            s = eigenvalues_general(rng.uniform(0.1, 10.0, n - 1))
            t = rng.uniform(0.1, 2.0)
            forward = sylvester_coeffs(s, t).f
            backward = sylvester_coeffs(s, -t).f
            assert np.max(np.abs(backward - np.conj(forward))) < 1e-13

    def test_esym_tables_shape_and_leading_one(self):
        s = eigenvalues_general([1.0, 2.0, 3.0])
        tables = sylvester_coeffs(s, 0.7).esym_tables
        assert tables.shape == (4, 4)
        assert np.all(tables[:, 0] == 1.0)


def test_matrix_powers():
    c = build_coupling_matrix([1.0, 2.0])
    powers = matrix_powers(c, 3)
    assert len(powers) == 3
    assert np.array_equal(powers[0], np.eye(3))
    assert np.array_equal(powers[1], c)
    assert np.array_equal(powers[2], c @ c)


class TestExpmSylvester:
    @pytest.mark.parametrize("n", list(range(2, 11)))
    def test_matches_series(self, n):
        rng = np.random.default_rng(300 + n)
        for _ in range(20):
            g = rng.uniform(0.1, 10.0, n - 1)
            t = rng.uniform(-2.0, 2.0)
            if abs(t) * g.max() > 20.0:
                t = 20.0 / g.max() * np.sign(t)
            c = build_coupling_matrix(g)
            s = eigenvalues_general(g)
            u = expm_sylvester(c, sylvester_coeffs(s, t))
            want = series_expm(c, t)
            assert np.linalg.norm(u - want) < 1e-8 * n

    def test_dimension_mismatch(self):
        s = eigenvalues_closed([1.0])
        coeffs = sylvester_coeffs(s, 0.5)
        with pytest.raises(ValueError):
            expm_sylvester(build_coupling_matrix([1.0, 1.0]), coeffs)

    def test_two_level_quarter_period(self):
        c = build_coupling_matrix([1.0])
        s = eigenvalues_closed([1.0])
        u = expm_sylvester(c, sylvester_coeffs(s, np.pi / 2.0))
        want = np.array([[0.0, -1j], [-1j, 0.0]])
        assert np.max(np.abs(u - want)) < 1e-15

    def test_group_property(self):
        rng = np.random.default_rng(63)
        for n in (2, 5, 8):
            g = rng.uniform(0.1, 10.0, n - 1)
            c = build_coupling_matrix(g)
            s = eigenvalues_general(g)
            t1, t2 = rng.uniform(-1.5, 1.5, 2)
            u1 = expm_sylvester(c, sylvester_coeffs(s, t1))
            u2 = expm_sylvester(c, sylvester_coeffs(s, t2))
            u12 = expm_sylvester(c, sylvester_coeffs(s, t1 + t2))
            assert np.linalg.norm(u1 @ u2 - u12) < 1e-9

    def test_time_reversal_is_adjoint(self):
        rng = np.random.default_rng(67)
        g = rng.uniform(0.1, 10.0, 4)
        c = build_coupling_matrix(g)
        s = eigenvalues_general(g)
        t = 1.1
        u = expm_sylvester(c, sylvester_coeffs(s, t))
        u_back = expm_sylvester(c, sylvester_coeffs(s, -t))
        assert np.max(np.abs(u_back - u.conj().T)) < 1e-12


def test_phase_matrix_structure():
    d = DriveConfig(omegas=[2.0, 3.0], phis=[0.1, 0.2], e0=5.0)
    t = 0.7
    v = phase_matrix(d, t)
    assert v.shape == (3, 3)
    assert np.count_nonzero(v - np.diag(np.diag(v))) == 0
    assert v[0, 0] == 1.0
    assert abs(v[1, 1] - np.exp(1j * (2.0 * t + 0.1))) < 1e-15
    assert abs(v[2, 2] - np.exp(1j * (5.0 * t + 0.3))) < 1e-15
    assert np.max(np.abs(np.abs(np.diag(v)) - 1.0)) < 1e-15


class TestEvolutionOperator:
    def test_factorization(self):
        # U = exp(-i t e0) V(t)^dagger exp(-i t C), assembled independently
        g = np.array([1.0, 2.5])
        d = DriveConfig(omegas=[1.5, 0.5], phis=[0.2, -0.4], e0=0.9)
        t = 1.3
        u = evolution_operator(g, drive=d, t=t, method="closed")
        v = phase_matrix(d, t)
        core = series_expm(build_coupling_matrix(g), t)
        want = np.exp(-1j * t * 0.9) * v.conj().T @ core
        assert np.max(np.abs(u - want)) < 1e-12

    def test_methods_agree(self):
        rng = np.random.default_rng(51)
        for n in (2, 4, 5, 7):
            g = rng.uniform(0.1, 10.0, n - 1)
            t = rng.uniform(-2.0, 2.0)
            u_closed = evolution_operator(g, t=t, method="closed")
            u_general = evolution_operator(g, t=t, method="general")
            u_oracle = evolution_operator(g, t=t, method="oracle")
            assert np.max(np.abs(u_closed - u_general)) < 1e-9
            assert np.max(np.abs(u_closed - u_oracle)) < 1e-9

    def test_degenerate_fallback_stays_accurate(self):
        # gap below threshold: spectral interpolation would divide by ~0
        g = np.array([1.0, 1e-9, 1.0])
        u = evolution_operator(g, t=1.2, method="closed")
        want = series_expm(build_coupling_matrix(g), 1.2)
        assert np.max(np.abs(u - want)) < 1e-13

    def test_rejects_closed_above_seven(self):
        with pytest.raises(ValueError):
            evolution_operator(np.ones(7), t=1.0, method="closed")

    def test_rejects_unknown_method(self):
        with pytest.raises(ValueError):
            evolution_operator([1.0], t=1.0, method="magic")

    def test_rejects_drive_size_mismatch(self):
        with pytest.raises(ValueError):
            evolution_operator([1.0, 1.0], drive=DriveConfig.zero(2), t=1.0)


class TestPopulations:
    def test_initial_index(self):
        u = evolution_operator([1.0], t=np.pi / 2)
        p = populations(u, 0)
        assert abs(p[0]) < 1e-12 and abs(p[1] - 1.0) < 1e-12

    def test_initial_amplitudes(self):
        u = np.eye(2, dtype=complex)
        p = populations(u, [1.0 / np.sqrt(2.0), 1j / np.sqrt(2.0)])
        assert np.max(np.abs(p - 0.5)) < 1e-12

    def test_rejects_nonunitary(self):
        with pytest.raises(ValueError):
            populations(2.0 * np.eye(2), 0)

    def test_rejects_unnormalized_state(self):
        with pytest.raises(ValueError):
            populations(np.eye(2, dtype=complex), [1.0, 1.0])

    def test_sum_is_one_to_machine_precision(self):
        rng = np.random.default_rng(69)
        for n in (2, 4, 7):
            g = rng.uniform(0.1, 10.0, n - 1)
            u = evolution_operator(g, t=rng.uniform(0.0, 3.0), method="general")
            p = populations(u, rng.integers(0, n))
            assert abs(p.sum() - 1.0) < 1e-12

    def test_phase_parameters_cannot_move_probability(self):
        # starting from one level, e0 and the phis only contribute phases
        g = np.array([1.0, 2.0])
        t = 0.9
        base = populations(evolution_operator(g, t=t), 0)
        shifted = populations(
            evolution_operator(
                g, drive=DriveConfig(omegas=[0.0, 0.0], phis=[1.1, -0.7], e0=4.2), t=t
            ),
            0,
        )
        assert np.max(np.abs(base - shifted)) < 1e-12


class TestPopulationSweep:
    def test_matches_single_time_calls(self):
        g = np.array([1.0, 2.0, 0.5])
        d = DriveConfig(omegas=[1.0, 2.0, 3.0], phis=[0.1, 0.2, 0.3], e0=0.4)
        times = np.linspace(0.0, 3.0, 7)
        result = population_sweep(g, drive=d, times=times, method="general", initial=1)
        assert result.populations.shape == (7, 4)
        assert result.method_used == "general"
        assert result.max_unitarity_defect < 1e-12
        for row, t in enumerate(times):
            u = evolution_operator(g, drive=d, t=t, method="general")
            want = populations(u, 1)
            assert np.max(np.abs(result.populations[row] - want)) < 1e-12

    def test_conservation(self):
        rng = np.random.default_rng(53)
        for n in (2, 5, 9):
            g = rng.uniform(0.1, 10.0, n - 1)
            times = np.linspace(0.0, 5.0, 40)
            result = population_sweep(g, times=times, method="general")
            sums = result.populations.sum(axis=1)
            assert np.max(np.abs(sums - 1.0)) < 1e-10

    def test_degenerate_fallback_reported(self):
        g = np.array([1.0, 1e-9, 1.0])
        result = population_sweep(g, times=[0.5, 1.0], method="general")
        assert result.degenerate_fallback
        assert result.method_used == "oracle"
        assert np.max(np.abs(result.populations.sum(axis=1) - 1.0)) < 1e-10

    def test_oracle_method(self):
        g = np.array([2.0, 1.0])
        times = np.linspace(0.0, 2.0, 5)
        r_oracle = population_sweep(g, times=times, method="oracle")
        r_closed = population_sweep(g, times=times, method="closed")
        assert r_oracle.method_used == "oracle"
        assert np.max(np.abs(r_oracle.populations - r_closed.populations)) < 1e-10

    def test_drive_does_not_change_populations_from_basis_state(self):
        # diagonal phases cannot move probability when starting in one level
        g = np.array([1.3, 0.8])
        d = DriveConfig(omegas=[5.0, 7.0], phis=[1.0, 2.0], e0=3.0)
        times = np.linspace(0.0, 4.0, 15)
        with_drive = population_sweep(g, drive=d, times=times, method="closed")
        without = population_sweep(g, times=times, method="closed")
        assert np.max(np.abs(with_drive.populations - without.populations)) < 1e-12
