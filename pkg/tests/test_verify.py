import numpy as np
import pytest

from helpers import device_system, grid_for
from trispin.model import ModelParams, build_trimer, unit_convert
from trispin.basis import DeviceSystem
from trispin.spin_core import hermitian, propagator
from trispin.verify import (FlatChannelError, brute_force_rabi, report_table,
                            run_oracle_suite, series_expm_oracle)

RNG = np.random.default_rng(31)


class TestSeriesExpm:
    def test_zero_time_is_identity(self):
        a = RNG.normal(size=(5, 5))
        h = hermitian(0.5 * (a + a.T))
        assert np.allclose(series_expm_oracle(h, 0.0).matrix, np.eye(5))

    def test_diagonal_case_exact(self):
        h = hermitian(np.diag([0.4, -1.1, 2.0]))
        out = series_expm_oracle(h, 3.0).matrix
        assert np.abs(np.diag(out) - np.exp(-1j * np.diag(h.matrix) * 3.0)).max() < 1e-14

    def test_agrees_with_propagator(self):
        for _ in range(30):
            dim = int(RNG.integers(2, 19))
            a = RNG.normal(size=(dim, dim)) + 1j * RNG.normal(size=(dim, dim))
            h = hermitian(0.5 * (a + a.conj().T))
            t = float(RNG.uniform(0, 12))
            assert np.abs(series_expm_oracle(h, t).matrix
                          - propagator(h, t).matrix).max() < 1e-9


class TestBruteForceRabi:
    def test_spin_one_resonance_row(self):
        p = ModelParams.isotropic(1, j_k=-0.40, j_h=-0.05, d=-0.60, t_hop=0.05)
        system = device_system(p)
        omega, p_max = brute_force_rabi(
            system.h_device, system.basis_state("down:2:2"),
            system.basis_state("up:2:1"), grid_for(0.40))
        assert p_max == pytest.approx(1.0, abs=1e-6)
        assert omega == pytest.approx(0.40, rel=5e-3)

    def test_half_model_ceiling(self):
        p = ModelParams.isotropic(0.5, j_k=-0.40, j_h=-0.05, t_hop=0.05)
        system = device_system(p)
        omega, p_max = brute_force_rabi(
            system.h_device, system.basis_state("down:1:1"),
            system.basis_state("up:1:0"), grid_for(0.30))
        assert p_max == pytest.approx(8 / 9, abs=1e-6)
        assert omega == pytest.approx(0.30, rel=5e-3)

    def test_trimer_balanced_point(self):
        bundle = build_trimer(-0.4, -0.4)
        system = DeviceSystem.from_bundle(bundle)
        omega_guess = np.hypot(0.4, 0.4)
        omega, p_max = brute_force_rabi(
            system.h_device, system.basis_state("1:1:0"),
            system.basis_state("0:1:1"), grid_for(omega_guess))
        assert p_max == pytest.approx(0.5, abs=1e-6)
        assert omega == pytest.approx(omega_guess, rel=5e-3)

    def test_flat_channel_flagged(self):
        p = ModelParams.isotropic(1, j_k=-0.40, j_h=-0.05, d=-0.60, t_hop=0.05)
        system = device_system(p)
        with pytest.raises(FlatChannelError):
            brute_force_rabi(system.h_device, system.basis_state("up:2:2"),
                             system.basis_state("down:2:-2"), grid_for(0.40))


class TestOracleSuite:
    def test_all_pass_and_list_tolerances(self):
        reports = run_oracle_suite(n_random=12, seed=3)
        assert all(r.passed for r in reports)
        assert all(r.tolerance > 0 for r in reports)
        table = report_table(reports)
        assert f"{len(reports)}/{len(reports)} oracle checks passed" in table

    def test_report_lines_show_status(self):
        reports = run_oracle_suite(n_random=4, seed=5)
        for r in reports:
            assert r.line().startswith("pass")
