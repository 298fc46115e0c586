"""Acceptance criteria, one test per criterion at its stated tolerance.

Run with `pytest tests/test_acceptance.py -v -s` to see one pass/fail line
per criterion.  Everything runs at desk scale (largest matrix 242 states).
"""

import numpy as np
import pytest

from helpers import device_system, full_peak, grid_for
from trispin.analysis import (dj_resonance, eigen_balance,
                              generalized_dj_resonance, rabi, trimer_rabi)
from trispin.basis import DeviceSystem, device_to_total, parse_total_label
from trispin.dynamics import DensityMatrix, evolve
from trispin.filtering import FilterSpec, prepare_filtered, relative_transition, spinor
from trispin.model import ModelParams, build_bh3, build_trimer
from trispin.spin_core import Spin
from trispin.verify import brute_force_rabi, run_oracle_suite


def report(criterion: str, detail: str = ""):
    print(f"ACCEPT {criterion}: PASS  {detail}")


S1 = dict(j_h=-0.05, d=-0.60, t_hop=0.05)


def test_01_spin_one_dj_resonance_and_detuning():
    """Resonant stretched-pair transfer is lossless at (2/3)|D|; detuning by
    +-0.1 lowers the peak exactly as the two-level reduction predicts."""
    system = device_system(ModelParams.isotropic(1, j_k=-0.40, **S1))
    omega, p_max = full_peak(system, "down:2:2", "up:2:1", 0.40)
    assert p_max == pytest.approx(1.0, abs=1e-6)
    assert omega == pytest.approx(0.40, rel=5e-3)
    details = [f"omega={omega:.6f} p={p_max:.9f}"]
    for j_k in (-0.30, -0.50):
        sys_k = device_system(ModelParams.isotropic(1, j_k=j_k, **S1))
        block = sys_k.block_of("down:2:2").two_level
        predicted = rabi(block.coupling, block.omega_z).p_max
        omega_k, p_k = full_peak(sys_k, "down:2:2", "up:2:1",
                                 rabi(block.coupling, block.omega_z).omega)
        assert p_k < 1.0 - 1e-3
        assert p_k == pytest.approx(predicted, abs=1e-6)
        details.append(f"jk={j_k}: p={p_k:.6f} (pred {predicted:.6f})")
    report("01 spin-1 DJ resonance", "; ".join(details))


def test_02_spin_one_inner_pair_resonance():
    """The m = +-1/2 pairs reach unity at J_K = -2D with omega = sqrt2 |D|."""
    j_k = -2 * S1["d"]
    system = device_system(ModelParams.isotropic(1, j_k=j_k, **S1))
    expected_omega = np.sqrt(2) * abs(S1["d"])
    for src, tgt in (("up:1:0", "down:1:1"), ("up:1:-1", "down:1:0")):
        omega, p_max = full_peak(system, src, tgt, expected_omega)
        assert p_max == pytest.approx(1.0, abs=1e-6)
        assert omega == pytest.approx(expected_omega, rel=5e-3)
    report("02 spin-1 inner-pair resonance at -2D",
           f"omega={omega:.6f} (expect {expected_omega:.6f})")


def test_03_spin_half_ceiling():
    """Half-spin transfer peaks at 8/9 for either exchange sign and never
    exceeds it over a (J_K, J_H) grid with isotropic pair exchange."""
    for j_k in (-0.40, 0.40):
        system = device_system(ModelParams.isotropic(0.5, j_k=j_k, j_h=-0.05,
                                                     t_hop=0.05))
        omega, p_max = full_peak(system, "down:1:1", "up:1:0", 0.75 * abs(j_k))
        assert p_max == pytest.approx(8 / 9, abs=1e-6)
        assert omega == pytest.approx(0.75 * abs(j_k), rel=5e-3)
    worst = 0.0
    j_ks = [v for v in np.linspace(-0.5, 0.5, 11) if abs(v) > 1e-9]
    j_hs = np.linspace(-0.25, 0.20, 10)
    for j_k in j_ks[:10]:
        for j_h in j_hs:
            system = device_system(ModelParams.isotropic(0.5, j_k=j_k, j_h=j_h,
                                                         t_hop=0.05))
            _, p_max = full_peak(system, "down:1:1", "up:1:0", 0.75 * abs(j_k))
            worst = max(worst, p_max)
    assert worst <= 8 / 9 + 1e-6
    report("03 spin-1/2 ceiling 8/9", f"grid max p={worst:.9f}")


def test_04_general_spin_resonance_formula():
    """J = D(s-1/2)/(s-1/4) gives lossless transfer on both stretched
    channels for five spin magnitudes."""
    d = -0.60
    details = []
    for twice in (2, 3, 4, 5, 10):
        s = Spin(twice)
        j = dj_resonance(s, d).j_r
        system = device_system(ModelParams.isotropic(s, j_k=j, j_h=-0.05,
                                                     d=d, t_hop=0.05))
        two_s = f"{2 * s.value:g}"
        down_partner = f"{Spin(2 * twice - 2).value * -1:g}" \
            if twice != 2 else "-1"
        guess = abs(j) * np.sqrt(s.value)
        for src, tgt in ((f"down:{two_s}:{two_s}", f"up:{two_s}:{s.value * 2 - 1:g}"),
                         (f"up:{two_s}:-{two_s}",
                          f"down:{two_s}:{-(s.value * 2 - 1):g}")):
            _, p_max = full_peak(system, src, tgt, guess)
            assert p_max == pytest.approx(1.0, abs=1e-6)
        details.append(f"s={s}: J_R={j:.4f}")
    report("04 general-s resonance formula", "; ".join(details))


def test_05_generalized_resonances_split_by_field():
    """With anisotropic pair exchange and a field on unequal g-factors the
    two stretched blocks resonate at different exchange values."""
    kwargs = dict(d=-0.60, j_z=-0.08, j_xy=-0.02, b0=2.0, g1=2.0, g23=1.8)
    pred = generalized_dj_resonance(1, **kwargs)
    assert not pred.degenerate

    def run(j_k, src, tgt):
        p = ModelParams(s2=Spin(2), s3=Spin(2), j_k2=j_k, j_k3=j_k,
                        t_hop=0.05, **kwargs)
        system = device_system(p)
        block = system.block_of(src).two_level
        guess = rabi(block.coupling, block.omega_z).omega
        return full_peak(system, src, tgt, guess)

    _, p_aa = run(pred.j_a, "down:2:2", "up:2:1")
    _, p_ab = run(pred.j_a, "up:2:-2", "down:2:-1")
    _, p_bb = run(pred.j_b, "up:2:-2", "down:2:-1")
    _, p_ba = run(pred.j_b, "down:2:2", "up:2:1")
    assert p_aa == pytest.approx(1.0, abs=1e-6)
    assert p_bb == pytest.approx(1.0, abs=1e-6)
    assert p_ab < 1.0 - 1e-3
    assert p_ba < 1.0 - 1e-3
    report("05 generalized resonances",
           f"J_a={pred.j_a:.5f} (p={p_aa:.8f}, mirror {p_ab:.4f}); "
           f"J_b={pred.j_b:.5f} (p={p_bb:.8f}, mirror {p_ba:.4f})")


def test_06_jj_resonance_for_half_spins():
    """Exchange anisotropy J_K = J_z - J_xy lifts the 8/9 ceiling to unity."""
    j_z, j_xy = -0.08, -0.02
    j_k = j_z - j_xy
    p = ModelParams(s2=Spin(1), s3=Spin(1), j_z=j_z, j_xy=j_xy,
                    j_k2=j_k, j_k3=j_k, t_hop=0.05)
    system = device_system(p)
    block = system.block_of("down:1:1").two_level
    guess = rabi(block.coupling, block.omega_z).omega
    omega, p_max = full_peak(system, "down:1:1", "up:1:0", guess)
    assert p_max == pytest.approx(1.0, abs=1e-6)
    report("06 JJ resonance", f"J_K={j_k} p={p_max:.9f} omega={omega:.6f}")


def test_07_spin_filtered_peak():
    """Measuring particle 1 at pi/8 conditions the pair transfer up to 0.995."""
    p = ModelParams.isotropic(0.5, j_k=-0.40, j_h=-0.05, t_hop=0.05)
    system = device_system(p)
    rho0 = prepare_filtered(spinor(np.pi), "1:1", system)
    times = grid_for(0.30, periods=2.6, points=6001)
    states = evolve(system.h_device, rho0, times)
    spec = FilterSpec(theta_in=np.pi, theta_out=np.pi / 8)
    series = relative_transition(states, spec, ["1:0"], system, times=times)
    peak = float(np.nanmax(series.channels["1:0"]))
    assert peak == pytest.approx(0.995, abs=0.005)
    report("07 spin-filtered peak", f"p={peak:.6f}")


def test_08_spin_one_triples():
    """Chain and triangle variants reproduce their closed-form oscillations."""
    details = []
    # chain: the three total-spin pair blocks peak at 3/4 with omega = |J|
    j, d = -0.40, -0.60
    bundle = build_bh3(j, d)
    system = DeviceSystem.from_bundle(bundle)
    tr = device_to_total(*bundle.spins)
    for m in ("2", "0", "-2"):
        src = tr.matrix[tr.labels_out.index(
            parse_total_label(f"tot:2:{m}:2"))].astype(complex)
        tgt = tr.matrix[tr.labels_out.index(
            parse_total_label(f"tot:2:{m}:1"))].astype(complex)
        omega, p_max = brute_force_rabi(system.h_device, src, tgt,
                                        grid_for(abs(j)))
        assert p_max == pytest.approx(0.75, abs=1e-6)
        assert omega == pytest.approx(abs(j), rel=5e-3)
    details.append(f"chain p=3/4 at omega={abs(j):.2f}")

    # triangle, device pairs: lossless at D=0, balanced 1/2 at D=J
    for d_t, expected in ((0.0, 1.0), (j, 0.5)):
        system = DeviceSystem.from_bundle(build_trimer(j, d_t))
        pred = trimer_rabi(1, j, d_t)
        omega, p_max = brute_force_rabi(
            system.h_device, system.basis_state("1:1:0"),
            system.basis_state("0:1:1"), grid_for(pred.omega))
        assert p_max == pytest.approx(expected, abs=1e-6)
        assert omega == pytest.approx(pred.omega, rel=5e-3)
    details.append("triangle m=1: p=1 at D=0, p=1/2 at D=J")

    # triangle outer pairs: 8/9 at (3/2)|J|
    system = DeviceSystem.from_bundle(build_trimer(j, d))
    omega, p_max = brute_force_rabi(
        system.h_device, system.basis_state("1:2:1"),
        system.basis_state("0:2:2"), grid_for(1.5 * abs(j)))
    assert p_max == pytest.approx(8 / 9, abs=1e-6)
    assert omega == pytest.approx(1.5 * abs(j), rel=5e-3)
    details.append(f"triangle m=2: p=8/9 at omega={1.5 * abs(j):.2f}")

    # total-spin dual pairs swap the roles of the two couplings
    for d_t, j_t in ((-0.60, -0.40), (0.30, 0.40), (-0.40, -0.40)):
        bundle = build_trimer(j_t, d_t)
        system = DeviceSystem.from_bundle(bundle)
        tr = device_to_total(*bundle.spins)
        src = tr.matrix[tr.labels_out.index(parse_total_label("tot:2:1:1"))]
        tgt = tr.matrix[tr.labels_out.index(parse_total_label("tot:1:1:1"))]
        pred = trimer_rabi(1, j_t, d_t, basis="product")
        omega, p_max = brute_force_rabi(system.h_device, src.astype(complex),
                                        tgt.astype(complex), grid_for(pred.omega))
        assert p_max == pytest.approx(pred.p_max, abs=1e-6)
        assert omega == pytest.approx(pred.omega, rel=5e-3)
    details.append("dual pairs follow (D/omega)^2 at three points")
    report("08 spin-1 triples", "; ".join(details))


def test_09_eigenvector_balance():
    """The ground-state mixture balances exactly at the resonance and its
    sign tracks which side of the resonance the exchange sits on."""
    for d in (0.60, -0.60):
        j_r = dj_resonance(1, d).j_r
        curve = eigen_balance(1, d, [j_r])
        assert abs(curve.delta[0]) < 1e-10
        x = np.concatenate([np.linspace(0.02, 0.98, 25),
                            np.linspace(1.02, 3.0, 25)])
        curve = eigen_balance(1, d, x * j_r)
        assert np.all(np.sign(curve.delta)
                      == np.sign(abs(j_r) - np.abs(curve.j_values)))
    report("09 eigenvector balance", "delta(J_R)=0 and sign tracks detuning, "
                                     "both anisotropy signs")


def test_10_property_suites():
    """Randomized invariant battery at module tolerances, >= 100 instances."""
    reports = run_oracle_suite(n_random=100, seed=17)
    for r in reports:
        assert r.passed, r.line()
    report("10 property suites",
           f"{len(reports)} oracle checks over >=100 instances each")
