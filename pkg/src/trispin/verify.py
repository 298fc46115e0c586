"""Independent oracles and the randomized invariant battery.

The oracles deliberately avoid the code paths they check: the matrix
exponential is a scaling-and-squaring Taylor series instead of an
eigendecomposition, and the Rabi extraction works on the full model with no
block reduction, reading the frequency off refined peak positions.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.optimize import minimize_scalar

from . import basis as basis_mod
from .dynamics import DensityMatrix, evolve, evolve_pure
from .model import CM_INV_TO_RAD_PER_PS, unit_convert
from .spin_core import Operator, Spin, hermitian, hermitian_eig, kron, propagator, spin_matrices


class FlatChannelError(RuntimeError):
    """The monitored transition never oscillates, so no frequency exists."""


def series_expm_oracle(h: Operator | np.ndarray, t: float) -> Operator:
    """exp(-i H t) via scaling-and-squaring Taylor summation.

    H is in rad/ps like the propagator input.  Independent of the
    eigendecomposition route by construction.
    """
    m = h.matrix if isinstance(h, Operator) else np.asarray(h, dtype=complex)
    a = -1j * m * t
    norm = np.linalg.norm(a, 1)
    squarings = max(0, int(np.ceil(np.log2(norm / 0.5))) if norm > 0.5 else 0)
    a = a / (2 ** squarings)
    out = np.eye(a.shape[0], dtype=complex)
    term = np.eye(a.shape[0], dtype=complex)
    for n in range(1, 60):
        term = term @ a / n
        out = out + term
        if np.abs(term).max() < 1e-20:
            break
    for _ in range(squarings):
        out = out @ out
    return Operator(out)


def _refine_peak(prob, t_lo: float, t_hi: float) -> tuple[float, float]:
    res = minimize_scalar(lambda t: -prob(t), bounds=(t_lo, t_hi),
                          method="bounded", options={"xatol": 1e-12})
    return float(res.x), float(-res.fun)


def brute_force_rabi(h: Operator | np.ndarray, initial, target,
                     times) -> tuple[float, float]:
    """(omega_cm, p_max) from full-system evolution, no block reduction.

    initial/target are state vectors in the same basis as h (cm^-1).  The
    frequency comes from the spacing of two refined probability peaks, the
    amplitude from the highest refined peak.  Needs a grid long and dense
    enough to show at least two peaks.
    """
    t = np.asarray(times, dtype=float)
    psi0 = np.asarray(initial, dtype=complex)
    psi0 = psi0 / np.linalg.norm(psi0)
    tgt = np.asarray(target, dtype=complex)
    tgt = tgt / np.linalg.norm(tgt)

    m = h.matrix if isinstance(h, Operator) else np.asarray(h, dtype=complex)
    eig = hermitian_eig(hermitian(unit_convert(1.0) * m))
    v = eig.eigenvectors
    c0 = v.conj().T @ psi0
    ctgt = v.conj().T @ tgt

    def prob(tk: float) -> float:
        amp = ctgt.conj() @ (np.exp(-1j * eig.eigenvalues * tk) * c0)
        return float(np.abs(amp) ** 2)

    coarse = np.abs((np.exp(-1j * np.outer(t, eig.eigenvalues)) * c0)
                    @ ctgt.conj()) ** 2
    if coarse.max() - coarse.min() < 1e-9:
        raise FlatChannelError("transition probability never oscillates on the grid")

    peak_idx = [i for i in range(1, len(t) - 1)
                if coarse[i] >= coarse[i - 1] and coarse[i] >= coarse[i + 1]
                and coarse[i] > coarse.min() + 0.1 * (coarse.max() - coarse.min())]
    if len(peak_idx) < 2:
        raise FlatChannelError("fewer than two probability peaks on the grid; "
                               "extend the time span")
    refined = []
    for i in peak_idx[:6]:
        refined.append(_refine_peak(prob, t[i - 1], t[i + 1]))
    peak_times = np.array([r[0] for r in refined])
    p_max = max(r[1] for r in refined)
    spacing = np.diff(peak_times).mean()
    omega_cm = float(np.pi / spacing / CM_INV_TO_RAD_PER_PS)
    return omega_cm, float(p_max)


@dataclass(frozen=True)
class OracleReport:
    name: str
    tolerance: float
    max_residual: float

    @property
    def passed(self) -> bool:
        return self.max_residual <= self.tolerance

    def line(self) -> str:
        status = "pass" if self.passed else "FAIL"
        return (f"{status}  {self.name:<44s} residual {self.max_residual:.3e}"
                f"  (tol {self.tolerance:.0e})")


def _random_hermitian(rng, dim: int) -> Operator:
    a = rng.normal(size=(dim, dim)) + 1j * rng.normal(size=(dim, dim))
    return hermitian(0.5 * (a + a.conj().T))


def run_oracle_suite(n_random: int = 100, seed: int = 7) -> list[OracleReport]:
    """The full randomized battery; every check lists its tolerance."""
    rng = np.random.default_rng(seed)
    reports = []

    # spin algebra: commutators and Casimir for random spins
    worst = 0.0
    for _ in range(n_random):
        s = Spin(int(rng.integers(1, 11)))
        sx, sy, sz = (op.matrix for op in spin_matrices(s))
        eye = np.eye(s.dimension)
        worst = max(
            worst,
            np.abs(sx @ sy - sy @ sx - 1j * sz).max(),
            np.abs(sy @ sz - sz @ sy - 1j * sx).max(),
            np.abs(sz @ sx - sx @ sz - 1j * sy).max(),
            np.abs(sx @ sx + sy @ sy + sz @ sz
                   - s.value * (s.value + 1) * eye).max())
    reports.append(OracleReport("spin commutators and Casimir", 1e-12, worst))

    # eigendecomposition reconstruction and orthonormality
    worst_rec, worst_orth = 0.0, 0.0
    for _ in range(n_random):
        h = _random_hermitian(rng, int(rng.integers(2, 19)))
        eig = hermitian_eig(h)
        scale = max(np.abs(h.matrix).max(), 1e-300)
        worst_rec = max(worst_rec, np.abs(eig.reconstruct() - h.matrix).max() / scale)
        worst_orth = max(worst_orth, np.abs(
            eig.eigenvectors.conj().T @ eig.eigenvectors
            - np.eye(h.dim)).max())
    reports.append(OracleReport("eigendecomposition reconstruction", 1e-10, worst_rec))
    reports.append(OracleReport("eigenvector orthonormality", 1e-10, worst_orth))

    # propagator unitarity and agreement with the series exponential
    worst_uni, worst_series = 0.0, 0.0
    for _ in range(n_random):
        h = _random_hermitian(rng, int(rng.integers(2, 19)))
        t = float(rng.uniform(0.0, 10.0))
        u = propagator(h, t)
        worst_uni = max(worst_uni, np.abs(
            u.matrix.conj().T @ u.matrix - np.eye(h.dim)).max())
        ref = series_expm_oracle(h, t)
        worst_series = max(worst_series, np.abs(u.matrix - ref.matrix).max())
    reports.append(OracleReport("propagator unitarity", 1e-10, worst_uni))
    reports.append(OracleReport("propagator vs series exponential", 1e-9, worst_series))

    # coupled-basis transform unitarity: all equal pairs to s = 5 plus
    # random unequal pairs
    worst = 0.0
    pairs = [(t, t) for t in range(1, 11)]
    while len(pairs) < n_random:
        pairs.append(tuple(int(v) for v in rng.integers(1, 8, size=2)))
    for t2, t3 in pairs:
        tr = basis_mod.product_to_device(Spin(t2), Spin(t3))
        worst = max(worst, np.abs(
            tr.matrix @ tr.matrix.T - np.eye(tr.matrix.shape[0])).max())
    reports.append(OracleReport("coupled-basis transform unitarity", 1e-12, worst))

    # density evolution invariants: trace, positivity, purity, energy
    worst_tr, worst_pos, worst_pur, worst_en = 0.0, 0.0, 0.0, 0.0
    for _ in range(max(4, n_random)):
        dim = int(rng.integers(2, 13))
        h = _random_hermitian(rng, dim)
        psi = rng.normal(size=dim) + 1j * rng.normal(size=dim)
        rho0 = DensityMatrix.pure(psi, basis="product")
        times = np.linspace(0.01, 40.0, 25)
        states = evolve(h, rho0, times)
        e0 = rho0.expectation(h.matrix)
        for st in states:
            worst_tr = max(worst_tr, abs(np.trace(st.matrix).real - 1.0))
            worst_pos = max(worst_pos, max(0.0, -float(np.linalg.eigvalsh(st.matrix)[0])))
            worst_pur = max(worst_pur, abs(st.purity() - 1.0))
            worst_en = max(worst_en, abs(st.expectation(h.matrix) - e0))
    reports.append(OracleReport("evolution preserves trace", 1e-10, worst_tr))
    reports.append(OracleReport("evolution preserves positivity", 1e-10, worst_pos))
    reports.append(OracleReport("evolution preserves purity", 1e-9, worst_pur))
    reports.append(OracleReport("evolution preserves energy", 1e-9, worst_en))

    # two-level blocks against the closed-form oscillation
    worst = 0.0
    for _ in range(n_random):
        wx, wz = rng.uniform(-1.0, 1.0, size=2)
        if np.hypot(wx, wz) < 1e-3:
            continue
        offset = rng.uniform(-1.0, 1.0)
        block = np.array([[offset + wz, wx], [wx, offset - wz]], dtype=complex)
        times = np.linspace(0.0, 120.0, 160)
        amps = evolve_pure(block, np.array([0.0, 1.0]), times)
        p = np.abs(amps[:, 0]) ** 2
        omega = np.hypot(wx, wz)
        pred = (wx / omega) ** 2 * np.sin(unit_convert(omega) * times) ** 2
        worst = max(worst, np.abs(p - pred).max())
    reports.append(OracleReport("two-level evolution vs closed form", 1e-8, worst))

    return reports


def report_table(reports: list[OracleReport]) -> str:
    lines = [r.line() for r in reports]
    n_bad = sum(not r.passed for r in reports)
    lines.append(f"{len(reports) - n_bad}/{len(reports)} oracle checks passed")
    return "\n".join(lines)
