"""Exact density-matrix time evolution and time-series extraction.

Evolution is unitary: rho(t) = U(t) rho(0) U(t)^dagger with U from one
eigendecomposition of the (static) Hamiltonian.  Hamiltonians arrive in
cm^-1 and are converted to rad/ps internally; time grids are in ps.

Evolution over a grid is embarrassingly parallel across time points after
the one decomposition; this implementation is sequential and deterministic.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .basis import SpinBlock
from .spin_core import Operator, EigenSystem, hermitian, hermitian_eig
from .model import unit_convert

TRACE_TOL = 1e-10
HERM_TOL = 1e-12
POSITIVITY_TOL = 1e-10
PROBABILITY_TOL = 1e-9


class InvariantViolation(RuntimeError):
    """A numerical invariant (trace, positivity, probability range) failed."""


@dataclass(frozen=True)
class DensityMatrix:
    """Hermitian, unit-trace state; basis records which labels apply."""

    matrix: np.ndarray
    basis: str = "device"

    def __post_init__(self):
        m = np.asarray(self.matrix, dtype=complex)
        m.setflags(write=False)
        object.__setattr__(self, "matrix", m)
        scale = max(np.abs(m).max(), 1.0)
        if np.abs(m - m.conj().T).max() > HERM_TOL * scale:
            raise InvariantViolation("density matrix is not Hermitian")
        tr = np.trace(m)
        if abs(tr - 1.0) > TRACE_TOL:
            raise InvariantViolation(f"density matrix trace {tr:.12g} != 1")

    @classmethod
    def pure(cls, vector, basis: str = "device") -> "DensityMatrix":
        v = np.asarray(vector, dtype=complex)
        v = v / np.linalg.norm(v)
        return cls(np.outer(v, v.conj()), basis=basis)

    @property
    def dim(self) -> int:
        return self.matrix.shape[0]

    def purity(self) -> float:
        return float(np.real(np.trace(self.matrix @ self.matrix)))

    def check_positive(self, tol: float = POSITIVITY_TOL) -> None:
        low = float(np.linalg.eigvalsh(self.matrix)[0])
        if low < -tol:
            raise InvariantViolation(
                f"density matrix has eigenvalue {low:.3e} below -{tol:.0e}")

    def expectation(self, op: np.ndarray) -> float:
        return float(np.real(np.trace(np.asarray(op) @ self.matrix)))


@dataclass
class TimeSeries:
    """Named real channels on a common ps time grid.

    Channels are probabilities or Bloch components; NaN marks points where a
    conditioned probability is undefined (zero denominator).
    """

    times: np.ndarray
    channels: dict[str, np.ndarray]
    meta: dict[str, object] = field(default_factory=dict)

    def __post_init__(self):
        self.times = np.asarray(self.times, dtype=float)
        self.channels = {k: np.asarray(v, dtype=float)
                         for k, v in self.channels.items()}
        for name, vals in self.channels.items():
            if vals.shape != self.times.shape:
                raise ValueError(f"channel {name!r} length mismatch")

    def channel_max(self, name: str) -> float:
        return float(np.nanmax(self.channels[name]))


def _check_time_grid(times) -> np.ndarray:
    t = np.asarray(times, dtype=float)
    if t.ndim != 1 or t.size == 0:
        raise ValueError("time grid must be a nonempty 1-d array")
    if t[0] < 0 or np.any(np.diff(t) <= 0):
        raise ValueError("time grid must be nonnegative and strictly increasing")
    return t


def _as_angular(h: Operator | np.ndarray) -> Operator:
    m = h.matrix if isinstance(h, Operator) else np.asarray(h, dtype=complex)
    return hermitian(unit_convert(1.0) * m)


def evolve(h: Operator | np.ndarray, rho0: DensityMatrix, times) -> list[DensityMatrix]:
    """rho(t_k) for a static Hamiltonian given in cm^-1."""
    t = _check_time_grid(times)
    eig = hermitian_eig(_as_angular(h))
    v = eig.eigenvectors
    rho_t = v.conj().T @ rho0.matrix @ v
    out = []
    for tk in t:
        ph = np.exp(-1j * eig.eigenvalues * tk)
        rot = (ph[:, None] * rho_t) * ph.conj()[None, :]
        out.append(DensityMatrix(v @ rot @ v.conj().T, basis=rho0.basis))
    return out


def evolve_pure(h: Operator | np.ndarray, psi0, times) -> np.ndarray:
    """State amplitudes over a grid for a pure initial state; rows are times."""
    t = _check_time_grid(times)
    eig = hermitian_eig(_as_angular(h))
    v = eig.eigenvectors
    c0 = v.conj().T @ np.asarray(psi0, dtype=complex)
    phases = np.exp(-1j * np.outer(t, eig.eigenvalues))
    return (phases * c0) @ v.T


def projector_onto(vector) -> np.ndarray:
    v = np.asarray(vector, dtype=complex)
    v = v / np.linalg.norm(v)
    return np.outer(v, v.conj())


def _check_projector(p: np.ndarray, name: str, tol: float = 1e-10) -> None:
    scale = max(np.abs(p).max(), 1.0)
    if np.abs(p - p.conj().T).max() > tol * scale:
        raise ValueError(f"projector {name!r} is not Hermitian")
    if np.abs(p @ p - p).max() > tol * scale:
        raise ValueError(f"projector {name!r} is not idempotent")


def transition_probabilities(states: list[DensityMatrix],
                             projectors: dict[str, Operator | np.ndarray],
                             times=None) -> TimeSeries:
    """Re tr(P rho(t)) per named projector.

    When the projectors form a complete family (sum to the identity) the
    channel sums are checked against 1 at every time point.
    """
    mats = {}
    for name, p in projectors.items():
        m = p.matrix if isinstance(p, Operator) else np.asarray(p, dtype=complex)
        _check_projector(m, name)
        mats[name] = m
    t = np.arange(len(states), dtype=float) if times is None \
        else np.asarray(times, dtype=float)
    channels = {}
    for name, p in mats.items():
        vals = np.array([st.expectation(p) for st in states])
        if vals.min() < -PROBABILITY_TOL or vals.max() > 1 + PROBABILITY_TOL:
            raise InvariantViolation(
                f"channel {name!r} leaves [0, 1]: range "
                f"[{vals.min():.3e}, {vals.max():.3e}]")
        channels[name] = vals
    total = sum(mats.values())
    if np.abs(total - np.eye(total.shape[0])).max() < 1e-10:
        sums = np.sum(np.stack(list(channels.values())), axis=0)
        if np.abs(sums - 1.0).max() > PROBABILITY_TOL:
            raise InvariantViolation("complete projector family does not sum to 1")
    return TimeSeries(times=t, channels=channels)


_PAULI = {
    "x": np.array([[0, 1], [1, 0]], dtype=complex),
    "y": np.array([[0, -1j], [1j, 0]], dtype=complex),
    "z": np.array([[1, 0], [0, -1]], dtype=complex),
}


def bloch_trajectory(block: SpinBlock, rho0: DensityMatrix, times) -> TimeSeries:
    """Bloch components and measurement probabilities for one 2x2 block.

    The Bloch sphere basis is the block's two states in stored order: the
    first state sits at the +z pole.  Channels x/y/z are expectation values;
    px/py/pz are the measurement probabilities (1 + <sigma>)/2.
    """
    if block.size != 2:
        raise ValueError(f"bloch trajectory needs a 2-state block, got size {block.size}")
    if rho0.dim != 2:
        raise ValueError("initial state must be restricted to the block")
    t = _check_time_grid(times)
    states = evolve(hermitian(block.matrix), rho0, t)
    channels: dict[str, np.ndarray] = {}
    for axis in "xyz":
        vals = np.array([st.expectation(_PAULI[axis]) for st in states])
        channels[axis] = vals
    for axis in "xyz":
        channels["p" + axis] = 0.5 * (1.0 + channels[axis])
    return TimeSeries(times=t, channels=channels,
                      meta={"pole_plus": str(block.labels[0]),
                            "pole_minus": str(block.labels[1])})
