"""Spin-filtered preparation and measurement of particle 1.

Particle 1 is prepared or measured along a Bloch direction (theta, phi)
via the standard spinor.  Conditioned ("relative") transition probabilities
divide the joint probability of the measured particle-1 orientation and a
target coupled state by the total probability of that orientation; where
the denominator vanishes the value is undefined and reported as NaN, never
as zero.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from .basis import BasisLabel, DeviceSystem, coupled_labels, parse_device_label
from .dynamics import DensityMatrix, TimeSeries, evolve
from .model import ModelParams, build_hamiltonian

DENOMINATOR_FLOOR = 1e-12


@dataclass(frozen=True)
class FilterSpec:
    """Preparation and measurement directions of particle 1, in radians."""

    theta_in: float
    theta_out: float
    phi_in: float = 0.0
    phi_out: float = 0.0

    def __post_init__(self):
        for name in ("theta_in", "theta_out"):
            v = getattr(self, name)
            if not 0.0 <= v <= np.pi + 1e-12:
                raise ValueError(f"{name}={v} outside [0, pi]")
        for name in ("phi_in", "phi_out"):
            v = float(getattr(self, name)) % (2.0 * np.pi)
            object.__setattr__(self, name, v)


def spinor(theta: float, phi: float = 0.0) -> np.ndarray:
    """Unit spinor along (theta, phi): (cos(t/2) e^{-i p/2}, sin(t/2) e^{+i p/2})."""
    c = np.cos(theta / 2.0)
    s = np.sin(theta / 2.0)
    # snap sub-epsilon half-angle residue so theta = pi prepares an exact pole
    if abs(c) < 1e-15:
        c = 0.0
    if abs(s) < 1e-15:
        s = 0.0
    out = np.array([c * np.exp(-0.5j * phi), s * np.exp(+0.5j * phi)])
    return out / np.linalg.norm(out)


def _coupled_index(system: DeviceSystem, coupled) -> int:
    """Index of |s23, m23> within the coupled-pair factor."""
    if isinstance(coupled, str):
        parts = coupled.strip().split(":")
        if len(parts) != 2:
            raise ValueError(f"coupled label must look like 's23:m23', got {coupled!r}")
        s23, m23 = Fraction(parts[0]), Fraction(parts[1])
    else:
        s23, m23 = (Fraction(x) for x in coupled)
    first = system.labels[0]
    spins_pairs = [l.numbers[1:] for l in system.labels if l.numbers[0] == first.numbers[0]]
    try:
        return spins_pairs.index((s23, m23))
    except ValueError:
        known = ", ".join(f"{a}:{b}" for a, b in spins_pairs)
        raise KeyError(f"coupled state {s23}:{m23} not in basis; known: {known}") from None


def prepare_filtered(chi: np.ndarray, coupled, system: DeviceSystem) -> DensityMatrix:
    """Pure product state (chi on particle 1) x |s23, m23>, in the device basis."""
    n_pair = system.dim // 2
    idx = _coupled_index(system, coupled)
    pair = np.zeros(n_pair, dtype=complex)
    pair[idx] = 1.0
    vec = np.kron(np.asarray(chi, dtype=complex), pair)
    return DensityMatrix.pure(vec, basis="device")


def _measurement_operators(system: DeviceSystem, chi_out: np.ndarray,
                           targets: list) -> tuple[list[np.ndarray], np.ndarray]:
    n_pair = system.dim // 2
    p_out = np.outer(chi_out, chi_out.conj())
    denom_op = np.kron(p_out, np.eye(n_pair))
    num_ops = []
    for tgt in targets:
        idx = _coupled_index(system, tgt)
        p_t = np.zeros((n_pair, n_pair), dtype=complex)
        p_t[idx, idx] = 1.0
        num_ops.append(np.kron(p_out, p_t))
    return num_ops, denom_op


def relative_transition(states: list[DensityMatrix], spec: FilterSpec,
                        targets, system: DeviceSystem,
                        times=None) -> TimeSeries:
    """Conditioned probabilities of coupled states given the measured spinor.

    channel[target](t) = tr(rho P_out x P_target) / tr(rho P_out x I); points
    with denominator below 1e-12 are NaN (undefined, not zero).
    """
    if isinstance(targets, str) or not isinstance(targets, (list, tuple)):
        targets = [targets]
    chi_out = spinor(spec.theta_out, spec.phi_out)
    num_ops, denom_op = _measurement_operators(system, chi_out, list(targets))
    t = np.arange(len(states), dtype=float) if times is None \
        else np.asarray(times, dtype=float)
    denom = np.array([st.expectation(denom_op) for st in states])
    ok = denom > DENOMINATOR_FLOOR
    channels = {}
    for tgt, op in zip(targets, num_ops):
        num = np.array([st.expectation(op) for st in states])
        vals = np.full(len(states), np.nan)
        vals[ok] = num[ok] / denom[ok]
        name = tgt if isinstance(tgt, str) else f"{tgt[0]}:{tgt[1]}"
        channels[name] = vals
    return TimeSeries(times=t, channels=channels,
                      meta={"theta_out": spec.theta_out, "phi_out": spec.phi_out})


@dataclass(frozen=True)
class ScanGrid:
    """Relative transition probability over preparation/measurement angles."""

    theta_in: np.ndarray
    theta_out: np.ndarray
    values: np.ndarray        # shape (len(theta_in), len(theta_out)); NaN = undefined
    t_snapshot: float

    def __post_init__(self):
        finite = self.values[np.isfinite(self.values)]
        if finite.size and (finite.min() < -1e-9 or finite.max() > 1.0 + 1e-9):
            raise ValueError("scan values leave [0, 1]")


def filter_scan(theta_in_grid, theta_out_grid, t_snapshot: float,
                params: ModelParams, transition: tuple,
                phi: float = 0.0) -> ScanGrid:
    """Snapshot of relative transition probabilities over both filter angles.

    One evolution per preparation angle (the initial state depends on it),
    evaluated at the snapshot for every measurement angle.
    """
    th_in = np.asarray(theta_in_grid, dtype=float)
    th_out = np.asarray(theta_out_grid, dtype=float)
    if th_in.size == 0 or th_out.size == 0:
        raise ValueError("angle grids must be nonempty")
    system = DeviceSystem.from_bundle(build_hamiltonian(params))
    from_coupled, to_coupled = transition
    values = np.zeros((th_in.size, th_out.size))
    times = np.array([t_snapshot]) if t_snapshot > 0 else np.array([0.0])
    for i, ti in enumerate(th_in):
        rho0 = prepare_filtered(spinor(ti, phi), from_coupled, system)
        state = evolve(system.h_device, rho0, times)[-1]
        for k, to in enumerate(th_out):
            spec = FilterSpec(theta_in=ti, theta_out=to, phi_in=phi, phi_out=phi)
            series = relative_transition([state], spec, [to_coupled], system)
            values[i, k] = next(iter(series.channels.values()))[0]
    return ScanGrid(theta_in=th_in, theta_out=th_out, values=values,
                    t_snapshot=float(t_snapshot))
