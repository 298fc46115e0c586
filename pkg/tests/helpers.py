"""Shared test utilities: full-model peak extraction with refinement."""

import numpy as np

from trispin.basis import DeviceSystem
from trispin.model import ModelParams, build_hamiltonian, unit_convert
from trispin.verify import brute_force_rabi


def device_system(params: ModelParams) -> DeviceSystem:
    return DeviceSystem.from_bundle(build_hamiltonian(params))


def grid_for(omega_cm: float, periods: float = 2.6, points: int = 2001) -> np.ndarray:
    """Time grid covering the requested number of oscillation periods."""
    span = periods * np.pi / unit_convert(omega_cm)
    return np.linspace(0.0, span, points)


def full_peak(system: DeviceSystem, src: str, tgt: str,
              omega_guess_cm: float) -> tuple[float, float]:
    """(omega_cm, p_max) of a transition from full-system evolution."""
    psi0 = system.basis_state(src)
    target = system.basis_state(tgt)
    return brute_force_rabi(system.h_device, psi0, target,
                            grid_for(omega_guess_cm))
