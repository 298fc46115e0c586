"""Closed-form resonance predictors and the eigenvector-balance diagnostic.

Every formula here has a numerical counterpart in the simulator; the test
suite cross-validates the two routes.  All energies are in cm^-1.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .model import MU_B_CM_PER_T
from .spin_core import Spin


@dataclass(frozen=True)
class RabiResult:
    """Oscillation of a two-level block omega_x * sx + omega_z * sz."""

    omega: float      # cm^-1, before angular-frequency conversion
    p_max: float      # peak transition probability, (omega_x / omega)^2

    def probability(self, omega_x: float) -> float:
        return (omega_x / self.omega) ** 2


def rabi(omega_x: float, omega_z: float) -> RabiResult:
    """Rabi frequency and peak transition probability of a 2x2 block."""
    omega = float(np.hypot(omega_x, omega_z))
    if omega == 0.0:
        raise ValueError("omega_x and omega_z are both zero: no dynamics")
    return RabiResult(omega=omega, p_max=(omega_x / omega) ** 2)


@dataclass(frozen=True)
class DJResonance:
    """Exchange value balancing the anisotropy in a stretched-pair block."""

    j_r: float
    exists: bool      # False for s = 1/2, where anisotropy cannot compete

    def __float__(self):
        return self.j_r


def dj_resonance(s, d: float) -> DJResonance:
    """Exchange strength at which the stretched-pair transition is lossless.

    J = D (s - 1/2) / (s - 1/4).  For s = 1/2 the value degenerates to 0 and
    carries no resonance (the coupled particles have no anisotropy to
    balance); the flag records that.
    """
    s = Spin.of(s)
    sval = s.value
    j = d * (sval - 0.5) / (sval - 0.25)
    return DJResonance(j_r=j, exists=s.twice > 1)


@dataclass(frozen=True)
class ResonancePrediction:
    """The pair of generalized resonances for the two stretched-pair blocks.

    j_a belongs to the block built on the m23 = +2s stretched state, j_b to
    its m23 = -2s mirror; a static field with unequal g-factors splits them.
    """

    j_a: float
    j_b: float

    @property
    def degenerate(self) -> bool:
        return self.j_a == self.j_b


def generalized_dj_resonance(s, d: float, j_z: float = 0.0, j_xy: float = 0.0,
                             b0: float = 0.0, g1: float = 2.0, g23: float = 2.0,
                             mu_b: float = MU_B_CM_PER_T) -> ResonancePrediction:
    """Resonances with anisotropic pair exchange and a longitudinal field."""
    sval = Spin.of(s).value
    denom = sval - 0.25
    base = d * (sval - 0.5) / denom + 0.5 * sval * (j_z - j_xy) / denom
    split = 0.5 * mu_b * b0 * (g1 - g23) / denom
    return ResonancePrediction(j_a=base - split, j_b=base + split)


@dataclass(frozen=True)
class BalanceCurve:
    """State mixture of the lowest eigenvector of a stretched-pair block.

    delta is the anisotropy-favoured proportion minus the exchange-favoured
    proportion: +1 means the block's ground state is purely the basis state
    the anisotropy term prefers, -1 purely the one the exchange term
    prefers, and 0 the perfect balance reached at the resonance.  c1_sq and
    c2_sq are the squared coefficients of the m23 = 2s stretched state and
    its partner, in the ground eigenvector.
    """

    j_values: np.ndarray
    delta: np.ndarray
    alpha: np.ndarray
    beta: np.ndarray
    c1_sq: np.ndarray
    c2_sq: np.ndarray


def eigen_balance(s, d: float, j_grid) -> BalanceCurve:
    """Balance diagnostic over an exchange grid within the resonance regime.

    The regime requires J and D to share a sign (J in (0, inf) for D > 0,
    J in (-inf, 0) for D < 0); J = 0 is excluded because the stretched pair
    decouples there.
    """
    s = Spin.of(s)
    if s.twice <= 1:
        raise ValueError("balance analysis needs s > 1/2")
    if d == 0.0:
        raise ValueError("balance analysis needs a nonzero anisotropy")
    j = np.asarray(j_grid, dtype=float)
    if np.any(j == 0.0):
        raise ValueError("J = 0 is outside the resonance regime")
    if np.any(np.sign(j) != np.sign(d)):
        raise ValueError("grid leaves the resonance regime: J and D must share a sign")
    sval = s.value
    beta = d * (sval - 0.5) - j * (sval - 0.25)
    coupling = j * np.sqrt(sval)
    alpha = -np.sqrt(beta ** 2 + coupling ** 2)
    # ground eigenvector of [[beta, c], [c, -beta]]: (c1, c2) ~ (beta + alpha, c)
    c1 = beta + alpha
    c2 = coupling
    norm = np.hypot(c1, c2)
    c1_sq = (c1 / norm) ** 2
    c2_sq = (c2 / norm) ** 2
    # D < 0 favours the stretched state (c1); D > 0 favours its partner (c2)
    delta = (c1_sq - c2_sq) * (-np.sign(d))
    return BalanceCurve(j_values=j, delta=delta, alpha=alpha, beta=beta,
                        c1_sq=c1_sq, c2_sq=c2_sq)


def trimer_rabi(m_block: int, j: float, d: float, basis: str = "device") -> RabiResult:
    """Rabi parameters of the spin-1 triangle blocks.

    Device basis: m = +-1 blocks oscillate with omega = sqrt(D^2 + J^2) and
    peak (J/omega)^2; m = +-2 blocks give omega = (3/2)|J| and peak 8/9.
    The total-spin pairs ('product' dual of the m = +-1 blocks) swap the
    roles of D and J: peak (D/omega)^2 at the same frequency.
    """
    if m_block not in (1, -1, 2, -2):
        raise ValueError(f"block tag must be +-1 or +-2, got {m_block}")
    if basis not in ("device", "product"):
        raise ValueError(f"basis must be 'device' or 'product', got {basis!r}")
    if basis == "product":
        if m_block not in (1, -1):
            raise ValueError("total-spin dual blocks exist only for m = +-1")
        return rabi(omega_x=d, omega_z=j)
    if m_block in (1, -1):
        return rabi(omega_x=j, omega_z=d)
    return rabi(omega_x=np.sqrt(2.0) * j, omega_z=0.5 * j)
