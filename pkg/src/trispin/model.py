"""Hamiltonian assembly for the three-particle spin models.

The main device model couples a spin-1/2 particle (particle 1) to two equal
spins (particles 2 and 3) that carry exchange coupling and uniaxial magnetic
anisotropy.  Two spin-1 triple variants are included: a nearest-neighbour
chain (bh3) and an all-pairs triangle (trimer).

All couplings and energies are in cm^-1; time is in ps.  unit_convert maps
cm^-1 to angular frequency (rad/ps) for time evolution.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass, field

import numpy as np

from .spin_core import Operator, Spin, hermitian, identity, kron_all, spin_matrices

SPEED_OF_LIGHT_CM_PER_PS = 0.0299792458
CM_INV_TO_RAD_PER_PS = 2.0 * np.pi * SPEED_OF_LIGHT_CM_PER_PS
# Bohr magneton in cm^-1 per tesla; fixed physical constant, not fitted.
MU_B_CM_PER_T = 0.46686


def unit_convert(energy_cm):
    """cm^-1 -> angular frequency in rad/ps (omega = 2 pi c E)."""
    return CM_INV_TO_RAD_PER_PS * np.asarray(energy_cm)


@dataclass(frozen=True)
class ModelParams:
    """Physical parameters of the device model, all couplings in cm^-1.

    Particles 2 and 3 must carry the same spin; the coupled-basis reduction
    assumes it.  Couplings may take any sign (J > 0 antiferromagnetic,
    J < 0 ferromagnetic; D > 0 hard axis, D < 0 easy axis).
    """

    s2: Spin
    s3: Spin
    j_z: float = 0.0            # exchange between 2 and 3 along the anisotropy axis
    j_xy: float = 0.0           # exchange between 2 and 3 in the transverse plane
    j_k2: float = 0.0           # exchange between particle 1 and 2
    j_k3: float = 0.0           # exchange between particle 1 and 3
    d: float = 0.0              # uniaxial anisotropy of particles 2 and 3
    t_hop: complex = 0.0        # hopping of particle 1; only 2*Re(t) enters
    b0: float = 0.0             # static field along the anisotropy axis, tesla
    g1: float = 2.0
    g23: float = 2.0
    mu_b: float = MU_B_CM_PER_T

    def __post_init__(self):
        object.__setattr__(self, "s2", Spin.of(self.s2))
        object.__setattr__(self, "s3", Spin.of(self.s3))
        if self.s2 != self.s3:
            raise ValueError(
                f"particles 2 and 3 must carry equal spin, got {self.s2} and {self.s3}")
        if self.s2.twice < 1:
            raise ValueError("particles 2 and 3 must carry spin >= 1/2")
        t = complex(self.t_hop)
        if abs(t.imag) > 0:
            warnings.warn("imaginary part of t_hop is ignored; only 2*Re(t) "
                          "enters the spin-space Hamiltonian", stacklevel=2)
        object.__setattr__(self, "t_hop", t)

    @property
    def s(self) -> Spin:
        return self.s2

    @property
    def delta_k(self) -> float:
        return self.j_k2 - self.j_k3

    @property
    def sigma_k(self) -> float:
        return self.j_k2 + self.j_k3

    @property
    def j_k(self) -> float:
        """Mean particle-1 exchange; equals j_k2 = j_k3 in the isotropic case."""
        return 0.5 * self.sigma_k

    @property
    def dim(self) -> int:
        return 2 * self.s2.dimension * self.s3.dimension

    @property
    def spins(self) -> tuple[Spin, Spin, Spin]:
        return (Spin(1), self.s2, self.s3)

    @classmethod
    def isotropic(cls, s, j_k: float, j_h: float = 0.0, d: float = 0.0,
                  t_hop: complex = 0.0, **kwargs) -> "ModelParams":
        """Convenience constructor with j_k2 = j_k3 and j_z = j_xy."""
        s = Spin.of(s)
        return cls(s2=s, s3=s, j_z=j_h, j_xy=j_h, j_k2=j_k, j_k3=j_k,
                   d=d, t_hop=t_hop, **kwargs)


@dataclass(frozen=True)
class HamiltonianBundle:
    """Total Hamiltonian plus its named term breakdown, in the product basis.

    The product basis is particle1 x particle2 x particle3, each factor
    ordered m descending.  Terms always sum to h_total exactly.
    """

    h_total: Operator
    terms: dict[str, Operator]
    spins: tuple[Spin, Spin, Spin]
    params: ModelParams | None = None

    @property
    def dim(self) -> int:
        return self.h_total.dim


def _site_operators(spins: tuple[Spin, ...]) -> list[dict[str, Operator]]:
    """Per-site spin operators embedded in the full product space."""
    eyes = [identity(sp.dimension) for sp in spins]
    embedded = []
    for i, sp in enumerate(spins):
        sx, sy, sz = spin_matrices(sp)
        ops = {}
        for name, op in (("x", sx), ("y", sy), ("z", sz)):
            factors = list(eyes)
            factors[i] = op
            ops[name] = kron_all(*factors)
        embedded.append(ops)
    return embedded


def _dot(a: dict[str, Operator], b: dict[str, Operator]) -> np.ndarray:
    return sum(a[c].matrix @ b[c].matrix for c in "xyz")


def build_hamiltonian(p: ModelParams) -> HamiltonianBundle:
    """Assemble the full device Hamiltonian in the product basis.

    Terms:
      heisenberg  J_z S2z S3z + J_xy (S2x S3x + S2y S3y)
      kondo       J_K2 S1.S2 + J_K3 S1.S3  (S1 are the spin-1/2 operators)
      anisotropy  D (S2z^2 + S3z^2)
      hopping     2 Re(t) * identity (diagonal spin-space projection; the
                  spatial motion of particle 1 is out of scope)
      zeeman      mu_B B0 (g1 S1z + g23 S2z + g23 S3z)
    """
    spins = p.spins
    site = _site_operators(spins)
    s1, s2, s3 = site
    dim = p.dim

    heis = (p.j_z * (s2["z"].matrix @ s3["z"].matrix)
            + p.j_xy * (s2["x"].matrix @ s3["x"].matrix
                        + s2["y"].matrix @ s3["y"].matrix))
    kondo = p.j_k2 * _dot(s1, s2) + p.j_k3 * _dot(s1, s3)
    aniso = p.d * (s2["z"].matrix @ s2["z"].matrix
                   + s3["z"].matrix @ s3["z"].matrix)
    hop = 2.0 * p.t_hop.real * np.eye(dim, dtype=complex)
    zee = p.mu_b * p.b0 * (p.g1 * s1["z"].matrix
                           + p.g23 * (s2["z"].matrix + s3["z"].matrix))

    terms = {
        "heisenberg": hermitian(heis),
        "kondo": hermitian(kondo),
        "anisotropy": hermitian(aniso),
        "hopping": hermitian(hop),
        "zeeman": hermitian(zee),
    }
    total = hermitian(sum(t.matrix for t in terms.values()))
    return HamiltonianBundle(h_total=total, terms=terms, spins=spins, params=p)


def _spin_one_triple(j: float, d: float, bonds: list[tuple[int, int]]) -> HamiltonianBundle:
    spins = (Spin(2), Spin(2), Spin(2))
    site = _site_operators(spins)
    dim = 27
    exch = np.zeros((dim, dim), dtype=complex)
    for i, k in bonds:
        exch += _dot(site[i], site[k])
    exch *= j
    aniso = d * sum(site[i]["z"].matrix @ site[i]["z"].matrix for i in range(3))
    terms = {"exchange": hermitian(exch), "anisotropy": hermitian(aniso)}
    total = hermitian(exch + aniso)
    return HamiltonianBundle(h_total=total, terms=terms, spins=spins)


def build_bh3(j: float, d: float) -> HamiltonianBundle:
    """Three spin-1 particles on a chain: J (S1.S2 + S2.S3) + D sum_i Siz^2."""
    return _spin_one_triple(j, d, bonds=[(0, 1), (1, 2)])


def build_trimer(j: float, d: float) -> HamiltonianBundle:
    """Three spin-1 particles on a triangle: all-pairs exchange plus anisotropy."""
    return _spin_one_triple(j, d, bonds=[(0, 1), (1, 2), (2, 0)])
