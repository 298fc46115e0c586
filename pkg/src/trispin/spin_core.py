"""Exact spin operators and the dense complex linear algebra the simulator runs on.

Everything here works on small dense matrices (the largest system in the
package is a few hundred states).  All objects are immutable values after
construction and every function is pure, so concurrent read access is safe.

Conventions fixed project-wide:
  * hbar = 1.
  * Spin projection basis ordered m = s, s-1, ..., -s (highest first).
  * Kronecker products use the row-major index convention
    index(i, j) = i * dim(B) + j.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np

HERMITICITY_TOL = 1e-12   # relative to max |entry|
UNITARITY_TOL = 1e-10


class NonHermitianError(ValueError):
    """Raised when an operation requires a Hermitian matrix and gets none."""


@dataclass(frozen=True)
class Spin:
    """Exact spin magnitude, stored as twice the spin so 3/2 etc. stay exact."""

    twice: int

    def __post_init__(self):
        if self.twice < 0:
            raise ValueError(f"negative spin: {self.twice}/2")

    @classmethod
    def of(cls, value) -> "Spin":
        """Accept a Spin, an int/float like 1.5, or a string like '3/2'."""
        if isinstance(value, Spin):
            return value
        frac = Fraction(value)
        twice = frac * 2
        if twice.denominator != 1:
            raise ValueError(f"spin must be a half-integer, got {value}")
        return cls(int(twice))

    @property
    def value(self) -> float:
        return self.twice / 2.0

    @property
    def dimension(self) -> int:
        return self.twice + 1

    def projections(self) -> list[Fraction]:
        """All m values, highest first."""
        return [Fraction(self.twice - 2 * k, 2) for k in range(self.dimension)]

    def __str__(self):
        return str(Fraction(self.twice, 2))


@dataclass(frozen=True)
class Operator:
    """Dense complex square matrix with an optional verified Hermitian flag."""

    matrix: np.ndarray
    hermitian: bool = False

    def __post_init__(self):
        m = np.asarray(self.matrix, dtype=complex)
        if m.ndim != 2 or m.shape[0] != m.shape[1]:
            raise ValueError(f"operator must be square, got shape {m.shape}")
        m.setflags(write=False)
        object.__setattr__(self, "matrix", m)
        if self.hermitian:
            _check_hermitian(m)

    @property
    def dim(self) -> int:
        return self.matrix.shape[0]

    def __add__(self, other: "Operator") -> "Operator":
        return Operator(self.matrix + other.matrix,
                        hermitian=self.hermitian and other.hermitian)

    def __mul__(self, scalar) -> "Operator":
        herm = self.hermitian and np.isreal(scalar)
        return Operator(self.matrix * scalar, hermitian=bool(herm))

    __rmul__ = __mul__


def _check_hermitian(m: np.ndarray) -> None:
    scale = max(np.abs(m).max(), 1e-300)
    dev = np.abs(m - m.conj().T)
    worst = dev.max()
    if worst > HERMITICITY_TOL * scale:
        i, j = np.unravel_index(int(dev.argmax()), dev.shape)
        raise NonHermitianError(
            f"matrix is not Hermitian: entry ({i},{j})={m[i, j]:.6g} vs "
            f"conj(({j},{i}))={np.conj(m[j, i]):.6g}, deviation {worst:.3e} "
            f"(allowed {HERMITICITY_TOL * scale:.3e})")


def hermitian(matrix) -> Operator:
    """Wrap a matrix as a verified-Hermitian Operator."""
    return Operator(matrix, hermitian=True)


def identity(dim: int) -> Operator:
    return Operator(np.eye(dim, dtype=complex), hermitian=True)


def spin_matrices(s) -> tuple[Operator, Operator, Operator]:
    """Angular-momentum matrices (Sx, Sy, Sz) for spin s in the |s, m> basis.

    Sz is diagonal with entries s, s-1, ..., -s.  Sx and Sy come from the
    ladder operators with coefficients sqrt(s(s+1) - m(m+1)).
    """
    s = Spin.of(s)
    dim = s.dimension
    sval = s.value
    m = sval - np.arange(dim)
    sz = np.diag(m).astype(complex)
    # <m+1| S+ |m> = sqrt(s(s+1) - m(m+1)); superdiagonal in m-descending order
    raise_coeff = np.sqrt(sval * (sval + 1.0) - m[1:] * (m[1:] + 1.0))
    sp = np.zeros((dim, dim), dtype=complex)
    sp[np.arange(dim - 1), np.arange(1, dim)] = raise_coeff
    sm = sp.conj().T
    sx = 0.5 * (sp + sm)
    sy = -0.5j * (sp - sm)
    return hermitian(sx), hermitian(sy), hermitian(sz)


def kron(a: Operator, b: Operator) -> Operator:
    """Kronecker product, index(i, j) = i * dim(B) + j."""
    return Operator(np.kron(a.matrix, b.matrix),
                    hermitian=a.hermitian and b.hermitian)


def kron_all(*ops: Operator) -> Operator:
    out = ops[0]
    for op in ops[1:]:
        out = kron(out, op)
    return out


@dataclass(frozen=True)
class EigenSystem:
    """Spectral decomposition of a Hermitian operator.

    eigenvalues are real and ascending; eigenvectors are the columns of a
    unitary matrix.  Degenerate subspaces carry an arbitrary orthonormal
    basis; downstream code must not rely on individual degenerate vectors.
    """

    eigenvalues: np.ndarray
    eigenvectors: np.ndarray

    def __post_init__(self):
        self.eigenvalues.setflags(write=False)
        self.eigenvectors.setflags(write=False)

    def reconstruct(self) -> np.ndarray:
        v = self.eigenvectors
        return (v * self.eigenvalues) @ v.conj().T


def hermitian_eig(h: Operator) -> EigenSystem:
    """Eigendecomposition of a Hermitian operator, eigenvalues ascending.

    Rejects input whose Hermitian flag is unset or numerically violated,
    reporting the worst-violating entry.
    """
    if not h.hermitian:
        _check_hermitian(h.matrix)
    vals, vecs = np.linalg.eigh(h.matrix)
    return EigenSystem(np.asarray(vals, dtype=float), np.ascontiguousarray(vecs))


def propagator(h: Operator, t: float, eig: EigenSystem | None = None) -> Operator:
    """Unitary exp(-i H t) for a Hermitian generator.

    H must already be in angular-frequency units (rad/ps) when t is in ps;
    see trispin.model.unit_convert.  Passing a precomputed EigenSystem skips
    the decomposition when many times share one Hamiltonian.
    """
    if eig is None:
        eig = hermitian_eig(h)
    phases = np.exp(-1j * eig.eigenvalues * t)
    v = eig.eigenvectors
    return Operator((v * phases) @ v.conj().T)
