"""Coupled bases and block structure of the device Hamiltonian.

Particles 2 and 3 are coupled into total spin s23 with exact Clebsch-Gordan
coefficients (Condon-Shortley convention, all coefficients real).  The
"device" basis is |s1, m1> x |s23, m23>; the "total" basis further couples
particle 1, keeping the s23 parentage as a label.

Fixed ordering conventions (the labels carry the authoritative meaning):
  * product basis: particle1 x particle2 x particle3, each m descending;
  * device basis: m1 descending (particle-1 up first), then s23 descending,
    then m23 descending;
  * total basis: S descending, M descending, parentage s23 descending.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from math import factorial, sqrt

import numpy as np

from .spin_core import Spin

BLOCK_COUPLING_TOL = 1e-12   # absolute, on cm^-1 entries
TRANSFORM_TOL = 1e-12


def _as_half_integer(x, name: str) -> Fraction:
    if isinstance(x, float):
        twice = round(2 * x)
        if abs(2 * x - twice) > 1e-9:
            raise ValueError(f"{name}={x} is not a half-integer")
        return Fraction(twice, 2)
    frac = Fraction(x)
    if (2 * frac).denominator != 1:
        raise ValueError(f"{name}={x} is not a half-integer")
    return frac


def clebsch_gordan(j1, m1, j2, m2, j, m) -> float:
    """Exact Clebsch-Gordan coefficient <j1 m1 j2 m2 | j m>.

    Evaluated with the closed factorial sum in exact rational arithmetic
    (big-integer factorials), rounded to double at the very end.  Returns 0
    when m != m1 + m2 or when j violates the triangle rule.
    """
    j1, m1, j2, m2, j, m = (
        _as_half_integer(v, n)
        for v, n in zip((j1, m1, j2, m2, j, m), "j1 m1 j2 m2 j m".split()))
    for jj, mm, nm in ((j1, m1, "m1"), (j2, m2, "m2")):
        if abs(mm) > jj or (jj - mm).denominator != 1:
            raise ValueError(f"{nm}={mm} invalid for j={jj}")
    if m != m1 + m2:
        return 0.0
    # impossible total states fall under the selection rules, not errors
    if abs(m) > j or (j - m).denominator != 1:
        return 0.0
    if j < abs(j1 - j2) or j > j1 + j2 or (j1 + j2 - j).denominator != 1:
        return 0.0

    def fact(x: Fraction) -> int:
        assert x.denominator == 1 and x >= 0
        return factorial(int(x))

    # prefactor^2, an exact rational
    pref = (Fraction(2 * j + 1)
            * fact(j1 + j2 - j) * fact(j1 - j2 + j) * fact(-j1 + j2 + j)
            / fact(j1 + j2 + j + 1))
    pref *= (fact(j + m) * fact(j - m) * fact(j1 - m1) * fact(j1 + m1)
             * fact(j2 - m2) * fact(j2 + m2))

    ksum = Fraction(0)
    k_min = max(Fraction(0), j2 - j - m1, j1 + m2 - j)
    k_max = min(j1 + j2 - j, j1 - m1, j2 + m2)
    k = k_min
    while k <= k_max:
        denom = (fact(k) * fact(j1 + j2 - j - k) * fact(j1 - m1 - k)
                 * fact(j2 + m2 - k) * fact(j - j2 + m1 + k)
                 * fact(j - j1 - m2 + k))
        ksum += Fraction((-1) ** int(k), denom)
        k += 1
    if ksum == 0:
        return 0.0
    # CG = sign(ksum) * sqrt(pref * ksum^2); radicand exact until the sqrt
    radicand = pref * ksum * ksum
    sign = 1.0 if ksum > 0 else -1.0
    return sign * sqrt(radicand.numerator / radicand.denominator)


@dataclass(frozen=True)
class BasisLabel:
    """One basis state: ('product', m1, m2, m3), ('device', m1, s23, m23)
    or ('total', S, M, s23)."""

    kind: str
    numbers: tuple[Fraction, ...]

    def __post_init__(self):
        if self.kind not in ("product", "device", "total"):
            raise ValueError(f"unknown label kind {self.kind!r}")

    @property
    def m_total(self) -> Fraction:
        if self.kind == "product":
            return sum(self.numbers, Fraction(0))
        if self.kind == "device":
            return self.numbers[0] + self.numbers[2]
        return self.numbers[1]

    def __str__(self):
        if self.kind == "device":
            m1, s23, m23 = self.numbers
            head = {Fraction(1, 2): "up", Fraction(-1, 2): "down"}.get(m1, str(m1))
            return f"{head}:{s23}:{m23}"
        if self.kind == "total":
            return "tot:" + ":".join(str(n) for n in self.numbers)
        return "prod:" + ":".join(str(n) for n in self.numbers)


def device_label(m1, s23, m23) -> BasisLabel:
    return BasisLabel("device", (Fraction(m1), Fraction(s23), Fraction(m23)))


def parse_device_label(text: str) -> BasisLabel:
    """Parse 'up:2:1', 'down:3:3/2', '+1:1:0' into a device label."""
    parts = text.strip().split(":")
    if len(parts) != 3:
        raise ValueError(f"device label must have three ':'-separated fields, "
                         f"got {text!r}")
    word = parts[0].strip().lower()
    m1 = {"up": Fraction(1, 2), "down": Fraction(-1, 2)}.get(word)
    if m1 is None:
        m1 = Fraction(word)
    try:
        return device_label(m1, Fraction(parts[1]), Fraction(parts[2]))
    except (ValueError, ZeroDivisionError) as exc:
        raise ValueError(f"bad device label {text!r}: {exc}") from None


def parse_total_label(text: str) -> BasisLabel:
    """Parse 'tot:2:2:1' (S:M:parentage s23) into a total-basis label."""
    parts = text.strip().split(":")
    if len(parts) != 4 or parts[0] != "tot":
        raise ValueError(f"total label must look like 'tot:S:M:s23', got {text!r}")
    return BasisLabel("total", tuple(Fraction(x) for x in parts[1:]))


def product_labels(spins: tuple[Spin, Spin, Spin]) -> list[BasisLabel]:
    labels = []
    for m1 in spins[0].projections():
        for m2 in spins[1].projections():
            for m3 in spins[2].projections():
                labels.append(BasisLabel("product", (m1, m2, m3)))
    return labels


def coupled_labels(s2: Spin, s3: Spin) -> list[tuple[Fraction, Fraction]]:
    """(s23, m23) pairs, s23 descending then m23 descending."""
    out = []
    twice = s2.twice + s3.twice
    low = abs(s2.twice - s3.twice)
    while twice >= low:
        s23 = Fraction(twice, 2)
        m = s23
        while m >= -s23:
            out.append((s23, m))
            m -= 1
        twice -= 2
    return out


def device_labels(spins: tuple[Spin, Spin, Spin]) -> list[BasisLabel]:
    labels = []
    for m1 in spins[0].projections():
        for s23, m23 in coupled_labels(spins[1], spins[2]):
            labels.append(BasisLabel("device", (m1, s23, m23)))
    return labels


@dataclass(frozen=True)
class BasisTransform:
    """Unitary change of basis; rows are output states, columns input states.

    v_out = matrix @ v_in and H_out = matrix @ H_in @ matrix.T.conj().
    All entries are real (Condon-Shortley convention).
    """

    matrix: np.ndarray
    labels_in: tuple[BasisLabel, ...]
    labels_out: tuple[BasisLabel, ...]

    def __post_init__(self):
        m = np.asarray(self.matrix, dtype=float)
        m.setflags(write=False)
        object.__setattr__(self, "matrix", m)
        gram = m @ m.T
        if np.abs(gram - np.eye(m.shape[0])).max() > TRANSFORM_TOL:
            raise ValueError("basis transform is not unitary")

    def rotate(self, h: np.ndarray) -> np.ndarray:
        return self.matrix @ h @ self.matrix.T

    def index_of(self, label: BasisLabel) -> int:
        try:
            return self.labels_out.index(label)
        except ValueError:
            known = ", ".join(str(l) for l in self.labels_out)
            raise KeyError(f"state {label} not in basis; known states: {known}") from None


def _pair_coupling_matrix(s2: Spin, s3: Spin) -> np.ndarray:
    """Rows: coupled (s23, m23) states; columns: product (m2, m3) states."""
    pairs = coupled_labels(s2, s3)
    m2s = s2.projections()
    m3s = s3.projections()
    w = np.zeros((len(pairs), len(m2s) * len(m3s)))
    for r, (s23, m23) in enumerate(pairs):
        for i2, m2 in enumerate(m2s):
            for i3, m3 in enumerate(m3s):
                if m2 + m3 != m23:
                    continue
                w[r, i2 * len(m3s) + i3] = clebsch_gordan(
                    Fraction(s2.twice, 2), m2, Fraction(s3.twice, 2), m3,
                    s23, m23)
    return w


def product_to_device(s2, s3, s1=Spin(1)) -> BasisTransform:
    """Transform from the product basis to the device basis.

    The particle-1 factor is the identity; particles 2 and 3 are coupled with
    exact Clebsch-Gordan coefficients.
    """
    s1, s2, s3 = Spin.of(s1), Spin.of(s2), Spin.of(s3)
    w = _pair_coupling_matrix(s2, s3)
    full = np.kron(np.eye(s1.dimension), w)
    spins = (s1, s2, s3)
    return BasisTransform(full, tuple(product_labels(spins)),
                          tuple(device_labels(spins)))


def total_labels(s1: Spin, s2: Spin, s3: Spin) -> list[BasisLabel]:
    labels = []
    entries = []
    seen = set()
    for s23, m23 in coupled_labels(s2, s3):
        if s23 in seen:
            continue
        seen.add(s23)
        twice = s1.twice + int(2 * s23)
        low = abs(s1.twice - int(2 * s23))
        while twice >= low:
            entries.append((Fraction(twice, 2), s23))
            twice -= 2
    entries.sort(key=lambda e: (-e[0], -e[1]))
    for s_tot, s23 in entries:
        m = s_tot
        while m >= -s_tot:
            labels.append(BasisLabel("total", (s_tot, m, s23)))
            m -= 1
    labels.sort(key=lambda l: (-l.numbers[0], -l.numbers[1], -l.numbers[2]))
    return labels


def device_to_total(s1, s2, s3) -> BasisTransform:
    """Couple particle 1 with the (2,3) pair; parentage s23 stays a label."""
    s1, s2, s3 = Spin.of(s1), Spin.of(s2), Spin.of(s3)
    spins = (s1, s2, s3)
    dev = device_labels(spins)
    tot = total_labels(s1, s2, s3)
    w = np.zeros((len(tot), len(dev)))
    for r, lt in enumerate(tot):
        s_tot, m_tot, parent = lt.numbers
        for c, ld in enumerate(dev):
            m1, s23, m23 = ld.numbers
            if s23 != parent or m1 + m23 != m_tot:
                continue
            w[r, c] = clebsch_gordan(Fraction(s1.twice, 2), m1, s23, m23,
                                     s_tot, m_tot)
    return BasisTransform(w, tuple(dev), tuple(tot))


@dataclass(frozen=True)
class TwoLevel:
    """Reduction of a 2x2 block to offset + omega_x sx + omega_y sy + omega_z sz.

    omega_x/omega_y are the real/imaginary decomposition of the coupling, so
    the reconstruction is exact; the physical blocks of this model are real,
    leaving omega_y = 0.  omega_z follows the block's stored state ordering
    (first state carries +omega_z).
    """

    omega_x: float
    omega_z: float
    offset: float
    omega_y: float = 0.0

    @property
    def rabi_omega(self) -> float:
        return float(np.hypot(np.hypot(self.omega_x, self.omega_y), self.omega_z))

    @property
    def coupling(self) -> float:
        return float(np.hypot(self.omega_x, self.omega_y))

    def reconstruct(self) -> np.ndarray:
        c = self.omega_x - 1j * self.omega_y
        return np.array([[self.offset + self.omega_z, c],
                         [np.conj(c), self.offset - self.omega_z]])


@dataclass(frozen=True)
class SpinBlock:
    """A dynamically closed index subset of a basis.

    indices point into the basis the Hamiltonian was decomposed in; m_total
    is set when the total magnetic quantum number is uniform over the block.
    two_level is present for blocks of size 2.
    """

    indices: tuple[int, ...]
    labels: tuple[BasisLabel, ...]
    matrix: np.ndarray
    m_total: Fraction | None
    two_level: TwoLevel | None

    @property
    def size(self) -> int:
        return len(self.indices)

    def states(self) -> str:
        return ", ".join(str(l) for l in self.labels)


def reduce_two_level(block) -> TwoLevel:
    """Pauli decomposition of a 2x2 block (mean diagonal removed)."""
    h = block.matrix if isinstance(block, SpinBlock) else np.asarray(block)
    if h.shape != (2, 2):
        raise ValueError(f"two-level reduction needs a 2x2 block, got {h.shape}")
    offset = 0.5 * float((h[0, 0] + h[1, 1]).real)
    omega_z = 0.5 * float((h[0, 0] - h[1, 1]).real)
    omega_x = float(h[0, 1].real)
    omega_y = float(-np.imag(h[0, 1]))
    return TwoLevel(omega_x=omega_x, omega_z=omega_z, offset=offset,
                    omega_y=omega_y)


def block_decompose(h: np.ndarray, labels: list[BasisLabel] | tuple[BasisLabel, ...],
                    tol: float = BLOCK_COUPLING_TOL) -> list[SpinBlock]:
    """Split a Hamiltonian into connected components of |H[i][j]| > tol.

    Blocks are ordered by their first basis index; indices within a block
    keep the basis order.  Size-2 blocks get the two-level reduction.
    """
    h = np.asarray(h)
    n = h.shape[0]
    if len(labels) != n:
        raise ValueError("label count does not match matrix dimension")
    adj = np.abs(h) > tol
    seen = np.zeros(n, dtype=bool)
    blocks = []
    for start in range(n):
        if seen[start]:
            continue
        stack = [start]
        comp = []
        seen[start] = True
        while stack:
            i = stack.pop()
            comp.append(i)
            for j in np.nonzero(adj[i])[0]:
                if not seen[j]:
                    seen[j] = True
                    stack.append(int(j))
        comp.sort()
        idx = np.array(comp)
        sub = h[np.ix_(idx, idx)]
        sub_labels = tuple(labels[i] for i in comp)
        ms = {l.m_total for l in sub_labels}
        m_total = ms.pop() if len(ms) == 1 else None
        two = reduce_two_level(sub) if len(comp) == 2 else None
        blocks.append(SpinBlock(indices=tuple(comp), labels=sub_labels,
                                matrix=sub, m_total=m_total, two_level=two))
    return blocks


@dataclass(frozen=True)
class DeviceSystem:
    """A Hamiltonian bundle expressed in the device basis, with its blocks."""

    transform: BasisTransform
    h_device: np.ndarray
    blocks: tuple[SpinBlock, ...]

    @classmethod
    def from_bundle(cls, bundle) -> "DeviceSystem":
        s1, s2, s3 = bundle.spins
        tr = product_to_device(s2, s3, s1=s1)
        h_dev = tr.rotate(bundle.h_total.matrix.real) \
            if np.abs(bundle.h_total.matrix.imag).max() < 1e-14 \
            else tr.matrix @ bundle.h_total.matrix @ tr.matrix.T
        h_dev = np.asarray(h_dev, dtype=complex)
        blocks = tuple(block_decompose(h_dev, tr.labels_out))
        return cls(transform=tr, h_device=h_dev, blocks=blocks)

    @property
    def labels(self) -> tuple[BasisLabel, ...]:
        return self.transform.labels_out

    @property
    def dim(self) -> int:
        return self.h_device.shape[0]

    def index_of(self, label: BasisLabel | str) -> int:
        if isinstance(label, str):
            label = parse_device_label(label)
        return self.transform.index_of(label)

    def basis_state(self, label: BasisLabel | str) -> np.ndarray:
        vec = np.zeros(self.dim, dtype=complex)
        vec[self.index_of(label)] = 1.0
        return vec

    def block_of(self, label: BasisLabel | str) -> SpinBlock:
        idx = self.index_of(label)
        for b in self.blocks:
            if idx in b.indices:
                return b
        raise AssertionError("blocks must cover every index")


def block_report(blocks: list[SpinBlock] | tuple[SpinBlock, ...]) -> str:
    """Human-readable block table (states, m, and 2x2 reductions)."""
    lines = ["block  size  m_total  states"]
    for k, b in enumerate(blocks):
        m = "mixed" if b.m_total is None else str(b.m_total)
        lines.append(f"{k:<5d}  {b.size:<4d}  {m:<7s}  {b.states()}")
        if b.two_level is not None:
            t = b.two_level
            lines.append(f"{'':5s}  {'':4s}  {'':7s}  -> omega_x={t.omega_x:+.6g} "
                         f"omega_z={t.omega_z:+.6g} offset={t.offset:+.6g}")
    return "\n".join(lines)
