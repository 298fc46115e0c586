import numpy as np
import pytest

from trispin.spin_core import (NonHermitianError, Operator, Spin, hermitian,
                               hermitian_eig, identity, kron, propagator,
                               spin_matrices)
from trispin.verify import series_expm_oracle

RNG = np.random.default_rng(11)


def random_hermitian(dim):
    a = RNG.normal(size=(dim, dim)) + 1j * RNG.normal(size=(dim, dim))
    return hermitian(0.5 * (a + a.conj().T))


class TestSpin:
    def test_of_accepts_common_forms(self):
        assert Spin.of(0.5).twice == 1
        assert Spin.of("3/2").twice == 3
        assert Spin.of(2).twice == 4
        assert Spin.of(Spin(5)).twice == 5

    def test_dimension(self):
        assert Spin(1).dimension == 2
        assert Spin(4).dimension == 5

    def test_rejects_non_half_integer(self):
        with pytest.raises(ValueError):
            Spin.of(0.3)
        with pytest.raises(ValueError):
            Spin(-1)

    def test_projections_descend(self):
        assert [float(m) for m in Spin(3).projections()] == [1.5, 0.5, -0.5, -1.5]


class TestSpinMatrices:
    def test_half_is_pauli_over_two(self):
        sx, sy, sz = spin_matrices(Spin(1))
        assert np.allclose(sz.matrix, np.diag([0.5, -0.5]))
        assert np.allclose(sx.matrix, 0.5 * np.array([[0, 1], [1, 0]]))
        assert np.allclose(sy.matrix, 0.5 * np.array([[0, -1j], [1j, 0]]))

    def test_spin_one_ladder_values(self):
        sx, _, sz = spin_matrices(Spin(2))
        assert np.allclose(np.diag(sz.matrix), [1, 0, -1])
        assert sx.matrix[0, 1] == pytest.approx(1 / np.sqrt(2))
        assert sx.matrix[1, 2] == pytest.approx(1 / np.sqrt(2))

    @pytest.mark.parametrize("twice", range(1, 11))
    def test_algebra(self, twice):
        s = Spin(twice)
        sx, sy, sz = (op.matrix for op in spin_matrices(s))
        assert np.abs(sx @ sy - sy @ sx - 1j * sz).max() < 1e-12
        assert np.abs(sy @ sz - sz @ sy - 1j * sx).max() < 1e-12
        assert np.abs(sz @ sx - sx @ sz - 1j * sy).max() < 1e-12
        casimir = sx @ sx + sy @ sy + sz @ sz
        assert np.abs(casimir - s.value * (s.value + 1) * np.eye(s.dimension)).max() < 1e-12

    def test_spin_zero_is_one_dimensional(self):
        sx, sy, sz = spin_matrices(Spin(0))
        assert sx.dim == 1 and np.allclose(sz.matrix, 0)


class TestKron:
    def test_identities(self):
        assert np.allclose(kron(identity(2), identity(3)).matrix, np.eye(6))

    def test_diagonal_ordering(self):
        d = Operator(np.diag([1.0, 2.0]).astype(complex), hermitian=True)
        out = kron(d, identity(2))
        assert np.allclose(np.diag(out.matrix), [1, 1, 2, 2])

    def test_pauli_involution(self):
        sx = hermitian(np.array([[0, 1], [1, 0]], dtype=complex))
        once = kron(sx, sx)
        assert np.allclose(once.matrix @ once.matrix, np.eye(4))

    def test_hermitian_flag_propagates(self):
        assert kron(identity(2), identity(2)).hermitian
        a = Operator(np.array([[0, 1], [0, 0]], dtype=complex))
        assert not kron(a, identity(2)).hermitian


class TestHermitianEig:
    def test_diagonal(self):
        eig = hermitian_eig(hermitian(np.diag([2.0, -1.0])))
        assert np.allclose(eig.eigenvalues, [-1.0, 2.0])

    def test_pauli_x(self):
        eig = hermitian_eig(hermitian(np.array([[0, 1], [1, 0]], dtype=complex)))
        assert np.allclose(eig.eigenvalues, [-1.0, 1.0])
        for col, val in zip(eig.eigenvectors.T, eig.eigenvalues):
            assert np.allclose(np.abs(col), 1 / np.sqrt(2))
            assert np.sign(val) == np.sign((col[0] * col[1].conj()).real)

    def test_rejects_non_hermitian_with_diagnostic(self):
        m = np.eye(3, dtype=complex)
        m[0, 2] = 0.5
        with pytest.raises(NonHermitianError, match=r"\(0,2\)"):
            hermitian_eig(Operator(m))

    @pytest.mark.parametrize("dim", [2, 5, 12])
    def test_reconstruction(self, dim):
        for _ in range(20):
            h = random_hermitian(dim)
            eig = hermitian_eig(h)
            scale = np.abs(h.matrix).max()
            assert np.abs(eig.reconstruct() - h.matrix).max() < 1e-10 * scale
            gram = eig.eigenvectors.conj().T @ eig.eigenvectors
            assert np.abs(gram - np.eye(dim)).max() < 1e-10
            assert np.all(np.diff(eig.eigenvalues) >= -1e-14)


class TestPropagator:
    def test_zero_time_is_identity(self):
        h = random_hermitian(6)
        assert np.allclose(propagator(h, 0.0).matrix, np.eye(6))

    def test_diagonal_phases(self):
        h = hermitian(np.diag([1.5, -0.25, 0.0]))
        u = propagator(h, 2.0)
        assert np.allclose(np.diag(u.matrix), np.exp(-1j * np.diag(h.matrix) * 2.0))
        assert np.abs(u.matrix - np.diag(np.diag(u.matrix))).max() < 1e-14

    def test_group_law(self):
        for _ in range(20):
            h = random_hermitian(int(RNG.integers(2, 13)))
            t1, t2 = RNG.uniform(0, 5, size=2)
            u1, u2, u12 = (propagator(h, t).matrix for t in (t1, t2, t1 + t2))
            assert np.abs(u1 @ u2 - u12).max() < 1e-9

    def test_unitary(self):
        for dim in (2, 7, 18):
            h = random_hermitian(dim)
            u = propagator(h, RNG.uniform(0, 10)).matrix
            assert np.abs(u.conj().T @ u - np.eye(dim)).max() < 1e-10

    def test_matches_series_oracle(self):
        for _ in range(25):
            dim = int(RNG.integers(2, 19))
            h = random_hermitian(dim)
            t = RNG.uniform(0, 8)
            assert np.abs(propagator(h, t).matrix
                          - series_expm_oracle(h, t).matrix).max() < 1e-9
