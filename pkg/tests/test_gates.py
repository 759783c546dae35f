import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from interfsort.gates import (
    InvalidDimensionError,
    apply,
    controlled_x,
    controlled_z,
    dft_matrix,
    flat_index,
    is_unitary,
    split_index,
)

W3 = np.exp(2j * np.pi / 3)


def shift_permutation(n):
    """Independent oracle: the raw |k,s> -> |k,(s+k) mod n> permutation."""
    perm = np.zeros((n * n, n * n))
    for k in range(n):
        for s in range(n):
            perm[n * k + (s + k) % n, n * k + s] = 1.0
    return perm


class TestDftMatrix:
    def test_n1_is_identity(self):
        assert np.allclose(dft_matrix(1), [[1.0]], atol=1e-15)

    def test_n2_is_hadamard(self):
        expected = np.array([[1, 1], [1, -1]]) / np.sqrt(2)
        assert np.abs(dft_matrix(2) - expected).max() < 1e-15

    def test_n3_entries(self):
        expected = np.array([
            [1, 1, 1],
            [1, W3, W3**2],
            [1, W3**2, W3],
        ]) / np.sqrt(3)
        assert np.abs(dft_matrix(3) - expected).max() < 1e-14

    def test_column_zero_uniform(self):
        for n in range(1, 9):
            col = dft_matrix(n)[:, 0]
            assert np.abs(col - 1 / np.sqrt(n)).max() < 1e-14

    @pytest.mark.parametrize("n", range(1, 9))
    def test_unitary_and_order_four(self, n):
        f = dft_matrix(n)
        assert is_unitary(f, 1e-12)
        assert np.abs(np.linalg.matrix_power(f, 4) - np.eye(n)).max() < 1e-10

    def test_zero_dimension_rejected(self):
        with pytest.raises(InvalidDimensionError):
            dft_matrix(0)


class TestControlledZ:
    def test_n3_diagonal_listing(self):
        w = W3
        expected = np.diag([1, 1, 1, 1, w, w**2, 1, w**2, w])
        assert np.abs(controlled_z(3) - expected).max() < 1e-14

    def test_n2_is_cz(self):
        assert np.abs(controlled_z(2) - np.diag([1, 1, 1, -1])).max() < 1e-14

    def test_n1_trivial(self):
        assert np.allclose(controlled_z(1), [[1.0]])

    @pytest.mark.parametrize("n", range(1, 9))
    def test_diagonal_unit_modulus(self, n):
        cz = controlled_z(n)
        assert np.abs(cz - np.diag(np.diag(cz))).max() == 0
        assert np.abs(np.abs(np.diag(cz)) - 1).max() < 1e-14


class TestControlledX:
    @pytest.mark.parametrize("n", range(1, 9))
    def test_matches_direct_permutation(self, n):
        assert np.abs(controlled_x(n) - shift_permutation(n)).max() < 1e-12

    def test_n2_is_cnot(self):
        cnot = np.eye(4)[:, [0, 1, 3, 2]]
        assert np.abs(controlled_x(2) - cnot).max() < 1e-12

    def test_n3_shifts_k2_s0_to_s2(self):
        state = np.zeros(9)
        state[flat_index(3, 2, 0)] = 1.0
        out = apply(controlled_x(3), state)
        expected = np.zeros(9)
        expected[flat_index(3, 2, 2)] = 1.0
        assert np.abs(out - expected).max() < 1e-12


class TestApply:
    def test_identity_preserves_state(self):
        state = np.array([0.6, 0.8j])
        assert np.abs(apply(np.eye(2), state) - state).max() < 1e-15

    def test_hadamard_on_e0(self):
        out = apply(dft_matrix(2), np.array([1.0, 0.0]))
        assert np.abs(out - 1 / np.sqrt(2)).max() < 1e-15

    def test_dft3_makes_uniform_superposition(self):
        out = apply(dft_matrix(3), np.array([1.0, 0.0, 0.0]))
        assert np.abs(out - 1 / np.sqrt(3)).max() < 1e-15

    def test_dimension_mismatch(self):
        with pytest.raises(ValueError, match="mismatch"):
            apply(dft_matrix(3), np.array([1.0, 0.0]))

    def test_unnormalized_rejected(self):
        with pytest.raises(ValueError, match="normalized"):
            apply(np.eye(2), np.array([1.0, 1.0]))

    @settings(deadline=None)
    @given(
        n=st.integers(2, 8),
        seed=st.integers(0, 2**32 - 1),
    )
    def test_norm_preserved(self, n, seed):
        rng = np.random.default_rng(seed)
        vec = rng.normal(size=n) + 1j * rng.normal(size=n)
        vec /= np.linalg.norm(vec)
        out = apply(dft_matrix(n), vec)
        assert abs(np.linalg.norm(out) - 1.0) < 1e-12


class TestBasisIndex:
    @given(n=st.integers(1, 8), flat=st.integers(0, 63))
    def test_round_trip(self, n, flat):
        if flat >= n * n:
            flat = flat % (n * n)
        k, s = split_index(n, flat)
        assert flat_index(n, k, s) == flat
        assert 0 <= k < n and 0 <= s < n

    def test_mass_major_ordering(self):
        assert flat_index(3, 2, 1) == 7

    def test_out_of_range(self):
        with pytest.raises(ValueError):
            flat_index(3, 3, 0)
        with pytest.raises(ValueError):
            split_index(3, 9)
