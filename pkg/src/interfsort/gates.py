"""Dense gate algebra for the mass/path two-qudit sorter circuit.

Basis convention (the single binding convention of the package): the
composite basis is mass-major, flat index = N*k + s for mass index k and
path index s, both in [0, N).  The N-port coupler uses the Fourier kernel
omega = exp(+2*pi*i/N).  All gates are dense complex128 arrays; N stays
small (<= ~32) so uniform dense storage beats specialized diagonal or
permutation representations.
"""

from __future__ import annotations

import numpy as np

UNITARITY_TOL = 1e-12


class InvalidDimensionError(ValueError):
    """Gate or qudit dimension is not a positive integer."""


def _check_dim(n: int) -> None:
    if not isinstance(n, (int, np.integer)) or isinstance(n, bool) or n < 1:
        raise InvalidDimensionError(f"dimension must be a positive integer, got {n!r}")


def flat_index(n: int, k: int, s: int) -> int:
    """Composite index of |k>_mass |s>_path in the mass-major ordering."""
    _check_dim(n)
    if not (0 <= k < n and 0 <= s < n):
        raise ValueError(f"indices (k={k}, s={s}) out of range for n={n}")
    return n * k + s


def split_index(n: int, flat: int) -> tuple[int, int]:
    """Inverse of flat_index: flat -> (mass index, path index)."""
    _check_dim(n)
    if not 0 <= flat < n * n:
        raise ValueError(f"flat index {flat} out of range for n={n}")
    return divmod(flat, n)


def dft_matrix(n: int) -> np.ndarray:
    """N-port coupler unitary: entry (j, k) = omega**(k*j) / sqrt(N)."""
    _check_dim(n)
    j = np.arange(n)
    return np.exp(2j * np.pi / n * np.outer(j, j)) / np.sqrt(n)


def controlled_z(n: int) -> np.ndarray:
    """Mass-controlled phase gate: |k,s> -> omega**(s*k) |k,s>, dim N**2."""
    _check_dim(n)
    k = np.arange(n)
    phases = np.exp(2j * np.pi / n * np.outer(k, k)).ravel()
    return np.diag(phases)


def controlled_x(n: int) -> np.ndarray:
    """Mass-controlled path shift |k,s> -> |k, (s+k) mod N>, dim N**2.

    Built through the Fourier conjugation identity
    (I (x) F^dag) CZ (I (x) F) rather than as a raw permutation.
    """
    f = dft_matrix(n)
    big_f = np.kron(np.eye(n), f)
    return big_f.conj().T @ controlled_z(n) @ big_f


def apply(gate: np.ndarray, state: np.ndarray) -> np.ndarray:
    """Apply a gate to a normalized state vector."""
    gate = np.asarray(gate)
    state = np.asarray(state, dtype=complex)
    if state.ndim != 1 or gate.shape != (state.size, state.size):
        raise ValueError(
            f"dimension mismatch: gate {gate.shape} vs state length {state.size}"
        )
    norm = np.linalg.norm(state)
    if abs(norm - 1.0) > 1e-12:
        raise ValueError(f"input state must be normalized, |state| = {norm!r}")
    return gate @ state


def is_unitary(gate: np.ndarray, tol: float = UNITARITY_TOL) -> bool:
    gate = np.asarray(gate)
    if gate.ndim != 2 or gate.shape[0] != gate.shape[1]:
        return False
    dev = gate.conj().T @ gate - np.eye(gate.shape[0])
    return float(np.abs(dev).max()) <= tol
