"""Path-fluctuation errors, imperfect sorter gates and channel leakage.

Only relative phases matter: a common shift of every path leaves the
sorter unchanged, so the error state is the N-1 base phase errors of
paths 1..N-1 relative to path 0, for the reference mass.  Heavier species
see the same length errors scaled by their mass ratio m_k / m_0.
"""

from __future__ import annotations

import csv
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .constants import PLANCK_H
from .design import Species, SorterDesign
from .gates import controlled_z, dft_matrix


@dataclass(frozen=True)
class PathFluctuation:
    """Per-path length errors in meters; entry 0 is the reference path."""

    delta_lengths: tuple[float, ...]

    def __post_init__(self):
        if not all(np.isfinite(self.delta_lengths)):
            raise ValueError("path fluctuations must be finite")


@dataclass(frozen=True)
class PhaseErrorVector:
    """Phase errors of the sorter, parametrized by the reference-mass row."""

    n: int
    base_errors: tuple[float, ...]   # rad, paths 1..n-1 for mass 0
    mass_ratios: tuple[float, ...]   # m_k / m_0, entry 0 == 1

    def __post_init__(self):
        if len(self.base_errors) != self.n - 1:
            raise ValueError(f"need {self.n - 1} base errors, got {len(self.base_errors)}")
        if len(self.mass_ratios) != self.n:
            raise ValueError(f"need {self.n} mass ratios, got {len(self.mass_ratios)}")

    def phase_error(self, k: int, s: int) -> float:
        """Phase error of mass k on path s (zero on the reference path)."""
        if s == 0:
            return 0.0
        return self.mass_ratios[k] * self.base_errors[s - 1]

    def phase_matrix(self) -> np.ndarray:
        """(n, n) array of phase errors, rows = mass, columns = path."""
        base = np.concatenate([[0.0], self.base_errors])
        return np.outer(self.mass_ratios, base)


def zero_errors(n: int, mass_ratios: tuple[float, ...] | None = None) -> PhaseErrorVector:
    ratios = tuple(mass_ratios) if mass_ratios is not None else (1.0,) * n
    return PhaseErrorVector(n=n, base_errors=(0.0,) * (n - 1), mass_ratios=ratios)


def phases_from_fluctuation(
    fluct: PathFluctuation,
    species: list[Species] | tuple[Species, ...],
    velocity: float,
) -> PhaseErrorVector:
    """Convert path-length errors into the reference-mass phase errors.

    base[s] = 2*pi * (dL_s - dL_0) * m_0 * v / h; a uniform fluctuation of
    all paths therefore maps to the zero vector.
    """
    n = len(species)
    if n < 2:
        raise ValueError("need at least 2 species")
    if len(fluct.delta_lengths) != n:
        raise ValueError(f"need {n} path fluctuations, got {len(fluct.delta_lengths)}")
    m0 = species[0].mass
    d = np.asarray(fluct.delta_lengths)
    base = 2.0 * np.pi * (d[1:] - d[0]) * m0 * velocity / PLANCK_H
    ratios = tuple(sp.mass / m0 for sp in species)
    return PhaseErrorVector(n=n, base_errors=tuple(base), mass_ratios=ratios)


def controlled_z_err(errs: PhaseErrorVector) -> np.ndarray:
    """Imperfect phase gate: |k,s> -> exp(i*dphi_{k,s}) * omega**(s*k) |k,s>."""
    n = errs.n
    ideal = 2.0 * np.pi / n * np.outer(np.arange(n), np.arange(n))
    return np.diag(np.exp(1j * (ideal + errs.phase_matrix())).ravel())


def controlled_x_err(errs: PhaseErrorVector) -> np.ndarray:
    """Imperfect sorter (I (x) F^dag) CZ_err (I (x) F); block-diagonal in mass."""
    f = dft_matrix(errs.n)
    big_f = np.kron(np.eye(errs.n), f)
    return big_f.conj().T @ controlled_z_err(errs) @ big_f


def leakage_amplitudes(errs: PhaseErrorVector) -> np.ndarray:
    """Amplitudes c_{k,s} = <k,s| sorter |k,0> as an (n, n) complex array."""
    n = errs.n
    cx = controlled_x_err(errs)
    cols = cx.reshape(n, n, n, n)  # [k_out, s_out, k_in, s_in]
    return np.stack([cols[k, :, k, 0] for k in range(n)])


def simulate_leakage(errs: PhaseErrorVector) -> np.ndarray:
    """Row-stochastic exit-probability matrix p_{k,s} = |c_{k,s}|**2."""
    return np.abs(leakage_amplitudes(errs)) ** 2


def design_leakage(design: SorterDesign) -> np.ndarray:
    """Exit probabilities of a concrete design, from its actual path phases.

    Uses the full accumulated phases 2*pi * dL_s * m_k * v / h, so any
    residual of an imperfect design shows up as off-diagonal leakage.
    """
    n = design.n
    masses = np.array([sp.mass for sp in design.species])
    dl = np.array(design.delta_lengths)
    phases = 2.0 * np.pi * np.outer(masses, dl) * design.velocity / PLANCK_H
    f = dft_matrix(n)
    p = np.empty((n, n))
    for k in range(n):
        column = f.conj().T @ (np.exp(1j * phases[k]) * f[:, 0])
        p[k] = np.abs(column) ** 2
    return p


def analytic_leakage_n3(
    delta1: float,
    delta2: float,
    ratio1: float,
    ratio2: float,
) -> tuple[np.ndarray, np.ndarray]:
    """Closed-form amplitudes and probabilities for the 3-path sorter.

    Independent of the matrix simulation: the nine amplitudes are written
    out termwise, and the mass-0 probabilities come from the cosine form
    p_{0,s} = 1/3 + (2/9) * [three shifted cosines].
    """
    w = np.exp(2j * np.pi / 3)
    d1p, d2p = delta1 * ratio1, delta2 * ratio1
    d1pp, d2pp = delta1 * ratio2, delta2 * ratio2
    e = lambda x: np.exp(1j * x)
    amps = np.array([
        [1 + e(delta1) + e(delta2),
         1 + w**2 * e(delta1) + w * e(delta2),
         1 + w * e(delta1) + w**2 * e(delta2)],
        [1 + w * e(d1p) + w**2 * e(d2p),
         1 + e(d1p) + e(d2p),
         1 + w**2 * e(d1p) + w * e(d2p)],
        [1 + w**2 * e(d1pp) + w * e(d2pp),
         1 + w * e(d1pp) + w**2 * e(d2pp),
         1 + e(d1pp) + e(d2pp)],
    ]) / 3.0

    third = 2.0 * np.pi / 3.0
    row0 = 1.0 / 3.0 + (2.0 / 9.0) * np.array([
        np.cos(delta1) + np.cos(delta2) + np.cos(delta1 - delta2),
        np.cos(delta1 - third) + np.cos(delta2 + third) + np.cos(delta1 - delta2 + third),
        np.cos(delta1 + third) + np.cos(delta2 - third) + np.cos(delta1 - delta2 - third),
    ])
    probs = np.abs(amps) ** 2
    probs[0] = row0
    return amps, probs


def sweep_leakage(
    delta1_values,
    delta2_values,
    mass_ratios: tuple[float, ...],
) -> np.ndarray:
    """Leakage matrices over a (delta1, delta2) grid.

    Returns shape (len(delta1), len(delta2), n, n); the exit-0 probability
    of mass 0 is grid[..., 0, 0].
    """
    d1s = np.atleast_1d(np.asarray(delta1_values, dtype=float))
    d2s = np.atleast_1d(np.asarray(delta2_values, dtype=float))
    if d1s.size == 0 or d2s.size == 0:
        raise ValueError("sweep ranges must be non-empty")
    n = len(mass_ratios)
    if n != 3:
        raise ValueError("the two-error sweep is defined for 3 paths")
    grid = np.empty((d1s.size, d2s.size, n, n))
    for i, d1 in enumerate(d1s):
        for j, d2 in enumerate(d2s):
            errs = PhaseErrorVector(n=n, base_errors=(d1, d2),
                                    mass_ratios=tuple(mass_ratios))
            grid[i, j] = simulate_leakage(errs)
    return grid


def write_sweep_csv(
    path: str | Path,
    delta1_values,
    delta2_values,
    grid: np.ndarray,
    all_entries: bool = False,
) -> None:
    """Write a sweep grid row-major as delta1_rad,delta2_rad,p00[,p_ks...]."""
    d1s = np.atleast_1d(np.asarray(delta1_values, dtype=float))
    d2s = np.atleast_1d(np.asarray(delta2_values, dtype=float))
    n = grid.shape[-1]
    header = ["delta1_rad", "delta2_rad", "p00"]
    extra = [(k, s) for k in range(n) for s in range(n) if (k, s) != (0, 0)]
    if all_entries:
        header += [f"p{k}{s}" for k, s in extra]
    with Path(path).open("w", encoding="utf-8", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(header)
        for i, d1 in enumerate(d1s):
            for j, d2 in enumerate(d2s):
                row = [repr(float(d1)), repr(float(d2)), repr(float(grid[i, j, 0, 0]))]
                if all_entries:
                    row += [repr(float(grid[i, j, k, s])) for k, s in extra]
                writer.writerow(row)


@dataclass(frozen=True)
class MonteCarloResult:
    """Mean and standard deviation of the diagonal exit probabilities."""

    mean: tuple[float, ...]
    std: tuple[float, ...]
    trials: int
    seed: int
    sigma_length: float


def monte_carlo_leakage(
    design: SorterDesign,
    sigma_length: float,
    trials: int,
    seed: int,
) -> MonteCarloResult:
    """Sample i.i.d. Gaussian path noise and aggregate the diagonal leakage.

    Each trial uses an RNG stream derived from (seed, trial index), so a
    parallel split over trials would reproduce the serial result.
    """
    if trials < 1:
        raise ValueError("need at least one trial")
    if sigma_length < 0:
        raise ValueError("sigma must be non-negative")
    n = design.n
    diagonals = np.empty((trials, n))
    for t in range(trials):
        rng = np.random.default_rng(np.random.SeedSequence(entropy=seed, spawn_key=(t,)))
        fluct = PathFluctuation(tuple(rng.normal(0.0, sigma_length, size=n)))
        errs = phases_from_fluctuation(fluct, design.species, design.velocity)
        diagonals[t] = np.diag(simulate_leakage(errs))
    return MonteCarloResult(
        mean=tuple(diagonals.mean(axis=0)),
        std=tuple(diagonals.std(axis=0)),
        trials=trials,
        seed=seed,
        sigma_length=sigma_length,
    )
