"""Finite-dimensional quantum state algebra.

Pure states, density matrices, unitary evolution, Born-rule collapse,
entanglement diagnostics, von Neumann entropy, and dephasing.

Conventions: hbar = 1, times in inverse-energy units, entropies in nats.
All value types are immutable; the only stochastic operation is
``collapse``, which takes an explicit ``numpy.random.Generator``.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .config import NUMERICS
from .errors import ForbiddenTransitionError, NumericFailure, ValidationError

__all__ = [
    "StateVector",
    "HermitianOperator",
    "DensityMatrix",
    "BipartiteLabel",
    "evolve_unitary",
    "propagate_density",
    "von_neumann_entropy",
    "expectation",
    "born_probability",
    "collapse",
    "collapse_probabilities",
    "sample_collapse_indices",
    "collapse_info_measure",
    "tensor_product",
    "schmidt_rank",
    "dephase",
    "basis_states",
    "random_state",
    "random_hermitian",
    "random_density",
]


def _complex_vector(amplitudes) -> np.ndarray:
    arr = np.array(amplitudes, dtype=complex).reshape(-1)
    if arr.size < 1:
        raise ValidationError("state needs at least one amplitude")
    if not np.all(np.isfinite(arr.real)) or not np.all(np.isfinite(arr.imag)):
        raise ValidationError("non-finite amplitude")
    return arr


def _square_matrix(matrix) -> np.ndarray:
    arr = np.array(matrix, dtype=complex)
    if arr.ndim != 2 or arr.shape[0] != arr.shape[1]:
        raise ValidationError(f"expected a square matrix, got shape {arr.shape}")
    if not np.all(np.isfinite(arr.real)) or not np.all(np.isfinite(arr.imag)):
        raise ValidationError("non-finite matrix entry")
    return arr


@dataclass(frozen=True)
class StateVector:
    """Normalized pure state; amplitudes are dimensionless."""

    amplitudes: np.ndarray

    def __post_init__(self):
        arr = _complex_vector(self.amplitudes)
        norm = np.linalg.norm(arr)
        if abs(norm - 1.0) > NUMERICS.norm_tol:
            raise ValidationError(f"state norm {norm} is not 1 within {NUMERICS.norm_tol}")
        arr.setflags(write=False)
        object.__setattr__(self, "amplitudes", arr)

    @classmethod
    def normalized(cls, amplitudes) -> "StateVector":
        arr = _complex_vector(amplitudes)
        norm = np.linalg.norm(arr)
        if norm == 0.0:
            raise ValidationError("cannot normalize the zero vector")
        return cls(arr / norm)

    @property
    def dim(self) -> int:
        return self.amplitudes.size


@dataclass(frozen=True)
class HermitianOperator:
    """Hermitian matrix; entries carry energy units for Hamiltonians."""

    matrix: np.ndarray

    def __post_init__(self):
        arr = _square_matrix(self.matrix)
        if np.max(np.abs(arr - arr.conj().T)) > NUMERICS.herm_tol:
            raise ValidationError(f"matrix is not Hermitian within {NUMERICS.herm_tol}")
        arr.setflags(write=False)
        object.__setattr__(self, "matrix", arr)

    @property
    def dim(self) -> int:
        return self.matrix.shape[0]

    def eig(self) -> tuple[np.ndarray, np.ndarray]:
        return np.linalg.eigh(self.matrix)


@dataclass(frozen=True)
class DensityMatrix:
    """Statistical mixture: Hermitian, unit trace, positive semidefinite."""

    matrix: np.ndarray

    def __post_init__(self):
        arr = _square_matrix(self.matrix)
        if np.max(np.abs(arr - arr.conj().T)) > NUMERICS.herm_tol:
            raise ValidationError(f"density matrix not Hermitian within {NUMERICS.herm_tol}")
        tr = np.trace(arr)
        if abs(tr - 1.0) > NUMERICS.norm_tol:
            raise ValidationError(f"density matrix trace {tr} is not 1 within {NUMERICS.norm_tol}")
        if np.min(np.linalg.eigvalsh(arr)) < -NUMERICS.psd_clip:
            raise ValidationError("density matrix has a negative eigenvalue beyond tolerance")
        arr.setflags(write=False)
        object.__setattr__(self, "matrix", arr)

    @classmethod
    def from_state(cls, psi: StateVector) -> "DensityMatrix":
        v = psi.amplitudes
        return cls(np.outer(v, v.conj()))

    @classmethod
    def mixture(cls, weights: Sequence[float], states: Sequence[StateVector]) -> "DensityMatrix":
        w = np.asarray(weights, dtype=float)
        if np.any(w < 0) or abs(w.sum() - 1.0) > NUMERICS.norm_tol:
            raise ValidationError("mixture weights must be nonnegative and sum to 1")
        acc = sum(wi * np.outer(s.amplitudes, s.amplitudes.conj()) for wi, s in zip(w, states))
        return cls(acc)

    @property
    def dim(self) -> int:
        return self.matrix.shape[0]

    def eigenvalues(self) -> np.ndarray:
        return np.linalg.eigvalsh(self.matrix)


@dataclass(frozen=True)
class BipartiteLabel:
    """Factorization of a composite dimension into subsystem dimensions."""

    dim_a: int
    dim_b: int

    def __post_init__(self):
        if self.dim_a < 1 or self.dim_b < 1:
            raise ValidationError("subsystem dimensions must be positive")

    def check(self, dim: int) -> None:
        if self.dim_a * self.dim_b != dim:
            raise ValidationError(
                f"split {self.dim_a}x{self.dim_b} inconsistent with dimension {dim}")


def _check_dims(a: int, b: int) -> None:
    if a != b:
        raise ValidationError(f"dimension mismatch: {a} vs {b}")


def evolve_unitary(state: StateVector, hamiltonian: HermitianOperator, dt: float) -> StateVector:
    """Propagate a pure state by exp(-i*H*dt) via eigendecomposition.

    Exact (to rounding) for time-independent Hermitian H; reversible by
    propagating with -dt.
    """
    _check_dims(state.dim, hamiltonian.dim)
    if not math.isfinite(dt):
        raise ValidationError("dt must be finite")
    energies, modes = hamiltonian.eig()
    coeffs = modes.conj().T @ state.amplitudes
    out = modes @ (np.exp(-1j * energies * dt) * coeffs)
    return StateVector(out / np.linalg.norm(out))


def propagate_density(rho: DensityMatrix, hamiltonian: HermitianOperator, dt: float) -> DensityMatrix:
    """Conjugate a density matrix by the evolution operator: U rho U^dagger."""
    _check_dims(rho.dim, hamiltonian.dim)
    energies, modes = hamiltonian.eig()
    u = modes @ (np.exp(-1j * energies * dt)[:, None] * modes.conj().T)
    out = u @ rho.matrix @ u.conj().T
    out = 0.5 * (out + out.conj().T)  # kill Hermiticity drift
    return DensityMatrix(out / np.trace(out).real)


def von_neumann_entropy(rho: DensityMatrix) -> float:
    """-Tr(rho ln rho) in nats; zero for pure states."""
    eigs = rho.eigenvalues()
    eigs = np.where((eigs < 0) & (eigs > -NUMERICS.psd_clip), 0.0, eigs)
    eigs = eigs[eigs > NUMERICS.entropy_floor]
    return float(-np.sum(eigs * np.log(eigs)))


def expectation(rho: DensityMatrix, observable: HermitianOperator) -> float:
    """Tr(A rho); the imaginary residue must be numerical dust."""
    _check_dims(rho.dim, observable.dim)
    value = np.trace(observable.matrix @ rho.matrix)
    if abs(value.imag) > 1e-10:
        raise NumericFailure(f"expectation has imaginary residue {value.imag}")
    return float(value.real)


def born_probability(psi: StateVector, phi: StateVector) -> float:
    """|<phi|psi>|^2; symmetric in its arguments."""
    _check_dims(psi.dim, phi.dim)
    return float(abs(np.vdot(phi.amplitudes, psi.amplitudes)) ** 2)


def _basis_matrix(basis: Sequence[StateVector], dim: int) -> np.ndarray:
    if not basis:
        raise ValidationError("empty basis")
    for b in basis:
        _check_dims(b.dim, dim)
    cols = np.column_stack([b.amplitudes for b in basis])
    gram = cols.conj().T @ cols
    if np.max(np.abs(gram - np.eye(len(basis)))) > 1e-8:
        raise ValidationError("basis is not orthonormal")
    return cols


def collapse_probabilities(psi: StateVector, basis: Sequence[StateVector]) -> np.ndarray:
    """Born weights |<b_k|psi>|^2; must sum to 1 over the supplied basis."""
    cols = _basis_matrix(basis, psi.dim)
    probs = np.abs(cols.conj().T @ psi.amplitudes) ** 2
    if abs(probs.sum() - 1.0) > 1e-9:
        raise ValidationError(
            f"basis incomplete over the state support (probabilities sum to {probs.sum()})")
    return probs


def _inverse_cdf(probs: np.ndarray, draws: np.ndarray) -> np.ndarray:
    # ties at cumulative boundaries resolve to the lowest index with mass
    cum = np.cumsum(probs)
    cum[-1] = max(cum[-1], 1.0)
    return np.minimum(np.searchsorted(cum, draws, side="right"), probs.size - 1)


def collapse(psi: StateVector, basis: Sequence[StateVector],
             rng: np.random.Generator) -> tuple[int, StateVector]:
    """Irreversible Born-rule reduction onto one element of an orthonormal basis.

    A single uniform draw is mapped through the inverse CDF of the Born
    weights, so runs are reproducible given the generator state.
    """
    probs = collapse_probabilities(psi, basis)
    k = int(_inverse_cdf(probs, np.asarray(rng.random())))
    return k, basis[k]


def sample_collapse_indices(psi: StateVector, basis: Sequence[StateVector],
                            n: int, rng: np.random.Generator) -> np.ndarray:
    """Vectorized batch of ``collapse`` outcomes (same stream as n single calls)."""
    probs = collapse_probabilities(psi, basis)
    return _inverse_cdf(probs, rng.random(n))


def collapse_info_measure(psi: StateVector, phi: StateVector) -> float:
    """Information created (= destroyed) by a collapse psi -> phi: -2 ln|<phi|psi>|."""
    p = born_probability(psi, phi)
    if p <= NUMERICS.zero_overlap:
        raise ForbiddenTransitionError("zero-probability transition cannot occur")
    return max(0.0, -math.log(min(p, 1.0)))


def tensor_product(a: StateVector, b: StateVector) -> StateVector:
    return StateVector(np.kron(a.amplitudes, b.amplitudes))


def schmidt_rank(psi: StateVector, split: BipartiteLabel, tol: float = 1e-12) -> int:
    """Number of Schmidt coefficients above tol; 1 iff separable."""
    split.check(psi.dim)
    mat = psi.amplitudes.reshape(split.dim_a, split.dim_b)
    singular = np.linalg.svd(mat, compute_uv=False)
    return int(np.sum(singular > tol))


def dephase(rho: DensityMatrix, basis: Sequence[StateVector]) -> DensityMatrix:
    """Zero the interference terms of rho in the given complete orthonormal basis.

    Idempotent projection; never decreases the von Neumann entropy.
    """
    cols = _basis_matrix(basis, rho.dim)
    if len(basis) != rho.dim:
        raise ValidationError("dephasing needs a complete basis")
    diag = np.real(np.einsum("ij,jk,ki->i", cols.conj().T, rho.matrix, cols))
    diag = np.clip(diag, 0.0, None)
    out = (cols * diag) @ cols.conj().T
    out = 0.5 * (out + out.conj().T)
    return DensityMatrix(out / np.trace(out).real)


def basis_states(dim: int) -> list[StateVector]:
    return [StateVector(np.eye(dim, dtype=complex)[k]) for k in range(dim)]


def random_state(dim: int, rng: np.random.Generator) -> StateVector:
    vec = rng.normal(size=dim) + 1j * rng.normal(size=dim)
    return StateVector.normalized(vec)


def random_hermitian(dim: int, rng: np.random.Generator, scale: float = 1.0) -> HermitianOperator:
    raw = rng.normal(size=(dim, dim)) + 1j * rng.normal(size=(dim, dim))
    return HermitianOperator(scale * 0.5 * (raw + raw.conj().T))


def random_density(dim: int, rng: np.random.Generator) -> DensityMatrix:
    raw = rng.normal(size=(dim, dim)) + 1j * rng.normal(size=(dim, dim))
    rho = raw @ raw.conj().T
    return DensityMatrix(rho / np.trace(rho).real)
