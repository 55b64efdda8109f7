"""Dense Hermitian operator algebra.

Operators are plain complex ``numpy`` arrays.  This module provides the
Pauli embeddings used by the spin-chain models, the collective spin
operators of the maximum-spin sector, and a deterministic sorted
eigendecomposition (:func:`eigh_sorted`) that every other module builds on.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable

import numpy as np

from .errors import ArgumentError, CapacityError, NumericError

MAX_SITE_DIM = 2**14
MAX_COLLECTIVE_DIM = 2**16
HERMITIAN_ATOL = 1e-12
DEGENERACY_RTOL = 1e-9

_PAULI = {
    "x": np.array([[0, 1], [1, 0]], dtype=complex),
    "y": np.array([[0, -1j], [1j, 0]], dtype=complex),
    "z": np.array([[1, 0], [0, -1]], dtype=complex),
}

Eigensolver = Callable[[np.ndarray], tuple]


def pauli(axis: str) -> np.ndarray:
    """Return a copy of the Pauli matrix for ``axis`` in ``{'x', 'y', 'z'}``."""
    try:
        return _PAULI[axis].copy()
    except KeyError:
        raise ArgumentError(f"unknown Pauli axis {axis!r}") from None


def identity(dim: int) -> np.ndarray:
    return np.eye(dim, dtype=complex)


def is_hermitian(a: np.ndarray, atol: float = HERMITIAN_ATOL) -> bool:
    a = np.asarray(a)
    return a.ndim == 2 and a.shape[0] == a.shape[1] and bool(np.all(np.abs(a - a.conj().T) <= atol))


def check_hermitian(a: np.ndarray, atol: float = HERMITIAN_ATOL, name: str = "operator") -> np.ndarray:
    """Validate ``a`` as a finite Hermitian matrix and return it as complex."""
    a = np.asarray(a, dtype=complex)
    if a.ndim != 2 or a.shape[0] != a.shape[1] or a.shape[0] < 1:
        raise ArgumentError(f"{name} must be a non-empty square matrix, got shape {a.shape}")
    if not np.all(np.isfinite(a)):
        raise ArgumentError(f"{name} has non-finite entries")
    dev = np.max(np.abs(a - a.conj().T))
    if dev > atol:
        raise ArgumentError(f"{name} is not Hermitian (max |H - H^dag| = {dev:.3e})")
    return a


def kron(a: np.ndarray, b: np.ndarray, max_dim: int = MAX_SITE_DIM) -> np.ndarray:
    """Tensor product ``a ⊗ b`` with a guard on the resulting dimension."""
    a = np.asarray(a, dtype=complex)
    b = np.asarray(b, dtype=complex)
    dim = a.shape[0] * b.shape[0]
    if dim > max_dim:
        raise CapacityError(f"tensor product dimension {dim} exceeds cap {max_dim}")
    return np.kron(a, b)


def embed_pauli(site: int, axis: str, n_sites: int) -> np.ndarray:
    """``I ⊗ ... ⊗ σ^axis ⊗ ... ⊗ I`` with the Pauli matrix at position ``site``.

    Site 0 is the leftmost (most significant) tensor factor.
    """
    if n_sites < 1:
        raise ArgumentError("n_sites must be >= 1")
    if not 0 <= site < n_sites:
        raise ArgumentError(f"site {site} out of range for {n_sites} sites")
    if 2**n_sites > MAX_SITE_DIM:
        raise CapacityError(f"2**{n_sites} exceeds cap {MAX_SITE_DIM}")
    sigma = pauli(axis)
    # diagonal/off-diagonal structure is cheap to build with two identities
    left = np.eye(2**site, dtype=complex)
    right = np.eye(2 ** (n_sites - site - 1), dtype=complex)
    return np.kron(np.kron(left, sigma), right)


def collective_spin(axis: str, n_spins: int) -> np.ndarray:
    """Total-spin operator ``S^axis`` in the maximum-spin sector ``S = N/2``.

    The basis is ``|S, m>`` ordered ``m = S, S-1, ..., -S``, so ``S^z`` is
    diagonal with descending entries.
    """
    if n_spins < 1:
        raise ArgumentError("n_spins must be >= 1")
    dim = n_spins + 1
    if dim > MAX_COLLECTIVE_DIM:
        raise CapacityError(f"collective sector dimension {dim} exceeds cap {MAX_COLLECTIVE_DIM}")
    s = n_spins / 2
    m = s - np.arange(dim)
    if axis == "z":
        return np.diag(m).astype(complex)
    # <m+1|S^+|m> = sqrt(S(S+1) - m(m+1)); row k-1 holds m[k-1] = m[k] + 1
    raise_elems = np.sqrt(s * (s + 1) - m[1:] * (m[1:] + 1))
    splus = np.diag(raise_elems, 1).astype(complex)
    if axis == "x":
        return (splus + splus.T) / 2
    if axis == "y":
        return (splus - splus.T) / 2j
    raise ArgumentError(f"unknown spin axis {axis!r}")


def commutator(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    a = np.asarray(a)
    b = np.asarray(b)
    if a.shape != b.shape:
        raise ArgumentError(f"dimension mismatch: {a.shape} vs {b.shape}")
    return a @ b - b @ a


def operator_norm(a: np.ndarray) -> float:
    """Spectral norm, used as the energy scale for relative tolerances."""
    a = np.asarray(a)
    if a.size == 0:
        return 0.0
    return float(np.linalg.norm(a, 2))


@dataclass(frozen=True)
class SpectralFrame:
    """Sorted eigenvalues and eigenvectors (columns) of ``H0`` at one time."""

    eigenvalues: np.ndarray
    eigenvectors: np.ndarray
    time: float = 0.0

    @property
    def dim(self) -> int:
        return self.eigenvalues.shape[0]

    def vector(self, k: int) -> np.ndarray:
        return self.eigenvectors[:, k]

    def with_vectors(self, vectors: np.ndarray) -> "SpectralFrame":
        return SpectralFrame(self.eigenvalues, vectors, self.time)


def _fix_phases(vectors: np.ndarray) -> np.ndarray:
    # rotate each column so its largest-magnitude component is real positive
    idx = np.argmax(np.abs(vectors), axis=0)
    pivots = vectors[idx, np.arange(vectors.shape[1])]
    return vectors * (np.abs(pivots) / pivots)[None, :]


def eigh_sorted(h: np.ndarray, time: float = 0.0, solver: Eigensolver | None = None) -> SpectralFrame:
    """Ascending eigendecomposition with a deterministic per-vector phase.

    Parameters
    ----------
    h:
        Hermitian matrix.
    time:
        Time stamp stored on the returned frame.
    solver:
        Optional replacement for :func:`numpy.linalg.eigh`; must return
        ``(eigenvalues, eigenvectors)``.
    """
    h = check_hermitian(h, atol=max(HERMITIAN_ATOL, 1e-12 * float(np.linalg.norm(h))))
    solve = solver or np.linalg.eigh
    try:
        evals, evecs = solve(h)
    except np.linalg.LinAlgError as exc:
        raise NumericError(f"eigensolver failed to converge (cond = {np.linalg.cond(h):.3e}): {exc}") from exc
    order = np.argsort(evals, kind="stable")
    evals = np.asarray(evals, dtype=float)[order]
    evecs = _fix_phases(np.asarray(evecs, dtype=complex)[:, order])
    return SpectralFrame(evals, evecs, float(time))


def degeneracy_tolerance(h_norm: float) -> float:
    return DEGENERACY_RTOL * max(1.0, h_norm)


def degenerate_blocks(eigenvalues: np.ndarray, tol: float) -> list[np.ndarray]:
    """Group sorted eigenvalues into clusters whose neighbours differ by < ``tol``."""
    blocks = []
    start = 0
    for k in range(1, len(eigenvalues) + 1):
        if k == len(eigenvalues) or eigenvalues[k] - eigenvalues[k - 1] >= tol:
            blocks.append(np.arange(start, k))
            start = k
    return blocks
