"""Generic construction of counterdiabatic (transitionless) driving terms.

Two independent routes are provided for the driver ``H1(t)``:

* :func:`cd_term_spectral` differentiates gauge-aligned eigenvectors by a
  central finite difference and assembles ``sum_m (1 - |m><m|) i|dm/dt><m|``;
* :func:`cd_term_matrix_elements` uses only ``H0`` and ``dH0/dt`` at a single
  time, ``i sum_{l != m} |l><l|dH0|m>/(E_m - E_l) <m|``.

They agree to finite-difference accuracy and serve as oracles for each other.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass
from typing import Callable

import numpy as np

from .errors import (
    ArgumentError,
    DegeneracyError,
    DivergenceError,
    LevelCrossingError,
    TrackingLossError,
)
from .operators import (
    SpectralFrame,
    check_hermitian,
    commutator,
    degeneracy_tolerance,
    degenerate_blocks,
    eigh_sorted,
)

logger = logging.getLogger(__name__)

TRACKING_MIN_OVERLAP = 0.1
GAP_FLOOR_RTOL = 1e-8
COUPLING_ATOL = 1e-10


@dataclass(frozen=True)
class HamiltonianFunction:
    """A time-dependent Hamiltonian ``H0(t)`` with its time derivative.

    ``derivative_fn`` should be supplied whenever the model knows ``dH0/dt``
    analytically; otherwise a symmetric finite difference with step
    ``fd_step`` is used.
    """

    dim: int
    evaluate: Callable[[float], np.ndarray]
    derivative_fn: Callable[[float], np.ndarray] | None = None
    fd_step: float = 1e-5

    def __call__(self, t: float) -> np.ndarray:
        return self.evaluate(t)

    def derivative(self, t: float) -> np.ndarray:
        if self.derivative_fn is not None:
            return self.derivative_fn(t)
        dt = self.fd_step
        return (self.evaluate(t + dt) - self.evaluate(t - dt)) / (2 * dt)

    def frame(self, t: float) -> SpectralFrame:
        return eigh_sorted(self.evaluate(t), time=t)


def _degeneracy_tol(frame: SpectralFrame) -> float:
    scale = float(np.max(np.abs(frame.eigenvalues))) if frame.dim else 0.0
    return degeneracy_tolerance(scale)


def gauge_align(prev: SpectralFrame, current: SpectralFrame, levels=None) -> SpectralFrame:
    """Re-phase ``current`` eigenvectors to be smooth continuations of ``prev``.

    Nondegenerate vectors get the unit phase making ``<prev_k|cur_k>`` real
    positive.  Degenerate blocks of ``current`` are rotated by the unitary
    (Procrustes) factor that best maps them onto the matching ``prev``
    columns.  If ``levels`` is given, only the blocks containing those
    indices are checked and aligned; the other columns are left untouched.

    Raises
    ------
    TrackingLossError
        If some overlap (or block singular value) falls below 0.1.
    LevelCrossingError
        If a vector overlaps more strongly with a different level of
        ``prev`` than with its own index.
    """
    if prev.dim != current.dim:
        raise ArgumentError(f"frame dimensions differ: {prev.dim} vs {current.dim}")
    overlap = prev.eigenvectors.conj().T @ current.eigenvectors
    aligned = current.eigenvectors.copy()
    wanted = None if levels is None else set(np.atleast_1d(levels).tolist())
    for block in degenerate_blocks(current.eigenvalues, _degeneracy_tol(current)):
        if wanted is not None and wanted.isdisjoint(block.tolist()):
            continue
        sub = overlap[np.ix_(block, block)]
        if len(block) == 1:
            k = block[0]
            ov = sub[0, 0]
            mag = abs(ov)
            column = np.abs(overlap[:, k])
            rival = int(np.argmax(column))
            if rival != k and column[rival] > mag:
                raise LevelCrossingError(
                    f"level {k} overlaps level {rival} of the previous frame more strongly "
                    f"({column[rival]:.3f} > {mag:.3f}) between t={prev.time} and t={current.time}"
                )
            if mag < TRACKING_MIN_OVERLAP:
                raise TrackingLossError(
                    f"overlap {mag:.3e} for level {k} between t={prev.time} and t={current.time}"
                )
            aligned[:, k] *= np.conj(ov) / mag
        else:
            u, s, wh = np.linalg.svd(sub)
            if s.min() < TRACKING_MIN_OVERLAP:
                raise TrackingLossError(
                    f"degenerate block {list(block)} lost between t={prev.time} and t={current.time}"
                )
            rotation = wh.conj().T @ u.conj().T
            aligned[:, block] = current.eigenvectors[:, block] @ rotation
    return current.with_vectors(aligned)


def _stencil(h: HamiltonianFunction, t: float, dt: float):
    if dt <= 0:
        raise ArgumentError("dt must be positive")
    center = h.frame(t)
    minus = gauge_align(center, h.frame(t - dt))
    plus = gauge_align(center, h.frame(t + dt))
    return minus, center, plus


def _assemble_from_derivative(center: SpectralFrame, vdot: np.ndarray, blocks) -> np.ndarray:
    v = center.eigenvectors
    x = vdot.copy()
    for block in blocks:
        vb = v[:, block]
        x[:, block] -= vb @ (vb.conj().T @ x[:, block])
    h1 = 1j * x @ v.conj().T
    return (h1 + h1.conj().T) / 2


def cd_term_spectral(h: HamiltonianFunction, t: float, dt: float = 1e-5) -> np.ndarray:
    """Driver from eigenvector derivatives, ``sum_m (1-|m><m|) i|dm/dt><m|``.

    The spectrum must be nondegenerate at ``t``; use
    :func:`cd_term_degenerate` otherwise.
    """
    minus, center, plus = _stencil(h, t, dt)
    blocks = degenerate_blocks(center.eigenvalues, _degeneracy_tol(center))
    if any(len(b) > 1 for b in blocks):
        sizes = [len(b) for b in blocks if len(b) > 1]
        raise DegeneracyError(f"degenerate levels (block sizes {sizes}) at t={t}")
    vdot = (plus.eigenvectors - minus.eigenvectors) / (2 * dt)
    return _assemble_from_derivative(center, vdot, blocks)


def cd_term_degenerate(h: HamiltonianFunction, t: float, dt: float = 1e-5) -> np.ndarray:
    """Driver for spectra with persistent degeneracies.

    Each degenerate level ``n`` contributes
    ``(1 - sum_nu |n,nu><n,nu|) i d/dt|n,mu><n,mu|``; the in-block gauge is
    transported by Procrustes alignment across the stencil.
    """
    minus, center, plus = _stencil(h, t, dt)
    pattern = [len(b) for b in degenerate_blocks(center.eigenvalues, _degeneracy_tol(center))]
    for side in (minus, plus):
        other = [len(b) for b in degenerate_blocks(side.eigenvalues, _degeneracy_tol(side))]
        if other != pattern:
            raise LevelCrossingError(
                f"degeneracy pattern changes across [{t - dt}, {t + dt}]: {pattern} vs {other}"
            )
    blocks = degenerate_blocks(center.eigenvalues, _degeneracy_tol(center))
    vdot = (plus.eigenvectors - minus.eigenvectors) / (2 * dt)
    return _assemble_from_derivative(center, vdot, blocks)


def _eigenbasis_couplings(h0, dh0, frame: SpectralFrame | None):
    h0 = check_hermitian(h0, atol=max(1e-12, 1e-12 * np.linalg.norm(h0)), name="H0")
    dh0 = np.asarray(dh0, dtype=complex)
    if dh0.shape != h0.shape:
        raise ArgumentError(f"H0 and dH0 shapes differ: {h0.shape} vs {dh0.shape}")
    if frame is None:
        frame = eigh_sorted(h0)
    evals = frame.eigenvalues
    vecs = frame.eigenvectors
    m = vecs.conj().T @ dh0 @ vecs
    # inside an exactly degenerate cluster pick the basis diagonalising dH0
    # so that in-cluster couplings vanish (degenerate perturbation theory)
    blocks = degenerate_blocks(evals, degeneracy_tolerance(_spectral_norm(evals)))
    if any(len(b) > 1 for b in blocks):
        vecs = vecs.copy()
        for block in blocks:
            if len(block) > 1:
                sub = m[np.ix_(block, block)]
                _, rot = np.linalg.eigh((sub + sub.conj().T) / 2)
                vecs[:, block] = vecs[:, block] @ rot
        m = vecs.conj().T @ dh0 @ vecs
    return h0, dh0, evals, vecs, m


def _spectral_norm(evals: np.ndarray) -> float:
    # for a Hermitian matrix the spectral norm is the largest |eigenvalue|
    return float(np.max(np.abs(evals))) if evals.size else 0.0


def _gap_floor(evals: np.ndarray, gap_floor: float | None) -> float:
    if gap_floor is not None:
        return gap_floor
    return GAP_FLOOR_RTOL * max(1.0, _spectral_norm(evals))


def _coupling_tol(dh0: np.ndarray) -> float:
    # Frobenius norm: a cheap upper bound on the spectral norm
    return COUPLING_ATOL * max(1.0, float(np.linalg.norm(dh0)))


def cd_term_matrix_elements(
    h0: np.ndarray,
    dh0: np.ndarray,
    gap_floor: float | None = None,
    frame: SpectralFrame | None = None,
) -> np.ndarray:
    """Driver from matrix elements of ``dH0/dt`` in the instantaneous eigenbasis.

    Parameters
    ----------
    h0, dh0:
        ``H0(t)`` and ``dH0/dt`` at the same time.
    gap_floor:
        Pairs closer than this in energy are treated as degenerate; the
        default is ``1e-8 * max(1, ||H0||)``.
    frame:
        Optional precomputed eigendecomposition of ``h0`` (any phases).

    Raises
    ------
    DivergenceError
        When a pair below the gap floor is coupled by ``dH0/dt``.
    """
    h0, dh0, evals, vecs, m = _eigenbasis_couplings(h0, dh0, frame)
    gaps = evals[None, :] - evals[:, None]  # [l, m] -> E_m - E_l
    floor = _gap_floor(evals, gap_floor)
    small = np.abs(gaps) < floor
    np.fill_diagonal(small, False)
    if np.any(small):
        coupled = small & (np.abs(m) > _coupling_tol(dh0))
        if np.any(coupled):
            weight = np.where(coupled, np.abs(m), -1.0)
            l, k = np.unravel_index(np.argmax(weight), weight.shape)
            raise DivergenceError(
                f"levels {l} and {k} are coupled (|<l|dH0|m>| = {abs(m[l, k]):.3e}) "
                f"across a gap {abs(gaps[l, k]):.3e} below the floor {floor:.3e}",
                pair=(int(l), int(k)),
                gap=float(abs(gaps[l, k])),
            )
    safe = np.where(small, 1.0, gaps)
    np.fill_diagonal(safe, 1.0)
    h1_eig = np.where(small, 0.0, 1j * m / safe)
    np.fill_diagonal(h1_eig, 0.0)
    h1 = vecs @ h1_eig @ vecs.conj().T
    return (h1 + h1.conj().T) / 2


def _check_level(evals: np.ndarray, n: int, tol: float) -> None:
    if not 0 <= n < len(evals):
        raise ArgumentError(f"level index {n} out of range for dimension {len(evals)}")
    others = np.delete(evals, n)
    if others.size and np.min(np.abs(others - evals[n])) < tol:
        raise DegeneracyError(f"level {n} is degenerate")


def cd_term_for_state(
    h0: np.ndarray,
    dh0: np.ndarray,
    n: int,
    gap_floor: float | None = None,
    frame: SpectralFrame | None = None,
) -> np.ndarray:
    """State-specific driver ``(1 - |n><n|) i|dn/dt><n| + h.c.``.

    Acting on ``|n>`` it reproduces the full driver; on the orthogonal
    complement it differs.
    """
    h0, dh0, evals, vecs, m = _eigenbasis_couplings(h0, dh0, frame)
    _check_level(evals, n, degeneracy_tolerance(_spectral_norm(evals)))
    floor = _gap_floor(evals, gap_floor)
    gaps = evals[n] - evals  # E_n - E_l
    coeff = np.zeros(len(evals), dtype=complex)
    for l in range(len(evals)):
        if l == n:
            continue
        if abs(gaps[l]) < floor:
            if abs(m[l, n]) > _coupling_tol(dh0):
                raise DivergenceError(
                    f"level {n} coupled to level {l} across gap {abs(gaps[l]):.3e}",
                    pair=(l, n),
                    gap=float(abs(gaps[l])),
                )
            continue
        coeff[l] = 1j * m[l, n] / gaps[l]
    chi = vecs @ coeff
    vn = vecs[:, n]
    return np.outer(chi, vn.conj()) + np.outer(vn, chi.conj())


def adiabaticity_metric(
    h0: np.ndarray, dh0: np.ndarray, n: int, frame: SpectralFrame | None = None
) -> float:
    """``max_{m != n} |<m|dH0|n>| / (E_m - E_n)^2``.

    Returns ``inf`` (and logs the offending level) when a gap is zero or
    when ``dH0`` is not finite.
    """
    dh0 = np.asarray(dh0, dtype=complex)
    if not np.all(np.isfinite(dh0)):
        logger.debug("adiabaticity metric: non-finite dH0")
        return float("inf")
    h0, dh0, evals, vecs, m = _eigenbasis_couplings(h0, dh0, frame)
    if not 0 <= n < len(evals):
        raise ArgumentError(f"level index {n} out of range for dimension {len(evals)}")
    tol = degeneracy_tolerance(_spectral_norm(evals))
    best = 0.0
    for k in range(len(evals)):
        if k == n:
            continue
        gap = evals[k] - evals[n]
        if abs(gap) < tol:
            logger.debug("adiabaticity metric: zero gap between levels %d and %d", n, k)
            return float("inf")
        best = max(best, abs(m[k, n]) / gap**2)
    return float(best)


def fixed_point_residual(h0: np.ndarray, dh0: np.ndarray) -> float:
    """Frobenius norm of ``[H0, dH0/dt]``; zero exactly at a fixed point."""
    return float(np.linalg.norm(commutator(np.asarray(h0), np.asarray(dh0))))


def min_gap(frame: SpectralFrame, n: int = 0) -> float:
    """Smallest ``|E_m - E_n|`` over ``m != n``."""
    if frame.dim < 2:
        raise ArgumentError("min_gap needs at least two levels")
    if not 0 <= n < frame.dim:
        raise ArgumentError(f"level index {n} out of range")
    others = np.delete(frame.eigenvalues, n)
    return float(np.min(np.abs(others - frame.eigenvalues[n])))
