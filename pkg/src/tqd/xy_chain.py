"""One-dimensional anisotropic XY chain with periodic boundaries.

    H0 = -sum_j (Jx s_j^x s_{j+1}^x + Jy s_j^y s_{j+1}^y - h s_j^z)

After a Jordan-Wigner transformation and a Fourier transform, each pair of
momenta ``(q, -q)`` with ``0 < q < π`` contributes a 2x2 block in the basis
``|0>, a_q^dag a_{-q}^dag |0>`` plus two singly occupied states.  In the
even fermion-parity sector (which holds the ground state) the momenta are
``q = (2k - 1) π / N``.
"""

from __future__ import annotations

import itertools
from functools import lru_cache

import numpy as np

from .errors import ArgumentError, DivergenceError
from .operators import MAX_SITE_DIM, embed_pauli, pauli
from .params import Couplings


def xy_momentum_grid(n_sites: int, periodic: bool = False) -> np.ndarray:
    """Positive momenta labelling the ``(q, -q)`` blocks.

    The default antiperiodic grid belongs to the even-parity sector.  With
    ``periodic=True`` the paired momenta ``2πk/N`` of the odd sector are
    returned; the unpaired modes ``q = 0, π`` are not included.
    """
    if n_sites < 2 or n_sites % 2:
        raise ArgumentError(f"n_sites must be even and >= 2, got {n_sites}")
    if periodic:
        return 2 * np.pi * np.arange(1, n_sites // 2) / n_sites
    return (2 * np.arange(1, n_sites // 2 + 1) - 1) * np.pi / n_sites


def xy_block(q: float, p: Couplings) -> np.ndarray:
    """2x2 block Hamiltonian of the ``(q, -q)`` pair in the even subspace."""
    if not 0 < q < np.pi:
        raise ArgumentError(f"q must lie in (0, π), got {q}")
    pair = 2j * (p.Jx - p.Jy) * np.sin(q)
    band = (p.Jx + p.Jy) * np.cos(q) - p.h
    return np.array([[-2 * p.h, pair], [np.conj(pair), -4 * band - 2 * p.h]], dtype=complex)


def xy_single_occupation_energy(q: float, p: Couplings) -> float:
    """Energy of either singly occupied state of the ``(q, -q)`` pair."""
    return -2 * (p.Jx + p.Jy) * np.cos(q)


def xy_j1_coupling(q: float, p: Couplings) -> float:
    """Momentum-resolved driver coupling ``J1(q, t)``.

    The driver of the ``(q, -q)`` block is ``(J1/2) sin q`` times ``σ^x`` in
    the block basis.
    """
    band = (p.Jx + p.Jy) * np.cos(q) - p.h
    dband = (p.dJx + p.dJy) * np.cos(q) - p.dh
    aniso = p.Jx - p.Jy
    denom = band**2 + aniso**2 * np.sin(q) ** 2
    if denom == 0.0:
        raise DivergenceError(f"block gap closes at q={q}", gap=0.0)
    return (band * (p.dJx - p.dJy) - aniso * dband) / denom


def xy_block_cd_term(q: float, p: Couplings) -> np.ndarray:
    """Closed-form driver of one momentum block."""
    return 0.5 * xy_j1_coupling(q, p) * np.sin(q) * pauli("x")


def xy_j1_lowlying(p: Couplings, rtol: float = 1e-8) -> float:
    """Small-momentum coupling ``J1(t)`` used by the local spin driver.

    Diverges at the critical line ``Jx + Jy = h``.
    """
    gap = p.Jx + p.Jy - p.h
    scale = max(1.0, abs(p.Jx) + abs(p.Jy) + abs(p.h))
    if abs(gap) < rtol * scale:
        raise DivergenceError(f"J1 diverges at Jx + Jy = h (|Jx + Jy - h| = {abs(gap):.3e})", gap=abs(gap))
    return (gap * (p.dJx - p.dJy) - (p.Jx - p.Jy) * (p.dJx + p.dJy - p.dh)) / gap**2


def _check_sites(n_sites: int) -> None:
    if n_sites < 2:
        raise ArgumentError("the chain needs at least two sites")
    if 2**n_sites > MAX_SITE_DIM:
        raise ArgumentError(f"2**{n_sites} exceeds the dense cap {MAX_SITE_DIM}")


@lru_cache(maxsize=16)
def _chain_terms(n_sites: int):
    _check_sites(n_sites)
    sx = [embed_pauli(j, "x", n_sites) for j in range(n_sites)]
    sy = [embed_pauli(j, "y", n_sites) for j in range(n_sites)]
    sz = [embed_pauli(j, "z", n_sites) for j in range(n_sites)]
    xx = sum(sx[j] @ sx[(j + 1) % n_sites] for j in range(n_sites))
    yy = sum(sy[j] @ sy[(j + 1) % n_sites] for j in range(n_sites))
    z = sum(sz)
    xy = sum(sx[j] @ sy[(j + 1) % n_sites] + sy[j] @ sx[(j + 1) % n_sites] for j in range(n_sites))
    for op in (xx, yy, z, xy):
        op.setflags(write=False)
    return xx, yy, z, xy


@lru_cache(maxsize=16)
def _sector_terms(n_sites: int, parity: str | None):
    terms = _chain_terms(n_sites)
    if parity is None:
        return terms
    pick = np.ix_(xy_parity_indices(n_sites, parity), xy_parity_indices(n_sites, parity))
    out = tuple(np.ascontiguousarray(op[pick]) for op in terms)
    for op in out:
        op.setflags(write=False)
    return out


def xy_hamiltonian(p: Couplings, n_sites: int, parity: str | None = None) -> np.ndarray:
    """Spin Hamiltonian with periodic closure.

    ``parity`` restricts it to the even or odd sector (product-basis
    indices from :func:`xy_parity_indices`); ``None`` keeps all ``2^N``
    states.
    """
    xx, yy, z, _ = _sector_terms(n_sites, parity)
    return -(p.Jx * xx + p.Jy * yy - p.h * z)


def xy_hamiltonian_derivative(p: Couplings, n_sites: int, parity: str | None = None) -> np.ndarray:
    return xy_hamiltonian(p.as_rates(), n_sites, parity)


def xy_lowlying_driver(p: Couplings, n_sites: int, parity: str | None = None) -> np.ndarray:
    """Local driver ``(J1(t)/8) sum_j (s_j^x s_{j+1}^y + s_j^y s_{j+1}^x)``."""
    _, _, _, xy = _sector_terms(n_sites, parity)
    return xy_j1_lowlying(p) / 8 * xy


def xy_parity_indices(n_sites: int, parity: str = "even") -> np.ndarray:
    """Product-basis indices with an even (odd) number of up spins.

    Basis bit 0 is spin up; the fermion number equals the number of up spins.
    """
    if parity not in ("even", "odd"):
        raise ArgumentError(f"parity must be 'even' or 'odd', got {parity!r}")
    idx = np.arange(2**n_sites)
    ups = n_sites - np.array([bin(i).count("1") for i in idx])
    want = 0 if parity == "even" else 1
    return idx[ups % 2 == want]


def xy_spectrum_from_blocks(p: Couplings, n_sites: int, parity: str = "even") -> np.ndarray:
    """Many-body spectrum of one parity sector assembled from momentum blocks.

    Each ``(q, -q)`` pair is either in one of its two block eigenstates
    (even) or singly occupied (odd, two states).  In the odd sector the
    unpaired modes ``q = 0`` and ``q = π`` are added.  Only combinations with
    the requested total parity are kept.
    """
    if parity == "even":
        qs = xy_momentum_grid(n_sites)
        unpaired = []
    elif parity == "odd":
        qs = xy_momentum_grid(n_sites, periodic=True)
        unpaired = [0.0, np.pi]
    else:
        raise ArgumentError(f"parity must be 'even' or 'odd', got {parity!r}")
    # per pair: (energy, fermion-number parity)
    pair_options = []
    for q in qs:
        evals = np.linalg.eigvalsh(xy_block(q, p))
        single = xy_single_occupation_energy(q, p)
        pair_options.append([(evals[0], 0), (evals[1], 0), (single, 1), (single, 1)])
    for q in unpaired:
        band = (p.Jx + p.Jy) * np.cos(q) - p.h
        pair_options.append([(-p.h, 0), (-2 * band - p.h, 1)])
    want = 0 if parity == "even" else 1
    levels = []
    for choice in itertools.product(*pair_options):
        if sum(par for _, par in choice) % 2 == want:
            levels.append(sum(e for e, _ in choice))
    return np.sort(np.array(levels))
