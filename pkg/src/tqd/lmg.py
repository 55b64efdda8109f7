"""Lipkin-Meshkov-Glick model in the maximum-spin sector.

    H0 = -(2 Jx / N) (S^x)^2 - (2 Jy / N) (S^y)^2 - 2 h S^z

Operators live in the ``N + 1`` dimensional ``S = N/2`` sector with basis
``m = S, S-1, ..., -S``.  Every term conserves the parity of ``S - m``, so
an optional ``sector`` argument (``"even"`` holds the ground state)
restricts all operators to one parity block.

Large-``N`` results (Bogoliubov angle, gap, driver coupling) come from the
Holstein-Primakoff expansion; :func:`hp_hamiltonian` and :func:`hp_cd_term`
expose that quadratic boson model so its closed-form driver can be checked
exactly.
"""

from __future__ import annotations

from functools import lru_cache
from typing import NamedTuple

import numpy as np
from scipy.linalg import expm

from .errors import ArgumentError, DivergenceError, SingularityError
from .operators import collective_spin
from .params import LmgParams


class SemiclassicalAngles(NamedTuple):
    theta: float
    phi: float


class LmgOperators(NamedTuple):
    xx: np.ndarray  # (S^x)^2
    yy: np.ndarray  # (S^y)^2
    z: np.ndarray  # S^z
    xy: np.ndarray  # S^x S^y + S^y S^x


def sector_indices(n_spins: int, sector: str | None) -> np.ndarray:
    """Basis indices of the parity sector (``None`` for the full space)."""
    full = np.arange(n_spins + 1)
    if sector is None:
        return full
    if sector == "even":
        return full[0::2]
    if sector == "odd":
        return full[1::2]
    raise ArgumentError(f"sector must be None, 'even' or 'odd', got {sector!r}")


@lru_cache(maxsize=64)
def lmg_operators(n_spins: int, sector: str | None = None) -> LmgOperators:
    """Quadratic collective operators, optionally restricted to a parity sector."""
    sx = collective_spin("x", n_spins)
    sy = collective_spin("y", n_spins)
    sz = collective_spin("z", n_spins)
    idx = sector_indices(n_spins, sector)
    pick = np.ix_(idx, idx)
    ops = LmgOperators((sx @ sx)[pick], (sy @ sy)[pick], sz[pick], (sx @ sy + sy @ sx)[pick])
    for op in ops:
        op.setflags(write=False)
    return ops


def lmg_hamiltonian(p: LmgParams, sector: str | None = None) -> np.ndarray:
    ops = lmg_operators(p.N, sector)
    return -(2 * p.Jx / p.N) * ops.xx - (2 * p.Jy / p.N) * ops.yy - 2 * p.h * ops.z


def lmg_hamiltonian_derivative(p: LmgParams, sector: str | None = None) -> np.ndarray:
    return lmg_hamiltonian(p.as_rates(), sector)


# ---------------------------------------------------------------------------
# semiclassics

def lmg_classical_energy(p: LmgParams, theta: float, phi: float) -> float:
    """Mean-field energy per spin for the orientation ``(theta, phi)``."""
    s2 = np.sin(theta) ** 2
    return -(p.Jx / 2) * s2 * np.cos(phi) ** 2 - (p.Jy / 2) * s2 * np.sin(phi) ** 2 - p.h * np.cos(theta)


def lmg_semiclassical_angles(p: LmgParams) -> SemiclassicalAngles:
    """Classical ground-state orientation.

    Ties on the phase boundary resolve to the symmetric branch; for
    ``Jx = Jy > h`` the azimuth is degenerate and ``phi = 0`` is returned.
    """
    if p.h >= max(p.Jx, p.Jy):
        return SemiclassicalAngles(0.0, 0.0)
    if p.Jx >= p.Jy:
        return SemiclassicalAngles(float(np.arccos(p.h / p.Jx)), 0.0)
    return SemiclassicalAngles(float(np.arccos(p.h / p.Jy)), np.pi / 2)


def lmg_semiclassical_energy(p: LmgParams) -> float:
    """Closed-form minimum of :func:`lmg_classical_energy`."""
    if p.h >= max(p.Jx, p.Jy):
        return -p.h
    j = max(p.Jx, p.Jy)
    return -(j**2 + p.h**2) / (2 * j)


def is_symmetric_phase(p: LmgParams) -> bool:
    return p.h >= max(p.Jx, p.Jy)


def lmg_bogoliubov(p: LmgParams) -> tuple[float, float]:
    """Bogoliubov angle ``Θ`` and oscillator gap ``Ω`` in the symmetric phase.

    ``tanh Θ = (Jx - Jy) / (2h - Jx - Jy)`` and
    ``Ω = 2 sqrt((h - Jx)(h - Jy))``.  On the transition line the gap is
    zero and ``Θ`` is returned as ``±inf``.
    """
    if not is_symmetric_phase(p):
        raise ArgumentError("broken-phase parameters: apply lmg_broken_phase_replacements first")
    num = p.Jx - p.Jy
    den = 2 * p.h - p.Jx - p.Jy
    omega = 2 * np.sqrt(max((p.h - p.Jx) * (p.h - p.Jy), 0.0))
    if den == 0.0:
        if num == 0.0:
            raise SingularityError("Bogoliubov angle undefined at Jx = Jy = h")
        return float(np.copysign(np.inf, num)), float(omega)
    ratio = num / den
    if abs(ratio) >= 1.0:
        return float(np.copysign(np.inf, ratio)), float(omega)
    return float(np.arctanh(ratio)), float(omega)


def lmg_h1_coupling(p: LmgParams) -> float:
    """Collective driver coupling ``h1``; it equals ``dΘ/dt``.

    ``h1 = [(h-Jx)(dh-dJy) - (h-Jy)(dh-dJx)] / (2 (h-Jx)(h-Jy))``
    """
    if not is_symmetric_phase(p):
        raise ArgumentError("broken-phase parameters: apply lmg_broken_phase_replacements first")
    a = p.h - p.Jx
    b = p.h - p.Jy
    if a * b == 0.0:
        raise DivergenceError("h1 diverges where the gap 2 sqrt((h-Jx)(h-Jy)) closes", gap=0.0)
    return (a * (p.dh - p.dJy) - b * (p.dh - p.dJx)) / (2 * a * b)


def lmg_h1_operator(p: LmgParams, sector: str | None = None) -> np.ndarray:
    """Collective ground-state driver ``(h1 / 2N)(S^x S^y + S^y S^x)``.

    This is the spin form of ``-(i h1 / 4)(b^2 - b^dag^2)``, the exact
    driver of the quadratic boson model; see :func:`hp_cd_term`.
    """
    ops = lmg_operators(p.N, sector)
    return lmg_h1_coupling(p) / (2 * p.N) * ops.xy


def lmg_broken_phase_replacements(p: LmgParams, variant: str = "derived") -> LmgParams:
    """Map broken-phase couplings onto effective symmetric-phase ones.

    Expanding about the tilted classical direction ``cos θ = h/J`` (with
    ``J = max(Jx, Jy)``) gives a quadratic boson model of the symmetric
    form with ``J -> h^2/J`` and ``h -> J``; the other coupling is
    unchanged.  ``variant="printed"`` uses ``h -> sqrt(J^2 - h^2) + h^2/J``
    instead, which agrees at ``h = 0`` and ``h = J`` but not in between
    (its gap does not match the finite-N spectrum).  Derivatives follow by
    the chain rule.  The ``Jy > Jx`` branch exchanges ``x`` and ``y``.
    """
    if variant not in ("derived", "printed"):
        raise ArgumentError(f"variant must be 'derived' or 'printed', got {variant!r}")
    if is_symmetric_phase(p):
        raise ArgumentError("parameters are in the symmetric phase; no replacement needed")
    if p.Jx >= p.Jy:
        j, dj = p.Jx, p.dJx
    else:
        j, dj = p.Jy, p.dJy
    h, dh = p.h, p.dh
    j_new = h * h / j
    dj_new = 2 * h * dh / j - h * h * dj / (j * j)
    if variant == "derived":
        h_new, dh_new = j, dj
    else:
        root = np.sqrt(j * j - h * h)
        h_new = root + j_new
        dh_new = (j * dj - h * dh) / root + dj_new
    if p.Jx >= p.Jy:
        return LmgParams(p.N, j_new, p.Jy, h_new, dj_new, p.dJy, dh_new)
    return LmgParams(p.N, p.Jx, j_new, h_new, p.dJx, dj_new, dh_new)


def lmg_ground_energy_estimate(p: LmgParams) -> float:
    """Leading-order ground energy ``E0``: ``-N h`` or ``-N (J^2 + h^2)/(2J)``."""
    return p.N * lmg_semiclassical_energy(p)


def lmg_rotation(n_spins: int, theta: float, phi: float) -> np.ndarray:
    """``exp(-i θ S·n0)`` with ``n0 = (-sin φ, cos φ, 0)``; for validation only."""
    if n_spins > 40:
        raise ArgumentError("explicit rotations are only built for N <= 40")
    gen = -np.sin(phi) * collective_spin("x", n_spins) + np.cos(phi) * collective_spin("y", n_spins)
    return expm(-1j * theta * gen)


# ---------------------------------------------------------------------------
# commutator structure of the fixed-point condition

@lru_cache(maxsize=32)
def lmg_xy_hat_operators(n_spins: int) -> tuple[np.ndarray, np.ndarray]:
    """Time-independent operators ``X``, ``Y`` spanning ``[H0, dH0/dt]``.

    ``X = (4/N^2)(i C S^z + (S^x)^2 - (S^y)^2)`` and ``Y = (2i/N) C`` with
    ``C = S^x S^y + S^y S^x``.  Both are anti-Hermitian, as the commutator
    of two Hermitian operators must be.
    """
    ops = lmg_operators(n_spins)
    n = n_spins
    x_hat = (4 / n**2) * (1j * ops.xy @ ops.z + ops.xx - ops.yy)
    y_hat = (2j / n) * ops.xy
    x_hat.setflags(write=False)
    y_hat.setflags(write=False)
    return x_hat, y_hat


def lmg_commutator_decomposition(p: LmgParams) -> np.ndarray:
    """``2(Jx dJy - Jy dJx) X - 2((Jx - Jy) dh - (dJx - dJy) h) Y``."""
    x_hat, y_hat = lmg_xy_hat_operators(p.N)
    cx = 2 * (p.Jx * p.dJy - p.Jy * p.dJx)
    cy = -2 * ((p.Jx - p.Jy) * p.dh - (p.dJx - p.dJy) * p.h)
    return cx * x_hat + cy * y_hat


# ---------------------------------------------------------------------------
# Holstein-Primakoff boson model

@lru_cache(maxsize=8)
def _boson(cutoff: int) -> np.ndarray:
    b = np.diag(np.sqrt(np.arange(1, cutoff)), 1).astype(complex)
    b.setflags(write=False)
    return b


def hp_hamiltonian(p: LmgParams, cutoff: int = 120) -> np.ndarray:
    """Quadratic boson Hamiltonian (constant dropped) in a truncated Fock space.

    ``-(Jx/2)(b + b^dag)^2 + (Jy/2)(b - b^dag)^2 + 2h b^dag b``
    """
    b = _boson(cutoff)
    bd = b.conj().T
    return -(p.Jx / 2) * (b + bd) @ (b + bd) + (p.Jy / 2) * (b - bd) @ (b - bd) + 2 * p.h * bd @ b


def hp_hamiltonian_derivative(p: LmgParams, cutoff: int = 120) -> np.ndarray:
    return hp_hamiltonian(p.as_rates(), cutoff)


def hp_cd_term(p: LmgParams, cutoff: int = 120) -> np.ndarray:
    """Closed-form boson driver ``-(i h1/4)(b^2 - b^dag^2)``."""
    b = _boson(cutoff)
    bd = b.conj().T
    return -0.25j * lmg_h1_coupling(p) * (b @ b - bd @ bd)
