"""Closed-form two-level and two-spin models.

These serve as exact oracles for the generic engine in :mod:`tqd.engine`.
The two-spin Hamiltonian is

    H0 = Jx s1x s2x + Jy s1y s2y + h (s1z + s2z),

which splits into two 2x2 blocks in the basis ``|++>, |-->, |+->, |-+>``.
"""

from __future__ import annotations

from typing import Callable

import numpy as np

from .errors import ArgumentError, SingularityError
from .operators import embed_pauli, pauli
from .params import Couplings, ParamTriple, as_field

#: product-basis indices of |++>, |-->, |+->, |-+> (σz = +1 is basis state 0)
BLOCK_ORDER = np.array([0, 3, 1, 2])


# ---------------------------------------------------------------------------
# two-level system

def tls_hamiltonian(field) -> np.ndarray:
    """``h · σ`` for a 3-vector field ``h``."""
    hx, hy, hz = as_field(field)
    return hx * pauli("x") + hy * pauli("y") + hz * pauli("z")


def tls_cd_field(field, rate) -> np.ndarray:
    """Extra field ``h × dh/dt / (2|h|^2)`` that suppresses transitions."""
    f = as_field(field)
    df = as_field(rate)
    norm2 = float(f @ f)
    if norm2 == 0.0:
        raise SingularityError("field vanishes: the two levels cross")
    return np.cross(f, df) / (2 * norm2)


def tls_cd_term(field, rate) -> np.ndarray:
    return tls_hamiltonian(tls_cd_field(field, rate))


def oscillating_field(h0: float, h3: float, omega: float, t: float) -> np.ndarray:
    """Field rotating about z: ``(h0 cos wt, h0 sin wt, h3)``."""
    return np.array([h0 * np.cos(omega * t), h0 * np.sin(omega * t), h3])


def oscillating_field_rate(h0: float, h3: float, omega: float, t: float) -> np.ndarray:
    return np.array([-h0 * omega * np.sin(omega * t), h0 * omega * np.cos(omega * t), 0.0])


def driven_oscillating_amplitudes(h0: float, h3: float, omega: float) -> tuple[float, float]:
    """In-plane and axial amplitudes of the total (bare + driver) field.

    The total field keeps the rotating form
    ``(a cos wt, a sin wt, b)`` with the returned ``(a, b)``.
    """
    r2 = h0**2 + h3**2
    if r2 == 0.0:
        raise SingularityError("field vanishes")
    return h0 * (1 - omega * h3 / (2 * r2)), h3 + omega * h0**2 / (2 * r2)


def tls_static_driver_check(h0: float, h3: float, omega: float, rtol: float = 1e-9):
    """Return the static total field ``(0, 0, w/2)`` when it exists, else ``None``.

    The driven field of the rotating example loses its in-plane part when
    ``2 (h0^2 + h3^2) = w h3``.
    """
    lhs = 2 * (h0**2 + h3**2)
    rhs = omega * h3
    if lhs == 0.0:
        return None
    if abs(lhs - rhs) <= rtol * max(abs(lhs), abs(rhs)):
        return np.array([0.0, 0.0, omega / 2])
    return None


# ---------------------------------------------------------------------------
# two-spin system

def _reorder(op: np.ndarray, order: str) -> np.ndarray:
    if order == "product":
        return op
    if order == "block":
        return op[np.ix_(BLOCK_ORDER, BLOCK_ORDER)]
    raise ArgumentError(f"unknown basis order {order!r}")


def _two_spin_terms():
    xx = embed_pauli(0, "x", 2) @ embed_pauli(1, "x", 2)
    yy = embed_pauli(0, "y", 2) @ embed_pauli(1, "y", 2)
    zz = embed_pauli(0, "z", 2) + embed_pauli(1, "z", 2)
    xy = embed_pauli(0, "x", 2) @ embed_pauli(1, "y", 2) + embed_pauli(0, "y", 2) @ embed_pauli(1, "x", 2)
    return xx, yy, zz, xy


_XX, _YY, _ZSUM, _XY = _two_spin_terms()


def two_spin_hamiltonian(p: Couplings | ParamTriple, order: str = "block") -> np.ndarray:
    """Two-spin XY Hamiltonian.

    ``order="block"`` (default) uses ``|++>, |-->, |+->, |-+>`` so that the
    matrix is block diagonal; ``order="product"`` uses the tensor-product
    ordering ``|++>, |+->, |-+>, |-->``.
    """
    op = p.Jx * _XX + p.Jy * _YY + p.h * _ZSUM
    return _reorder(op, order)


def two_spin_cd_coefficient(p: Couplings) -> float:
    """Coefficient of ``s1x s2y + s1y s2x`` in the two-spin driver."""
    dj = p.Jx - p.Jy
    denom = 4 * p.h**2 + dj**2
    if denom == 0.0:
        raise SingularityError("h = 0 and Jx = Jy: first block is degenerate")
    return 0.5 * (p.h * (p.dJx - p.dJy) - p.dh * dj) / denom


def two_spin_cd_term(p: Couplings, order: str = "block") -> np.ndarray:
    return _reorder(two_spin_cd_coefficient(p) * _XY, order)


def two_spin_xy_operator(order: str = "block") -> np.ndarray:
    """``s1x s2y + s1y s2x``."""
    return _reorder(_XY.copy(), order)


def z_rotation(theta: float, order: str = "block") -> np.ndarray:
    """``exp(-i theta/2 (s1z + s2z))`` (diagonal)."""
    diag = np.exp(-0.5j * theta * np.real(np.diag(_ZSUM)))
    return _reorder(np.diag(diag), order)


def two_spin_rotating_frame(p: Couplings, theta: float, dtheta: float) -> ParamTriple:
    """Couplings of the rotated driven Hamiltonian.

    Rotating ``H0 + H1`` about z by ``theta`` and adding the frame term
    ``(dtheta/2)(s1z + s2z)`` gives an XY Hamiltonian with couplings
    fixed by ``Jx~ + Jy~ = Jx + Jy``, ``(Jx~ - Jy~) cos 2θ = Jx - Jy`` and
    ``h~ = h + dtheta/2``.
    """
    c2 = np.cos(2 * theta)
    if abs(c2) < 1e-14:
        raise SingularityError("cos 2θ = 0: rotating frame is singular")
    total = p.Jx + p.Jy
    diff = (p.Jx - p.Jy) / c2
    return ParamTriple((total + diff) / 2, (total - diff) / 2, p.h + dtheta / 2)


def rotating_frame_tan2theta(p: Couplings) -> float:
    dj = p.Jx - p.Jy
    if dj == 0.0:
        raise SingularityError("Jx = Jy: rotating-frame angle undefined")
    denom = 4 * p.h**2 + dj**2
    return (p.dh * dj - p.h * (p.dJx - p.dJy)) / (dj * denom)


def rotating_frame_angle(p: Couplings) -> float:
    """Principal-branch angle ``atan(tan 2θ) / 2`` in ``(-π/4, π/4)``."""
    return 0.5 * np.arctan(rotating_frame_tan2theta(p))


def rotating_frame_path(couplings_at: Callable[[float], Couplings], step: float = 1e-5):
    """Return ``t -> (theta, dtheta)`` along a coupling path.

    ``dtheta`` is the derivative of the principal branch, obtained from a
    central difference of ``tan 2θ`` (schedules only carry first
    derivatives of the couplings).
    """

    def angle(t: float) -> tuple[float, float]:
        r = rotating_frame_tan2theta(couplings_at(t))
        dr = (rotating_frame_tan2theta(couplings_at(t + step)) - rotating_frame_tan2theta(couplings_at(t - step))) / (2 * step)
        return 0.5 * np.arctan(r), 0.5 * dr / (1 + r * r)

    return angle
