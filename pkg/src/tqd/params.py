"""Small value types for model couplings and their time derivatives."""

from __future__ import annotations

from dataclasses import dataclass, replace
from typing import NamedTuple

import numpy as np


class ParamTriple(NamedTuple):
    """Coupling values ``(Jx, Jy, h)`` at one instant."""

    Jx: float
    Jy: float
    h: float


@dataclass(frozen=True)
class Couplings:
    """XY-type couplings and their first time derivatives.

    Used by the two-spin model and the XY chain.
    """

    Jx: float
    Jy: float
    h: float
    dJx: float = 0.0
    dJy: float = 0.0
    dh: float = 0.0

    @classmethod
    def from_arrays(cls, value, derivative=(0.0, 0.0, 0.0)) -> "Couplings":
        v = [float(x) for x in value]
        d = [float(x) for x in derivative]
        return cls(v[0], v[1], v[2], d[0], d[1], d[2])

    @property
    def values(self) -> ParamTriple:
        return ParamTriple(self.Jx, self.Jy, self.h)

    @property
    def rates(self) -> ParamTriple:
        return ParamTriple(self.dJx, self.dJy, self.dh)

    def as_rates(self) -> "Couplings":
        """Couplings whose values are this object's derivatives.

        Every Hamiltonian here is linear in ``(Jx, Jy, h)``, so building it
        from the rates gives the time derivative of the Hamiltonian.
        """
        return Couplings(self.dJx, self.dJy, self.dh)


@dataclass(frozen=True)
class LmgParams:
    """Lipkin-Meshkov-Glick couplings for ``N`` spins, with derivatives."""

    N: int
    Jx: float
    Jy: float
    h: float
    dJx: float = 0.0
    dJy: float = 0.0
    dh: float = 0.0

    @classmethod
    def from_arrays(cls, n_spins: int, value, derivative=(0.0, 0.0, 0.0)) -> "LmgParams":
        c = Couplings.from_arrays(value, derivative)
        return cls(int(n_spins), c.Jx, c.Jy, c.h, c.dJx, c.dJy, c.dh)

    def as_rates(self) -> "LmgParams":
        return LmgParams(self.N, self.dJx, self.dJy, self.dh)

    def with_values(self, **changes) -> "LmgParams":
        return replace(self, **changes)


def as_field(vec) -> np.ndarray:
    """Coerce a 3-vector (field or rate) to a float array."""
    arr = np.asarray(vec, dtype=float).reshape(3)
    return arr
