"""Transverse-field Ising chain in its free-fermion (momentum) representation.

``H = -J sum_j (g sx_j + sz_j sz_{j+1})`` with periodic boundaries.  In the
even-parity sector the chain splits into ``N/2`` two-level problems with
``h_z = 2J(g - cos kb)`` and ``h_x = 2J sin kb``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import InvalidParamsError
from .modes import TwoLevelMode, antiperiodic_momenta


@dataclass(frozen=True)
class TfimParams:
    """Chain parameters.

    ``b`` only enters through ``k b`` and therefore never changes an energy.
    """

    g: float
    N: int
    J: float = 1.0
    b: float = 1.0

    def __post_init__(self):
        if int(self.N) != self.N or self.N < 4 or self.N % 2:
            raise InvalidParamsError(f"N must be an even integer >= 4, got {self.N!r}")
        if not self.J > 0:
            raise InvalidParamsError(f"J must be positive, got {self.J!r}")
        if not self.g >= 0:
            raise InvalidParamsError(f"g must be non-negative, got {self.g!r}")
        if not self.b > 0:
            raise InvalidParamsError(f"lattice spacing b must be positive, got {self.b!r}")
        object.__setattr__(self, "N", int(self.N))

    def with_coupling(self, g: float) -> "TfimParams":
        return TfimParams(g=g, N=self.N, J=self.J, b=self.b)


def dispersion(J: float, g: float, kb) -> np.ndarray:
    """Mode energy ``2J sqrt(g^2 + 1 - 2g cos kb)``."""
    return 2.0 * J * np.sqrt(g * g + 1.0 - 2.0 * g * np.cos(kb))


def tfim_modes(p: TfimParams) -> list[TwoLevelMode]:
    """The ``N/2`` even-sector modes, ascending in ``k``."""
    k = antiperiodic_momenta(p.N, p.b)
    kb = k * p.b
    h_z = 2.0 * p.J * (p.g - np.cos(kb))
    h_x = 2.0 * p.J * np.sin(kb)
    eps = dispersion(p.J, p.g, kb)
    modes = []
    for ki, hz, hx, e in zip(k, h_z, h_x, eps):
        m = TwoLevelMode.from_fields(ki, hz, hx)
        # closed-form energy is better conditioned than hypot near g = cos kb
        modes.append(TwoLevelMode(m.k, m.h_z, m.h_x, float(e), m.theta))
    return modes


def tfim_gap(p: TfimParams) -> float:
    """Gap to the first excited state of the even sector, ``2 eps_{k_1}``."""
    return 2.0 * float(dispersion(p.J, p.g, math.pi / p.N))


def ground_energy(p: TfimParams) -> float:
    """Even-sector ground energy ``-sum_n eps_{k_n}``."""
    kb = antiperiodic_momenta(p.N, p.b) * p.b
    return -float(np.sum(dispersion(p.J, p.g, kb)))


def odd_ground_energy(p: TfimParams) -> float:
    """Ground energy of the odd-parity sector (periodic momenta ``2 n pi / N``)."""
    n = np.arange(1, p.N // 2)
    s = np.sum(np.sqrt(p.g**2 + 1.0 - 2.0 * p.g * np.cos(2.0 * n * np.pi / p.N)))
    return -2.0 * p.J * (1.0 + float(s))


def tfim_sector_gap(p: TfimParams) -> float:
    """Splitting ``E_0^- - E_0`` between the two parity-sector ground states."""
    return odd_ground_energy(p) - ground_energy(p)
