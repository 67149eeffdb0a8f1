"""Momentum-space two-level problems shared by the free-fermion chains."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np


def mixing_angle(h_z: float, h_x: float) -> float:
    """Bogoliubov mixing angle of ``h_z sz + h_x sx``.

    For ``h_z > 0`` this is ``-arctan[(1 + sqrt(1 + zeta^2)) / zeta]`` with
    ``zeta = |h_x| / h_z``.  The two-argument form continues it through
    ``h_z = 0`` so the angle stays in ``[-pi/2, 0]`` and varies continuously
    with the field.  With this branch ``cos 2theta = -h_z/eps`` and
    ``sin 2theta = -|h_x|/eps``.
    """
    return 0.5 * (math.atan2(abs(h_x), h_z) - math.pi)


@dataclass(frozen=True)
class TwoLevelMode:
    """One decoupled mode ``H_k = h_z sz + h_x sx`` with splitting ``2 epsilon``.

    ``k`` is the wavenumber in inverse lattice units; energies are in units
    of the exchange constant.
    """

    k: float
    h_z: float
    h_x: float
    epsilon: float
    theta: float

    @classmethod
    def from_fields(cls, k: float, h_z: float, h_x: float) -> "TwoLevelMode":
        h_z, h_x = float(h_z), float(h_x)
        return cls(float(k), h_z, h_x, math.hypot(h_z, h_x), mixing_angle(h_z, h_x))

    @property
    def cos_field(self) -> float:
        """Cosine of the field direction measured from the z axis (``h_z/eps``)."""
        return self.h_z / self.epsilon

    @property
    def sin_field(self) -> float:
        return self.h_x / self.epsilon


def mode_arrays(modes) -> tuple[np.ndarray, np.ndarray, np.ndarray, np.ndarray]:
    """Stack ``(k, h_z, h_x, epsilon)`` of a mode list into arrays."""
    k = np.array([m.k for m in modes], dtype=float)
    h_z = np.array([m.h_z for m in modes], dtype=float)
    h_x = np.array([m.h_x for m in modes], dtype=float)
    eps = np.array([m.epsilon for m in modes], dtype=float)
    return k, h_z, h_x, eps


def antiperiodic_momenta(n_sites: int, spacing: float = 1.0) -> np.ndarray:
    """Positive wavenumbers ``(2n - 1) pi / (N b)`` for ``n = 1..N/2``."""
    n = np.arange(1, n_sites // 2 + 1)
    return (2 * n - 1) * np.pi / (n_sites * spacing)
