"""Long-range Kitaev chain with Kac-normalised hopping and pairing.

Couplings decay as ``1/(N_alpha r^alpha)`` (hopping) and ``1/(N_beta r^beta)``
(pairing) for ``r = 1..N/2``.  On the antiperiodic grid each ``(k, -k)`` pair
is the two-level problem

    h_z = mu/2 - (2J/N_alpha) sum_r cos(k r) / r^alpha
    h_x = -(2J/N_beta) sum_r sin(k r) / r^beta

Every normaliser is applied once.  The constant energy shift of the
Hamiltonian (``-J mu N / 2``) never reaches a gap or a response and is
dropped.  In the short-range limit this reduces to the Ising chain at
``g = mu/(2J)`` with all energies halved, so the transition sits at
``mu_c = 2J``.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import InvalidParamsError
from .modes import TwoLevelMode, antiperiodic_momenta


def kac_norm(gamma: float, N: int) -> float:
    """Kac normaliser ``2 sum_{r=1}^{N/2} r^-gamma``."""
    if not gamma > 1:
        raise InvalidParamsError(f"long-range exponent must exceed 1, got {gamma!r}")
    if int(N) != N or N < 4 or N % 2:
        raise InvalidParamsError(f"N must be an even integer >= 4, got {N!r}")
    r = np.arange(1, int(N) // 2 + 1, dtype=float)
    # sum small terms first
    return 2.0 * float(np.sum(r[::-1] ** -gamma))


@dataclass(frozen=True)
class LrkParams:
    mu: float
    N: int
    alpha: float = 2.5
    beta: float = 1.5
    J: float = 1.0

    def __post_init__(self):
        if int(self.N) != self.N or self.N < 4 or self.N % 2:
            raise InvalidParamsError(f"N must be an even integer >= 4, got {self.N!r}")
        if not self.J > 0:
            raise InvalidParamsError(f"J must be positive, got {self.J!r}")
        if not (self.alpha > 1 and self.beta > 1):
            raise InvalidParamsError(
                f"alpha and beta must exceed 1, got alpha={self.alpha!r}, beta={self.beta!r}"
            )
        if not np.isfinite(self.mu):
            raise InvalidParamsError(f"mu must be finite, got {self.mu!r}")
        object.__setattr__(self, "N", int(self.N))

    def with_coupling(self, mu: float) -> "LrkParams":
        return LrkParams(mu=mu, N=self.N, alpha=self.alpha, beta=self.beta, J=self.J)


def lrk_fields(p: LrkParams) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    k = antiperiodic_momenta(p.N)
    r = np.arange(1, p.N // 2 + 1, dtype=float)
    kr = np.outer(k, r)
    h_z = 0.5 * p.mu - (2.0 * p.J / kac_norm(p.alpha, p.N)) * (np.cos(kr) @ r**-p.alpha)
    h_x = -(2.0 * p.J / kac_norm(p.beta, p.N)) * (np.sin(kr) @ r**-p.beta)
    return k, h_z, h_x


def lrk_modes(p: LrkParams) -> list[TwoLevelMode]:
    """Modes on the antiperiodic grid ``k_n = (2n - 1) pi / N``, ascending in ``k``."""
    k, h_z, h_x = lrk_fields(p)
    return [TwoLevelMode.from_fields(*row) for row in zip(k, h_z, h_x)]


def lrk_gap(p: LrkParams) -> float:
    """``2 min_k eps_k`` over the grid."""
    _, h_z, h_x = lrk_fields(p)
    return 2.0 * float(np.min(np.hypot(h_z, h_x)))
