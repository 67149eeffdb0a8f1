"""Dense exact diagonalization of small non-integrable spin chains.

Basis states are integers ``s`` in ``[0, 2^N)``; bit ``j`` set means spin ``j``
points down along z (``sigma^z_j = 1 - 2*bit``).  ``sigma^x_j`` flips bit ``j``.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass, field

import numpy as np
from scipy import linalg

from .errors import DegeneracyWarning, InvalidParamsError, NormalizationError, SizeLimitError
from .response import TimeSeries, check_time_grid

MAX_SITES = 14
DEGENERACY_TOL = 1e-10
_KEEP_TOL = 1e-14
_CHUNK_BYTES = 64 * 2**20


def _check_size(N):
    if not isinstance(N, (int, np.integer)) or isinstance(N, bool):
        raise InvalidParamsError(f"N must be an integer, got {N!r}")
    if N < 2:
        raise InvalidParamsError(f"N must be >= 2, got {N}")
    if N > MAX_SITES:
        raise SizeLimitError(f"dense ED is capped at N = {MAX_SITES} (2^{MAX_SITES} states), got N = {N}")


def _z_table(N):
    s = np.arange(2**N)
    return 1 - 2 * ((s[:, None] >> np.arange(N)) & 1)


def _add_transverse(H, N, coeff):
    s = np.arange(2**N)
    for j in range(N):
        H[s, s ^ (1 << j)] += coeff


@dataclass(frozen=True)
class SpinHamiltonian:
    N: int
    matrix: np.ndarray = field(repr=False)
    model: str
    couplings: dict

    @property
    def dim(self) -> int:
        return self.matrix.shape[0]


@dataclass(frozen=True)
class EigenSystem:
    """Eigenvalues ascending, eigenvectors as orthonormal columns."""

    eigenvalues: np.ndarray
    eigenvectors: np.ndarray = field(repr=False)

    def gaps(self, count: int = 1) -> np.ndarray:
        return self.eigenvalues[1 : count + 1] - self.eigenvalues[0]


def build_longitudinal(N: int, g: float, h: float, J: float = 1.0) -> SpinHamiltonian:
    """``-J sum_j (g sx_j + sz_j sz_{j+1}) + J h sum_j sz_j`` on a ring."""
    _check_size(N)
    z = _z_table(N)
    diag = -J * np.sum(z * np.roll(z, -1, axis=1), axis=1) + J * h * z.sum(axis=1)
    H = np.diag(diag.astype(float))
    _add_transverse(H, N, -J * g)
    return SpinHamiltonian(N, H, "tfim_longitudinal", {"g": g, "h": h, "J": J})


def build_long_range(N: int, g: float, r: float, J: float = -1.0) -> SpinHamiltonian:
    """``sum_{i<j} J |i-j|^-r sz_i sz_j + J g sum_j sx_j`` on an open chain.

    ``J < 0`` is the antiferromagnetic case.  No Kac normalization.
    """
    _check_size(N)
    if not r > 0:
        raise InvalidParamsError(f"decay exponent r must be positive, got {r!r}")
    z = _z_table(N).astype(float)
    diag = np.zeros(2**N)
    for i in range(N):
        for j in range(i + 1, N):
            diag += J * (j - i) ** (-r) * z[:, i] * z[:, j]
    H = np.diag(diag)
    _add_transverse(H, N, J * g)
    return SpinHamiltonian(N, H, "long_range_ising", {"g": g, "r": r, "J": J})


def diagonalize(H: SpinHamiltonian) -> EigenSystem:
    w, v = linalg.eigh(H.matrix)
    return EigenSystem(w, v)


def ground_state(H: SpinHamiltonian) -> tuple[np.ndarray, bool]:
    """Lowest eigenvector and a flag telling whether the ground level is degenerate."""
    w, v = linalg.eigh(H.matrix, subset_by_index=[0, 1])
    degenerate = bool(w[1] - w[0] < DEGENERACY_TOL * max(1.0, abs(w[0])))
    if degenerate:
        warnings.warn(
            f"ground level is degenerate (splitting {w[1] - w[0]:.3g}); returning one vector of the ground space",
            DegeneracyWarning,
            stacklevel=2,
        )
    return v[:, 0], degenerate


def magnetization_x(N: int, psi: np.ndarray) -> np.ndarray:
    """Apply ``M_x = (1/N) sum_j sx_j`` to the columns of ``psi``."""
    s = np.arange(2**N)
    out = np.zeros_like(psi)
    for j in range(N):
        out += psi[s ^ (1 << j)]
    return out / N


def parity_operator(N: int) -> np.ndarray:
    """Permutation implementing ``prod_j sx_j`` as an index map: ``(P psi)[s] = psi[perm[s]]``."""
    s = np.arange(2**N)
    return s ^ (2**N - 1)


def parity_of(N: int, vectors: np.ndarray) -> np.ndarray:
    """Expectation of the spin-flip parity for each column of ``vectors``."""
    perm = parity_operator(N)
    return np.sum(vectors * vectors[perm], axis=0)


def evolve_and_measure(H: SpinHamiltonian, psi0: np.ndarray, times, eig: EigenSystem | None = None) -> TimeSeries:
    """``<psi(t)| M_x |psi(t)>`` under ``H`` starting from ``psi0``, through the full spectrum of ``H``."""
    psi0 = np.asarray(psi0)
    if psi0.shape != (H.dim,):
        raise InvalidParamsError(f"psi0 must have shape ({H.dim},), got {psi0.shape}")
    norm = float(np.linalg.norm(psi0))
    if abs(norm - 1.0) > 1e-10:
        raise NormalizationError(f"psi0 must be normalized, |psi0| = {norm!r}")
    times = np.asarray(times, float)
    check_time_grid(times)
    if eig is None:
        eig = diagonalize(H)

    c = eig.eigenvectors.T @ psi0
    keep = np.abs(c) > _KEEP_TOL
    c, lam, V = c[keep], eig.eigenvalues[keep], eig.eigenvectors[:, keep]
    M = V.T @ magnetization_x(H.N, V)
    lam = lam - lam[0]  # global phase

    values = np.empty(len(times))
    chunk = max(1, _CHUNK_BYTES // (16 * len(c)))
    for i in range(0, len(times), chunk):
        t = times[i : i + chunk]
        a = c[:, None] * np.exp(-1j * np.outer(lam, t))
        values[i : i + chunk] = np.real(np.sum(a.conj() * (M @ a), axis=0))

    return TimeSeries(times, values, {"model": H.model, "observable": "M_x", "N": H.N, **H.couplings})


def quench_trace(H0: SpinHamiltonian, H1: SpinHamiltonian, times) -> TimeSeries:
    """Ground state of ``H0`` evolved with ``H1``."""
    if H0.N != H1.N:
        raise InvalidParamsError("pre- and post-quench Hamiltonians differ in size")
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", DegeneracyWarning)
        psi0, degenerate = ground_state(H0)
    if degenerate:
        warnings.warn("pre-quench ground level is degenerate; the trace depends on the chosen vector", DegeneracyWarning, stacklevel=2)
    series = evolve_and_measure(H1, psi0, times)
    series.metadata["pre_quench"] = dict(H0.couplings)
    return series


def hermiticity_error(H: SpinHamiltonian) -> float:
    return float(np.max(np.abs(H.matrix - H.matrix.T.conj())))


def ground_energy_gap(H: SpinHamiltonian) -> float:
    w = linalg.eigh(H.matrix, eigvals_only=True, subset_by_index=[0, 1])
    return float(w[1] - w[0])


__all__ = [
    "MAX_SITES",
    "SpinHamiltonian",
    "EigenSystem",
    "build_longitudinal",
    "build_long_range",
    "diagonalize",
    "ground_state",
    "magnetization_x",
    "parity_operator",
    "parity_of",
    "evolve_and_measure",
    "quench_trace",
    "hermiticity_error",
    "ground_energy_gap",
]

