"""Spin-chain Hamiltonians, jump proposals and dense spectral data."""

from __future__ import annotations

from dataclasses import dataclass
from functools import reduce

import numpy as np

I2 = np.eye(2, dtype=complex)
X = np.array([[0, 1], [1, 0]], dtype=complex)
Y = np.array([[0, -1j], [1j, 0]], dtype=complex)
Z = np.array([[1, 0], [0, -1]], dtype=complex)
PAULIS = {"X": X, "Y": Y, "Z": Z}

MAX_SITES = 10
DEFAULT_MARGIN = 1.2
# S = margin * max(ENERGY_FLOOR, max|E|) keeps tau = pi/S bounded for tiny spectra.
ENERGY_FLOOR = 1.0


class SpectralError(ValueError):
    pass


def site_operator(op: np.ndarray, site: int, n_sites: int) -> np.ndarray:
    """Embed a single-site operator at ``site`` in an ``n_sites`` qubit chain."""
    if not 0 <= site < n_sites:
        raise SpectralError(f"site {site} outside chain of length {n_sites}")
    factors = [I2] * n_sites
    factors[site] = op
    return reduce(np.kron, factors)


def build_chain_hamiltonian(
    model: str,
    n_sites: int,
    J: float = 1.0,
    h: float = 1.0,
    delta: float = 1.0,
    periodic: bool = False,
) -> np.ndarray:
    """Dense Hamiltonian of an open (or periodic) qubit chain.

    ``transverse_field_ising``: H = J sum Z_i Z_{i+1} + h sum X_i for n >= 2;
    a single site carries the field along Z so that n=1 gives H = h Z.

    ``heisenberg_xxz``: H = J sum (X_i X_{i+1} + Y_i Y_{i+1} + delta Z_i Z_{i+1})
    + h sum Z_i.
    """
    if not 1 <= n_sites <= MAX_SITES:
        raise SpectralError(f"n_sites must lie in [1, {MAX_SITES}], got {n_sites}")
    for name, val in (("J", J), ("h", h), ("delta", delta)):
        if not np.isfinite(val):
            raise SpectralError(f"coupling {name} is not finite")

    dim = 2**n_sites
    H = np.zeros((dim, dim), dtype=complex)
    bonds = [(i, i + 1) for i in range(n_sites - 1)]
    if periodic and n_sites > 2:
        bonds.append((n_sites - 1, 0))

    if model == "transverse_field_ising":
        if n_sites == 1:
            return h * Z.copy()
        for i, j in bonds:
            H += J * site_operator(Z, i, n_sites) @ site_operator(Z, j, n_sites)
        for i in range(n_sites):
            H += h * site_operator(X, i, n_sites)
    elif model == "heisenberg_xxz":
        for i, j in bonds:
            for P, w in ((X, 1.0), (Y, 1.0), (Z, delta)):
                H += J * w * site_operator(P, i, n_sites) @ site_operator(P, j, n_sites)
        for i in range(n_sites):
            H += h * site_operator(Z, i, n_sites)
    else:
        raise SpectralError(f"unknown model {model!r}")
    return H


@dataclass(frozen=True)
class HamiltonianSpectrum:
    eigenvalues: np.ndarray
    eigenbasis: np.ndarray
    energy_bound: float

    @property
    def dim(self) -> int:
        return len(self.eigenvalues)

    @property
    def norm(self) -> float:
        """Spectral norm max_k |E_k|."""
        return float(np.max(np.abs(self.eigenvalues)))

    def to_eigenbasis(self, A: np.ndarray) -> np.ndarray:
        U = self.eigenbasis
        return U.conj().T @ A @ U

    def from_eigenbasis(self, A: np.ndarray) -> np.ndarray:
        U = self.eigenbasis
        return U @ A @ U.conj().T

    def function(self, values: np.ndarray) -> np.ndarray:
        """Matrix sum_k values[k] P_k."""
        U = self.eigenbasis
        return (U * values) @ U.conj().T

    def projectors(self) -> np.ndarray:
        """Rank-one eigenprojectors, shape (dim, dim, dim)."""
        U = self.eigenbasis
        return np.einsum("ik,jk->kij", U, U.conj())

    def reconstruct(self) -> np.ndarray:
        return self.function(self.eigenvalues)


def diagonalize(H: np.ndarray, margin: float = DEFAULT_MARGIN) -> HamiltonianSpectrum:
    H = np.asarray(H, dtype=complex)
    if H.ndim != 2 or H.shape[0] != H.shape[1]:
        raise SpectralError("Hamiltonian must be a square matrix")
    if margin < 1:
        raise SpectralError(f"margin must be >= 1, got {margin}")
    if np.max(np.abs(H - H.conj().T), initial=0.0) > 1e-12:
        raise SpectralError("Hamiltonian is not Hermitian to 1e-12")
    H = 0.5 * (H + H.conj().T)
    evals, evecs = np.linalg.eigh(H)
    scale = max(float(np.max(np.abs(evals))), ENERGY_FLOOR)
    S = margin * scale
    return HamiltonianSpectrum(eigenvalues=evals, eigenbasis=evecs, energy_bound=S)


@dataclass(frozen=True)
class JumpProposalSet:
    proposals: tuple[np.ndarray, ...]
    labels: tuple[str, ...]

    def __post_init__(self):
        for A, lab in zip(self.proposals, self.labels):
            if np.max(np.abs(A - A.conj().T)) > 1e-14:
                raise SpectralError(f"proposal {lab} is not Hermitian")
            if np.linalg.norm(A, 2) > 1 + 1e-12:
                raise SpectralError(f"proposal {lab} has operator norm > 1")

    @property
    def size(self) -> int:
        return len(self.proposals)

    def __len__(self) -> int:
        return len(self.proposals)

    def __iter__(self):
        return iter(self.proposals)

    def stacked(self) -> np.ndarray:
        return np.array(self.proposals)


def pauli_jump_set(n_sites: int, axes: str = "XYZ") -> JumpProposalSet:
    """Single-site Paulis {X_i, Y_i, Z_i}."""
    if not 1 <= n_sites <= MAX_SITES:
        raise SpectralError(f"n_sites must lie in [1, {MAX_SITES}], got {n_sites}")
    ops, labels = [], []
    for i in range(n_sites):
        for ax in axes:
            ops.append(site_operator(PAULIS[ax], i, n_sites))
            labels.append(f"{ax}{i}")
    return JumpProposalSet(tuple(ops), tuple(labels))
