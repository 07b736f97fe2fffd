"""Exact and Fourier-truncated KMS-detailed-balance Lindbladians.

Every operator is assembled in the Hamiltonian eigenbasis as a Hadamard
product of a scalar weight matrix with the rotated operator, then rotated
back once.  Superoperators act on column-stacked density matrices:
vec(A X B) = (B^T kron A) vec(X).
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Sequence

import numpy as np
from scipy.special import softmax

from .filters import FilterParams, g_hat, g_hat_fn, w_hat_fn
from .fourier import FourierTable, fourier_coefficients
from .spectral import HamiltonianSpectrum, JumpProposalSet
from .statefn import TargetFunction


class ConsistencyError(RuntimeError):
    pass


def vec(X: np.ndarray) -> np.ndarray:
    return X.reshape(-1, order="F")


def unvec(v: np.ndarray, dim: int | None = None) -> np.ndarray:
    if dim is None:
        dim = int(round(np.sqrt(v.size)))
    return v.reshape((dim, dim), order="F")


def dag(A: np.ndarray) -> np.ndarray:
    return A.conj().T


@dataclass(frozen=True)
class Truncation:
    M: int
    M_prime: int
    g_table: FourierTable
    w_table: FourierTable
    jump_errors: tuple[float, ...] = ()
    coherent_error: float | None = None


@dataclass(frozen=True)
class LindbladGenerator:
    jumps: tuple[np.ndarray, ...]
    coherent: np.ndarray
    sigma_unnormalized: np.ndarray
    sigma: np.ndarray
    mode: str
    spectrum: HamiltonianSpectrum
    target: TargetFunction
    filter: FilterParams
    labels: tuple[str, ...] = ()
    truncation: Truncation | None = None
    notes: dict = field(default_factory=dict)

    @property
    def dim(self) -> int:
        return self.coherent.shape[0]

    def apply(self, rho: np.ndarray) -> np.ndarray:
        """L(rho) = -i[G, rho] + sum_a L rho L^+ - 1/2 {L^+ L, rho}."""
        G = self.coherent
        out = -1j * (G @ rho - rho @ G)
        for L in self.jumps:
            K = dag(L) @ L
            out += L @ rho @ dag(L) - 0.5 * (K @ rho + rho @ K)
        return out

    def apply_adjoint(self, X: np.ndarray) -> np.ndarray:
        """Heisenberg-picture generator L^+(X)."""
        G = self.coherent
        out = 1j * (G @ X - X @ G)
        for L in self.jumps:
            K = dag(L) @ L
            out += dag(L) @ X @ L - 0.5 * (K @ X + X @ K)
        return out


@dataclass(frozen=True)
class Superoperator:
    matrix: np.ndarray
    dim: int

    def __call__(self, rho: np.ndarray) -> np.ndarray:
        return unvec(self.matrix @ vec(rho), self.dim)

    def adjoint(self, X: np.ndarray) -> np.ndarray:
        return unvec(dag(self.matrix) @ vec(X), self.dim)


def _jump_weights(spec, target, filt, power=0.25) -> np.ndarray:
    E = spec.eigenvalues
    return g_hat(target, filt, E[:, None], E[None, :], power=power)


def _coherent_weights(spec, target) -> np.ndarray:
    phi = target.phi(spec.eigenvalues)
    return 1j * np.tanh((phi[:, None] - phi[None, :]) / 4.0)


def exact_jump(spec: HamiltonianSpectrum, target: TargetFunction, filt: FilterParams,
               A: np.ndarray, power: float = 0.25) -> np.ndarray:
    """L_a = sum_kl g(E_k, E_l) P_k A P_l."""
    W = _jump_weights(spec, target, filt, power)
    return spec.from_eigenbasis(W * spec.to_eigenbasis(A))


def dissipative_potential(jumps: Sequence[np.ndarray]) -> np.ndarray:
    """V = -1/2 sum_a L_a^+ L_a."""
    return -0.5 * sum(dag(L) @ L for L in jumps)


def exact_coherent(spec: HamiltonianSpectrum, target: TargetFunction,
                   jumps: Sequence[np.ndarray]) -> np.ndarray:
    """G = i sum_kl tanh((Phi(E_k) - Phi(E_l))/4) P_k V P_l."""
    V = dissipative_potential(jumps)
    return spec.from_eigenbasis(_coherent_weights(spec, target) * spec.to_eigenbasis(V))


def truncated_jump(spec: HamiltonianSpectrum, g_table: FourierTable, A: np.ndarray) -> np.ndarray:
    """sum_{|n1|,|n2|<=M} g_n exp(i n1 tau H) A exp(i n2 tau H)."""
    W = g_table.weight_matrix(spec.eigenvalues)
    return spec.from_eigenbasis(W * spec.to_eigenbasis(A))


def truncated_coherent(spec: HamiltonianSpectrum, w_table: FourierTable,
                       truncated_jumps: Sequence[np.ndarray]) -> np.ndarray:
    Vbar = dissipative_potential(truncated_jumps)
    W = w_table.weight_matrix(spec.eigenvalues)
    return spec.from_eigenbasis(W * spec.to_eigenbasis(Vbar))


def literal_truncated_operator(spec: HamiltonianSpectrum, table: FourierTable,
                               A: np.ndarray) -> np.ndarray:
    """Direct double sum over phase products; reference path for small M."""
    phase = {n: spec.function(np.exp(1j * n * table.tau * spec.eigenvalues))
             for n in table.orders}
    out = np.zeros_like(A, dtype=complex)
    for n1 in table.orders:
        for n2 in table.orders:
            out += table[n1, n2] * (phase[n1] @ A @ phase[n2])
    return out


def fixed_point(spec: HamiltonianSpectrum, target: TargetFunction):
    """(f(H), f(H)/Tr f(H)); the normalisation goes through log-sum-exp."""
    phi = target.phi(spec.eigenvalues)
    return spec.function(np.exp(phi)), spec.function(softmax(phi))


def exact_generator(spec: HamiltonianSpectrum, target: TargetFunction,
                    proposals: JumpProposalSet, filt: FilterParams | None = None,
                    negative_control: bool = False) -> LindbladGenerator:
    """Energy-domain generator.

    With ``negative_control`` the fourth root of the f-ratio is replaced by the
    square root, which breaks detailed balance on purpose.
    """
    if filt is None:
        filt = FilterParams.for_target(target)
    power = 0.5 if negative_control else 0.25
    jumps = tuple(exact_jump(spec, target, filt, A, power) for A in proposals)
    G = exact_coherent(spec, target, jumps)
    f_H, sigma = fixed_point(spec, target)
    return LindbladGenerator(jumps=jumps, coherent=G, sigma_unnormalized=f_H, sigma=sigma,
                             mode="exact", spectrum=spec, target=target, filter=filt,
                             labels=proposals.labels,
                             notes={"negative_control": negative_control})


def weight_tables(target: TargetFunction, filt: FilterParams, M: int, M_prime: int,
                  grid_n: int | None = None) -> tuple[FourierTable, FourierTable]:
    g_table = fourier_coefficients(g_hat_fn(target, filt), target.S, M, grid_n)
    w_table = fourier_coefficients(w_hat_fn(target), target.S, M_prime, grid_n)
    return g_table, w_table


def truncated_generator(spec: HamiltonianSpectrum, target: TargetFunction,
                        proposals: JumpProposalSet, M: int, M_prime: int,
                        filt: FilterParams | None = None, grid_n: int | None = None,
                        reference: LindbladGenerator | None = None) -> LindbladGenerator:
    """Time-domain generator with Fourier boxes [-M, M]^2 (jumps) and [-M', M']^2 (G).

    If an exact ``reference`` generator is given, measured operator-norm
    errors of every jump and of G are recorded in the truncation data.
    """
    if filt is None:
        filt = FilterParams.for_target(target)
    if grid_n is None:
        grid_n = 1 << max(9, int(np.ceil(np.log2(8 * (max(M, M_prime) + 1)))))
    g_table, w_table = weight_tables(target, filt, M, M_prime, grid_n)
    jumps = tuple(truncated_jump(spec, g_table, A) for A in proposals)
    G = truncated_coherent(spec, w_table, jumps)
    f_H, sigma = fixed_point(spec, target)
    jump_errors: tuple[float, ...] = ()
    coherent_error = None
    if reference is not None:
        jump_errors = tuple(float(np.linalg.norm(L - Lb, 2))
                            for L, Lb in zip(reference.jumps, jumps))
        coherent_error = float(np.linalg.norm(reference.coherent - G, 2))
    trunc = Truncation(M=M, M_prime=M_prime, g_table=g_table, w_table=w_table,
                       jump_errors=jump_errors, coherent_error=coherent_error)
    return LindbladGenerator(jumps=jumps, coherent=G, sigma_unnormalized=f_H, sigma=sigma,
                             mode="truncated", spectrum=spec, target=target, filter=filt,
                             labels=proposals.labels, truncation=trunc)


def superoperator_matrix(jumps: Sequence[np.ndarray], G: np.ndarray) -> np.ndarray:
    d = G.shape[0]
    Id = np.eye(d)
    mat = -1j * (np.kron(Id, G) - np.kron(G.T, Id))
    for L in jumps:
        K = dag(L) @ L
        mat += np.kron(L.conj(), L) - 0.5 * (np.kron(Id, K) + np.kron(K.T, Id))
    return mat


def assemble_superoperator(gen: LindbladGenerator, checks: int = 20, seed: int = 0,
                           tol: float = 1e-10) -> Superoperator:
    """Dense superoperator, cross-checked against the direct formula on random inputs."""
    mat = superoperator_matrix(gen.jumps, gen.coherent)
    sop = Superoperator(mat, gen.dim)
    rng = np.random.default_rng(seed)
    scale = max(1.0, float(np.linalg.norm(mat, 2)))
    for _ in range(checks):
        R = rng.normal(size=(gen.dim, gen.dim)) + 1j * rng.normal(size=(gen.dim, gen.dim))
        rho = R + dag(R)
        err = np.max(np.abs(sop(rho) - gen.apply(rho)))
        if err > tol * scale * np.max(np.abs(rho)):
            raise ConsistencyError(f"superoperator disagrees with direct formula: {err:.3e}")
    return sop
