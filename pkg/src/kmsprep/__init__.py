"""Lindbladians satisfying KMS detailed balance for general target states f(H)."""

from .filters import FilterParams, g_hat, w_hat
from .fourier import (CapacityError, FourierTable, fourier_coefficients, l1_bound,
                      select_truncation, tail_bound)
from .generator import (LindbladGenerator, Superoperator, assemble_superoperator,
                        exact_generator, truncated_generator)
from .spectral import (HamiltonianSpectrum, JumpProposalSet, build_chain_hamiltonian,
                       diagonalize, pauli_jump_set)
from .statefn import (DerivativeNorms, TargetFunction, WindowSpec, constant_phi,
                      derivative_l1_norms, gibbs_phi, window_phi)
from .verify import VerificationReport

__all__ = [
    "CapacityError", "DerivativeNorms", "FilterParams", "FourierTable", "HamiltonianSpectrum",
    "JumpProposalSet", "LindbladGenerator", "Superoperator", "TargetFunction",
    "VerificationReport", "WindowSpec", "assemble_superoperator", "build_chain_hamiltonian",
    "constant_phi", "derivative_l1_norms", "diagonalize", "exact_generator",
    "fourier_coefficients", "g_hat", "gibbs_phi", "l1_bound", "pauli_jump_set",
    "select_truncation", "tail_bound", "truncated_generator", "w_hat", "window_phi",
]
