"""Falsifiable checks on constructed generators, gathered into a report."""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
from scipy.linalg import expm

from .fourier import FourierTable, coherent_error_bound, tail_bound
from .generator import (LindbladGenerator, Superoperator, dag, dissipative_potential,
                        unvec, vec)
from .spectral import HamiltonianSpectrum
from .statefn import DerivativeNorms

TOL_STRUCTURAL = 1e-9
TOL_KMS_ADJOINT = 1e-8
TOL_TRACE = 1e-10
TOL_CHOI = -1e-9


class ValidationError(ValueError):
    pass


def psd_power(sigma: np.ndarray, p: float) -> np.ndarray:
    evals, evecs = np.linalg.eigh(0.5 * (sigma + dag(sigma)))
    if evals.min() <= 0:
        raise ValidationError(f"state is singular (min eigenvalue {evals.min():.3e})")
    return (evecs * evals**p) @ dag(evecs)


def check_kms_condition(L: np.ndarray, sigma: np.ndarray) -> float:
    """||sigma^-1/2 L sigma^1/2 - L^+|| / max(1, ||L||)."""
    lhs = psd_power(sigma, -0.5) @ L @ psd_power(sigma, 0.5)
    return float(np.linalg.norm(lhs - dag(L), 2) / max(1.0, np.linalg.norm(L, 2)))


def kms_inner(X: np.ndarray, Y: np.ndarray, sqrt_sigma: np.ndarray) -> complex:
    """Tr[X^+ sigma^1/2 Y sigma^1/2]."""
    return complex(np.trace(dag(X) @ sqrt_sigma @ Y @ sqrt_sigma))


def random_hermitian(rng: np.random.Generator, dim: int) -> np.ndarray:
    R = rng.normal(size=(dim, dim)) + 1j * rng.normal(size=(dim, dim))
    H = R + dag(R)
    return H / np.linalg.norm(H)


def check_kms_self_adjoint(superop: Superoperator, sigma: np.ndarray, trials: int = 20,
                           seed: int = 0) -> float:
    """max |<X, L^+ Y>_KMS - <L^+ X, Y>_KMS| over random Hermitian pairs.

    X and Y have unit Frobenius norm and the defect is divided by the
    operator norm of the superoperator (or 1, if larger).
    """
    if trials < 10:
        raise ValidationError(f"need at least 10 trials, got {trials}")
    rng = np.random.default_rng(seed)
    root = psd_power(sigma, 0.5)
    scale = max(1.0, float(np.linalg.norm(superop.matrix, 2)))
    worst = 0.0
    for _ in range(trials):
        X = random_hermitian(rng, superop.dim)
        Y = random_hermitian(rng, superop.dim)
        lhs = kms_inner(X, superop.adjoint(Y), root)
        rhs = kms_inner(superop.adjoint(X), Y, root)
        worst = max(worst, abs(lhs - rhs) / scale)
    return worst


def choi_matrix(channel: np.ndarray, dim: int) -> np.ndarray:
    """sum_ij |i><j| kron Phi(|i><j|) for a column-stacked channel matrix."""
    # channel[a + d b, i + d j] = Phi(|i><j|)[a, b]
    T = channel.reshape(dim, dim, dim, dim)  # [b, a, j, i]
    return T.transpose(3, 1, 2, 0).reshape(dim * dim, dim * dim)


def check_cptp(superop: Superoperator, t: float) -> tuple[float, float]:
    """(min eigenvalue of the Choi matrix of exp(tL), trace-preservation defect)."""
    if t <= 0:
        raise ValidationError(f"t must be positive, got {t}")
    channel = expm(t * superop.matrix)
    if not np.all(np.isfinite(channel)):
        raise ArithmeticError("superoperator exponential overflowed")
    J = choi_matrix(channel, superop.dim)
    min_eig = float(np.linalg.eigvalsh(0.5 * (J + dag(J))).min())
    vid = vec(np.eye(superop.dim))
    trace_res = float(np.max(np.abs(vid @ channel - vid)))
    return min_eig, trace_res


@dataclass(frozen=True)
class BlockEncoding:
    unitary: np.ndarray
    block: np.ndarray
    alpha: float
    index_qubits: int
    deviation: float
    unitarity_defect: float


def _completing_unitary(v: np.ndarray) -> np.ndarray:
    """Unitary whose first column is the unit vector v (Householder reflection)."""
    n = v.size
    e0 = np.zeros(n, dtype=complex)
    e0[0] = 1.0
    phase = v[0] / abs(v[0]) if abs(v[0]) > 1e-300 else 1.0
    u = v / phase - e0
    nu = np.linalg.norm(u)
    if nu < 1e-15:
        return phase * np.eye(n, dtype=complex)
    u /= nu
    return phase * (np.eye(n) - 2.0 * np.outer(u, u.conj()))


def lcu_block_encoding(g_table: FourierTable, spec: HamiltonianSpectrum,
                       A: np.ndarray) -> BlockEncoding:
    """Dense LCU circuit Prep_L^+ . Select . Prep_R for one jump proposal.

    Right preparation amplitudes are sqrt(g_n)/sqrt(Z) and left ones are their
    conjugates, so the top-left block is sum_n g_n U_n / Z with
    U_n = exp(i n1 tau H) A exp(i n2 tau H).
    """
    Z = g_table.Z
    if not Z > 0:
        raise ValidationError("Fourier table has zero l1 norm")
    c = g_table.coeffs.reshape(-1)
    roots = np.sqrt(c.astype(complex)) / math.sqrt(Z)
    K, d = c.size, spec.dim
    prep_R = _completing_unitary(roots)
    prep_L = _completing_unitary(roots.conj())
    phase = {n: spec.function(np.exp(1j * n * g_table.tau * spec.eigenvalues))
             for n in g_table.orders}
    select = np.empty((K, d, d), dtype=complex)
    for idx, (n1, n2) in enumerate((a, b) for a in g_table.orders for b in g_table.orders):
        select[idx] = phase[n1] @ A @ phase[n2]
    # (Prep_L^+ kron I) . sum_j |j><j| kron U_j . (Prep_R kron I), contracted over j
    right = np.einsum("jn,jab->janb", prep_R, select)
    U = np.tensordot(prep_L.conj(), right, axes=(0, 0)).reshape(K * d, K * d)
    block = U[:d, :d]
    Lbar = spec.from_eigenbasis(g_table.weight_matrix(spec.eigenvalues) * spec.to_eigenbasis(A))
    deviation = float(np.linalg.norm(block - Lbar / Z, 2))
    unitarity = float(np.max(np.abs(dag(U) @ U - np.eye(K * d))))
    return BlockEncoding(U, block, Z, 2 * math.ceil(math.log2(2 * g_table.M + 1)), deviation,
                         unitarity)


def verify_block_encoding(g_table: FourierTable, spec: HamiltonianSpectrum, A: np.ndarray,
                          L_bar: np.ndarray) -> float:
    """||block - L_bar / Z_g|| for the dense LCU construction."""
    be = lcu_block_encoding(g_table, spec, A)
    return float(np.linalg.norm(be.block - L_bar / be.alpha, 2))


def ancilla_counts(M: int, M_prime: int, n_jumps: int) -> dict[str, int]:
    """Register sizes for the jump and coherent block encodings (qubits)."""
    reg = math.ceil(math.log2(2 * M + 1))
    reg_p = math.ceil(math.log2(2 * M_prime + 1))
    idx = math.ceil(math.log2(n_jumps)) if n_jumps > 1 else 0
    return {"a_L": 2 * reg + idx, "a_G": 2 * reg_p + 2 * reg + idx}


@dataclass(frozen=True)
class TruncationCheck:
    label: str
    measured: float
    bound: float

    @property
    def ok(self) -> bool:
        return self.measured <= self.bound * (1 + 1e-6)


def check_truncation_bounds(exact_gen: LindbladGenerator, truncated_gen: LindbladGenerator,
                            norms_g: DerivativeNorms, norms_w: DerivativeNorms
                            ) -> list[TruncationCheck]:
    """Measured operator-norm errors of every jump and of G against their bounds.

    Each jump error is paired with the analytic tail bound at M (which also
    dominates the coefficient tail mass); the coherent error with the full
    chain evaluated at measured ||V||, ||L_a||, ||Lbar_a|| and jump errors.
    """
    if exact_gen.mode != "exact" or truncated_gen.mode != "truncated":
        raise ValidationError("need one exact and one truncated generator")
    if (exact_gen.dim != truncated_gen.dim
            or not np.allclose(exact_gen.spectrum.eigenvalues,
                               truncated_gen.spectrum.eigenvalues)
            or exact_gen.target is not truncated_gen.target
            or len(exact_gen.jumps) != len(truncated_gen.jumps)):
        raise ValidationError("generators are built on different instances")
    tr = truncated_gen.truncation
    S, k = exact_gen.target.S, exact_gen.target.k
    out = []
    jump_errs, L_norms, Lb_norms = [], [], []
    jb = tail_bound(S, k, tr.M, norms_g)
    for lab, L, Lb in zip(exact_gen.labels, exact_gen.jumps, truncated_gen.jumps):
        err = float(np.linalg.norm(L - Lb, 2))
        jump_errs.append(err)
        L_norms.append(float(np.linalg.norm(L, 2)))
        Lb_norms.append(float(np.linalg.norm(Lb, 2)))
        out.append(TruncationCheck(f"jump_{lab}", err, jb))
    V = dissipative_potential(exact_gen.jumps)
    g_bound = coherent_error_bound(
        S, k, tr.M_prime, norms_w, float(np.linalg.norm(V, 2)), len(exact_gen.jumps),
        max(L_norms), max(Lb_norms), max(jump_errs))
    g_err = float(np.linalg.norm(exact_gen.coherent - truncated_gen.coherent, 2))
    out.append(TruncationCheck("coherent", g_err, g_bound))
    return out


@dataclass
class VerificationReport:
    kms_jump_residuals: list[float]
    kms_adjoint_residual: float
    stationarity_residual: float
    cptp_min_choi_eigenvalue: float
    trace_preservation_residual: float
    block_encoding_deviation: list[float] | None = None
    truncation: list[TruncationCheck] = field(default_factory=list)
    extras: dict = field(default_factory=dict)

    @property
    def flags(self) -> dict[str, bool]:
        f = {
            "kms_jump": max(self.kms_jump_residuals, default=0.0) <= TOL_STRUCTURAL,
            "kms_adjoint": self.kms_adjoint_residual <= TOL_KMS_ADJOINT,
            "stationarity": self.stationarity_residual <= TOL_STRUCTURAL,
            "cptp": self.cptp_min_choi_eigenvalue >= TOL_CHOI,
            "trace_preservation": self.trace_preservation_residual <= TOL_TRACE,
        }
        if self.block_encoding_deviation is not None:
            f["block_encoding"] = max(self.block_encoding_deviation) <= TOL_STRUCTURAL
        if self.truncation:
            f["truncation"] = all(c.ok for c in self.truncation)
        return f

    @property
    def passed(self) -> bool:
        return all(self.flags.values())

    def items(self) -> list[tuple[str, str]]:
        rows = [(k, _fmt(v)) for k, v in self.extras.items()]
        rows += [(f"kms_jump_residual_{i}", _fmt(r)) for i, r in enumerate(self.kms_jump_residuals)]
        rows += [
            ("kms_adjoint_residual", _fmt(self.kms_adjoint_residual)),
            ("stationarity_residual", _fmt(self.stationarity_residual)),
            ("cptp_min_choi_eigenvalue", _fmt(self.cptp_min_choi_eigenvalue)),
            ("trace_preservation_residual", _fmt(self.trace_preservation_residual)),
        ]
        for i, dev in enumerate(self.block_encoding_deviation or []):
            rows.append((f"block_encoding_deviation_{i}", _fmt(dev)))
        for c in self.truncation:
            rows.append((f"truncation_{c.label}_measured", _fmt(c.measured)))
            rows.append((f"truncation_{c.label}_bound", _fmt(c.bound)))
        rows += [(f"pass_{k}", str(v).lower()) for k, v in self.flags.items()]
        rows.append(("pass", str(self.passed).lower()))
        return rows

    def to_text(self) -> str:
        return "".join(f"{k} = {v}\n" for k, v in self.items())

    def to_csv(self) -> str:
        return "key,value\n" + "".join(f"{k},{v}\n" for k, v in self.items())


def _fmt(v) -> str:
    if isinstance(v, (bool, np.bool_)):
        return str(bool(v)).lower()
    if isinstance(v, (int, np.integer)):
        return str(int(v))
    if isinstance(v, (float, np.floating)):
        return repr(float(v))
    return str(v)


def stationarity_residual(superop: Superoperator, sigma: np.ndarray) -> float:
    """||L(sigma)||_F / ||L||_F."""
    return float(np.linalg.norm(superop(sigma)) / max(np.linalg.norm(superop.matrix), 1e-300))
