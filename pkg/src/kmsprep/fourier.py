"""Two-dimensional Fourier series on [-S, S]^2, tail bounds and truncation orders.

Convention: f(E1, E2) = sum_n c[n1, n2] exp(i (n1 E1 + n2 E2) tau), tau = pi/S,
with c[n1, n2] = (4 S^2)^-1 * integral of exp(-i (n1 E1 + n2 E2) tau) f.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .statefn import DerivativeNorms, ParameterError, sample_grid

M_MAX = 2**20


class CapacityError(RuntimeError):
    pass


@dataclass(frozen=True)
class FourierTable:
    """Coefficients c[n1 + M, n2 + M] for |n1|, |n2| <= M."""

    tau: float
    M: int
    coeffs: np.ndarray
    grid_n: int

    @property
    def S(self) -> float:
        return math.pi / self.tau

    @property
    def Z(self) -> float:
        """l1 norm of the stored coefficients."""
        return float(np.sum(np.abs(self.coeffs)))

    @property
    def orders(self) -> np.ndarray:
        return np.arange(-self.M, self.M + 1)

    def __getitem__(self, idx: tuple[int, int]) -> complex:
        n1, n2 = idx
        if max(abs(n1), abs(n2)) > self.M:
            return 0j
        return complex(self.coeffs[n1 + self.M, n2 + self.M])

    def truncate(self, M: int) -> "FourierTable":
        if M > self.M:
            raise ParameterError(f"cannot truncate table of order {self.M} to {M}")
        lo = self.M - M
        sub = self.coeffs[lo:lo + 2 * M + 1, lo:lo + 2 * M + 1].copy()
        return FourierTable(self.tau, M, sub, self.grid_n)

    def tail_mass(self, M: int) -> float:
        """sum of |c| over stored orders outside the box [-M, M]^2."""
        if M >= self.M:
            return 0.0
        return self.Z - self.truncate(M).Z

    def phases(self, energies) -> np.ndarray:
        """exp(i n tau E) with shape (len(energies), 2M+1)."""
        E = np.atleast_1d(np.asarray(energies, dtype=float))
        return np.exp(1j * self.tau * np.outer(E, self.orders))

    def weight_matrix(self, energies) -> np.ndarray:
        """Partial sum evaluated at all pairs (energies[k], energies[l])."""
        P = self.phases(energies)
        return P @ self.coeffs @ P.T

    def to_csv(self, path) -> None:
        lines = ["tau,M,grid_n", f"{self.tau!r},{self.M},{self.grid_n}", "n1,n2,re,im"]
        for i, n1 in enumerate(self.orders):
            for j, n2 in enumerate(self.orders):
                c = self.coeffs[i, j]
                lines.append(f"{n1},{n2},{float(c.real)!r},{float(c.imag)!r}")
        Path(path).write_text("\n".join(lines) + "\n")

    @classmethod
    def from_csv(cls, path) -> "FourierTable":
        rows = Path(path).read_text().splitlines()
        tau_s, M_s, grid_s = rows[1].split(",")
        M = int(M_s)
        coeffs = np.zeros((2 * M + 1, 2 * M + 1), dtype=complex)
        for row in rows[3:]:
            n1, n2, re, im = row.split(",")
            coeffs[int(n1) + M, int(n2) + M] = complex(float(re), float(im))
        return cls(float(tau_s), M, coeffs, int(grid_s))


def fourier_coefficients(fn2d, S: float, M: int, grid_n: int | None = None) -> FourierTable:
    """Coefficients of a 2S-periodic function by the periodic trapezoidal rule.

    On the grid E_j = -S + j h the rule is a 2D DFT up to the sign (-1)^(n1+n2).
    """
    if M < 0:
        raise ParameterError(f"M must be >= 0, got {M}")
    if grid_n is None:
        grid_n = 1 << max(6, int(math.ceil(math.log2(8 * (M + 1)))))
    if grid_n < 8 * (M + 1):
        raise ParameterError(f"grid_n={grid_n} too small for M={M}, need >= {8 * (M + 1)}")
    if grid_n & (grid_n - 1):
        raise ParameterError(f"grid_n must be a power of two, got {grid_n}")
    E = sample_grid(S, grid_n)
    F = np.broadcast_to(np.asarray(fn2d(E[:, None], E[None, :])), (grid_n, grid_n))
    if not np.all(np.isfinite(F)):
        raise ParameterError("non-finite samples in Fourier quadrature")
    spec = np.fft.fft2(F) / grid_n**2
    del F
    n = np.arange(-M, M + 1)
    sign = np.where(n % 2, -1.0, 1.0)
    idx = np.mod(n, grid_n)
    coeffs = spec[np.ix_(idx, idx)] * np.outer(sign, sign)
    return FourierTable(tau=math.pi / float(S), M=M, coeffs=coeffs, grid_n=grid_n)


def reconstruct(table: FourierTable, E1, E2) -> np.ndarray:
    """Partial Fourier sum at (E1, E2); broadcasts like numpy arithmetic."""
    E1, E2 = np.broadcast_arrays(np.asarray(E1, dtype=float), np.asarray(E2, dtype=float))
    P1 = np.exp(1j * table.tau * E1[..., None] * table.orders)
    P2 = np.exp(1j * table.tau * E2[..., None] * table.orders)
    out = np.einsum("...i,ij,...j->...", P1, table.coeffs, P2)
    return out if out.ndim else complex(out)


def tail_bound(S: float, k: int, M: int, norms: DerivativeNorms) -> float:
    """Upper bound on sum_{n outside [-M, M]^2} |c_n| for a C^k periodic function."""
    if k < 2:
        raise ParameterError(f"tail bound needs k >= 2, got {k}")
    if M < 1:
        raise ParameterError(f"tail bound needs M >= 1, got {M}")
    tau = math.pi / S
    return norms.envelope(tau) * 2.0 * M**(1 - k) / (tau**k * (k - 1))


def l1_bound(S: float, k: int, norms: DerivativeNorms) -> float:
    """Upper bound on the full l1 norm of the Fourier coefficients."""
    if k < 2:
        raise ParameterError(f"l1 bound needs k >= 2, got {k}")
    tau = math.pi / S
    inner = 1.0 + 2.0 / tau**k * norms.envelope(tau)
    return 10.0 * (1.0 + norms.l1) * inner**(2.0 / (k + 1))


def coherent_error_bound(S: float, k: int, M_prime: int, norms_w: DerivativeNorms,
                         V_norm: float, n_jumps: int, L_norm: float, Lbar_norm: float,
                         jump_error: float) -> float:
    """Right-hand side of the chain bounding ||G - Gbar||.

    First term: tail of w beyond M' acting on V.  Second term: l1 mass of the
    retained w coefficients times the propagated jump error.
    """
    tau = math.pi / S
    env = norms_w.envelope(tau)
    first = V_norm * tail_bound(S, k, M_prime, norms_w)
    w_mass = 9.0 * norms_w.l1 + env * 2.0 / (tau**k * (k - 1))
    second = w_mass * n_jumps * 0.5 * (L_norm + Lbar_norm) * jump_error
    return first + second


def _smallest_order(ok) -> int:
    """Smallest M >= 1 with ok(M), assuming monotonicity; exponential then bisection."""
    if ok(1):
        return 1
    hi = 2
    while not ok(hi):
        hi *= 2
        if hi > M_MAX:
            raise CapacityError(f"truncation order exceeds M_max={M_MAX}")
    lo = hi // 2
    while hi - lo > 1:
        mid = (lo + hi) // 2
        if ok(mid):
            hi = mid
        else:
            lo = mid
    return hi


def select_truncation(eps: float, k: int, S: float, norms_g: DerivativeNorms,
                      norms_w: DerivativeNorms, n_jumps: int,
                      g_l1: float | None = None) -> tuple[int, int]:
    """Smallest (M, M') whose analytic error contributions are each <= eps/2.

    M' makes the w-tail term of the coherent bound <= eps/2, with ||V|| <=
    |A| ||g||_1^2 / 2.  M satisfies the per-jump requirement with its
    unspecified constant set to 1/2, the explicit second term of the coherent
    bound <= eps/2, and the jump tail itself <= eps/2.

    ``g_l1`` replaces the analytic l1 bound on the jump coefficients, e.g. by
    the measured Z of a large reference table.
    """
    if not 0 < eps < 1:
        raise ParameterError(f"eps must lie in (0, 1), got {eps}")
    tau = math.pi / S
    if g_l1 is None:
        g_l1 = l1_bound(S, k, norms_g)
    V_norm = n_jumps * g_l1**2 / 2.0

    M_prime = _smallest_order(lambda m: V_norm * tail_bound(S, k, m, norms_w) <= eps / 2)

    w_env = (S**k * norms_w.dkk + norms_w.d1 + norms_w.d2) * S**k
    required = 0.5 * eps / (n_jumps * (1.0 + w_env * g_l1))
    w_mass = 9.0 * norms_w.l1 + norms_w.envelope(tau) * 2.0 / (tau**k * (k - 1))

    def ok(m):
        t = tail_bound(S, k, m, norms_g)
        second = w_mass * n_jumps * 0.5 * (2 * g_l1 + t) * t
        return t <= required and t <= eps / 2 and second <= eps / 2

    return _smallest_order(ok), M_prime
