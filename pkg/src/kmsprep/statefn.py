"""Target exponents Phi with f = exp(Phi), as 2S-periodic C^k functions.

Three families are provided: a Gibbs exponent with a polynomial seam that
closes the period, a smoothed energy window, and the constant exponent.
All evaluators are vectorised over numpy arrays.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable

import numpy as np
from numpy.polynomial import Polynomial


class ParameterError(ValueError):
    pass


class NumericError(ArithmeticError):
    pass


def wrap(E, S: float) -> np.ndarray:
    """Map energies into the fundamental period [-S, S)."""
    return np.mod(np.asarray(E, dtype=float) + S, 2 * S) - S


def _poly_sup(p: Polynomial, lo: float = 0.0, hi: float = 1.0) -> float:
    """sup |p| on [lo, hi], from the endpoints and the real critical points."""
    pts = [lo, hi]
    for r in p.deriv().roots():
        if abs(r.imag) < 1e-12 and lo <= r.real <= hi:
            pts.append(r.real)
    return float(np.max(np.abs(p(np.array(pts)))))


def _hermite_system(k: int, left: list[float], right: list[float]) -> Polynomial:
    """Degree 2k+1 polynomial on [0, 1] with prescribed derivatives 0..k at both ends.

    The conditions at 0 fix the low coefficients directly (a_l = left[l]/l!);
    only the k+1 high coefficients come from a linear solve, with rows scaled
    by 1/l! so the matrix holds binomial coefficients.
    """
    low = np.array([left[l] / math.factorial(l) for l in range(k + 1)])
    high = np.arange(k + 1, 2 * k + 2)
    A = np.array([[math.comb(j, l) for j in high] for l in range(k + 1)], dtype=float)
    rhs = np.array([right[l] / math.factorial(l)
                    - sum(math.comb(i, l) * low[i] for i in range(l, k + 1))
                    for l in range(k + 1)])
    return Polynomial(np.concatenate([low, np.linalg.solve(A, rhs)]))


def smoothstep_gamma(k: int) -> np.ndarray:
    """Ascending coefficients of the degree 2k+1 smoothstep.

    gamma(0)=0, gamma(1)=1 and the first k derivatives vanish at both ends.
    """
    if not 1 <= k <= 8:
        raise ParameterError(f"smoothstep order k must lie in [1, 8], got {k}")
    left = [0.0] * (k + 1)
    right = [1.0] + [0.0] * k
    return _hermite_system(k, left, right).coef


@dataclass(frozen=True)
class WindowSpec:
    b: float
    c: float
    delta: float
    eta: float = 1e-6

    def __post_init__(self):
        if not self.b < self.c:
            raise ParameterError(f"window needs b < c, got b={self.b}, c={self.c}")
        if not self.delta > 0:
            raise ParameterError(f"delta must be positive, got {self.delta}")
        if not 0 < self.eta < 1:
            raise ParameterError(f"eta must lie in (0, 1), got {self.eta}")

    @property
    def reach(self) -> float:
        return self.delta + max(abs(self.b), abs(self.c))


@dataclass(frozen=True)
class TargetFunction:
    """Periodic exponent Phi on [-S, S] with derivatives up to order ``k``.

    ``phi`` and ``phi_deriv`` accept arbitrary real arrays and wrap them into
    the fundamental period first.
    """

    S: float
    k: int
    phi: Callable[[np.ndarray], np.ndarray]
    phi_deriv: Callable[[int, np.ndarray], np.ndarray]
    lipschitz: float
    label: str
    params: dict = field(default_factory=dict)

    @property
    def tau(self) -> float:
        return math.pi / self.S

    def f(self, E) -> np.ndarray:
        return np.exp(self.phi(E))


def constant_phi(S: float, k: int = 2) -> TargetFunction:
    """Phi == 0, i.e. the maximally mixed target."""

    def phi(E):
        return np.zeros_like(np.asarray(E, dtype=float))

    def phi_deriv(l, E):
        return np.zeros_like(np.asarray(E, dtype=float))

    return TargetFunction(S=S, k=k, phi=phi, phi_deriv=phi_deriv, lipschitz=0.0,
                          label="constant")


def window_phi(spec: WindowSpec, S: float, k: int = 2) -> TargetFunction:
    """Smoothed window: Phi = 0 on [b, c], log(eta) beyond b - delta and c + delta.

    The ramps are log(eta) * gamma((b - x)/delta) and log(eta) * gamma((x - c)/delta)
    with the degree 2k+1 smoothstep gamma, so Phi is C^k and 2S-periodic.
    """
    if k < 2:
        raise ParameterError(f"k must be >= 2, got {k}")
    if S < spec.reach:
        raise ParameterError(
            f"S={S} too small for window, need S >= delta + max(|b|,|c|) = {spec.reach}")
    b, c, d = spec.b, spec.c, spec.delta
    log_eta = math.log(spec.eta)
    gam = Polynomial(smoothstep_gamma(k))
    dgam = [gam.deriv(l) if l else gam for l in range(k + 2)]

    def _eval(l, E):
        x = wrap(E, S)
        out = np.zeros_like(x)
        left = (x > b - d) & (x <= b)
        right = (x > c) & (x <= c + d)
        if l == 0:
            out[(x <= b - d) | (x > c + d)] = log_eta
        # chain rule: d/dx gamma((b - x)/d) = -gamma'/d
        out[left] = log_eta * dgam[l]((b - x[left]) / d) * (-1.0 / d)**l
        out[right] = log_eta * dgam[l]((x[right] - c) / d) * (1.0 / d)**l
        return out

    def phi(E):
        return _eval(0, E)

    def phi_deriv(l, E):
        if l > k + 1:
            raise ParameterError(f"derivative order {l} exceeds k+1={k + 1}")
        return _eval(l, E)

    lip = abs(log_eta) * _poly_sup(dgam[1]) / d
    return TargetFunction(S=S, k=k, phi=phi, phi_deriv=phi_deriv, lipschitz=lip,
                          label="window",
                          params={"b": b, "c": c, "delta": d, "eta": spec.eta})


def gibbs_phi(beta: float, H_norm: float, S: float, k: int = 2) -> TargetFunction:
    """Gibbs exponent -beta (E + H_norm) on [-H_norm, H_norm].

    The complement of the physical interval within one period is bridged by
    the Hermite polynomial matching value and k derivatives at both seams.
    The bridge overshoots zero slightly just below -H_norm whenever beta > 0.
    """
    if beta < 0:
        raise ParameterError(f"beta must be >= 0, got {beta}")
    if k < 2:
        raise ParameterError(f"k must be >= 2, got {k}")
    if not S > H_norm:
        raise ParameterError(f"need S > H_norm, got S={S}, H_norm={H_norm}")
    width = 2 * (S - H_norm)
    # derivatives in the local coordinate u = (E - H_norm)/width pick up width**l
    left = [-2 * beta * H_norm, -beta * width] + [0.0] * (k - 1)
    right = [0.0, -beta * width] + [0.0] * (k - 1)
    bridge = _hermite_system(k, left, right)
    dbridge = [bridge.deriv(l) if l else bridge for l in range(k + 2)]

    def _eval(l, E):
        x = wrap(E, S)
        out = np.empty_like(x)
        inside = np.abs(x) <= H_norm
        if l == 0:
            out[inside] = -beta * (x[inside] + H_norm)
        elif l == 1:
            out[inside] = -beta
        else:
            out[inside] = 0.0
        u = np.where(x > H_norm, x - H_norm, x + 2 * S - H_norm)[~inside] / width
        out[~inside] = dbridge[l](u) / width**l
        return out

    def phi(E):
        return _eval(0, E)

    def phi_deriv(l, E):
        if l > k + 1:
            raise ParameterError(f"derivative order {l} exceeds k+1={k + 1}")
        return _eval(l, E)

    lip = max(beta, _poly_sup(dbridge[1]) / width)
    return TargetFunction(S=S, k=k, phi=phi, phi_deriv=phi_deriv, lipschitz=lip,
                          label="gibbs", params={"beta": beta, "H_norm": H_norm})


@dataclass(frozen=True)
class DerivativeNorms:
    """Normalised L1 norms of a function on [-S, S]^2 and its k-th derivatives."""

    d1: float
    d2: float
    dkk: float
    l1: float
    k: int

    def envelope(self, tau: float) -> float:
        """8/tau^k ||d^(k,k)|| + ||d_1^k|| + ||d_2^k||."""
        return 8.0 / tau**self.k * self.dkk + self.d1 + self.d2

    @classmethod
    def zero(cls, k: int, l1: float = 1.0) -> "DerivativeNorms":
        return cls(0.0, 0.0, 0.0, l1, k)


def central_difference_weights(k: int) -> np.ndarray:
    """Weights on offsets -m..m for the k-th derivative, m = (k+1)//2 (unit spacing)."""
    m = (k + 1) // 2
    offsets = np.arange(-m, m + 1)
    V = np.vander(offsets, increasing=True).T.astype(float)
    rhs = np.zeros(2 * m + 1)
    rhs[k] = math.factorial(k)
    return np.linalg.solve(V, rhs)


def _periodic_derivative(F: np.ndarray, k: int, h: float, axis: int) -> np.ndarray:
    w = central_difference_weights(k)
    m = len(w) // 2
    out = np.zeros_like(F)
    for j, wj in enumerate(w):
        if wj != 0.0:
            out += wj * np.roll(F, -(j - m), axis=axis)
    return out / h**k


def sample_grid(S: float, grid_n: int) -> np.ndarray:
    """Uniform periodic grid -S + j*2S/grid_n, j = 0..grid_n-1."""
    return -S + 2 * S * np.arange(grid_n) / grid_n


def derivative_l1_norms(fn2d, S: float, k: int, grid_n: int = 512,
                        safety: float = 2.0) -> DerivativeNorms:
    """Finite-difference estimates of the norms entering the Fourier tail bounds.

    ``fn2d(E1, E2)`` is evaluated on a uniform periodic grid; derivatives use
    central differences and the normalised L1 norm is the grid mean (the
    trapezoidal rule on a periodic grid).  Derivative norms are multiplied by
    ``safety``; the plain L1 norm is not.
    """
    if grid_n < 64:
        raise ParameterError(f"grid_n must be >= 64, got {grid_n}")
    if k < 1:
        raise ParameterError(f"k must be >= 1, got {k}")
    E = sample_grid(S, grid_n)
    F = np.asarray(fn2d(E[:, None], E[None, :]))
    F = np.broadcast_to(F, (grid_n, grid_n))
    if not np.all(np.isfinite(F)):
        raise NumericError("non-finite samples in derivative norm estimate")
    h = 2 * S / grid_n
    D1 = _periodic_derivative(F, k, h, axis=0)
    D2 = _periodic_derivative(F, k, h, axis=1)
    Dkk = _periodic_derivative(D1, k, h, axis=1)
    return DerivativeNorms(
        d1=safety * float(np.mean(np.abs(D1))),
        d2=safety * float(np.mean(np.abs(D2))),
        dkk=safety * float(np.mean(np.abs(Dkk))),
        l1=float(np.mean(np.abs(F))),
        k=k,
    )
