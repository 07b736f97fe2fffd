"""Filter function and the jump / coherent weight functions.

The jump weight is g(E1, E2) = (f(E1)/f(E2))**(1/4) * nu(E1 - E2) and the
coherent weight is w(E1, E2) = i tanh((Phi(E1) - Phi(E2))/4).  Both are
evaluated in log-domain so that extreme floor weights cannot overflow.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .statefn import TargetFunction


@dataclass(frozen=True)
class FilterParams:
    C: float
    zeta: float

    def __post_init__(self):
        if self.C < 0:
            raise ValueError(f"filter strength C must be >= 0, got {self.C}")
        if not self.zeta > 0:
            raise ValueError(f"filter half-period zeta must be > 0, got {self.zeta}")

    @classmethod
    def for_target(cls, target: TargetFunction, C: float | None = None) -> "FilterParams":
        """C = L^2 S^2 / 32 and zeta = S unless ``C`` is given."""
        if C is None:
            C = target.lipschitz**2 * target.S**2 / 32.0
        return cls(C=float(C), zeta=float(target.S))


def log_nu(p: FilterParams, x) -> np.ndarray:
    x = np.asarray(x, dtype=float)
    return -np.sqrt(1.0 + p.C * (1.0 - np.cos(x * math.pi / p.zeta)))


def nu(p: FilterParams, x) -> np.ndarray:
    """exp(-sqrt(1 + C (1 - cos(pi x / zeta))))."""
    return np.exp(log_nu(p, x))


def g_hat(target: TargetFunction, p: FilterParams, E1, E2, power: float = 0.25) -> np.ndarray:
    """Jump weight; ``power`` other than 1/4 only serves negative controls."""
    E1 = np.asarray(E1, dtype=float)
    E2 = np.asarray(E2, dtype=float)
    return np.exp(power * (target.phi(E1) - target.phi(E2)) + log_nu(p, E1 - E2))


def w_hat(target: TargetFunction, E1, E2) -> np.ndarray:
    E1 = np.asarray(E1, dtype=float)
    E2 = np.asarray(E2, dtype=float)
    return 1j * np.tanh((target.phi(E1) - target.phi(E2)) / 4.0)


def g_hat_fn(target: TargetFunction, p: FilterParams, power: float = 0.25):
    """Two-argument closure over g_hat, for the Fourier and norm routines."""
    return lambda E1, E2: g_hat(target, p, E1, E2, power=power)


def w_hat_fn(target: TargetFunction):
    return lambda E1, E2: w_hat(target, E1, E2)
