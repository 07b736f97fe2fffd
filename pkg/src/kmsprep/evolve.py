"""Time evolution under dense superoperators and window-state diagnostics."""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
from scipy.linalg import expm
from scipy.special import softmax

from .generator import Superoperator, dag, unvec, vec
from .spectral import HamiltonianSpectrum
from .statefn import TargetFunction, WindowSpec


def trace_distance(rho: np.ndarray, sigma: np.ndarray) -> float:
    """Half the trace norm of rho - sigma."""
    D = rho - sigma
    return float(0.5 * np.sum(np.abs(np.linalg.eigvalsh(0.5 * (D + dag(D))))))


def _clean(rho: np.ndarray) -> np.ndarray:
    herm = 0.5 * (rho + dag(rho))
    tr = np.trace(herm).real
    if abs(tr - 1.0) > 1e-12:
        herm = herm / tr
    return herm


def propagate(superop: Superoperator, rho0: np.ndarray, t: float) -> np.ndarray:
    """exp(t L) rho0 by dense scaling-and-squaring, re-Hermitised."""
    if rho0.shape != (superop.dim, superop.dim):
        raise ValueError(f"state of shape {rho0.shape} does not match dim {superop.dim}")
    if t < 0:
        raise ValueError(f"t must be >= 0, got {t}")
    if t == 0:
        return rho0.copy()
    return _clean(unvec(expm(t * superop.matrix) @ vec(rho0), superop.dim))


def kernel_state(superop: Superoperator) -> np.ndarray:
    """Trace-one state spanning the (numerically) smallest singular direction."""
    _, s, vh = np.linalg.svd(superop.matrix)
    rho = unvec(vh[-1].conj(), superop.dim)
    rho = 0.5 * (rho + dag(rho))
    return rho / np.trace(rho).real


def lindbladian_spectrum_diagnostics(superop: Superoperator, tol: float = 1e-9
                                     ) -> tuple[int, float]:
    """(kernel dimension, spectral gap) from the eigenvalues of the superoperator."""
    lam = np.linalg.eigvals(superop.matrix)
    zero = np.abs(lam) <= tol
    rest = lam[~zero]
    gap = float(-np.max(rest.real)) if rest.size else 0.0
    return int(np.count_nonzero(zero)), gap


def max_real_eigenvalue(superop: Superoperator) -> float:
    return float(np.max(np.linalg.eigvals(superop.matrix).real))


@dataclass
class Trajectory:
    times: np.ndarray
    trace_distances: np.ndarray
    observables: dict[str, np.ndarray] = field(default_factory=dict)
    initial_state_label: str = ""
    distances_to_target: np.ndarray | None = None

    def is_monotone(self, slack: float = 1e-9) -> bool:
        return bool(np.all(np.diff(self.trace_distances) <= slack))

    def to_csv(self, manifest: str = "") -> str:
        names = list(self.observables)
        head = ["t", "trace_distance"]
        if self.distances_to_target is not None:
            head.append("distance_to_sigma")
        lines = [manifest] if manifest else []
        lines.append(",".join(head + names))
        for i, t in enumerate(self.times):
            row = [repr(float(t)), repr(float(self.trace_distances[i]))]
            if self.distances_to_target is not None:
                row.append(repr(float(self.distances_to_target[i])))
            row += [repr(float(self.observables[n][i])) for n in names]
            lines.append(",".join(row))
        return "\n".join(lines) + "\n"


def trajectory(superop: Superoperator, rho0: np.ndarray, times, reference: np.ndarray,
               observables: dict[str, np.ndarray] | None = None, label: str = "",
               target: np.ndarray | None = None) -> Trajectory:
    """Evolve rho0 over sorted ``times``, stepping with cached propagators.

    Distances are to ``reference`` (the generator's own fixed point);
    ``target`` adds a second distance column, e.g. to sigma for a truncated
    generator.
    """
    times = np.asarray(times, dtype=float)
    if np.any(np.diff(times) < 0) or times[0] < 0:
        raise ValueError("times must be non-negative and sorted")
    observables = observables or {}
    cache: dict[float, np.ndarray] = {}
    rho, t_prev = rho0.astype(complex), 0.0
    dists, tdists = [], []
    obs = {name: [] for name in observables}
    v = vec(rho)
    for t in times:
        dt = round(float(t - t_prev), 12)
        if dt > 0:
            if dt not in cache:
                cache[dt] = expm(dt * superop.matrix)
            v = cache[dt] @ v
        rho = _clean(unvec(v, superop.dim))
        t_prev = t
        dists.append(trace_distance(rho, reference))
        if target is not None:
            tdists.append(trace_distance(rho, target))
        for name, O in observables.items():
            obs[name].append(float(np.trace(O @ rho).real))
    return Trajectory(times, np.array(dists), {k: np.array(v) for k, v in obs.items()},
                      label, np.array(tdists) if target is not None else None)


@dataclass(frozen=True)
class MicrocanonicalError:
    exact_distance: float
    eta_mass: float
    edge_mass: float
    window_fraction: float
    kappa: float | None
    degenerate: bool = False

    @property
    def bound(self) -> float:
        """(eta * mass outside [b-delta, c+delta] + edge mass) / normalised window count."""
        if self.window_fraction == 0:
            return math.inf
        return (self.eta_mass + self.edge_mass) / self.window_fraction


def sharp_window_state(spec: HamiltonianSpectrum, b: float, c: float) -> np.ndarray:
    inside = ((spec.eigenvalues >= b) & (spec.eigenvalues <= c)).astype(float)
    return spec.function(inside / inside.sum())


def microcanonical_error(spec: HamiltonianSpectrum, window: WindowSpec,
                         target: TargetFunction) -> MicrocanonicalError:
    """Trace distance between the sharp window state and f(H)/Tr f(H).

    The diagnostic terms use the normalised spectral measure; ``kappa`` is
    the ratio of the exact distance to their combination.
    """
    E = spec.eigenvalues
    b, c, d = window.b, window.c, window.delta
    inside = (E >= b) & (E <= c)
    edges = ((E >= b - d) & (E < b)) | ((E > c) & (E <= c + d))
    far = ~(inside | edges)
    n = len(E)
    window_fraction = inside.sum() / n
    eta_mass = window.eta * far.sum() / n
    edge_mass = edges.sum() / n
    if window_fraction == 0:
        return MicrocanonicalError(math.nan, eta_mass, edge_mass, 0.0, None, degenerate=True)
    phi = target.phi(E)
    w = np.exp(phi - phi.max())
    p_f = w / w.sum()
    p_chi = inside / inside.sum()
    exact = float(0.5 * np.sum(np.abs(p_f - p_chi)))
    bound = (eta_mass + edge_mass) / window_fraction
    kappa = exact / bound if bound > 0 else (0.0 if exact == 0 else math.inf)
    return MicrocanonicalError(exact, eta_mass, edge_mass, float(window_fraction), kappa)


def gibbs_state(spec: HamiltonianSpectrum, beta: float) -> np.ndarray:
    return spec.function(softmax(-beta * spec.eigenvalues))


def level_spacing(spec: HamiltonianSpectrum, energy: float, neighbours: int = 4) -> float:
    """Mean gap between distinct levels closest to ``energy``."""
    levels = np.unique(np.round(spec.eigenvalues, 10))
    if levels.size < 2:
        return 1.0
    gaps = np.diff(levels)
    mids = 0.5 * (levels[1:] + levels[:-1])
    order = np.argsort(np.abs(mids - energy))[:neighbours]
    return float(np.mean(gaps[order]))


@dataclass(frozen=True)
class ComparisonRow:
    observable: str
    gibbs: float
    window: float

    @property
    def difference(self) -> float:
        return self.window - self.gibbs


def ensemble_comparison(spec: HamiltonianSpectrum, beta: float,
                        observables: dict[str, np.ndarray],
                        window_width: float | None = None,
                        center: float | None = None) -> tuple[list[ComparisonRow], float, float]:
    """Gibbs vs sharp-window expectations of each observable.

    The window is centred on the Gibbs mean energy unless ``center`` is given;
    an empty window is doubled until it catches a level.  Returns the rows,
    the centre and the final width.
    """
    rho_beta = gibbs_state(spec, beta)
    if center is None:
        center = float(np.sum(softmax_weights(spec, beta) * spec.eigenvalues))
    if window_width is None:
        window_width = 4 * level_spacing(spec, center)
    width = float(window_width)
    while True:
        b, c = center - width / 2, center + width / 2
        if np.any((spec.eigenvalues >= b) & (spec.eigenvalues <= c)):
            break
        width *= 2
    rho_win = sharp_window_state(spec, b, c)
    rows = [ComparisonRow(name, float(np.trace(O @ rho_beta).real),
                          float(np.trace(O @ rho_win).real))
            for name, O in observables.items()]
    return rows, center, width


def softmax_weights(spec: HamiltonianSpectrum, beta: float) -> np.ndarray:
    return softmax(-beta * spec.eigenvalues)


def comparison_csv(rows: list[ComparisonRow], manifest: str = "") -> str:
    lines = [manifest] if manifest else []
    lines.append("observable,gibbs,window,difference")
    lines += [f"{r.observable},{r.gibbs!r},{r.window!r},{r.difference!r}" for r in rows]
    return "\n".join(lines) + "\n"
