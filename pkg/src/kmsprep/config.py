"""Experiment configuration and the end-to-end pipelines behind the CLI."""

from __future__ import annotations

import json
import math
import os
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass, field, replace
from pathlib import Path

import numpy as np

from . import evolve, verify
from .filters import FilterParams, g_hat_fn, w_hat_fn
from .fourier import CapacityError, select_truncation
from .generator import (LindbladGenerator, assemble_superoperator, exact_generator,
                        truncated_generator)
from .spectral import (MAX_SITES, PAULIS, HamiltonianSpectrum, JumpProposalSet,
                       build_chain_hamiltonian, diagonalize, pauli_jump_set, site_operator)
from .statefn import (TargetFunction, WindowSpec, constant_phi, derivative_l1_norms,
                      gibbs_phi, window_phi)

MODELS = ("transverse_field_ising", "heisenberg_xxz")
TARGETS = ("gibbs", "window", "constant")
SWEEP_PARAMETERS = ("M", "delta", "eta", "beta")


class ConfigError(ValueError):
    def __init__(self, problems: list[str]):
        super().__init__("invalid config:\n  " + "\n  ".join(problems))
        self.problems = problems


@dataclass(frozen=True)
class ExperimentConfig:
    """All knobs of one experiment; ``validate`` runs before any numerics."""

    model: str = "transverse_field_ising"
    n_sites: int = 1
    couplings: dict = field(default_factory=lambda: {"J": 1.0, "h": 1.0})
    target: dict = field(default_factory=lambda: {"kind": "gibbs", "beta": 1.0})
    k: int = 2
    margin: float = 1.2
    filter_C: float | None = None
    epsilon: float = 0.1
    M: int | None = 8
    M_prime: int | None = 8
    max_M: int = 32
    grid_n: int | None = None
    norm_grid_n: int = 512
    jump_axes: str = "XYZ"
    encode_M: int = 4
    cptp_times: tuple = (0.1, 1.0, 10.0)
    times: tuple = tuple(float(t) for t in range(0, 201, 5))
    initial_states: tuple = ("maximally_mixed", "basis0")
    prepare_mode: str = "exact"
    prepare_threshold: float | None = None
    observables: tuple = ("Z0", "X0")
    trials: int = 20
    seed: int = 0
    sweep: dict = field(default_factory=dict)

    @classmethod
    def from_dict(cls, raw: dict) -> "ExperimentConfig":
        known = {f for f in cls.__dataclass_fields__}
        problems = [f"{key}: unknown field" for key in sorted(set(raw) - known)]
        data = {key: val for key, val in raw.items() if key in known}
        for key in ("cptp_times", "times", "initial_states", "observables"):
            if key in data:
                data[key] = tuple(data[key])
        cfg = cls(**data)
        try:
            cfg.validate()
        except ConfigError as exc:
            problems += exc.problems
        if problems:
            raise ConfigError(problems)
        return cfg

    @classmethod
    def load(cls, path) -> "ExperimentConfig":
        try:
            raw = json.loads(Path(path).read_text())
        except json.JSONDecodeError as exc:
            raise ConfigError([f"config: not valid JSON ({exc})"]) from None
        return cls.from_dict(raw)

    def to_dict(self) -> dict:
        d = asdict(self)
        for key in ("cptp_times", "times", "initial_states", "observables"):
            d[key] = list(d[key])
        return d

    def validate(self) -> None:
        p: list[str] = []

        def finite(name, val):
            if not isinstance(val, (int, float)) or not math.isfinite(val):
                p.append(f"{name}: must be a finite number")
                return False
            return True

        if self.model not in MODELS:
            p.append(f"model: must be one of {MODELS}")
        if not isinstance(self.n_sites, int) or not 1 <= self.n_sites <= MAX_SITES:
            p.append(f"n_sites: must be an integer in [1, {MAX_SITES}]")
        for key, val in self.couplings.items():
            if key not in ("J", "h", "delta"):
                p.append(f"couplings.{key}: unknown coupling")
            else:
                finite(f"couplings.{key}", val)
        kind = self.target.get("kind")
        if kind not in TARGETS:
            p.append(f"target.kind: must be one of {TARGETS}")
        elif kind == "gibbs":
            if finite("target.beta", self.target.get("beta")) and self.target["beta"] < 0:
                p.append("target.beta: must be >= 0")
        elif kind == "window":
            ok = all(finite(f"target.{key}", self.target.get(key))
                     for key in ("b", "c", "delta", "eta"))
            if ok:
                if not self.target["b"] < self.target["c"]:
                    p.append("target.b: must be < target.c")
                if not self.target["delta"] > 0:
                    p.append("target.delta: must be > 0")
                if not 0 < self.target["eta"] < 1:
                    p.append("target.eta: must lie in (0, 1)")
        if not isinstance(self.k, int) or not 2 <= self.k <= 8:
            p.append("k: must be an integer in [2, 8]")
        if finite("margin", self.margin) and self.margin < 1:
            p.append("margin: must be >= 1")
        if kind == "gibbs" and isinstance(self.margin, (int, float)) and self.margin <= 1:
            p.append("margin: gibbs targets need margin > 1")
        if self.filter_C is not None and finite("filter_C", self.filter_C) and self.filter_C < 0:
            p.append("filter_C: must be >= 0")
        if finite("epsilon", self.epsilon) and not 0 < self.epsilon < 1:
            p.append("epsilon: must lie in (0, 1)")
        for name in ("M", "M_prime"):
            val = getattr(self, name)
            if val is not None and (not isinstance(val, int) or val < 1):
                p.append(f"{name}: must be a positive integer or null")
        if not isinstance(self.max_M, int) or self.max_M < 1:
            p.append("max_M: must be a positive integer")
        if not isinstance(self.encode_M, int) or self.encode_M < 0:
            p.append("encode_M: must be a non-negative integer")
        if self.grid_n is not None and (self.grid_n < 8 or self.grid_n & (self.grid_n - 1)):
            p.append("grid_n: must be a power of two >= 8 or null")
        if not isinstance(self.norm_grid_n, int) or self.norm_grid_n < 64:
            p.append("norm_grid_n: must be an integer >= 64")
        if not self.jump_axes or set(self.jump_axes) - set("XYZ"):
            p.append("jump_axes: letters from 'XYZ'")
        if any(not (isinstance(t, (int, float)) and t > 0) for t in self.cptp_times):
            p.append("cptp_times: positive numbers")
        ts = list(self.times)
        if not ts or any(not isinstance(t, (int, float)) or t < 0 for t in ts) or ts != sorted(ts):
            p.append("times: non-empty sorted list of non-negative numbers")
        for s in self.initial_states:
            if s not in ("maximally_mixed", "basis0", "ground"):
                p.append(f"initial_states: unknown state {s!r}")
        if self.prepare_mode not in ("exact", "truncated"):
            p.append("prepare_mode: 'exact' or 'truncated'")
        for name in self.observables:
            if not _valid_observable(name, self.n_sites):
                p.append(f"observables: cannot parse {name!r}")
        if not isinstance(self.trials, int) or self.trials < 10:
            p.append("trials: integer >= 10")
        if self.sweep:
            if self.sweep.get("parameter") not in SWEEP_PARAMETERS:
                p.append(f"sweep.parameter: one of {SWEEP_PARAMETERS}")
            if not isinstance(self.sweep.get("values"), list) or not self.sweep["values"]:
                p.append("sweep.values: non-empty list")
        if p:
            raise ConfigError(p)


def _valid_observable(name: str, n_sites) -> bool:
    if name == "H":
        return True
    if len(name) < 2 or name[0] not in PAULIS or not name[1:].isdigit():
        return False
    return isinstance(n_sites, int) and int(name[1:]) < n_sites


@dataclass
class Instance:
    """Everything derived from a config before any generator is built."""

    config: ExperimentConfig
    H: np.ndarray
    spectrum: HamiltonianSpectrum
    target: TargetFunction
    proposals: JumpProposalSet
    filter: FilterParams

    def observables(self) -> dict[str, np.ndarray]:
        out = {}
        for name in self.config.observables:
            out[name] = (self.H if name == "H"
                         else site_operator(PAULIS[name[0]], int(name[1:]), self.config.n_sites))
        return out


def build_instance(cfg: ExperimentConfig) -> Instance:
    H = build_chain_hamiltonian(cfg.model, cfg.n_sites, **cfg.couplings)
    spec = diagonalize(H, cfg.margin)
    t = cfg.target
    if t["kind"] == "window":
        window = WindowSpec(t["b"], t["c"], t["delta"], t["eta"])
        S = max(spec.energy_bound, window.reach)
        spec = HamiltonianSpectrum(spec.eigenvalues, spec.eigenbasis, S)
        target = window_phi(window, S, cfg.k)
    elif t["kind"] == "gibbs":
        target = gibbs_phi(t["beta"], spec.norm, spec.energy_bound, cfg.k)
    else:
        target = constant_phi(spec.energy_bound, cfg.k)
    proposals = pauli_jump_set(cfg.n_sites, cfg.jump_axes)
    return Instance(cfg, H, spec, target, proposals, FilterParams.for_target(target, cfg.filter_C))


def choose_orders(inst: Instance, norms_g, norms_w) -> tuple[int, int, bool]:
    """(M, M', guaranteed): explicit orders win; otherwise the analytic choice, capped."""
    cfg = inst.config
    if cfg.M is not None and cfg.M_prime is not None:
        return cfg.M, cfg.M_prime, False
    try:
        M, Mp = select_truncation(cfg.epsilon, cfg.k, inst.target.S, norms_g, norms_w,
                                  len(inst.proposals))
    except CapacityError:
        M = Mp = cfg.max_M + 1
    guaranteed = M <= cfg.max_M and Mp <= cfg.max_M
    M = cfg.M if cfg.M is not None else min(M, cfg.max_M)
    Mp = cfg.M_prime if cfg.M_prime is not None else min(Mp, cfg.max_M)
    return M, Mp, guaranteed


def run_verification(cfg: ExperimentConfig, negative_control: bool = False
                     ) -> tuple[verify.VerificationReport, LindbladGenerator, LindbladGenerator]:
    inst = build_instance(cfg)
    spec, target = inst.spectrum, inst.target
    exact = exact_generator(spec, target, inst.proposals, inst.filter,
                            negative_control=negative_control)
    sop = assemble_superoperator(exact, seed=cfg.seed)
    norms_g = derivative_l1_norms(g_hat_fn(target, inst.filter), target.S, cfg.k,
                                  cfg.norm_grid_n)
    norms_w = derivative_l1_norms(w_hat_fn(target), target.S, cfg.k, cfg.norm_grid_n)
    M, Mp, guaranteed = choose_orders(inst, norms_g, norms_w)
    trunc = truncated_generator(spec, target, inst.proposals, M, Mp, inst.filter,
                                cfg.grid_n, reference=exact)
    sop_t = assemble_superoperator(trunc, seed=cfg.seed)

    choi, trace_res = math.inf, 0.0
    for s in (sop, sop_t):
        for t in cfg.cptp_times:
            c, r = verify.check_cptp(s, t)
            choi, trace_res = min(choi, c), max(trace_res, r)

    tr = trunc.truncation
    encode_table = tr.g_table.truncate(min(cfg.encode_M, M))
    be_devs = []
    for A in inst.proposals:
        be = verify.lcu_block_encoding(encode_table, spec, A)
        be_devs.append(be.deviation)

    kernel_dim, gap = evolve.lindbladian_spectrum_diagnostics(sop)
    Z_g, Z_w = tr.g_table.Z, tr.w_table.Z
    extras = {
        "target": target.label,
        "negative_control": negative_control,
        "dim": spec.dim,
        "S": target.S,
        "k": target.k,
        "lipschitz": target.lipschitz,
        "filter_C": inst.filter.C,
        "M": M,
        "M_prime": Mp,
        "epsilon_guaranteed": guaranteed,
        "Z_g": Z_g,
        "Z_w": Z_w,
        "alpha_L": Z_g,
        "alpha_G": Z_g**2 * Z_w,
        "encode_M": encode_table.M,
        "kernel_dim": kernel_dim,
        "spectral_gap": gap,
        "max_real_eigenvalue": evolve.max_real_eigenvalue(sop),
    }
    extras.update(verify.ancilla_counts(M, Mp, len(inst.proposals)))
    if target.label == "window":
        extras["phi_tail_convention"] = "log(eta)"
    report = verify.VerificationReport(
        kms_jump_residuals=[verify.check_kms_condition(L, exact.sigma) for L in exact.jumps],
        kms_adjoint_residual=verify.check_kms_self_adjoint(sop, exact.sigma, cfg.trials,
                                                           cfg.seed),
        stationarity_residual=verify.stationarity_residual(sop, exact.sigma),
        cptp_min_choi_eigenvalue=choi,
        trace_preservation_residual=trace_res,
        block_encoding_deviation=be_devs,
        truncation=verify.check_truncation_bounds(exact, trunc, norms_g, norms_w),
        extras=extras,
    )
    return report, exact, trunc


def initial_state(name: str, spec: HamiltonianSpectrum) -> np.ndarray:
    d = spec.dim
    if name == "maximally_mixed":
        return np.eye(d, dtype=complex) / d
    if name == "basis0":
        rho = np.zeros((d, d), dtype=complex)
        rho[0, 0] = 1.0
        return rho
    psi = spec.eigenbasis[:, 0]
    return np.outer(psi, psi.conj())


def run_prepare(cfg: ExperimentConfig) -> list[evolve.Trajectory]:
    """Trajectories from every configured initial state.

    Exact mode measures distance to sigma.  Truncated mode measures distance
    to the truncated generator's own kernel state and adds a sigma column.
    """
    inst = build_instance(cfg)
    if cfg.prepare_mode == "exact":
        gen = exact_generator(inst.spectrum, inst.target, inst.proposals, inst.filter)
    else:
        gen = truncated_generator(inst.spectrum, inst.target, inst.proposals,
                                  cfg.M or cfg.max_M, cfg.M_prime or cfg.max_M, inst.filter,
                                  cfg.grid_n)
    sop = assemble_superoperator(gen, seed=cfg.seed)
    if cfg.prepare_mode == "exact":
        reference, extra = gen.sigma, None
    else:
        reference, extra = evolve.kernel_state(sop), gen.sigma
    out = []
    for name in cfg.initial_states:
        rho0 = initial_state(name, inst.spectrum)
        out.append(evolve.trajectory(sop, rho0, cfg.times, reference, inst.observables(),
                                     name, extra))
    return out


def sweep_configs(cfg: ExperimentConfig, parameter: str, values) -> list[tuple[float, ExperimentConfig]]:
    out = []
    for v in values:
        if parameter == "M":
            c = replace(cfg, M=int(v), M_prime=int(v))
        elif parameter in ("delta", "eta"):
            if cfg.target.get("kind") != "window":
                raise ConfigError([f"sweep.parameter: {parameter} needs a window target"])
            c = replace(cfg, target={**cfg.target, parameter: float(v)})
        elif parameter == "beta":
            if cfg.target.get("kind") != "gibbs":
                raise ConfigError(["sweep.parameter: beta needs a gibbs target"])
            c = replace(cfg, target={**cfg.target, "beta": float(v)})
        else:
            raise ConfigError([f"sweep.parameter: one of {SWEEP_PARAMETERS}"])
        c.validate()
        out.append((float(v), c))
    return sorted(out, key=lambda item: item[0])


SWEEP_COLUMNS = ("value", "kms_jump_max", "kms_adjoint", "stationarity", "jump_error_max",
                 "jump_bound", "coherent_error", "coherent_bound", "norm_d1_g", "norm_d2_g",
                 "norm_dkk_g", "Z_g", "Z_w", "pass")


def sweep_row(value: float, report: verify.VerificationReport, norms_g) -> list[str]:
    jumps = [c for c in report.truncation if c.label.startswith("jump_")]
    coh = [c for c in report.truncation if c.label == "coherent"][0]
    vals = [value, max(report.kms_jump_residuals), report.kms_adjoint_residual,
            report.stationarity_residual, max(c.measured for c in jumps), jumps[0].bound,
            coh.measured, coh.bound, norms_g.d1, norms_g.d2, norms_g.dkk,
            report.extras["Z_g"], report.extras["Z_w"]]
    return [repr(float(v)) for v in vals] + [str(report.passed).lower()]


def _sweep_point(item: tuple[float, ExperimentConfig]) -> list[str]:
    value, c = item
    report, _, _ = run_verification(c)
    inst = build_instance(c)
    norms_g = derivative_l1_norms(g_hat_fn(inst.target, inst.filter), inst.target.S, c.k,
                                  c.norm_grid_n)
    return sweep_row(value, report, norms_g)


def run_sweep(cfg: ExperimentConfig, parameter: str, values,
              workers: int | None = None) -> list[list[str]]:
    """One verification per value; rows come back sorted by value.

    Points are independent, so they go to a process pool when more than one
    CPU is available; each point is deterministic on its own.
    """
    points = sweep_configs(cfg, parameter, values)
    workers = min(workers or os.cpu_count() or 1, len(points))
    if workers <= 1:
        return [_sweep_point(p) for p in points]
    with ProcessPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(_sweep_point, points))
