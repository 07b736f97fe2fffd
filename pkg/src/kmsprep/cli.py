"""Command-line entry point: ``kmsprep {verify,prepare,sweep,encode-check}``."""

from __future__ import annotations

import argparse
import json
import sys
from dataclasses import replace
from pathlib import Path

from . import io, verify
from .config import (SWEEP_COLUMNS, ConfigError, ExperimentConfig, build_instance,
                     run_prepare, run_sweep, run_verification)
from .filters import g_hat_fn
from .fourier import fourier_coefficients

EXIT_OK, EXIT_FAIL, EXIT_CONFIG = 0, 1, 2


def _load(args) -> ExperimentConfig:
    cfg = ExperimentConfig.load(args.config)
    if args.seed is not None:
        cfg = replace(cfg, seed=args.seed)
    return cfg


def _outdir(args) -> Path:
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    return out


def cmd_verify(args) -> int:
    cfg = _load(args)
    report, exact, trunc = run_verification(cfg, negative_control=args.negative_control)
    out = _outdir(args)
    manifest = io.manifest_line(cfg.to_dict())
    (out / "report.txt").write_text(manifest + "\n" + report.to_text())
    (out / "report.csv").write_text(manifest + "\n" + report.to_csv())
    io.save_generator(exact, out / "generator_exact", cfg.to_dict())
    io.save_generator(trunc, out / "generator_truncated", cfg.to_dict())
    status = "PASS" if report.passed else "FAIL"
    failed = [k for k, ok in report.flags.items() if not ok]
    print(f"verify: {status}" + (f" ({', '.join(failed)})" if failed else ""))
    return EXIT_OK if report.passed else EXIT_FAIL


def cmd_prepare(args) -> int:
    cfg = _load(args)
    out = _outdir(args)
    manifest = io.manifest_line(cfg.to_dict())
    ok = True
    for traj in run_prepare(cfg):
        (out / f"trajectory_{traj.initial_state_label}.csv").write_text(traj.to_csv(manifest))
        final = float(traj.trace_distances[-1])
        if cfg.prepare_threshold is not None and final > cfg.prepare_threshold:
            ok = False
        print(f"prepare: {traj.initial_state_label} final trace distance {final:.3e}")
    return EXIT_OK if ok else EXIT_FAIL


def cmd_sweep(args) -> int:
    cfg = _load(args)
    if not cfg.sweep:
        raise ConfigError(["sweep: missing {parameter, values} block"])
    rows = run_sweep(cfg, cfg.sweep["parameter"], cfg.sweep["values"])
    out = _outdir(args)
    lines = [io.manifest_line(cfg.to_dict()), f"# parameter={cfg.sweep['parameter']}",
             ",".join(SWEEP_COLUMNS)]
    lines += [",".join(r) for r in rows]
    (out / "sweep.csv").write_text("\n".join(lines) + "\n")
    passed = all(r[-1] == "true" for r in rows)
    print(f"sweep: {len(rows)} rows, {'all pass' if passed else 'some rows fail'}")
    return EXIT_OK if passed else EXIT_FAIL


def cmd_encode_check(args) -> int:
    cfg = _load(args)
    inst = build_instance(cfg)
    table = fourier_coefficients(g_hat_fn(inst.target, inst.filter), inst.target.S,
                                 cfg.encode_M, cfg.grid_n)
    lines = [io.manifest_line(cfg.to_dict()),
             "jump,M,alpha,index_qubits,deviation,unitarity_defect,pass"]
    ok = True
    for lab, A in zip(inst.proposals.labels, inst.proposals):
        be = verify.lcu_block_encoding(table, inst.spectrum, A)
        good = be.deviation <= verify.TOL_STRUCTURAL and be.unitarity_defect <= verify.TOL_STRUCTURAL
        ok &= good
        lines.append(f"{lab},{table.M},{be.alpha!r},{be.index_qubits},{be.deviation!r},"
                     f"{be.unitarity_defect!r},{str(good).lower()}")
    out = _outdir(args)
    (out / "encode_check.csv").write_text("\n".join(lines) + "\n")
    print(f"encode-check: {'PASS' if ok else 'FAIL'}")
    return EXIT_OK if ok else EXIT_FAIL


def build_parser() -> argparse.ArgumentParser:
    defaults = "\n".join(f"  {k} = {json.dumps(v)}"
                          for k, v in ExperimentConfig().to_dict().items())
    parser = argparse.ArgumentParser(
        prog="kmsprep", description="KMS-detailed-balance Lindbladian toolkit",
        epilog="config fields (JSON object) and their defaults:\n" + defaults,
        formatter_class=argparse.RawDescriptionHelpFormatter)
    sub = parser.add_subparsers(dest="command", required=True)
    for name, fn, help_ in (("verify", cmd_verify, "structural and truncation checks"),
                            ("prepare", cmd_prepare, "evolve initial states to the fixed point"),
                            ("sweep", cmd_sweep, "repeat verify over a parameter grid"),
                            ("encode-check", cmd_encode_check, "dense LCU block-encoding check")):
        p = sub.add_parser(name, help=help_)
        p.add_argument("--config", required=True, help="JSON config file")
        p.add_argument("--out", required=True, help="output directory")
        p.add_argument("--seed", type=int, default=None, help="override config seed")
        if name == "verify":
            p.add_argument("--negative-control", action="store_true",
                           help="use the filter power 1/2 that breaks detailed balance")
        p.set_defaults(func=fn)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except ConfigError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except (OSError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONFIG


if __name__ == "__main__":
    sys.exit(main())
