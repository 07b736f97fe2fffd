"""Plain-text dumps of matrices and generators."""

from __future__ import annotations

import hashlib
import json
from pathlib import Path

import numpy as np

from .generator import LindbladGenerator

VEC_CONVENTION = "column-stacking"


def config_hash(config: dict) -> str:
    blob = json.dumps(config, sort_keys=True, separators=(",", ":"))
    return hashlib.sha256(blob.encode()).hexdigest()


def manifest_line(config: dict) -> str:
    return f"# config_sha256={config_hash(config)} vec={VEC_CONVENTION}"


def matrix_to_csv(A: np.ndarray) -> str:
    lines = ["i,j,re,im"]
    for (i, j), z in np.ndenumerate(A):
        lines.append(f"{i},{j},{float(z.real)!r},{float(z.imag)!r}")
    return "\n".join(lines) + "\n"


def matrix_from_csv(text: str) -> np.ndarray:
    rows = [r for r in text.splitlines() if r and not r.startswith("#")][1:]
    entries = [r.split(",") for r in rows]
    n = max(int(e[0]) for e in entries) + 1
    m = max(int(e[1]) for e in entries) + 1
    A = np.zeros((n, m), dtype=complex)
    for i, j, re, im in entries:
        A[int(i), int(j)] = complex(float(re), float(im))
    return A


def save_generator(gen: LindbladGenerator, directory, config: dict | None = None) -> Path:
    """Write jumps, coherent term and fixed point as CSVs plus manifest.json.

    With ``config`` every CSV starts with the manifest line and the JSON
    manifest records the config hash.
    """
    d = Path(directory)
    d.mkdir(parents=True, exist_ok=True)
    head = manifest_line(config) + "\n" if config is not None else ""
    for lab, L in zip(gen.labels, gen.jumps):
        (d / f"jump_{lab}.csv").write_text(head + matrix_to_csv(L))
    (d / "coherent.csv").write_text(head + matrix_to_csv(gen.coherent))
    (d / "sigma.csv").write_text(head + matrix_to_csv(gen.sigma))
    tr = gen.truncation
    manifest = {
        "mode": gen.mode,
        "M": tr.M if tr else None,
        "M_prime": tr.M_prime if tr else None,
        "S": gen.target.S,
        "k": gen.target.k,
        "eta": gen.target.params.get("eta"),
        "delta": gen.target.params.get("delta"),
        "beta": gen.target.params.get("beta"),
        "target": gen.target.label,
        "filter_C": gen.filter.C,
        "jumps": list(gen.labels),
        "vec": VEC_CONVENTION,
    }
    if config is not None:
        manifest["config_sha256"] = config_hash(config)
    (d / "manifest.json").write_text(json.dumps(manifest, indent=2, sort_keys=True) + "\n")
    return d


def load_generator_matrices(directory) -> dict:
    """Manifest plus the dumped matrices, keyed by file stem."""
    d = Path(directory)
    out = {"manifest": json.loads((d / "manifest.json").read_text())}
    for p in sorted(d.glob("*.csv")):
        out[p.stem] = matrix_from_csv(p.read_text())
    return out
