"""Canonical versus microcanonical expectations.

The Gibbs state at inverse temperature beta is compared with a sharp energy
window centred on its mean energy.  The window is half as wide as the
canonical energy spread, so it holds a fixed fraction of the thermally
relevant levels.  As the chain grows the local expectations of the two
ensembles approach each other, with sizeable finite-size scatter for the
shortest chains.  This is why window states are a reasonable stand-in target
for thermal physics.

Run:  python3 demos/06_ensemble_comparison.py
"""

import numpy as np

from kmsprep import build_chain_hamiltonian, diagonalize
from kmsprep.evolve import ensemble_comparison, softmax_weights
from kmsprep.spectral import site_operator

Z = np.diag([1.0, -1.0]).astype(complex)
X = np.array([[0, 1], [1, 0]], dtype=complex)
beta = 0.5

for n in (2, 4, 6, 8, 10):
    H = build_chain_hamiltonian("transverse_field_ising", n, J=1.0, h=1.05)
    spec = diagonalize(H)
    p, E = softmax_weights(spec, beta), spec.eigenvalues
    spread = float(np.sqrt(p @ E**2 - (p @ E) ** 2))
    obs = {"Z0 Z1": site_operator(Z, 0, n) @ site_operator(Z, 1, n),
           "X0": site_operator(X, 0, n), "H/n": H / n}
    rows, center, width = ensemble_comparison(spec, beta, obs, window_width=0.5 * spread)
    inside = int(np.sum(np.abs(E - center) <= width / 2))
    print(f"n = {n:2d}: window [{center - width / 2:.3f}, {center + width / 2:.3f}] "
          f"holds {inside} of {len(E)} levels")
    for r in rows:
        print(f"   {r.observable:6s} gibbs {r.gibbs:+.4f}   window {r.window:+.4f}   "
              f"diff {r.difference:+.4f}")
