"""How many Fourier modes does the time-domain construction need?

The jumps are sums over a (2M+1)^2 box of Fourier modes.  This script
compares the truncated generator with the exact one as M grows, next to the
analytic tail bound, and shows what the bound-driven order selection asks for.

Run:  python3 demos/04_truncation_orders.py
"""

import numpy as np

from kmsprep import (build_chain_hamiltonian, derivative_l1_norms, diagonalize,
                     exact_generator, gibbs_phi, pauli_jump_set, select_truncation,
                     truncated_generator)
from kmsprep.filters import FilterParams, g_hat_fn, w_hat_fn
from kmsprep.fourier import CapacityError, fourier_coefficients
from kmsprep.verify import check_truncation_bounds

H = build_chain_hamiltonian("transverse_field_ising", 2, J=1.0, h=1.05)
spec = diagonalize(H, margin=3.0)
props = pauli_jump_set(2)

for k in (2, 3):
    target = gibbs_phi(1.0, spec.norm, spec.energy_bound, k)
    filt = FilterParams.for_target(target)
    exact = exact_generator(spec, target, props, filt)
    ng = derivative_l1_norms(g_hat_fn(target, filt), target.S, k)
    nw = derivative_l1_norms(w_hat_fn(target), target.S, k)
    print(f"\nk = {k}:   M   max jump error   jump bound   coherent error   coherent bound")
    for M in (4, 8, 16, 32, 64):
        checks = {c.label: c for c in check_truncation_bounds(
            exact, truncated_generator(spec, target, props, M, M, filt), ng, nw)}
        jumps = [c for lab, c in checks.items() if lab.startswith("jump_")]
        co = checks["coherent"]
        print(f"        {M:3d}   {max(c.measured for c in jumps):.3e}       "
              f"{max(c.bound for c in jumps):.3e}    {co.measured:.3e}        {co.bound:.3e}")

# Order selection from the bounds alone.  The bounds are worst-case and the
# table above shows they overshoot by orders of magnitude, so a tight error
# at beta = 1 asks for an impractical order while a loose one at high
# temperature is cheap.
for beta, eps in ((1.0, 1e-2), (0.1, 0.5)):
    target = gibbs_phi(beta, spec.norm, spec.energy_bound)
    filt = FilterParams.for_target(target)
    gfn = g_hat_fn(target, filt)
    ng = derivative_l1_norms(gfn, target.S, 2)
    nw = derivative_l1_norms(w_hat_fn(target), target.S, 2)
    Z = fourier_coefficients(gfn, target.S, 64).Z
    try:
        M, Mp = select_truncation(eps, 2, target.S, ng, nw, len(props), g_l1=Z)
        print(f"\nbeta = {beta}, eps = {eps}: M = {M}, M' = {Mp}")
    except CapacityError as exc:
        print(f"\nbeta = {beta}, eps = {eps}: {exc}")
