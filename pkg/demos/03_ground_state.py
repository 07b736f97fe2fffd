"""Ground states as windows around an isolated level.

When the window contains only the ground energy and the ramp ends before the
next level, every excited level gets weight eta.  The fixed point is then
eta-close to the ground projector: with d - 1 excited levels the trace
distance is (d - 1) eta / (1 + (d - 1) eta).

Run:  python3 demos/03_ground_state.py
"""

import numpy as np

from kmsprep import (WindowSpec, assemble_superoperator, build_chain_hamiltonian,
                     diagonalize, exact_generator, pauli_jump_set, window_phi)
from kmsprep.evolve import microcanonical_error, trace_distance
from kmsprep.spectral import HamiltonianSpectrum
from kmsprep.verify import stationarity_residual

H = build_chain_hamiltonian("transverse_field_ising", 3, J=1.0, h=1.05)
spec = diagonalize(H)
E = spec.eigenvalues
gap = E[1] - E[0]
print(f"E0 = {E[0]:.4f}, gap = {gap:.4f}")

psi0 = spec.eigenbasis[:, 0]
ground = np.outer(psi0, psi0.conj())
delta = 0.5
print("\n   eta      ||sigma - |E0><E0| ||_1   predicted     stationarity")
for eta in (1e-2, 1e-4, 1e-6, 1e-10):
    window = WindowSpec(E[0] - 0.1, E[0] + 0.1, delta, eta)
    S = max(spec.energy_bound, window.reach)
    sp = HamiltonianSpectrum(E, spec.eigenbasis, S)
    gen = exact_generator(sp, window_phi(window, S), pauli_jump_set(3))
    L = assemble_superoperator(gen)
    predicted = 7 * eta / (1 + 7 * eta)
    print(f"{eta:8.0e}   {trace_distance(gen.sigma, ground):.6e}          "
          f"{predicted:.6e}   {stationarity_residual(L, gen.sigma):.1e}")

# The same accounting on a bare two-level system, where it is exact.
two = HamiltonianSpectrum(np.array([-1.0, 1.0]), np.eye(2, dtype=complex), 3.0)
w2 = WindowSpec(-1.5, -0.5, 0.5, 1e-6)
err = microcanonical_error(two, w2, window_phi(w2, 3.0))
print(f"\ntwo-level: distance {err.exact_distance:.12e}, eta/(1+eta) = {1e-6 / (1 + 1e-6):.12e}")
