"""Preparing a smooth microcanonical window state.

The target is f(H) = exp(Phi(H)) with Phi = 0 on [b, c], Phi = log(eta)
far away, and a C^k smoothstep ramp of width delta in between.  The window
below keeps the two lowest levels of a weakly coupled chain and suppresses
the rest by eta.

Run:  python3 demos/02_window_state.py
"""

import numpy as np

from kmsprep import (WindowSpec, assemble_superoperator, build_chain_hamiltonian,
                     diagonalize, exact_generator, pauli_jump_set, window_phi)
from kmsprep.evolve import lindbladian_spectrum_diagnostics, trajectory
from kmsprep.spectral import HamiltonianSpectrum

H = build_chain_hamiltonian("transverse_field_ising", 2, J=0.25, h=0.25)
spec = diagonalize(H)
window = WindowSpec(b=-0.609, c=-0.2, delta=1.0, eta=0.01)
S = max(spec.energy_bound, window.reach)
spec = HamiltonianSpectrum(spec.eigenvalues, spec.eigenbasis, S)
target = window_phi(window, S)

E = spec.eigenvalues
print("level     Phi(E)      f(E)")
for e, p in zip(E, target.phi(E)):
    print(f"{e:7.4f}  {p:9.4f}  {np.exp(p):.4f}")

gen = exact_generator(spec, target, pauli_jump_set(2))
L = assemble_superoperator(gen)
kernel_dim, gap = lindbladian_spectrum_diagnostics(L)
print(f"\nkernel dimension {kernel_dim}, spectral gap {gap:.4f}")
print(f"populations of sigma in the eigenbasis: "
      f"{np.round(np.diag(spec.to_eigenbasis(gen.sigma)).real, 6)}")

times = np.linspace(0.0, 200.0, 9)
traj = trajectory(L, np.eye(4, dtype=complex) / 4, times, gen.sigma, label="I/4")
print("\n   t    distance to sigma")
for t, d in zip(traj.times, traj.trace_distances):
    print(f"{t:5.0f}   {d:.3e}")
# The decay rate is set by the gap: exp(-0.108 * 200) ~ 4e-10 times the start.
