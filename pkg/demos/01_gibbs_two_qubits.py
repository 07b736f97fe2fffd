"""Thermal state of a two-qubit transverse-field Ising chain.

We build the exact KMS-detailed-balanced Lindbladian for f(H) = exp(-beta H),
check that it satisfies detailed balance and leaves the Gibbs state fixed,
then follow a product state as it relaxes.

Run:  python3 demos/01_gibbs_two_qubits.py
"""

import numpy as np

from kmsprep import (assemble_superoperator, build_chain_hamiltonian, diagonalize,
                     exact_generator, gibbs_phi, pauli_jump_set)
from kmsprep.evolve import gibbs_state, trace_distance, trajectory
from kmsprep.verify import check_kms_condition, check_kms_self_adjoint, stationarity_residual

beta = 1.0
H = build_chain_hamiltonian("transverse_field_ising", 2, J=1.0, h=1.05)
spec = diagonalize(H, margin=3.0)
target = gibbs_phi(beta, spec.norm, spec.energy_bound)
gen = exact_generator(spec, target, pauli_jump_set(2))
L = assemble_superoperator(gen)

print(f"levels: {np.round(spec.eigenvalues, 4)}")
print(f"S = {target.S:.3f}, filter C = {gen.filter.C:.2f}")
print(f"max KMS residual over {len(gen.jumps)} jumps: "
      f"{max(check_kms_condition(A, gen.sigma) for A in gen.jumps):.2e}")
print(f"KMS self-adjointness defect: {check_kms_self_adjoint(L, gen.sigma):.2e}")
print(f"stationarity ||L(sigma)||: {stationarity_residual(L, gen.sigma):.2e}")
print(f"sigma vs exp(-beta H)/Z: {trace_distance(gen.sigma, gibbs_state(spec, beta)):.2e}")

rho0 = np.zeros((4, 4), dtype=complex)
rho0[0, 0] = 1.0
times = np.linspace(0.0, 60.0, 7)
traj = trajectory(L, rho0, times, gen.sigma, label="|00>")
print("\n   t    ||rho(t) - sigma||_1")
for t, d in zip(traj.times, traj.trace_distances):
    print(f"{t:5.1f}   {d:.3e}")
print(f"monotone: {traj.is_monotone()}")
