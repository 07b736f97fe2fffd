"""Block-encoding a truncated jump as a linear combination of unitaries.

Each truncated jump is sum_n g_n e^{i n1 tau H} A e^{i n2 tau H}.  Preparing
the index register with amplitudes sqrt(g_n)/sqrt(Z_g), selecting the unitary
term, and unpreparing with the conjugate amplitudes puts L/Z_g in the
top-left block.  Here the whole circuit is a dense matrix, so the block can
be read off and compared.

Run:  python3 demos/05_block_encoding.py
"""

import numpy as np

from kmsprep import (build_chain_hamiltonian, diagonalize, gibbs_phi, pauli_jump_set,
                     truncated_generator)
from kmsprep.verify import ancilla_counts, lcu_block_encoding

H = build_chain_hamiltonian("transverse_field_ising", 2, J=1.0, h=1.05)
spec = diagonalize(H)
props = pauli_jump_set(2)
target = gibbs_phi(1.0, spec.norm, spec.energy_bound)

for M in (2, 4, 8):
    gen = truncated_generator(spec, target, props, M, M)
    table = gen.truncation.g_table
    worst_dev, worst_unit = 0.0, 0.0
    for A, L_bar in zip(props, gen.jumps):
        be = lcu_block_encoding(table, spec, A)
        worst_dev = max(worst_dev, float(np.linalg.norm(be.block - L_bar / table.Z, 2)))
        worst_unit = max(worst_unit, be.unitarity_defect)
    print(f"M = {M}: unitary is {be.unitary.shape[0]}x{be.unitary.shape[1]}, "
          f"alpha = Z_g = {table.Z:.4f}, index qubits {be.index_qubits}")
    print(f"       max ||block - L/Z_g|| = {worst_dev:.1e}, max unitarity defect {worst_unit:.1e}")
    print(f"       ancillas: {ancilla_counts(M, M, len(props))}")
