import numpy as np
import pytest

from kmsprep.filters import FilterParams
from kmsprep.spectral import build_chain_hamiltonian, diagonalize, pauli_jump_set
from kmsprep.statefn import WindowSpec, gibbs_phi, window_phi


def tfim(n, J=1.0, h=1.05, margin=1.2):
    return diagonalize(build_chain_hamiltonian("transverse_field_ising", n, J=J, h=h), margin)


def gibbs_instance(n, beta, margin=1.2, k=2, J=1.0, h=1.05):
    spec = tfim(n, J, h, margin)
    target = gibbs_phi(beta, spec.norm, spec.energy_bound, k)
    return spec, target, pauli_jump_set(n), FilterParams.for_target(target)


def window_instance(n, b, c, delta, eta, k=2, J=1.0, h=1.05, margin=1.2):
    spec = tfim(n, J, h, margin)
    w = WindowSpec(b, c, delta, eta)
    S = max(spec.energy_bound, w.reach)
    spec = type(spec)(spec.eigenvalues, spec.eigenbasis, S)
    target = window_phi(w, S, k)
    return spec, target, pauli_jump_set(n), FilterParams.for_target(target)


@pytest.fixture
def rng():
    return np.random.default_rng(1234)


@pytest.fixture
def gibbs2():
    return gibbs_instance(2, 1.0)


# criterion number -> (passed, detail); filled by test_acceptance, printed at the end
ACCEPTANCE: dict[int, tuple[bool, str]] = {}


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for num in sorted(ACCEPTANCE):
        ok, detail = ACCEPTANCE[num]
        terminalreporter.write_line(f"criterion {num:2d}: {'PASS' if ok else 'FAIL'}  {detail}")
