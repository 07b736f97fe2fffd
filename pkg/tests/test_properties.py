"""Randomised invariants over small instances."""

import math

import numpy as np
from hypothesis import given, settings
from hypothesis import strategies as st
from hypothesis.extra.numpy import arrays

from kmsprep.evolve import trace_distance
from kmsprep.filters import FilterParams, g_hat, nu, w_hat
from kmsprep.fourier import l1_bound, tail_bound
from kmsprep.generator import assemble_superoperator, exact_generator, unvec, vec
from kmsprep.spectral import build_chain_hamiltonian, diagonalize, pauli_jump_set
from kmsprep.statefn import DerivativeNorms, WindowSpec, gibbs_phi, window_phi
from kmsprep.verify import check_kms_condition, check_kms_self_adjoint

finite = st.floats(-3, 3, allow_nan=False, allow_infinity=False)
positive = st.floats(0.05, 3, allow_nan=False)


@st.composite
def windows(draw):
    b = draw(st.floats(-1.5, 1.0))
    c = b + draw(st.floats(0.05, 1.5))
    delta = draw(st.floats(0.1, 1.0))
    eta = 10 ** draw(st.floats(-10, -0.5))
    w = WindowSpec(b, c, delta, eta)
    S = w.reach * draw(st.floats(1.0, 2.0))
    return window_phi(w, S, draw(st.integers(2, 4)))


@st.composite
def gibbs_targets(draw):
    Hn = draw(st.floats(0.2, 3.0))
    return gibbs_phi(draw(st.floats(0.0, 3.0)), Hn, Hn * draw(st.floats(1.05, 3.0)),
                     draw(st.integers(2, 4)))


targets = st.one_of(windows(), gibbs_targets())


@given(arrays(np.float64, (4, 4), elements=finite), arrays(np.float64, (4, 4), elements=finite),
       st.floats(1.0, 3.0))
def test_diagonalize_reconstructs(re, im, margin):
    H = re + re.T + 1j * (im - im.T)
    spec = diagonalize(H, margin)
    assert np.max(np.abs(spec.reconstruct() - H)) <= 1e-10 * max(1.0, np.max(np.abs(H)))
    assert spec.energy_bound >= np.max(np.abs(spec.eigenvalues))


@given(st.floats(0, 50), positive, st.floats(-20, 20))
def test_nu_properties(C, zeta, x):
    p = FilterParams(C, zeta)
    assert 0 < nu(p, x) <= math.exp(-1) + 1e-16
    assert abs(nu(p, x) - nu(p, -x)) <= 1e-14
    assert abs(nu(p, x + 2 * zeta) - nu(p, x)) <= 1e-13


@settings(max_examples=40, deadline=None)
@given(targets)
def test_g_hat_bounded(target):
    p = FilterParams.for_target(target)
    E = np.linspace(-target.S, target.S, 128, endpoint=False)
    G = g_hat(target, p, E[:, None], E[None, :])
    assert np.all(G > 0) and np.max(G) <= 1 + 1e-12


@settings(max_examples=40, deadline=None)
@given(targets, st.floats(-1, 1), st.floats(-1, 1))
def test_weight_symmetries(target, u, v):
    p = FilterParams.for_target(target)
    E1, E2 = u * target.S, v * target.S
    prod = g_hat(target, p, E1, E2) * g_hat(target, p, E2, E1)
    assert abs(prod - nu(p, E1 - E2) ** 2) <= 1e-12
    assert abs(w_hat(target, E2, E1) - np.conj(w_hat(target, E1, E2))) <= 1e-15
    assert abs(w_hat(target, E1, E2)) <= 1


@given(st.integers(2, 6), st.integers(1, 1000), st.floats(0, 10), st.floats(0, 10),
       st.floats(0, 10), positive)
def test_tail_bound_scaling(k, M, d1, d2, dkk, S):
    n = DerivativeNorms(d1, d2, dkk, 1.0, k)
    a, b = tail_bound(S, k, M, n), tail_bound(S, k, 2 * M, n)
    assert b <= a
    if a > 0:
        assert math.isclose(b / a, 2.0 ** (1 - k), rel_tol=1e-12)


@given(st.integers(2, 6), st.floats(0, 10), st.floats(0, 10), st.floats(0, 10),
       st.floats(0, 5), positive, st.floats(0.01, 5))
def test_l1_bound_monotone(k, d1, d2, dkk, l1, S, bump):
    n = DerivativeNorms(d1, d2, dkk, l1, k)
    base = l1_bound(S, k, n)
    assert base >= 10.0
    assert l1_bound(S, k, DerivativeNorms(d1 + bump, d2, dkk, l1, k)) >= base
    assert l1_bound(S, k, DerivativeNorms(d1, d2, dkk + bump, l1, k)) >= base


@settings(max_examples=15, deadline=None)
@given(st.integers(1, 2), st.floats(-1.5, 1.5), st.floats(0.2, 1.5), st.floats(0.0, 2.5))
def test_exact_generators_satisfy_detailed_balance(n, J, h, beta):
    spec = diagonalize(build_chain_hamiltonian("transverse_field_ising", n, J=J, h=h))
    target = gibbs_phi(beta, spec.norm, spec.energy_bound)
    gen = exact_generator(spec, target, pauli_jump_set(n))
    assert max(check_kms_condition(L, gen.sigma) for L in gen.jumps) <= 1e-9
    sop = assemble_superoperator(gen)
    assert check_kms_self_adjoint(sop, gen.sigma, trials=10) <= 1e-8
    assert np.linalg.norm(sop(gen.sigma)) <= 1e-9 * np.linalg.norm(sop.matrix)


@settings(max_examples=30)
@given(arrays(np.complex128, (3, 3), elements=st.complex_numbers(max_magnitude=5,
                                                                   allow_nan=False)))
def test_vec_round_trip(A):
    np.testing.assert_array_equal(unvec(vec(A), 3), A)


@given(arrays(np.float64, (3,), elements=st.floats(0.01, 1)),
       arrays(np.float64, (3,), elements=st.floats(0.01, 1)))
def test_trace_distance_metric(p, q):
    rho, sigma = np.diag(p / p.sum()), np.diag(q / q.sum())
    d = trace_distance(rho, sigma)
    assert 0 <= d <= 1 + 1e-15
    assert abs(d - trace_distance(sigma, rho)) <= 1e-15
    assert abs(d - 0.5 * np.sum(np.abs(p / p.sum() - q / q.sum()))) <= 1e-14
