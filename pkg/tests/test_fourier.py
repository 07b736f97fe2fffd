import math

import numpy as np
import pytest

from kmsprep.filters import FilterParams, g_hat_fn, nu, w_hat_fn
from kmsprep.fourier import (M_MAX, CapacityError, FourierTable, fourier_coefficients,
                             l1_bound, reconstruct, select_truncation, tail_bound)
from kmsprep.statefn import (DerivativeNorms, ParameterError, WindowSpec,
                             derivative_l1_norms, gibbs_phi, window_phi)

S = 2.0
TAU = math.pi / S


def ones(a, b):
    return np.ones(np.broadcast(a, b).shape)


def off_box(coeffs, keep):
    mask = np.ones(coeffs.shape, bool)
    M = coeffs.shape[0] // 2
    for n1, n2 in keep:
        mask[n1 + M, n2 + M] = False
    return np.abs(coeffs[mask])


def test_constant_function():
    t = fourier_coefficients(ones, S, 4)
    assert t[0, 0] == pytest.approx(1.0, abs=1e-13)
    assert np.max(off_box(t.coeffs, [(0, 0)])) <= 1e-13
    assert t.Z == pytest.approx(1.0)


def test_single_mode():
    t = fourier_coefficients(lambda a, b: np.exp(1j * TAU * (a - b)), S, 4)
    assert t[1, -1] == pytest.approx(1.0, abs=1e-13)
    assert np.max(off_box(t.coeffs, [(1, -1)])) <= 1e-13
    E = np.random.default_rng(0).uniform(-S, S, (2, 20))
    np.testing.assert_allclose(reconstruct(t, *E), np.exp(1j * TAU * (E[0] - E[1])), atol=1e-13)


def test_refinement_oracle():
    p = FilterParams(4.0, S)
    fn = lambda a, b: nu(p, a - b)
    coarse = fourier_coefficients(fn, S, 16, 256)
    fine = fourier_coefficients(fn, S, 16, 1024)
    scale = np.max(np.abs(fine.coeffs))
    np.testing.assert_allclose(coarse.coeffs, fine.coeffs, atol=1e-10 * scale)


def test_aliasing_guard():
    with pytest.raises(ParameterError):
        fourier_coefficients(ones, S, 16, 64)
    with pytest.raises(ParameterError):
        fourier_coefficients(ones, S, 4, 96)


def test_z_matches_stored_coefficients():
    t = fourier_coefficients(lambda a, b: np.cos(TAU * a) + 0.5j * np.sin(2 * TAU * b), S, 3)
    assert t.Z == pytest.approx(np.sum(np.abs(t.coeffs)), rel=1e-12)
    assert t.Z == pytest.approx(1.0 + 0.5, rel=1e-12)


@pytest.fixture(scope="module")
def window_tables():
    target = window_phi(WindowSpec(-0.5, 0.5, 0.5, 1e-3), S, 2)
    filt = FilterParams.for_target(target)
    g = fourier_coefficients(g_hat_fn(target, filt), S, 64, 1024)
    w = fourier_coefficients(w_hat_fn(target), S, 64, 1024)
    return target, filt, g, w


def test_parseval(window_tables):
    target, filt, g, _ = window_tables
    E = np.linspace(-S, S, 1024, endpoint=False)
    mean_sq = np.mean(np.abs(g_hat_fn(target, filt)(E[:, None], E[None, :]))**2)
    assert np.sum(np.abs(g.coeffs)**2) <= mean_sq + 1e-10


def test_conjugate_symmetry(window_tables):
    _, _, g, w = window_tables
    # w(E2, E1) = conj(w(E1, E2))  =>  c[n1, n2] = conj(c[-n2, -n1])
    np.testing.assert_allclose(w.coeffs, np.conj(w.coeffs[::-1, ::-1].T), atol=1e-12)
    # g is real but not symmetric  =>  c[n1, n2] = conj(c[-n1, -n2])
    np.testing.assert_allclose(g.coeffs, np.conj(g.coeffs[::-1, ::-1]), atol=1e-12)


def test_window_l1_bound(window_tables):
    target, filt, g, _ = window_tables
    norms = derivative_l1_norms(g_hat_fn(target, filt), S, 2, 512)
    assert g.Z <= l1_bound(S, 2, norms)


def test_coefficient_decay_slope():
    target = window_phi(WindowSpec(-0.5, 0.5, 0.5, 1e-3), S, 2)
    t = fourier_coefficients(g_hat_fn(target, FilterParams.for_target(target)), S, 128, 2048)
    Ms = np.array([16, 24, 32, 48, 64, 96, 128])
    ring = []
    for M in Ms:
        inner = np.abs(t.truncate(M).coeffs)
        box = inner.copy()
        box[1:-1, 1:-1] = 0.0
        ring.append(np.max(box))
    slope = np.polyfit(np.log(Ms), np.log(ring), 1)[0]
    assert abs(slope - (-2)) <= 0.5 or slope < -2


def test_tail_bound_examples():
    assert tail_bound(S, 2, 8, DerivativeNorms.zero(2)) == 0.0
    n = DerivativeNorms(1.0, 2.0, 3.0, 1.0, 3)
    assert tail_bound(S, 3, 16, n) / tail_bound(S, 3, 8, n) == pytest.approx(2.0**(1 - 3))
    assert tail_bound(S, 3, 9, n) < tail_bound(S, 3, 8, n)
    with pytest.raises(ParameterError):
        tail_bound(S, 1, 8, n)
    with pytest.raises(ParameterError):
        tail_bound(S, 2, 0, n)


def test_tail_bound_formula():
    n = DerivativeNorms(0.7, 0.9, 1.3, 1.0, 2)
    env = 8 / TAU**2 * 1.3 + 0.7 + 0.9
    assert tail_bound(S, 2, 5, n) == pytest.approx(env * 2 * 5**-1 / TAU**2)


def test_l1_bound_examples():
    assert l1_bound(S, 2, DerivativeNorms.zero(2)) == pytest.approx(20.0)
    base = DerivativeNorms(1.0, 1.0, 1.0, 1.0, 2)
    for field in ("d1", "d2", "dkk", "l1"):
        bumped = DerivativeNorms(**{**base.__dict__, field: 2.0})
        assert l1_bound(S, 2, bumped) > l1_bound(S, 2, base)


def test_select_truncation_trivial():
    z = DerivativeNorms.zero(2)
    assert select_truncation(0.1, 2, S, z, z, 3) == (1, 1)


def test_select_truncation_halving_eps():
    n = DerivativeNorms(0.05, 0.05, 0.01, 0.5, 3)
    M1, Mp1 = select_truncation(0.2, 3, S, n, n, 2, g_l1=0.5)
    M2, Mp2 = select_truncation(0.1, 3, S, n, n, 2, g_l1=0.5)
    growth = 2 ** (1 / (3 - 1))
    assert M2 <= math.ceil(growth * M1) + 1 and Mp2 <= math.ceil(growth * Mp1) + 1
    assert M2 >= M1 and Mp2 >= Mp1


def test_select_truncation_meets_bounds():
    n = DerivativeNorms(0.05, 0.05, 0.01, 0.5, 3)
    eps, k = 0.1, 3
    M, Mp = select_truncation(eps, k, S, n, n, 2, g_l1=0.5)
    assert tail_bound(S, k, M, n) <= eps / 2
    assert 2 * 0.5**2 / 2 * tail_bound(S, k, Mp, n) <= eps / 2
    if M > 1:
        assert tail_bound(S, k, M - 1, n) > min(eps / 2, tail_bound(S, k, M, n))


def test_select_truncation_capacity():
    n = DerivativeNorms(1e6, 1e6, 1e6, 1.0, 2)
    with pytest.raises(CapacityError):
        select_truncation(1e-3, 2, S, n, n, 6)


def test_select_truncation_eps_range():
    z = DerivativeNorms.zero(2)
    with pytest.raises(ParameterError):
        select_truncation(1.0, 2, S, z, z, 3)


def test_reconstruct_within_tail_bound():
    target = gibbs_phi(0.1, 1.0, S, 2)
    filt = FilterParams.for_target(target)
    fn = g_hat_fn(target, filt)
    ng = derivative_l1_norms(fn, S, 2, 512)
    nw = derivative_l1_norms(w_hat_fn(target), S, 2, 512)
    big = fourier_coefficients(fn, S, 256, 4096)
    M, _ = select_truncation(0.5, 2, S, ng, nw, 3, g_l1=big.Z)
    table = big.truncate(min(M, 256))
    E = np.random.default_rng(3).uniform(-S, S, (2, 100))
    err = np.abs(reconstruct(table, *E) - fn(*E))
    assert np.max(err) <= tail_bound(S, 2, table.M, ng)


def test_reconstruct_constant():
    t = fourier_coefficients(ones, S, 2)
    E = np.linspace(-S, S, 7)
    np.testing.assert_allclose(reconstruct(t, E, E[::-1]), 1.0, atol=1e-13)


def test_csv_round_trip(tmp_path):
    t = fourier_coefficients(lambda a, b: np.exp(1j * TAU * a) * np.cos(TAU * b) + 0.3, S, 3)
    path = tmp_path / "table.csv"
    t.to_csv(path)
    lines = path.read_text().splitlines()
    assert lines[0] == "tau,M,grid_n" and lines[2] == "n1,n2,re,im"
    back = FourierTable.from_csv(path)
    np.testing.assert_array_equal(back.coeffs, t.coeffs)
    assert (back.tau, back.M, back.grid_n) == (t.tau, t.M, t.grid_n)


def test_truncate_and_tail_mass():
    t = fourier_coefficients(lambda a, b: np.exp(2j * TAU * a) + np.exp(-1j * TAU * b), S, 4)
    assert t.truncate(1).Z == pytest.approx(1.0, abs=1e-12)
    assert t.tail_mass(1) == pytest.approx(1.0, abs=1e-12)
    assert t.tail_mass(4) == 0.0
    with pytest.raises(ParameterError):
        t.truncate(5)


def test_m_max_constant():
    assert M_MAX == 2**20
