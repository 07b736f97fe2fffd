import math

import numpy as np
import pytest

from kmsprep.filters import FilterParams, g_hat, g_hat_fn, log_nu, nu, w_hat
from kmsprep.statefn import WindowSpec, constant_phi, gibbs_phi, window_phi


def test_nu_examples():
    assert nu(FilterParams(3.0, 1.0), 0.0) == pytest.approx(math.exp(-1), abs=1e-15)
    assert nu(FilterParams(4.0, 2.0), 2.0) == pytest.approx(math.exp(-3), rel=1e-14)


def test_nu_periodic_and_even(rng):
    p = FilterParams(2.5, 1.7)
    x = rng.uniform(-10, 10, 200)
    np.testing.assert_allclose(nu(p, x + 2 * p.zeta), nu(p, x), atol=1e-14)
    np.testing.assert_allclose(nu(p, -x), nu(p, x), atol=1e-14)
    assert np.all((nu(p, x) > 0) & (nu(p, x) <= math.exp(-1)))


def test_filter_params_validation():
    with pytest.raises(ValueError):
        FilterParams(-1.0, 1.0)
    with pytest.raises(ValueError):
        FilterParams(1.0, 0.0)


def test_default_filter_strength():
    t = gibbs_phi(1.0, 1.0, 1.5)
    p = FilterParams.for_target(t)
    assert p.C == pytest.approx(t.lipschitz**2 * t.S**2 / 32)
    assert p.zeta == t.S
    assert FilterParams.for_target(t, C=7.0).C == 7.0


def test_g_hat_diagonal_and_constant(rng):
    t = constant_phi(2.0)
    p = FilterParams.for_target(t)
    assert p.C == 0.0
    E1, E2 = rng.uniform(-2, 2, (2, 50))
    np.testing.assert_allclose(g_hat(t, p, E1, E2), math.exp(-1), rtol=1e-15)
    tw = window_phi(WindowSpec(-0.5, 0.5, 0.5, 1e-4), 2.0)
    np.testing.assert_allclose(g_hat(tw, FilterParams.for_target(tw), E1, E1), math.exp(-1))


def test_g_hat_bounded_on_window_grid():
    t = window_phi(WindowSpec(-0.5, 0.5, 0.5, 1e-4), 2.0)
    E = np.linspace(-2, 2, 512, endpoint=False)
    G = g_hat(t, FilterParams.for_target(t), E[:, None], E[None, :])
    assert np.all(G > 0) and np.max(G) <= 1.0


def test_g_hat_detailed_balance_seed(rng):
    t = gibbs_phi(1.5, 1.0, 1.4)
    p = FilterParams.for_target(t)
    E1, E2 = rng.uniform(-1.4, 1.4, (2, 300))
    np.testing.assert_allclose(g_hat(t, p, E1, E2) * g_hat(t, p, E2, E1), nu(p, E1 - E2)**2,
                               rtol=1e-12)


def test_g_hat_periodic(rng):
    t = window_phi(WindowSpec(-0.3, 0.4, 0.4, 1e-3), 1.0)
    g = g_hat_fn(t, FilterParams.for_target(t))
    E1, E2 = rng.uniform(-1, 1, (2, 200))
    np.testing.assert_allclose(g(E1 + 2.0, E2), g(E1, E2), atol=1e-10)
    np.testing.assert_allclose(g(E1, E2 - 2.0), g(E1, E2), atol=1e-10)


def test_g_hat_log_domain_survives_tiny_eta():
    t = window_phi(WindowSpec(-0.3, 0.3, 0.2, 1e-12), 1.0)
    p = FilterParams.for_target(t)
    val = g_hat(t, p, np.array([0.0]), np.array([-0.9]))
    assert np.isfinite(val).all() and 0 < val[0] <= 1


def test_negative_control_power_changes_ratio():
    t = gibbs_phi(1.0, 1.0, 1.5)
    p = FilterParams.for_target(t)
    a = g_hat(t, p, -1.0, 1.0) / g_hat(t, p, 1.0, -1.0)
    b = g_hat(t, p, -1.0, 1.0, power=0.5) / g_hat(t, p, 1.0, -1.0, power=0.5)
    assert b == pytest.approx(a**2)


def test_w_hat_examples(rng):
    t = gibbs_phi(1.0, 1.0, 1.5)
    E1, E2 = rng.uniform(-1.5, 1.5, (2, 100))
    assert np.all(w_hat(t, E1, E1) == 0)
    np.testing.assert_allclose(w_hat(t, E2, E1), np.conj(w_hat(t, E1, E2)))
    assert np.all(w_hat(t, E1, E2).real == 0) and np.all(np.abs(w_hat(t, E1, E2)) < 1)
    # Phi(-1) - Phi(1) = 2 beta H_norm = 4 with beta = 2, H_norm = 1
    t2 = gibbs_phi(2.0, 1.0, 1.5)
    assert w_hat(t2, -1.0, 1.0) == pytest.approx(1j * math.tanh(1.0), rel=1e-14)
    assert abs(w_hat(t2, -1.0, 1.0)) == pytest.approx(0.76159, abs=1e-5)


def test_log_nu_is_log_of_nu(rng):
    p = FilterParams(3.0, 2.0)
    x = rng.uniform(-4, 4, 20)
    np.testing.assert_allclose(np.exp(log_nu(p, x)), nu(p, x))
