import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from nordenkit.connection import (
    ConnectionCoeffs,
    ConnectionParams,
    build_canonical,
    build_family,
    build_natural,
    build_prime,
    build_symmetric,
    build_yano,
    build_zero,
    covariant_derivative,
    deformation_q,
    is_complex,
    is_metric,
    is_natural,
    is_symmetric,
    levi_civita,
    nabla_g_from_q,
    nabla_g_prime_closed_form,
    torsion,
    torsion_prime_closed_form,
)
from nordenkit.example import build_example, random_w10
from nordenkit.norden import norden_data
from nordenkit.tensor import UnsupportedVariance

from oracles import koszul_christoffel

lam8 = st.lists(st.floats(-1, 1, allow_nan=False), min_size=8, max_size=8)


@pytest.mark.parametrize("lam,mu", [(1, 2), (3, -1), (0.5, 0.25)])
def test_levi_civita_matches_loop_koszul(lam, mu):
    m = build_example(lam, mu)
    np.testing.assert_allclose(levi_civita(m).gamma, koszul_christoffel(m.g, m.C), atol=1e-12)


def test_levi_civita_on_random_w10(w10_dim6):
    m, lc, _ = w10_dim6
    np.testing.assert_allclose(lc.gamma, koszul_christoffel(m.g, m.C), atol=1e-12)
    assert is_metric(m, lc).holds and is_symmetric(m, lc).holds


def test_example_levi_civita_entries_at_lambda_1_mu_0():
    lc = levi_civita(build_example(1, 0))
    e = np.eye(4)
    np.testing.assert_allclose(lc.nabla(e[0], e[0]), e[3])
    np.testing.assert_allclose(lc.nabla(e[1], e[3]), e[1] - e[2])


def test_covariant_derivative_of_metric_vanishes(example):
    m, lc, _ = example
    assert np.abs(covariant_derivative(m, lc, m.g)).max() < 1e-12
    with pytest.raises(UnsupportedVariance):
        covariant_derivative(m, lc, np.zeros(4), "u")


def test_params_views():
    p = ConnectionParams.from_mu((0.1, 0.2, 0.3, 0.4))
    assert p.symmetric_residual() < 1e-15
    assert p.mu == pytest.approx((0.1, 0.2, 0.3, 0.4))
    q = ConnectionParams.from_natural(0.25, 0.0)
    assert q.natural_residual() == 0 and q.st == pytest.approx((0.25, 0.0))
    assert q[6] == -0.25
    with pytest.raises(ValueError):
        ConnectionParams((1.0, 2.0))


@settings(max_examples=25, deadline=None)
@given(lam=lam8)
def test_prime_is_complex_and_torsion_closed_form(lam):
    m = build_example(1, 2)
    nd = norden_data(m)
    p = ConnectionParams(tuple(lam))
    c = build_prime(m, nd, p)
    assert is_complex(m, c).holds
    np.testing.assert_allclose(torsion(m, c).T, torsion_prime_closed_form(m, nd, p), atol=1e-10)
    ng, _ = nabla_g_from_q(m, deformation_q(m, nd, p))
    np.testing.assert_allclose(ng, nabla_g_prime_closed_form(m, nd, p), atol=1e-10)


@settings(max_examples=20, deadline=None)
@given(mu=st.lists(st.floats(-1, 1, allow_nan=False), min_size=4, max_size=4))
def test_symmetric_family_closed_form_equals_prime(mu):
    m = random_w10(2, 3)
    nd = norden_data(m)
    s = build_symmetric(m, nd, mu)
    assert is_symmetric(m, s).holds and is_complex(m, s).holds
    np.testing.assert_allclose(s.gamma, build_prime(m, nd, ConnectionParams.from_mu(mu)).gamma, atol=1e-10)


@settings(max_examples=20, deadline=None)
@given(s=st.floats(-1, 1), t=st.floats(-1, 1))
def test_natural_family_closed_form_equals_prime(s, t):
    m = random_w10(2, 3)
    nd = norden_data(m)
    c = build_natural(m, nd, s, t)
    assert is_natural(m, c).holds
    np.testing.assert_allclose(c.gamma, build_prime(m, nd, ConnectionParams.from_natural(s, t)).gamma, atol=1e-10)


def test_named_connections(example):
    m, lc, nd = example
    can = build_canonical(m, nd, lc)
    np.testing.assert_allclose(can.gamma, build_prime(m, nd, ConnectionParams.from_natural(0.25, 0), lc).gamma)
    yano = build_yano(m, nd, lc)
    np.testing.assert_allclose(yano.gamma, build_prime(m, nd, ConnectionParams.from_mu((0, -0.25, 0, 0.25)), lc).gamma)
    assert is_symmetric(m, yano).holds
    assert is_natural(m, build_zero(m, nd, lc)).holds


def test_zero_connection_is_prime_at_origin(example):
    m, lc, nd = example
    np.testing.assert_allclose(build_zero(m, nd, lc).gamma, build_prime(m, nd, ConnectionParams(), lc).gamma)


@pytest.mark.parametrize("i", range(1, 7))
def test_symmetry_breaks_under_single_perturbation(example, i):
    m, lc, nd = example
    base = ConnectionParams.from_mu((0.2, -0.3, 0.1, 0.4))
    c = build_prime(m, nd, base.with_lambda(i, base[i] + 0.1), lc)
    assert is_symmetric(m, c).residual > 1e-3


@pytest.mark.parametrize("i", (7, 8))
def test_lambda_7_8_are_free_in_symmetric_family(example, i):
    m, lc, nd = example
    base = ConnectionParams.from_mu((0.2, -0.3, 0.1, 0.4))
    c = build_prime(m, nd, base.with_lambda(i, base[i] + 0.1), lc)
    assert is_symmetric(m, c).holds


@pytest.mark.parametrize("i", range(1, 9))
def test_naturality_breaks_under_single_perturbation(example, i):
    m, lc, nd = example
    base = ConnectionParams.from_natural(0.3, -0.2)
    c = build_prime(m, nd, base.with_lambda(i, base[i] + 0.1), lc)
    assert is_natural(m, c).residual > 1e-3


def test_warning_attached_outside_w1():
    m = build_example(1, 2)
    g = np.array(m.g)
    g[0, 0] = 1.5
    from nordenkit.manifold import FrameManifold

    bad = FrameManifold(g, m.J, m.C)
    nd = norden_data(bad)
    c = build_prime(bad, nd, ConnectionParams())
    assert c.warnings and "W1" in c.warnings[0]


def test_build_family_dispatch_and_arity(example):
    m, lc, nd = example
    assert build_family(m, nd, "levi-civita", (), lc) is lc
    with pytest.raises(ValueError, match="takes 2"):
        build_family(m, nd, "natural", (0.25,), lc)
    with pytest.raises(ValueError, match="unknown"):
        build_family(m, nd, "flat", (), lc)
    a = build_family(m, nd, "natural", (0.25, 0.0), lc)
    b = build_family(m, nd, "prime", (0, 0, 0, 0, 0, -0.25, 0, 0.25), lc)
    np.testing.assert_allclose(a.gamma, b.gamma)


def test_connection_coeffs_rejects_bad_shape():
    with pytest.raises(ValueError):
        ConnectionCoeffs(np.zeros((4, 4)))
