import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from nordenkit.connection import ConnectionParams, build_prime, build_zero, deformation_q, levi_civita
from nordenkit.curvature import (
    a_tensors,
    bochner,
    bochner_invariance,
    curvature,
    curvature_like_check,
    hybrid_projection,
    kahler_check,
    kahler_family_curvature,
    pi1,
    pi2,
    pi3,
    prime_vs_zero_relation,
    psi1,
    psi2,
    psi_diff,
    r_prime_from_deformation,
    r_prime_from_zero,
    r_prime_kahler_closed_form,
    r_zero_from_p,
    s_tensors,
    weyl,
)
from nordenkit.example import abelian
from nordenkit.norden import nabla_theta, norden_data
from nordenkit.properties import random_point
from nordenkit.tensor import DimensionTooSmall, PreconditionViolation

import oracles

seeds = st.integers(0, 2**32 - 1)


def test_curvature_matches_loop_definition(example, w10_dim4):
    for m, lc, nd in (example, w10_dim4):
        for c in (lc, build_prime(m, nd, ConnectionParams((0.3, -0.2, 0.1, 0.5, 0.7, -0.4, 0.2, 0.9)), lc)):
            np.testing.assert_allclose(curvature(m, c).R04, oracles.curvature04(m.g, m.C, c.gamma), atol=1e-11)


@settings(max_examples=20, deadline=None)
@given(seed=seeds)
def test_psi_operators_match_loops(seed):
    rng = np.random.default_rng(seed)
    m = random_point(2, rng)
    S = rng.normal(size=(4, 4))
    S = S + S.T
    np.testing.assert_allclose(psi1(m, S), oracles.psi1(m.g, S), atol=1e-11)
    np.testing.assert_allclose(psi2(m, S), oracles.psi2(m.g, m.J, S), atol=1e-11)


def test_pi_operators_from_metric(rng):
    m = random_point(2, rng)
    np.testing.assert_allclose(pi1(m), 0.5 * oracles.psi1(m.g, m.g), atol=1e-12)
    np.testing.assert_allclose(pi2(m), 0.5 * oracles.psi2(m.g, m.J, m.g), atol=1e-12)
    np.testing.assert_allclose(pi3(m), -oracles.psi1(m.g, m.g @ m.J), atol=1e-12)


@settings(max_examples=30, deadline=None)
@given(seed=seeds, n=st.sampled_from([2, 3]))
def test_operator_identities(seed, n):
    rng = np.random.default_rng(seed)
    m = random_point(n, rng)
    A = rng.normal(size=(2 * n, 2 * n))
    S = (A + A.T) / np.abs(A + A.T).max()
    Sh = hybrid_projection(m, rng.normal(size=(2 * n, 2 * n)))
    assert curvature_like_check(psi1(m, S)).holds
    assert kahler_check(m, psi_diff(m, Sh)).holds
    assert kahler_check(m, pi1(m) - pi2(m)).holds
    assert kahler_check(m, pi3(m)).holds
    assert np.abs(weyl(m, psi1(m, S))).max() < 1e-9
    if n >= 3:
        assert np.abs(bochner(m, psi_diff(m, Sh))).max() < 1e-9


def test_hybrid_projection_is_hybrid(rng):
    m = random_point(3, rng)
    Sh = hybrid_projection(m, rng.normal(size=(6, 6)))
    np.testing.assert_allclose(Sh, Sh.T, atol=1e-12)
    np.testing.assert_allclose(Sh @ m.J, (Sh @ m.J).T, atol=1e-12)


def test_bochner_and_weyl_dimension_guards(example):
    m = example[0]
    with pytest.raises(DimensionTooSmall):
        bochner(m, np.zeros((4,) * 4))


def test_bochner_requires_kaehler_input(rng):
    m = random_point(3, rng)
    S = rng.normal(size=(6, 6))
    with pytest.raises(PreconditionViolation):
        bochner(m, psi1(m, S + S.T))


def test_example_curvature_closed_forms(example):
    m, lc, nd = example
    R = curvature(m, lc).R04
    dth = nabla_theta(m, lc, nd.theta)
    assert np.abs(dth).max() < 1e-12  # theta is parallel on the example
    A = dth @ m.J + np.outer(nd.theta, nd.theta) / 4
    np.testing.assert_allclose(R, psi1(m, A) / 4, atol=1e-10)
    assert np.abs(curvature(m, build_zero(m, nd, lc)).R04).max() < 1e-10
    assert np.abs(weyl(m, R)).max() < 1e-10


def test_r_zero_from_p(example, w10_dim6):
    for m, lc, nd in (example, w10_dim6):
        R = curvature(m, lc).R04
        R0 = curvature(m, build_zero(m, nd, lc)).R04
        np.testing.assert_allclose(r_zero_from_p(m, nd, R, lc), R0, atol=1e-9)
        np.testing.assert_allclose(weyl(m, R0), weyl(m, R), atol=1e-9)


@settings(max_examples=15, deadline=None)
@given(seed=seeds)
def test_three_way_r_prime(seed):
    from nordenkit.example import random_w10

    rng = np.random.default_rng(seed)
    m = random_w10(int(rng.integers(2, 4)), int(rng.integers(0, 5)))
    lc = levi_civita(m)
    nd = norden_data(m, lc)
    p = ConnectionParams(tuple(rng.uniform(-1, 1, 8)))
    direct = curvature(m, build_prime(m, nd, p, lc)).R04
    via_q = r_prime_from_deformation(m, lc, deformation_q(m, nd, p))
    R0 = curvature(m, build_zero(m, nd, lc)).R04
    via_zero = r_prime_from_zero(m, nd, p, R0, lc)
    np.testing.assert_allclose(direct, via_q, atol=1e-9)
    np.testing.assert_allclose(direct, via_zero, atol=1e-9)
    assert prime_vs_zero_relation(m, nd, p, lc=lc).passed


def test_kaehler_family_closed_form(example, w10_dim6, rng):
    for m, lc, nd in (example, w10_dim6):
        lam = rng.uniform(-1, 1, 8)
        lam[6], lam[7] = -lam[4], -lam[5]
        p = ConnectionParams(tuple(lam))
        R0 = curvature(m, build_zero(m, nd, lc)).R04
        Rp = curvature(m, build_prime(m, nd, p, lc)).R04
        np.testing.assert_allclose(Rp, r_prime_kahler_closed_form(m, nd, p, R0, lc), atol=1e-9)
        A1, A2 = a_tensors(m, nd, p, lc)
        np.testing.assert_allclose(A1, A2, atol=1e-9)
        assert kahler_family_curvature(m, nd, p, lc=lc).passed


def test_kaehler_family_rejects_unconstrained(example):
    m, lc, nd = example
    with pytest.raises(PreconditionViolation):
        kahler_family_curvature(m, nd, ConnectionParams((0, 0, 0, 0, 0.1, 0, 0, 0)), lc=lc)


def test_bochner_invariance_dim6(w10_dim6, rng):
    m, lc, nd = w10_dim6
    lam = rng.uniform(-1, 1, 8)
    lam[6], lam[7] = -lam[4], -lam[5]
    assert bochner_invariance(m, nd, ConnectionParams(tuple(lam)), lc=lc).passed


def test_example_prime_flat_in_six_parameter_family(example, rng):
    m, lc, nd = example
    for _ in range(10):
        lam = rng.uniform(-1, 1, 8)
        lam[6], lam[7] = -lam[4], -lam[5]
        assert np.abs(curvature(m, build_prime(m, nd, ConnectionParams(tuple(lam)), lc)).R04).max() < 1e-9


def test_example_prime_not_flat_without_constraint(example):
    # lambda_7 alone already produces curvature on the example
    m, lc, nd = example
    p = ConnectionParams((0, 0, 0, 0, 0, 0, 0.5, 0))
    assert np.abs(curvature(m, build_prime(m, nd, p, lc)).R04).max() > 1.0


def test_s3_does_not_vanish_but_its_psi_difference_does(example):
    m, lc, nd = example
    S1, S2, S3 = s_tensors(m, nd, ConnectionParams(), lc)
    assert np.abs(S3).max() > 1.0
    for S in (S1, S2, S3):
        assert np.abs(psi_diff(m, S)).max() < 1e-10


def test_flat_kaehler_everything_vanishes():
    m = abelian(3)
    lc = levi_civita(m)
    nd = norden_data(m, lc)
    p = ConnectionParams(tuple(np.linspace(-1, 1, 8)))
    np.testing.assert_array_equal(build_prime(m, nd, p, lc).gamma, lc.gamma)
    assert np.abs(curvature(m, lc).R04).max() == 0
