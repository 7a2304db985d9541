import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from nordenkit.conformal import (
    ConformalShift,
    conformal_invariants_suite,
    kahler_target_shift,
    lemma_rbar_check,
    nabla0_conformal_check,
    shifted_curvature_defect,
    theta_bar,
    transformed_data,
)
from nordenkit.connection import ConnectionParams, levi_civita
from nordenkit.example import build_example
from nordenkit.manifold import exterior_derivative
from nordenkit.norden import classify, norden_data
from nordenkit.tensor import PreconditionViolation


@pytest.mark.parametrize("c", [0.5, 1.0, 2.0])
def test_lemma_on_example(example, c):
    m, lc, nd = example
    assert lemma_rbar_check(m, lc, kahler_target_shift(m, nd, c)).passed


def test_lemma_with_zero_shift_is_trivial(example):
    m, lc, _ = example
    assert lemma_rbar_check(m, lc, ConformalShift(np.zeros(4), 1.0)).passed


def test_lemma_requires_closed_sigma(example):
    m, lc, _ = example
    with pytest.raises(PreconditionViolation):
        lemma_rbar_check(m, lc, ConformalShift(np.array([1.0, 0, 0, 0.5])))


@settings(max_examples=20, deadline=None)
@given(a=st.floats(-2, 2), b=st.floats(-2, 2), c=st.floats(0.5, 2))
def test_lemma_for_random_closed_sigma(a, b, c):
    # closed forms on the example annihilate e1 + e4 and e2 - e3
    m = build_example(1, 2)
    lc = levi_civita(m)
    sigma = np.array([a, b, b, -a])
    assert lemma_rbar_check(m, lc, ConformalShift(sigma, c)).passed


@pytest.mark.parametrize("c", [0.1, 0.5, 1.0, 3.0, 10.0])
def test_kaehler_target_shift(example, w10_dim6, c):
    for m, lc, nd in (example, w10_dim6):
        shift = kahler_target_shift(m, nd, c)
        mb, ndb = transformed_data(m, nd, shift)
        assert np.abs(ndb.theta).max() < 1e-10
        assert nabla0_conformal_check(m, nd, shift, lc=lc).passed
        lam = np.linspace(-0.9, 0.8, 8)
        assert conformal_invariants_suite(m, nd, ConnectionParams(tuple(lam)), shift, lc=lc).passed


def test_bochner_of_prime_scales_in_dim6(w10_dim6):
    m, lc, nd = w10_dim6
    p = ConnectionParams((0.2, -0.1, 0.3, 0.4, 0.5, -0.6, -0.5, 0.6))
    rep = conformal_invariants_suite(m, nd, p, kahler_target_shift(m, nd, 3.0), lc=lc)
    assert "B(R'-bar) = c B(R')" in rep.names()
    assert rep.passed


def test_theta_bar_round_trip(example):
    m, _, nd = example
    s = ConformalShift(np.array([0.3, -0.2, -0.2, -0.3]), 2.0)
    tb, ob = theta_bar(m, nd, s)
    back = nd.with_forms(m, tb, ob)
    tb2, ob2 = theta_bar(m.scaled(2.0), back, ConformalShift(-s.sigma, 0.5))
    np.testing.assert_allclose(tb2, nd.theta, atol=1e-12)
    np.testing.assert_allclose(ob2, nd.Omega, atol=1e-12)


def test_non_closed_sigma_gives_expected_failure(example):
    m, lc, nd = example
    sigma = np.array([1.0, 0.0, 0.0, 0.5])
    rep = nabla0_conformal_check(m, nd, ConformalShift(sigma, 1.0), lc=lc)
    assert rep["R0-bar = c R0"].verdict == "EXPECTED-FAILURE"
    assert rep["curvature defect = d sigma (x) id"].verdict == "PASS"
    assert rep.passed


def test_curvature_defect_sign(example, rng):
    # shifting by sigma (x) id adds +d sigma (x) id, with d sigma(x, y) = -sigma([x, y])
    m, lc, nd = example
    sigma = rng.normal(size=4)
    actual, predicted = shifted_curvature_defect(m, lc, sigma)
    np.testing.assert_allclose(actual, predicted, atol=1e-12)
    ds = exterior_derivative(m, sigma)
    assert np.abs(ds).max() > 0.1
    np.testing.assert_allclose(actual[:, 0, 1, :], ds[0, 1] * np.eye(4), atol=1e-12)


def test_constant_rescaling_keeps_w10(example):
    m = example[0].scaled(2.0)
    lc = levi_civita(m)
    assert classify(m, norden_data(m, lc), lc)["W1^0"]
