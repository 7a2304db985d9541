"""Conformal transformations ``g -> c g`` at a point.

The factor ``e^{2u}`` is represented by a positive scalar ``c`` and ``du`` by
a left-invariant 1-form ``sigma``.  Second derivatives of ``u`` enter only
through ``(nabla_x sigma) y = -sigma(nabla_x y)``.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .connection import (
    ConnectionCoeffs,
    ConnectionParams,
    build_prime,
    build_zero,
    covariant_derivative,
    levi_civita,
)
from .curvature import bochner, curvature, curvature13, pi1, psi1
from .manifold import FrameManifold, exterior_derivative
from .norden import NordenData
from .report import VerificationReport
from .tensor import DEFAULT_TOL, PreconditionViolation, Tolerance


@dataclass(frozen=True, eq=False)
class ConformalShift:
    sigma: np.ndarray
    factor: float = 1.0

    def __post_init__(self):
        s = np.array(self.sigma, dtype=float)
        s.setflags(write=False)
        object.__setattr__(self, "sigma", s)
        if not self.factor > 0:
            raise ValueError("conformal factor must be positive")

    def Theta(self, m: FrameManifold) -> np.ndarray:
        """``g(x, Theta) = sigma(x)``."""
        return m.g_inv @ self.sigma

    def d_sigma(self, m: FrameManifold) -> np.ndarray:
        return exterior_derivative(m, self.sigma)

    def is_closed(self, m: FrameManifold, tol: Tolerance = DEFAULT_TOL) -> bool:
        scale = max(1.0, float(np.abs(self.sigma).max())) * max(1.0, float(np.abs(m.C).max()))
        return float(np.abs(self.d_sigma(m)).max()) <= tol.scaled_bound(scale)

    def is_pluriharmonic(self, m: FrameManifold, tol: Tolerance = DEFAULT_TOL) -> bool:
        """Surrogate for ``d(du o J) = 0``: ``sigma o J`` closed."""
        return ConformalShift(self.sigma @ m.J, self.factor).is_closed(m, tol)


def kahler_target_shift(m: FrameManifold, nd: NordenData, factor: float = 1.0) -> ConformalShift:
    """``sigma = (1/2n) theta o J``, the shift that makes the transformed theta vanish."""
    return ConformalShift(np.asarray(nd.theta_star) / (2 * m.n), factor)


def transformed_manifold(m: FrameManifold, shift: ConformalShift) -> FrameManifold:
    return m.scaled(shift.factor)


def conformal_levi_civita(m: FrameManifold, lc: ConnectionCoeffs, shift: ConformalShift) -> ConnectionCoeffs:
    """``nabla_x y + sigma(x) y + sigma(y) x - g(x, y) Theta``."""
    s = shift.sigma
    eye = np.eye(m.dim)
    d = (np.einsum("i,kj->kij", s, eye) + np.einsum("j,ki->kij", s, eye)
         - np.einsum("ij,k->kij", m.g, shift.Theta(m)))
    return ConnectionCoeffs(lc.gamma + d, "conformal-levi-civita")


def theta_bar(m: FrameManifold, nd: NordenData, shift: ConformalShift) -> tuple[np.ndarray, np.ndarray]:
    """``theta + 2n sigma o J`` and ``c^{-1}(Omega + 2n J Theta)``."""
    n = m.n
    tb = np.asarray(nd.theta) + 2 * n * (shift.sigma @ m.J)
    ob = (np.asarray(nd.Omega) + 2 * n * (m.J @ shift.Theta(m))) / shift.factor
    return tb, ob


def transformed_data(m: FrameManifold, nd: NordenData, shift: ConformalShift) -> tuple[FrameManifold, NordenData]:
    tb, ob = theta_bar(m, nd, shift)
    return transformed_manifold(m, shift), nd.with_forms(m, tb, ob)


def v_tensor(m: FrameManifold, lc: ConnectionCoeffs, shift: ConformalShift) -> np.ndarray:
    """``V(x, y) = (nabla_x sigma) y - sigma(x) sigma(y)``."""
    return covariant_derivative(m, lc, shift.sigma) - np.outer(shift.sigma, shift.sigma)


def _bound(tol: Tolerance, *arrays) -> float:
    return tol.scaled_bound(max([1.0] + [float(np.abs(a).max()) for a in arrays]))


def lemma_rbar_check(m: FrameManifold, lc: ConnectionCoeffs, shift: ConformalShift,
                     tol: Tolerance = DEFAULT_TOL) -> VerificationReport:
    """Curvature of the transformed Levi-Civita connection against ``c{R - psi_1(V) - pi_1 sigma(Theta)}``."""
    rep = VerificationReport(title="conformal curvature relation")
    params = {"sigma": shift.sigma, "factor": shift.factor}
    if not shift.is_closed(m, tol):
        raise PreconditionViolation("sigma is not closed")
    c = shift.factor
    R = curvature(m, lc).R04
    lc_bar = conformal_levi_civita(m, lc, shift)
    R_bar = np.einsum("lijk,lu->ijku", curvature13(m, lc_bar), c * m.g)
    V = v_tensor(m, lc, shift)
    rhs = c * (R - psi1(m, V) - pi1(m) * float(shift.sigma @ shift.Theta(m)))
    rep.add("R-bar = c{R - psi1(V) - pi1 sigma(Theta)}", np.abs(R_bar - rhs).max(), _bound(tol, R_bar, rhs),
            parameters=params, anchor="\\overline{R}=e^{2u}\\big\\{R-\\psi_{1}\\big(V\\big)")
    return rep


def shifted_curvature_defect(m: FrameManifold, c: ConnectionCoeffs, sigma) -> tuple[np.ndarray, np.ndarray]:
    """Curvature change under ``nabla -> nabla + sigma(x) y`` and its prediction ``d sigma (x)(y) id``.

    Both are returned as (1,3) arrays ``[l, i, j, k]``.
    """
    sigma = np.asarray(sigma, dtype=float)
    shifted = ConnectionCoeffs(c.gamma + np.einsum("i,kj->kij", sigma, np.eye(m.dim)))
    actual = curvature13(m, shifted) - curvature13(m, c)
    predicted = np.einsum("ij,lk->lijk", exterior_derivative(m, sigma), np.eye(m.dim))
    return actual, predicted


def nabla0_conformal_check(m: FrameManifold, nd: NordenData, shift: ConformalShift,
                           tol: Tolerance = DEFAULT_TOL, lc: ConnectionCoeffs | None = None) -> VerificationReport:
    """Transformed ``nabla^0`` equals ``nabla^0 + sigma(x) y`` and its curvature scales by ``c``.

    For a non-closed sigma the curvature record is an expected failure and an
    extra record checks that the defect is exactly ``d sigma (x, y) id``.
    """
    lc = lc or levi_civita(m)
    rep = VerificationReport(title="conformal change of nabla^0")
    params = {"sigma": shift.sigma, "factor": shift.factor}
    closed = shift.is_closed(m, tol)
    zero = build_zero(m, nd, lc)
    mb, ndb = transformed_data(m, nd, shift)
    lc_bar = conformal_levi_civita(m, lc, shift)
    zero_bar = build_zero(mb, ndb, lc_bar)
    expected = zero.gamma + np.einsum("i,kj->kij", shift.sigma, np.eye(m.dim))
    rep.add("nabla0-bar = nabla0 + sigma(x)y", np.abs(zero_bar.gamma - expected).max(),
            _bound(tol, zero_bar.gamma), parameters=params,
            anchor="its conformal group is defined analytically")
    R0 = curvature(m, zero).R04
    R0_bar = np.einsum("lijk,lu->ijku", curvature13(m, zero_bar), mb.g)
    rep.add("R0-bar = c R0", np.abs(R0_bar - shift.factor * R0).max(), _bound(tol, R0_bar, R0),
            parameters=params, expected_failure=not closed,
            anchor="the curvature tensor $R^0$ of $\\nabla^0$ is conformally invariant")
    if not closed:
        actual, predicted = shifted_curvature_defect(m, zero, shift.sigma)
        rep.add("curvature defect = d sigma (x) id", np.abs(actual - predicted).max(), _bound(tol, actual),
                parameters=params)
    return rep


def conformal_invariants_suite(m: FrameManifold, nd: NordenData, p: ConnectionParams,
                               shift: ConformalShift | None = None, tol: Tolerance = DEFAULT_TOL,
                               lc: ConnectionCoeffs | None = None) -> VerificationReport:
    """Conformal invariance statements for the Kaehler-target shift."""
    lc = lc or levi_civita(m)
    shift = shift or kahler_target_shift(m, nd)
    c = shift.factor
    rep = VerificationReport(title="conformal invariants")
    params = {"lambda": list(p.lam), "factor": c}
    mb, ndb = transformed_data(m, nd, shift)
    rep.add("theta-bar = 0", np.abs(ndb.theta).max(), _bound(tol, nd.theta), parameters=params,
            anchor="is a K\\\"ahler manifold and thus $\\overline{\\theta}=0$")
    lc_bar = conformal_levi_civita(m, lc, shift)
    prime_bar = build_prime(mb, ndb, p, lc_bar, tol)
    rep.add("nabla'-bar = nabla-bar", np.abs(prime_bar.gamma - lc_bar.gamma).max(), _bound(tol, lc_bar.gamma),
            parameters=params, anchor="we get $\\overline{\\nabla}^{\\hspace{0.02in}\\prime}=\\overline{\\nabla}$")
    Rp_bar = np.einsum("lijk,lu->ijku", curvature13(m, prime_bar), mb.g)
    Rp = curvature(m, build_prime(m, nd, p, lc, tol)).R04
    if all(abs(p[i]) < 1e-15 for i in (5, 6, 7, 8)):
        rep.add("R'-bar = c R' (lambda_5..8 = 0)", np.abs(Rp_bar - c * Rp).max(), _bound(tol, Rp_bar, Rp),
                parameters=params, anchor="the curvature tensor of $\\nabla^{\\prime}$ is conformally invariant")
    if m.dim >= 6 and p.kahler_residual() <= 1e-12:
        B_bar = bochner(mb, Rp_bar, tol)
        B = bochner(m, Rp, tol)
        rep.add("B(R'-bar) = c B(R')", np.abs(B_bar - c * B).max(), _bound(tol, B_bar, B), parameters=params,
                anchor="B(\\overline{R}^{\\prime})=e^{2u}B(R^{\\prime})")
    return rep
