"""Curvature of frame connections and the operators built on it.

All identities between curvature tensors are compared on the lowered (0,4)
forms ``L[x, y, z, u]``.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import NamedTuple

import numpy as np

from .connection import (
    ConnectionCoeffs,
    ConnectionParams,
    build_prime,
    build_zero,
    covariant_derivative,
    deformation_q,
    levi_civita,
)
from .manifold import FrameManifold, exterior_derivative
from .norden import NordenData, nabla_theta
from .report import VerificationReport
from .tensor import DEFAULT_TOL, DimensionTooSmall, PreconditionViolation, Tolerance


@dataclass(frozen=True, eq=False)
class CurvatureData:
    R13: np.ndarray
    R04: np.ndarray
    rho: np.ndarray
    tau: float
    tau_star: float


class CheckResult(NamedTuple):
    holds: bool
    residual: float
    parts: dict


def _scale(*arrays) -> float:
    return max([1.0] + [float(np.abs(a).max()) for a in arrays if np.size(a)])


def curvature13(m: FrameManifold, c: ConnectionCoeffs) -> np.ndarray:
    """``R(e_i, e_j) e_k`` components; no derivative terms for constant coefficients."""
    G, C = c.gamma, m.C
    return (
        np.einsum("mjk,lim->lijk", G, G)
        - np.einsum("mik,ljm->lijk", G, G)
        - np.einsum("mij,lmk->lijk", C, G)
    )


def lower_curvature(g: np.ndarray, R13: np.ndarray) -> np.ndarray:
    return np.einsum("lijk,lu->ijku", R13, g)


def ricci(m: FrameManifold, L: np.ndarray) -> np.ndarray:
    """``rho(L)(y, z) = g^{ij} L(e_i, y, z, e_j)``."""
    return np.einsum("ij,iyzj->yz", m.g_inv, L)


def scalar_curvatures(m: FrameManifold, rho: np.ndarray) -> tuple[float, float]:
    tau = float(np.einsum("ij,ij->", m.g_inv, rho))
    tau_star = float(np.einsum("ij,ia,aj->", m.g_inv, rho, m.J))
    return tau, tau_star


def curvature_data(m: FrameManifold, L: np.ndarray, R13: np.ndarray | None = None) -> CurvatureData:
    rho = ricci(m, L)
    tau, tau_star = scalar_curvatures(m, rho)
    return CurvatureData(R13, L, rho, tau, tau_star)


def curvature(m: FrameManifold, c: ConnectionCoeffs) -> CurvatureData:
    R13 = curvature13(m, c)
    return curvature_data(m, lower_curvature(m.g, R13), R13)


# --- psi and pi operators ------------------------------------------------


def _psi(h: np.ndarray, S: np.ndarray) -> np.ndarray:
    """``h(y,z)S(x,u) - h(x,z)S(y,u) + h(x,u)S(y,z) - h(y,u)S(x,z)``."""
    return (
        np.einsum("yz,xu->xyzu", h, S)
        - np.einsum("xz,yu->xyzu", h, S)
        + np.einsum("xu,yz->xyzu", h, S)
        - np.einsum("yu,xz->xyzu", h, S)
    )


def psi1(m: FrameManifold, S) -> np.ndarray:
    return _psi(m.g, np.asarray(S, dtype=float))


def psi2(m: FrameManifold, S) -> np.ndarray:
    # g(y, Jz) S(x, Ju) - ... : g~ paired with S(., J.)
    return _psi(m.g_tilde, np.asarray(S, dtype=float) @ m.J)


def psi_operators(m: FrameManifold, S) -> tuple[np.ndarray, np.ndarray]:
    return psi1(m, S), psi2(m, S)


def psi_diff(m: FrameManifold, S) -> np.ndarray:
    """``{psi_1 - psi_2}(S)``."""
    return psi1(m, S) - psi2(m, S)


def pi1(m: FrameManifold) -> np.ndarray:
    return 0.5 * psi1(m, m.g)


def pi2(m: FrameManifold) -> np.ndarray:
    return 0.5 * psi2(m, m.g)


def pi3(m: FrameManifold) -> np.ndarray:
    return -psi1(m, m.g_tilde)


def hybrid_projection(m: FrameManifold, A) -> np.ndarray:
    """Symmetric hybrid part: ``S = A + A^T``, then ``(S(x,y) - S(Jx,Jy)) / 2``."""
    S = np.asarray(A, dtype=float)
    S = S + S.T
    return 0.5 * (S - m.J.T @ S @ m.J)


# --- predicates ----------------------------------------------------------


def curvature_like_check(L: np.ndarray, tol: Tolerance = DEFAULT_TOL) -> CheckResult:
    L = np.asarray(L, dtype=float)
    parts = {
        "antisymmetry (1,2)": float(np.abs(L + L.transpose(1, 0, 2, 3)).max()),
        "antisymmetry (3,4)": float(np.abs(L + L.transpose(0, 1, 3, 2)).max()),
        "first Bianchi": float(np.abs(L + L.transpose(1, 2, 0, 3) + L.transpose(2, 0, 1, 3)).max()),
    }
    res = max(parts.values())
    return CheckResult(res <= tol.scaled_bound(_scale(L)), res, parts)


def kahler_residual(m: FrameManifold, L: np.ndarray) -> float:
    LJJ = np.einsum("xyab,az,bu->xyzu", L, m.J, m.J)
    return float(np.abs(LJJ + L).max())


def kahler_check(m: FrameManifold, L: np.ndarray, tol: Tolerance = DEFAULT_TOL) -> CheckResult:
    """Curvature-like and ``L(x, y, Jz, Ju) = -L(x, y, z, u)``."""
    like = curvature_like_check(L, tol)
    kr = kahler_residual(m, L)
    parts = dict(like.parts, kahler=kr)
    res = max(like.residual, kr)
    return CheckResult(res <= tol.scaled_bound(_scale(L)), res, parts)


# --- Weyl and Bochner ----------------------------------------------------


def _as_L(x) -> np.ndarray:
    return x.R04 if isinstance(x, CurvatureData) else np.asarray(x, dtype=float)


def weyl(m: FrameManifold, L) -> np.ndarray:
    """``W = L - (1/(2(n-1))) {psi_1(rho) - tau/(2n-1) pi_1}``."""
    if m.dim < 4:
        raise DimensionTooSmall("the Weyl tensor needs dim >= 4")
    L = _as_L(L)
    n = m.n
    rho = ricci(m, L)
    tau, _ = scalar_curvatures(m, rho)
    return L - (psi1(m, rho) - tau / (2 * n - 1) * pi1(m)) / (2 * (n - 1))


def bochner(m: FrameManifold, L, tol: Tolerance = DEFAULT_TOL, *, check: bool = True) -> np.ndarray:
    """Bochner tensor of a Kaehler curvature-like tensor (dim >= 6)."""
    if m.dim < 6:
        raise DimensionTooSmall("the Bochner tensor needs dim 2n >= 6")
    L = _as_L(L)
    if check:
        kc = kahler_check(m, L, tol)
        if not kc.holds:
            raise PreconditionViolation(f"input is not a Kaehler curvature-like tensor (residual {kc.residual:.3e})")
    n = m.n
    rho = ricci(m, L)
    tau, tau_star = scalar_curvatures(m, rho)
    return (
        L
        - psi_diff(m, rho) / (2 * (n - 2))
        + (tau * (pi1(m) - pi2(m)) + tau_star * pi3(m)) / (4 * (n - 1) * (n - 2))
    )


# --- tensors entering the curvature relations ----------------------------


def _theta_pieces(m: FrameManifold, nd: NordenData, lc: ConnectionCoeffs):
    th = np.asarray(nd.theta, dtype=float)
    ths = th @ m.J
    om = np.asarray(nd.Omega, dtype=float)
    dth = nabla_theta(m, lc, th)
    return th, ths, dth, float(th @ om), float(th @ (m.J @ om))


def p_tensor(m: FrameManifold, nd: NordenData, lc: ConnectionCoeffs | None = None,
             tol: Tolerance = DEFAULT_TOL) -> tuple[np.ndarray, tuple[str, ...]]:
    """``P(x,y) = (nabla_x theta)Jy + theta(x)theta(y)/2n + theta(Omega)g(x,y)/4n + theta(J Omega)g(x,Jy)/2n``.

    Returns ``(P, warnings)``; a warning is attached when theta* is not closed.
    """
    lc = lc or levi_civita(m)
    n = m.n
    th, ths, dth, t_om, t_jom = _theta_pieces(m, nd, lc)
    P = dth @ m.J + np.outer(th, th) / (2 * n) + t_om / (4 * n) * m.g + t_jom / (2 * n) * m.g_tilde
    warnings = ()
    d_ths = float(np.abs(exterior_derivative(m, ths)).max())
    if d_ths > tol.scaled_bound(_scale(ths) * _scale(m.C)):
        warnings = (f"hypothesis violated: theta* is not closed (|d theta*| = {d_ths:.3e})",)
    return P, warnings


def a_tensors(m: FrameManifold, nd: NordenData, p: ConnectionParams,
              lc: ConnectionCoeffs | None = None) -> tuple[np.ndarray, np.ndarray]:
    lc = lc or levi_civita(m)
    n = m.n
    th, ths, dth, _, _ = _theta_pieces(m, nd, lc)
    _, _, _, _, l5, l6, l7, l8 = p.lam
    X = np.outer(th, th) - np.outer(ths, ths)
    S3 = np.outer(th, ths) + np.outer(ths, th)
    dthJ = dth @ m.J
    A1 = (l7 / n * (dth + l7 / n * X) + l8 / n * (dthJ + (1 - 2 * l8) / (2 * n) * X)
          + l7 * (4 * l8 - 1) / (2 * n**2) * S3)
    A2 = (-l5 / n * (dth - l5 / n * X) - l6 / n * (dthJ + (1 + 2 * l6) / (2 * n) * X)
          + l5 * (4 * l6 + 1) / (2 * n**2) * S3)
    return A1, A2


def s_tensors(m: FrameManifold, nd: NordenData, p: ConnectionParams,
              lc: ConnectionCoeffs | None = None) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    lc = lc or levi_civita(m)
    n = m.n
    th, ths, dth, t_om, t_jom = _theta_pieces(m, nd, lc)
    l7, l8 = p[7], p[8]
    X = np.outer(th, th) - np.outer(ths, ths)
    S1 = dth + l7 / n * X - l7 * t_om / (2 * n) * m.g + l7 * t_jom / (2 * n) * m.g_tilde
    S2 = dth @ m.J + (1 - 2 * l8) / (2 * n) * X + l8 * t_om / (2 * n) * m.g + (1 - l8) * t_jom / (2 * n) * m.g_tilde
    S3 = np.outer(th, ths) + np.outer(ths, th)
    return S1, S2, S3


# --- three routes to R' --------------------------------------------------


def r_prime_direct(m: FrameManifold, nd: NordenData, p: ConnectionParams, lc=None) -> np.ndarray:
    lc = lc or levi_civita(m)
    return curvature(m, build_prime(m, nd, p, lc)).R04


def r_prime_from_deformation(m: FrameManifold, lc: ConnectionCoeffs, Q: np.ndarray,
                             R: np.ndarray | None = None) -> np.ndarray:
    """``R + (nabla_x Q)(y,z,u) - (nabla_y Q)(x,z,u) + Q(x,Q(y,z),u) - Q(y,Q(x,z),u)``."""
    R = curvature(m, lc).R04 if R is None else R
    q_low = np.einsum("kij,ku->iju", Q, m.g)
    dq = covariant_derivative(m, lc, q_low)  # [x, y, z, u]
    qq = np.einsum("xau,ayz->xyzu", q_low, Q)
    return R + dq - dq.transpose(1, 0, 2, 3) + qq - qq.transpose(1, 0, 2, 3)


def r_prime_from_zero(m: FrameManifold, nd: NordenData, p: ConnectionParams,
                      R0: np.ndarray, lc: ConnectionCoeffs | None = None) -> np.ndarray:
    """``R'`` rebuilt from ``R^0`` and the tensors A_1, A_2."""
    lc = lc or levi_civita(m)
    n = m.n
    A1, A2 = a_tensors(m, nd, p, lc)
    g, gt, J = m.g, m.g_tilde, m.J
    A1J, A2J = A1 @ J, A2 @ J
    L = (
        np.einsum("yz,xu->xyzu", g, A1) - np.einsum("xz,yu->xyzu", g, A1)
        + np.einsum("xu,yz->xyzu", g, A2) - np.einsum("yu,xz->xyzu", g, A2)
        - np.einsum("yz,xu->xyzu", gt, A1J) + np.einsum("xz,yu->xyzu", gt, A1J)
        - np.einsum("xu,yz->xyzu", gt, A2J) + np.einsum("yu,xz->xyzu", gt, A2J)
    )
    _, _, _, t_om, t_jom = _theta_pieces(m, nd, lc)
    _, _, _, _, l5, l6, l7, l8 = p.lam
    c1 = (l5 * l7 - l6 * l8) / n**2 * t_om + (l7 - l5 + 2 * (l5 * l8 + l6 * l7)) / (2 * n**2) * t_jom
    c2 = (l5 * l8 + l6 * l7) / n**2 * t_om - (l6 - l8 + 2 * (l5 * l7 - l6 * l8)) / (2 * n**2) * t_jom
    return R0 + L + c1 * (pi1(m) - pi2(m)) - c2 * pi3(m)


def r_prime_kahler_closed_form(m: FrameManifold, nd: NordenData, p: ConnectionParams,
                               R0: np.ndarray, lc: ConnectionCoeffs | None = None) -> np.ndarray:
    """Closed form of ``R'`` for the six-parameter family ``l7 = -l5, l8 = -l6``."""
    lc = lc or levi_civita(m)
    n = m.n
    S1, S2, S3 = s_tensors(m, nd, p, lc)
    _, _, _, t_om, t_jom = _theta_pieces(m, nd, lc)
    l7, l8 = p[7], p[8]
    return (
        R0
        + l7 / n * psi_diff(m, S1)
        + l8 / n * psi_diff(m, S2)
        + l7 * (4 * l8 - 1) / (2 * n**2) * psi_diff(m, S3)
        + l7 * (1 - 2 * l8) * t_jom / n**2 * (pi1(m) - pi2(m))
        + 2 * l7 * l8 * t_om / n**2 * pi3(m)
    )


def r_zero_from_p(m: FrameManifold, nd: NordenData, R: np.ndarray, lc=None) -> np.ndarray:
    """``R - psi_1(P)/2n``."""
    P, _ = p_tensor(m, nd, lc)
    return R - psi1(m, P) / (2 * m.n)


# --- report-producing checks --------------------------------------------


def _bound(tol: Tolerance, *arrays) -> float:
    return tol.scaled_bound(_scale(*arrays))


def prime_vs_zero_relation(m: FrameManifold, nd: NordenData, p: ConnectionParams,
                           tol: Tolerance = DEFAULT_TOL, lc: ConnectionCoeffs | None = None) -> VerificationReport:
    """Pairwise agreement of R' computed directly, from the deformation tensor, and from R^0."""
    lc = lc or levi_civita(m)
    rep = VerificationReport(title="R' three-way reconstruction")
    params = {"lambda": list(p.lam)}
    R = curvature(m, lc).R04
    R0 = curvature(m, build_zero(m, nd, lc)).R04
    direct = curvature(m, build_prime(m, nd, p, lc)).R04
    via_q = r_prime_from_deformation(m, lc, deformation_q(m, nd, p), R)
    via_zero = r_prime_from_zero(m, nd, p, R0, lc)
    b = _bound(tol, direct, R)
    rep.add("R' direct vs deformation formula", np.abs(direct - via_q).max(), b, parameters=params,
            anchor="their curvature tensors of type (0,4) satisfy")
    rep.add("R' direct vs R^0 + A1/A2 formula", np.abs(direct - via_zero).max(), b, parameters=params,
            anchor="we obtain the relation between $R^{\\prime}$ and $R^0$")
    rep.add("R' deformation vs R^0 + A1/A2 formula", np.abs(via_q - via_zero).max(), b, parameters=params)
    return rep


def kahler_family_curvature(m: FrameManifold, nd: NordenData, p: ConnectionParams,
                            tol: Tolerance = DEFAULT_TOL, lc: ConnectionCoeffs | None = None) -> VerificationReport:
    """Checks for the six-parameter family: R' Kaehler, closed form, and A1 = A2."""
    if p.kahler_residual() > 1e-12:
        raise PreconditionViolation("parameters must satisfy lambda_7 = -lambda_5 and lambda_8 = -lambda_6")
    lc = lc or levi_civita(m)
    rep = VerificationReport(title="Kaehler six-parameter family")
    params = {"lambda": list(p.lam)}
    R0 = curvature(m, build_zero(m, nd, lc)).R04
    Rp = curvature(m, build_prime(m, nd, p, lc)).R04
    b = _bound(tol, Rp, R0)
    anchor = "six-parametric family of complex connections"
    rep.add("R' Kaehler curvature-like", kahler_check(m, Rp, tol).residual, b, parameters=params, anchor=anchor)
    closed = r_prime_kahler_closed_form(m, nd, p, R0, lc)
    rep.add("R' closed form via S1, S2, S3", np.abs(Rp - closed).max(), b, parameters=params, anchor=anchor)
    A1, A2 = a_tensors(m, nd, p, lc)
    rep.add("A1 = A2", np.abs(A1 - A2).max(), _bound(tol, A1, A2), parameters=params,
            anchor="if and only if $A_1(x,y)=A_2(x,y)$")
    return rep


def bochner_invariance(m: FrameManifold, nd: NordenData, p: ConnectionParams,
                       tol: Tolerance = DEFAULT_TOL, lc: ConnectionCoeffs | None = None) -> VerificationReport:
    """``B(R') = B(R^0)`` for the six-parameter family (dim >= 6)."""
    if m.dim < 6:
        raise DimensionTooSmall("the Bochner tensor needs dim 2n >= 6")
    if p.kahler_residual() > 1e-12:
        raise PreconditionViolation("parameters must satisfy lambda_7 = -lambda_5 and lambda_8 = -lambda_6")
    lc = lc or levi_civita(m)
    rep = VerificationReport(title="Bochner invariance")
    R0 = curvature(m, build_zero(m, nd, lc)).R04
    Rp = curvature(m, build_prime(m, nd, p, lc)).R04
    b = _bound(tol, Rp, R0)
    diff = bochner(m, Rp, tol) - bochner(m, R0, tol)
    rep.add("B(R') = B(R^0)", np.abs(diff).max(), b, parameters={"lambda": list(p.lam)},
            anchor="B(R^{\\prime}) = B(R^0)")
    return rep
