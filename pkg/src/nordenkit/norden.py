"""Fundamental tensor, Lie forms, Nijenhuis tensor and class membership."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .connection import ConnectionCoeffs, covariant_derivative, is_metric, levi_civita, nabla_J
from .manifold import FrameManifold, exterior_derivative
from .report import VerificationReport
from .tensor import DEFAULT_TOL, PreconditionViolation, Tolerance


@dataclass(frozen=True, eq=False)
class NordenData:
    F: np.ndarray  # F[i, j, k] = g((nabla_i J) e_j, e_k)
    theta: np.ndarray
    theta_star: np.ndarray
    Omega: np.ndarray  # theta(x) = g(x, Omega)
    N: np.ndarray | None = None  # N[k, i, j]

    def with_forms(self, m: FrameManifold, theta, Omega) -> "NordenData":
        """Copy with the Lie form replaced, e.g. by its conformally transformed value."""
        theta = np.asarray(theta, dtype=float)
        return NordenData(self.F, theta, theta @ m.J, np.asarray(Omega, dtype=float), self.N)


def fundamental_tensor(m: FrameManifold, lc: ConnectionCoeffs, tol: Tolerance = DEFAULT_TOL) -> np.ndarray:
    """``F(x, y, z) = g((nabla_x J) y, z)``."""
    chk = is_metric(m, lc, tol)
    if not chk.holds:
        raise PreconditionViolation(f"connection is not metric (max |nabla g| = {chk.residual:.3e})")
    return np.einsum("bij,bk->ijk", nabla_J(lc, m.J), m.g)


def lie_forms(m: FrameManifold, F: np.ndarray) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """``(theta, theta*, Omega)`` with ``theta_k = g^{ij} F_ijk``."""
    theta = np.einsum("ij,ijk->k", m.g_inv, F)
    return theta, theta @ m.J, m.g_inv @ theta


def nijenhuis(m: FrameManifold) -> np.ndarray:
    """``N[k, i, j]``: components of ``[Jx,Jy] - [x,y] - J[Jx,y] - J[x,Jy]``."""
    J, C = m.J, m.C
    jj = np.einsum("kab,ai,bj->kij", C, J, J)
    jx_y = np.einsum("ka,abj,bi->kij", J, C, J)
    x_jy = np.einsum("ka,aib,bj->kij", J, C, J)
    return jj - C - jx_y - x_jy


def norden_data(m: FrameManifold, lc: ConnectionCoeffs | None = None, tol: Tolerance = DEFAULT_TOL) -> NordenData:
    lc = levi_civita(m) if lc is None else lc
    F = fundamental_tensor(m, lc, tol)
    theta, theta_star, omega = lie_forms(m, F)
    return NordenData(F, theta, theta_star, omega, nijenhuis(m))


def w1_tensor(m: FrameManifold, theta) -> np.ndarray:
    """Right-hand side of the W1 condition built from ``theta``."""
    g, gt = m.g, m.g_tilde
    ths = np.asarray(theta) @ m.J
    return (
        np.einsum("ij,k->ijk", g, theta)
        + np.einsum("ij,k->ijk", gt, ths)
        + np.einsum("ik,j->ijk", g, theta)
        + np.einsum("ik,j->ijk", gt, ths)
    ) / (2 * m.n)


def w1_residual(m: FrameManifold, nd: NordenData) -> float:
    return float(np.abs(nd.F - w1_tensor(m, nd.theta)).max())


def nabla_theta(m: FrameManifold, lc: ConnectionCoeffs, theta) -> np.ndarray:
    """``(nabla_x theta) y`` as ``out[x, y]``."""
    return covariant_derivative(m, lc, theta)


@dataclass(frozen=True)
class ClassVerdict:
    residuals: dict
    passed: dict
    details: dict

    def __getitem__(self, cls: str) -> bool:
        return self.passed[cls]

    def to_report(self, tol: Tolerance, scale: float) -> VerificationReport:
        rep = VerificationReport(title="class membership")
        anchors = {
            "W0": "K\\\"{a}hler manifolds with Norden metric",
            "W1": "the class $\\mathcal{W}_{1}$",
            "W2": "special complex manifolds with Norden metric",
            "W3": "quasi-K\\\"{a}hler manifolds with Norden metric",
            "W1^0": "conformal K\\\"ahler manifold with Norden metric",
        }
        bound = tol.scaled_bound(scale)
        for cls in ("W0", "W1", "W2", "W3", "W1^0"):
            rep.add(cls, self.residuals[cls], bound, passed=self.passed[cls], anchor=anchors[cls])
        return rep


def classify(m: FrameManifold, nd: NordenData, lc: ConnectionCoeffs, tol: Tolerance = DEFAULT_TOL) -> ClassVerdict:
    """Residual-based membership in W0, W1, W2, W3 and the conformal Kaehler subclass W1^0."""
    F, J = nd.F, m.J
    scale = float(np.abs(F).max())
    bound = tol.scaled_bound(scale)

    FJ = np.einsum("ija,ak->ijk", F, J)  # F(x, y, Jz)
    cyc_J = FJ + FJ.transpose(1, 2, 0) + FJ.transpose(2, 0, 1)
    cyc = F + F.transpose(1, 2, 0) + F.transpose(2, 0, 1)
    theta_norm = float(np.abs(nd.theta).max())
    N = nd.N if nd.N is not None else nijenhuis(m)
    n_norm = float(np.abs(N).max())

    w1 = w1_residual(m, nd)
    w2 = max(float(np.abs(cyc_J).max()), theta_norm)
    w2_alt = max(n_norm, theta_norm)
    w3 = float(np.abs(cyc).max())
    w0 = scale

    d_theta = float(np.abs(exterior_derivative(m, nd.theta)).max())
    d_theta_star = float(np.abs(exterior_derivative(m, nd.theta_star)).max())
    dth = nabla_theta(m, lc, nd.theta)
    ck1 = float(np.abs(dth - dth.T).max())
    dthJ = dth @ J
    ck2 = float(np.abs(dthJ - dthJ.T).max())

    closed_bound = tol.scaled_bound(max(scale, float(np.abs(dth).max())) * max(1.0, float(np.abs(m.C).max())))
    ck_pass = ck1 <= closed_bound and ck2 <= closed_bound
    d_pass = d_theta <= closed_bound and d_theta_star <= closed_bound
    residuals = {
        "W0": w0,
        "W1": w1,
        "W2": w2,
        "W3": w3,
        "W1^0": max(w1, d_theta, d_theta_star, ck1, ck2),
    }
    passed = {
        "W0": w0 <= bound,
        "W1": w1 <= bound,
        "W2": w2 <= bound,
        "W3": w3 <= bound,
        "W1^0": w1 <= bound and ck_pass and d_pass,
    }
    details = {
        "W2 via N=0, theta=0": w2_alt,
        "W2 forms agree": (w2 <= bound) == (w2_alt <= bound),
        "d theta": d_theta,
        "d theta*": d_theta_star,
        "cK symmetry (nabla theta)": ck1,
        "cK symmetry (nabla theta) J": ck2,
        "cK and closedness agree": ck_pass == d_pass,
    }
    return ClassVerdict(residuals, passed, details)
