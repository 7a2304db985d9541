"""Linear connections in a left-invariant frame.

A connection is stored as its frame coefficients ``gamma[k, i, j]``, the
``e_k`` component of ``nabla_{e_i} e_j``.  The families built here are the
Levi-Civita connection and the complex connections ``nabla + Q`` obtained
from the eight-parameter deformation tensor ``Q``, together with the
symmetric (mu_1..mu_4) and natural (s, t) subfamilies.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import TYPE_CHECKING, NamedTuple, Sequence

import numpy as np

from .manifold import FrameManifold
from .tensor import DEFAULT_TOL, NordenError, Tolerance, UnsupportedVariance

if TYPE_CHECKING:
    from .norden import NordenData


class NoInverse(NordenError):
    pass


@dataclass(frozen=True)
class ConnectionParams:
    """Parameters lambda_1..lambda_8 of the deformation tensor."""

    lam: tuple[float, ...] = (0.0,) * 8

    def __post_init__(self):
        lam = tuple(float(v) for v in self.lam)
        if len(lam) != 8:
            raise ValueError(f"expected 8 parameters, got {len(lam)}")
        object.__setattr__(self, "lam", lam)

    def __getitem__(self, i: int) -> float:
        """One-based access: ``p[5]`` is lambda_5."""
        return self.lam[i - 1]

    @classmethod
    def from_mu(cls, mu: Sequence[float]) -> "ConnectionParams":
        m1, m2, m3, m4 = mu
        return cls((m1, m2, m2 + 0.5, -m1, m1, m2, m3, m4))

    @classmethod
    def from_natural(cls, s: float, t: float) -> "ConnectionParams":
        return cls((0.0, 0.0, 0.0, 0.0, -t, -s, t, s))

    def symmetric_residual(self) -> float:
        l1, l2, l3, l4, l5, l6, _, _ = self.lam
        return max(abs(l1 + l4), abs(l1 - l5), abs(l2 - l6), abs(l3 - 0.5 - l2))

    def natural_residual(self) -> float:
        l1, l2, l3, l4, l5, l6, l7, l8 = self.lam
        return max(abs(l1), abs(l2), abs(l3), abs(l4), abs(l7 + l5), abs(l8 + l6))

    def kahler_residual(self) -> float:
        """Distance from the constraints lambda_7 = -lambda_5, lambda_8 = -lambda_6."""
        return max(abs(self.lam[6] + self.lam[4]), abs(self.lam[7] + self.lam[5]))

    @property
    def mu(self) -> tuple[float, float, float, float] | None:
        if self.symmetric_residual() > 1e-12:
            return None
        return (self.lam[0], self.lam[1], self.lam[6], self.lam[7])

    @property
    def st(self) -> tuple[float, float] | None:
        if self.natural_residual() > 1e-12:
            return None
        return (self.lam[7], self.lam[6])

    def with_lambda(self, i: int, value: float) -> "ConnectionParams":
        lam = list(self.lam)
        lam[i - 1] = value
        return ConnectionParams(tuple(lam))


@dataclass(frozen=True, eq=False)
class ConnectionCoeffs:
    gamma: np.ndarray
    family: str = "custom"
    params: ConnectionParams | None = None
    warnings: tuple[str, ...] = field(default=())

    def __post_init__(self):
        a = np.array(self.gamma, dtype=float)
        if a.ndim != 3 or len(set(a.shape)) != 1:
            raise ValueError(f"connection coefficients must be a cube, got shape {a.shape}")
        if not np.isfinite(a).all():
            raise ValueError("connection coefficients must be finite")
        a.setflags(write=False)
        object.__setattr__(self, "gamma", a)

    def nabla(self, x, y) -> np.ndarray:
        """``nabla_x y`` for constant-coefficient vectors."""
        return np.einsum("kij,i,j->k", self.gamma, x, y)


@dataclass(frozen=True)
class TorsionTensor:
    T: np.ndarray
    T_low: np.ndarray


class PropertyCheck(NamedTuple):
    holds: bool
    residual: float


def levi_civita(m: FrameManifold) -> ConnectionCoeffs:
    """Koszul formula ``2g(nabla_i e_j, e_k) = g([e_i,e_j],e_k) + g([e_k,e_i],e_j) + g([e_k,e_j],e_i)``."""
    if abs(np.linalg.det(m.g)) <= 1e-12:
        raise NoInverse("metric is singular")
    c_low = np.einsum("mij,mk->ijk", m.C, m.g)
    koszul = 0.5 * (c_low + c_low.transpose(1, 2, 0) + c_low.transpose(2, 1, 0))
    gamma = np.einsum("ijm,mk->kij", koszul, m.g_inv)
    return ConnectionCoeffs(gamma, "levi-civita")


def covariant_derivative(m: FrameManifold, c: ConnectionCoeffs, t, variance: str | None = None) -> np.ndarray:
    """Covariant derivative of a left-invariant covariant tensor.

    The derivative slot comes first: ``out[i, j1, ..] = (nabla_{e_i} t)(e_j1, ..)
    = -sum_s gamma[m, i, j_s] t[.., m, ..]``.
    """
    t = np.asarray(t, dtype=float)
    variance = "d" * t.ndim if variance is None else variance
    if "u" in variance:
        raise UnsupportedVariance("covariant_derivative only handles covariant slots")
    d = m.dim
    out = np.zeros((d,) + t.shape)
    for s in range(t.ndim):
        # contract gamma[m, i, j] with slot s of t (index m), put j into slot s
        term = np.tensordot(c.gamma, t, axes=([0], [s]))  # (i, j, rest...)
        out -= np.moveaxis(term, 1, s + 1)
    return out


def nabla_J(c: ConnectionCoeffs, J: np.ndarray) -> np.ndarray:
    """``out[b, i, j]``: e_b component of ``(nabla_{e_i} J) e_j``."""
    return np.einsum("aj,bia->bij", J, c.gamma) - np.einsum("aij,ba->bij", c.gamma, J)


# --- deformation tensor --------------------------------------------------


def _forms(m: FrameManifold, nd: "NordenData"):
    theta = np.asarray(nd.theta, dtype=float)
    theta_s = np.asarray(nd.theta_star, dtype=float)
    omega = np.asarray(nd.Omega, dtype=float)
    return theta, theta_s, omega, m.J @ omega


def _qbasis(m: FrameManifold, nd: "NordenData") -> list[np.ndarray]:
    """The nine building blocks of Q, each as array [k, i, j] for Q(e_i, e_j)^k."""
    th, ths, om, jom = _forms(m, nd)
    eye = np.eye(m.dim)
    g, gt, J = m.g, m.g_tilde, m.J
    lead = np.einsum("j,ki->kij", ths, eye) - np.einsum("ij,k->kij", g, jom)
    return [
        lead,
        np.einsum("i,kj->kij", th, eye),  # theta(x) y
        np.einsum("i,kj->kij", th, J),  # theta(x) Jy
        np.einsum("i,kj->kij", ths, eye),  # theta(Jx) y
        np.einsum("i,kj->kij", ths, J),  # theta(Jx) Jy
        np.einsum("j,ki->kij", th, eye) - np.einsum("j,ki->kij", ths, J),
        np.einsum("j,ki->kij", th, J) + np.einsum("j,ki->kij", ths, eye),
        np.einsum("ij,k->kij", g, om) - np.einsum("ij,k->kij", gt, jom),
        np.einsum("ij,k->kij", gt, om) + np.einsum("ij,k->kij", g, jom),
    ]


def deformation_q(m: FrameManifold, nd: "NordenData", p: ConnectionParams) -> np.ndarray:
    """Deformation tensor ``Q[k, i, j]`` of the eight-parameter complex family."""
    n = m.n
    blocks = _qbasis(m, nd)
    q = blocks[0] / (2 * n)
    for lam, block in zip(p.lam, blocks[1:]):
        q = q + (lam / n) * block
    return q


def _hypothesis_warnings(m: FrameManifold, nd: "NordenData", tol: Tolerance) -> tuple[str, ...]:
    from .norden import w1_residual

    res = w1_residual(m, nd)
    scale = float(np.abs(nd.F).max()) if np.size(nd.F) else 0.0
    if res > tol.scaled_bound(scale):
        return (f"hypothesis violated: manifold is not in W1 (residual {res:.3e})",)
    return ()


def _property_scale(c: ConnectionCoeffs) -> float:
    return max(1.0, float(np.abs(c.gamma).max()))


def _assert_if_hypothesis(c: ConnectionCoeffs, residual: float, what: str, tol: Tolerance) -> None:
    if not c.warnings and residual > tol.scaled_bound(_property_scale(c)):
        raise NordenError(f"{c.family} connection is not {what} (residual {residual:.3e}) on a W1 manifold")


def build_prime(m: FrameManifold, nd: "NordenData", p: ConnectionParams, lc: ConnectionCoeffs | None = None,
                tol: Tolerance = DEFAULT_TOL) -> ConnectionCoeffs:
    """``nabla'_x y = nabla_x y + Q(x, y)``."""
    lc = levi_civita(m) if lc is None else lc
    c = ConnectionCoeffs(lc.gamma + deformation_q(m, nd, p), "prime", p, _hypothesis_warnings(m, nd, tol))
    _assert_if_hypothesis(c, is_complex(m, c, tol).residual, "complex", tol)
    return c


def build_symmetric(m: FrameManifold, nd: "NordenData", mu: Sequence[float],
                    lc: ConnectionCoeffs | None = None, tol: Tolerance = DEFAULT_TOL) -> ConnectionCoeffs:
    """Four-parameter complex symmetric family, from its own closed form."""
    lc = lc or levi_civita(m)
    m1, m2, m3, m4 = (float(v) for v in mu)
    n = m.n
    th, ths, om, jom = _forms(m, nd)
    eye, J, g, gt = np.eye(m.dim), m.J, m.g, m.g_tilde
    xy = lambda a: np.einsum("i,kj->kij", a, eye)  # a(x) y
    yx = lambda a: np.einsum("j,ki->kij", a, eye)  # a(y) x
    xJy = lambda a: np.einsum("i,kj->kij", a, J)  # a(x) Jy
    yJx = lambda a: np.einsum("j,ki->kij", a, J)  # a(y) Jx
    gv = lambda h, v: np.einsum("ij,k->kij", h, v)
    d = (xy(ths) + yx(ths) - gv(g, jom)) / (2 * n)
    d += (
        m1 * (xy(th) + yx(th) - xJy(ths) - yJx(ths))
        + m2 * (xy(ths) + yx(ths) + xJy(th) + yJx(th))
        + m3 * (gv(g, om) - gv(gt, jom))
        + m4 * (gv(gt, om) + gv(g, jom))
    ) / n
    c = ConnectionCoeffs(lc.gamma + d, "symmetric", ConnectionParams.from_mu((m1, m2, m3, m4)),
                         _hypothesis_warnings(m, nd, tol))
    _assert_if_hypothesis(c, is_complex(m, c, tol).residual, "complex", tol)
    _assert_if_hypothesis(c, is_symmetric(m, c, tol).residual, "symmetric", tol)
    return c


def build_natural(m: FrameManifold, nd: "NordenData", s: float, t: float,
                  lc: ConnectionCoeffs | None = None, tol: Tolerance = DEFAULT_TOL) -> ConnectionCoeffs:
    """Two-parameter natural family, from its own closed form."""
    lc = lc or levi_civita(m)
    n = m.n
    th, ths, om, jom = _forms(m, nd)
    eye, J, g, gt = np.eye(m.dim), m.J, m.g, m.g_tilde
    lead = np.einsum("j,ki->kij", ths, eye) - np.einsum("ij,k->kij", g, jom)
    s_term = np.einsum("ij,k->kij", gt, om) - np.einsum("j,ki->kij", th, J)
    t_term = (np.einsum("ij,k->kij", g, om) - np.einsum("ij,k->kij", gt, jom)
              - np.einsum("j,ki->kij", th, eye) + np.einsum("j,ki->kij", ths, J))
    d = (1 - 2 * s) / (2 * n) * lead + (s * s_term + t * t_term) / n
    c = ConnectionCoeffs(lc.gamma + d, "natural", ConnectionParams.from_natural(s, t),
                         _hypothesis_warnings(m, nd, tol))
    _assert_if_hypothesis(c, is_natural(m, c, tol).residual, "natural", tol)
    return c


def build_zero(m: FrameManifold, nd: "NordenData", lc: ConnectionCoeffs | None = None,
               tol: Tolerance = DEFAULT_TOL) -> ConnectionCoeffs:
    """Semi-symmetric metric connection ``nabla_x y + (1/2n)[theta(Jy) x - g(x,y) J Omega]``."""
    lc = lc or levi_civita(m)
    _, ths, _, jom = _forms(m, nd)
    d = (np.einsum("j,ki->kij", ths, np.eye(m.dim)) - np.einsum("ij,k->kij", m.g, jom)) / (2 * m.n)
    c = ConnectionCoeffs(lc.gamma + d, "zero", ConnectionParams(), _hypothesis_warnings(m, nd, tol))
    _assert_if_hypothesis(c, is_natural(m, c, tol).residual, "natural", tol)
    return c


def build_canonical(m: FrameManifold, nd: "NordenData", lc=None, tol: Tolerance = DEFAULT_TOL) -> ConnectionCoeffs:
    c = build_natural(m, nd, 0.25, 0.0, lc, tol)
    return ConnectionCoeffs(c.gamma, "canonical", c.params, c.warnings)


def build_yano(m: FrameManifold, nd: "NordenData", lc=None, tol: Tolerance = DEFAULT_TOL) -> ConnectionCoeffs:
    c = build_symmetric(m, nd, (0.0, -0.25, 0.0, 0.25), lc, tol)
    return ConnectionCoeffs(c.gamma, "yano", c.params, c.warnings)


# --- torsion and defining properties -------------------------------------


def torsion(m: FrameManifold, c: ConnectionCoeffs) -> TorsionTensor:
    """``T(x, y) = nabla_x y - nabla_y x - [x, y]``."""
    T = c.gamma - c.gamma.transpose(0, 2, 1) - m.C
    return TorsionTensor(T, np.einsum("kij,kl->ijl", T, m.g))


def torsion_prime_closed_form(m: FrameManifold, nd: "NordenData", p: ConnectionParams) -> np.ndarray:
    """Torsion of ``nabla'`` written in terms of theta and the parameters, as ``T[k, i, j]``."""
    th, ths, _, _ = _forms(m, nd)
    eye, J = np.eye(m.dim), m.J
    l1, l2, l3, l4, l5, l6, _, _ = p.lam

    def anti(a, M):  # a(x) M y - a(y) M x
        return np.einsum("i,kj->kij", a, M) - np.einsum("j,ki->kij", a, M)

    return (
        (l1 - l5) * anti(th, eye)
        + (l2 - l6) * anti(th, J)
        + (l3 - l6 - 0.5) * anti(ths, eye)
        + (l4 + l5) * anti(ths, J)
    ) / m.n


def nabla_g_prime_closed_form(m: FrameManifold, nd: "NordenData", p: ConnectionParams) -> np.ndarray:
    """``(nabla'_x g)(y, z)`` from the parameter expansion, as ``out[x, y, z]``."""
    th, ths, _, _ = _forms(m, nd)
    g, gt = m.g, m.g_tilde
    l1, l2, l3, l4, l5, l6, l7, l8 = p.lam
    first = 2 * (
        l1 * np.einsum("i,jk->ijk", th, g)
        + l2 * np.einsum("i,jk->ijk", th, gt)
        + l3 * np.einsum("i,jk->ijk", ths, g)
        + l4 * np.einsum("i,jk->ijk", ths, gt)
    )
    second = (l5 + l7) * (
        np.einsum("j,ik->ijk", th, g) + np.einsum("k,ij->ijk", th, g)
        - np.einsum("j,ik->ijk", ths, gt) - np.einsum("k,ij->ijk", ths, gt)
    )
    third = (l6 + l8) * (
        np.einsum("j,ik->ijk", th, gt) + np.einsum("k,ij->ijk", th, gt)
        + np.einsum("j,ik->ijk", ths, g) + np.einsum("k,ij->ijk", ths, g)
    )
    return -(first + second + third) / m.n


def nabla_g_from_q(m: FrameManifold, q: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """``(nabla' g, nabla' g~)`` as ``-Q(x,y,z) - Q(x,z,y)`` and ``-Q(x,y,Jz) - Q(x,Jz,y)``."""
    q_low = np.einsum("kij,kl->ijl", q, m.g)  # Q(x, y, z) = g(Q(x, y), z)
    ng = -(q_low + q_low.transpose(0, 2, 1))
    qJ = np.einsum("ijl,lz->ijz", q_low, m.J)  # Q(x, y, Jz)
    qJy = np.einsum("kij,kl,jz->izl", q, m.g, m.J)  # Q(x, Jz, y), indexed [x, z, y]
    ngt = -(qJ + qJy.transpose(0, 2, 1))
    return ng, ngt


def is_complex(m: FrameManifold, c: ConnectionCoeffs, tol: Tolerance = DEFAULT_TOL) -> PropertyCheck:
    res = float(np.abs(nabla_J(c, m.J)).max())
    return PropertyCheck(res <= tol.scaled_bound(_property_scale(c)), res)


def is_symmetric(m: FrameManifold, c: ConnectionCoeffs, tol: Tolerance = DEFAULT_TOL) -> PropertyCheck:
    res = float(np.abs(torsion(m, c).T).max())
    return PropertyCheck(res <= tol.scaled_bound(_property_scale(c)), res)


def is_metric(m: FrameManifold, c: ConnectionCoeffs, tol: Tolerance = DEFAULT_TOL) -> PropertyCheck:
    res = float(np.abs(covariant_derivative(m, c, m.g)).max())
    return PropertyCheck(res <= tol.scaled_bound(_property_scale(c)), res)


def is_natural(m: FrameManifold, c: ConnectionCoeffs, tol: Tolerance = DEFAULT_TOL) -> PropertyCheck:
    res = max(is_complex(m, c, tol).residual, is_metric(m, c, tol).residual)
    return PropertyCheck(res <= tol.scaled_bound(_property_scale(c)), res)


FAMILY_ARITY = {"levi-civita": 0, "prime": 8, "symmetric": 4, "natural": 2, "zero": 0, "canonical": 0, "yano": 0}


def build_family(m: FrameManifold, nd: "NordenData", family: str, params: Sequence[float] = (),
                 lc: ConnectionCoeffs | None = None, tol: Tolerance = DEFAULT_TOL) -> ConnectionCoeffs:
    """Dispatch on a family name as used on the command line."""
    if family not in FAMILY_ARITY:
        raise ValueError(f"unknown connection family {family!r}")
    if len(params) != FAMILY_ARITY[family]:
        raise ValueError(f"family {family!r} takes {FAMILY_ARITY[family]} parameters, got {len(params)}")
    lc = lc or levi_civita(m)
    if family == "levi-civita":
        return lc
    if family == "prime":
        return build_prime(m, nd, ConnectionParams(tuple(params)), lc, tol)
    if family == "symmetric":
        return build_symmetric(m, nd, params, lc, tol)
    if family == "natural":
        return build_natural(m, nd, params[0], params[1], lc, tol)
    if family == "zero":
        return build_zero(m, nd, lc, tol)
    if family == "canonical":
        return build_canonical(m, nd, lc, tol)
    return build_yano(m, nd, lc, tol)
