"""Test manifolds: the four-dimensional Lie group family and random W1^0 algebras."""

from __future__ import annotations

from functools import lru_cache
from itertools import combinations

import numpy as np
from scipy.optimize import least_squares

from .manifold import FrameManifold
from .tensor import NordenError


class GeneratorFailure(NordenError):
    pass


def standard_norden_pair(n: int) -> tuple[np.ndarray, np.ndarray]:
    """``J e_i = e_{i+n}``, ``g = diag(1,..,1,-1,..,-1)``."""
    d = 2 * n
    J = np.zeros((d, d))
    for i in range(n):
        J[i + n, i] = 1.0
        J[i, i + n] = -1.0
    g = np.diag([1.0] * n + [-1.0] * n)
    return g, J


def example_structure_constants(lam: float, mu: float) -> np.ndarray:
    """Brackets of the four-dimensional algebra with parameters (lambda, mu)."""
    a = np.array([1.0, 0.0, 0.0, 1.0])  # e1 + e4
    b = np.array([0.0, 1.0, -1.0, 0.0])  # e2 - e3
    v = lam * a + mu * b
    w = mu * a - lam * b
    C = np.zeros((4, 4, 4))
    for (i, j), vec in {(0, 3): v, (1, 2): v, (0, 2): w, (1, 3): -w}.items():
        C[:, i, j] = vec
        C[:, j, i] = -vec
    return C


def build_example(lam: float = 1.0, mu: float = 2.0) -> FrameManifold:
    g, J = standard_norden_pair(2)
    return FrameManifold(g, J, example_structure_constants(lam, mu), name=f"example(lambda={lam:g}, mu={mu:g})")


def abelian(n: int) -> FrameManifold:
    g, J = standard_norden_pair(n)
    return FrameManifold(g, J, np.zeros((2 * n,) * 3), name=f"abelian(dim={2 * n})")


# --- random conformal Kaehler algebras -----------------------------------
#
# For fixed (g, J) the W1 condition is linear in the structure constants, so
# the admissible brackets form a linear subspace.  Inside it we solve the
# quadratic conditions (Jacobi identity, closed theta and theta*) together
# with the normalisation |theta| = 2n by least squares from a seeded start.


def _bracket_from_vector(v: np.ndarray, d: int, pairs) -> np.ndarray:
    C = np.zeros((d, d, d))
    for p, (i, j) in enumerate(pairs):
        C[:, i, j] = v[p * d : (p + 1) * d]
        C[:, j, i] = -C[:, i, j]
    return C


def _f_and_theta(C: np.ndarray, g: np.ndarray, g_inv: np.ndarray, J: np.ndarray):
    c_low = np.einsum("mij,mk->ijk", C, g)
    koszul = 0.5 * (c_low + c_low.transpose(1, 2, 0) + c_low.transpose(2, 1, 0))
    G = np.einsum("ijm,mk->kij", koszul, g_inv)
    dJ = np.einsum("aj,bia->bij", J, G) - np.einsum("aij,ba->bij", G, J)
    F = np.einsum("bij,bk->ijk", dJ, g)
    return F, np.einsum("ij,ijk->k", g_inv, F)


@lru_cache(maxsize=None)
def _w1_subspace(n: int) -> np.ndarray:
    d = 2 * n
    g, J = standard_norden_pair(n)
    g_inv = np.linalg.inv(g)
    gt = g @ J
    pairs = list(combinations(range(d), 2))
    cols = []
    for e in np.eye(len(pairs) * d):
        F, th = _f_and_theta(_bracket_from_vector(e, d, pairs), g, g_inv, J)
        ths = th @ J
        W = (np.einsum("ij,k->ijk", g, th) + np.einsum("ij,k->ijk", gt, ths)
             + np.einsum("ik,j->ijk", g, th) + np.einsum("ik,j->ijk", gt, ths)) / (2 * n)
        cols.append((F - W).ravel())
    _, s, vt = np.linalg.svd(np.array(cols).T)
    rank = int((s > 1e-10 * s[0]).sum())
    return vt[rank:].T


def random_w10(n: int, seed: int, attempts: int = 20) -> FrameManifold:
    """Seeded random left-invariant conformal Kaehler structure of dimension 2n (n >= 2)."""
    if n < 2:
        raise ValueError("need n >= 2")
    d = 2 * n
    g, J = standard_norden_pair(n)
    g_inv = np.linalg.inv(g)
    pairs = list(combinations(range(d), 2))
    triples = list(combinations(range(d), 3))
    basis = _w1_subspace(n)

    def equations(z):
        C = _bracket_from_vector(basis @ z, d, pairs)
        _, th = _f_and_theta(C, g, g_inv, J)
        ths = th @ J
        jac = [
            np.einsum("m,lm->l", C[:, i, j], C[:, :, k])
            + np.einsum("m,lm->l", C[:, j, k], C[:, :, i])
            + np.einsum("m,lm->l", C[:, k, i], C[:, :, j])
            for i, j, k in triples
        ]
        d_th = np.einsum("m,mij->ij", th, C)[np.triu_indices(d, 1)]
        d_ths = np.einsum("m,mij->ij", ths, C)[np.triu_indices(d, 1)]
        return np.concatenate([np.ravel(jac), d_th, d_ths, [th @ th - float(d * d)]])

    rng = np.random.default_rng(seed)
    for _ in range(attempts):
        sol = least_squares(equations, rng.normal(size=basis.shape[1]), xtol=1e-15, ftol=1e-15, gtol=1e-15)
        if np.abs(sol.fun).max() < 1e-11:
            C = _bracket_from_vector(basis @ sol.x, d, pairs)
            return FrameManifold(g, J, C, name=f"random W1^0 (dim={d}, seed={seed})")
    raise GeneratorFailure(f"no W1^0 structure found for n={n}, seed={seed}")


def build_dim6_w10(seed: int = 0) -> FrameManifold:
    """Six-dimensional conformal Kaehler test manifold; membership is checked, not assumed."""
    from .connection import levi_civita
    from .norden import classify, norden_data

    m = random_w10(3, seed)
    lc = levi_civita(m)
    verdict = classify(m, norden_data(m, lc), lc)
    if not verdict["W1^0"]:
        raise GeneratorFailure(f"generated manifold is not W1^0: residuals {verdict.residuals}; C = {m.C.tolist()}")
    return m


# --- printed component tables of the four-dimensional example -------------
#
# Entries are one-based as printed.  Each table is returned as a dense array
# in the package conventions so it can be compared with computed values.

E = np.eye(4)


def _e(*pairs) -> np.ndarray:
    """Vector ``sum coeff * e_idx`` from (coeff, one-based idx) pairs."""
    return sum((c * E[i - 1] for c, i in pairs), np.zeros(4))


def _frame_signs(J: np.ndarray) -> list[tuple[int, float]]:
    """For a signed permutation J: ``J e_i = s e_j`` as (j, s)."""
    out = []
    for i in range(J.shape[0]):
        j = int(np.argmax(np.abs(J[:, i])))
        out.append((j, float(J[j, i])))
    return out


def expected_F(lam: float, mu: float) -> np.ndarray:
    """Printed essential components of F, closed under F(x,y,z) = F(x,z,y) = F(x,Jy,Jz)."""
    printed = {
        (1, 1, 1): 2 * mu, (4, 2, 2): 2 * mu, (2, 2, 2): 2 * lam, (3, 1, 1): -2 * lam,
        (1, 1, 2): lam, (2, 1, 4): -lam, (3, 1, 4): lam, (4, 1, 2): -lam,
        (2, 1, 2): mu, (1, 1, 4): -mu, (3, 1, 2): mu, (4, 1, 4): -mu,
    }
    _, J = standard_norden_pair(2)
    signs = _frame_signs(J)
    F = np.zeros((4, 4, 4))
    assigned = np.zeros((4, 4, 4), dtype=bool)
    for (x, y, z), v in printed.items():
        x, y, z = x - 1, y - 1, z - 1
        (yj, sy), (zj, sz) = signs[y], signs[z]
        orbit = {(x, y, z): v, (x, z, y): v, (x, yj, zj): sy * sz * v, (x, zj, yj): sy * sz * v}
        for idx, val in orbit.items():
            if assigned[idx] and abs(F[idx] - val) > 1e-12:
                raise ValueError(f"inconsistent printed F entries at {tuple(i + 1 for i in idx)}")
            F[idx], assigned[idx] = val, True
    return F


def expected_theta(lam: float, mu: float) -> tuple[np.ndarray, np.ndarray]:
    theta = np.array([4 * mu, 4 * lam, 4 * lam, -4 * mu])
    theta_star = np.array([4 * lam, -4 * mu, -4 * mu, -4 * lam])
    return theta, theta_star


def expected_omega(lam: float, mu: float) -> tuple[np.ndarray, np.ndarray]:
    omega = 4 * mu * _e((1, 1), (1, 4)) + 4 * lam * _e((1, 2), (-1, 3))
    j_omega = 4 * lam * _e((1, 1), (1, 4)) - 4 * mu * _e((1, 2), (-1, 3))
    return omega, j_omega


def _gamma_from(entries: dict) -> np.ndarray:
    G = np.zeros((4, 4, 4))
    for (i, j), vec in entries.items():
        G[:, i - 1, j - 1] = vec
    return G


def lc_table_entries(lam: float, mu: float, *, printed: bool = False) -> dict:
    """Listed components ``nabla_{e_i} e_j`` of the Levi-Civita connection.

    The printed value of ``nabla_{e_2} e_3`` is ``mu e_1 + lambda e_4``; it is
    incompatible with ``g(nabla_{e_2} e_3, e_1) = -g(e_3, nabla_{e_2} e_1) = 0``
    and the corrected default uses ``mu e_2 + lambda e_4``.
    """
    d11 = _e((mu, 3), (lam, 4))
    d33 = _e((-lam, 1), (mu, 2))
    return {
        (1, 1): d11, (2, 2): d11, (3, 3): d33, (4, 4): d33,
        (1, 3): mu * _e((1, 1), (1, 4)),
        (1, 4): _e((lam, 1), (-mu, 3)),
        (2, 3): _e((mu, 1), (lam, 4)) if printed else _e((mu, 2), (lam, 4)),
        (2, 4): lam * _e((1, 2), (-1, 3)),
    }


def expected_levi_civita(lam: float, mu: float, *, printed: bool = False) -> np.ndarray:
    """Full coefficient array: listed entries, reversed pairs by torsion-freeness, the rest zero."""
    C = example_structure_constants(lam, mu)
    entries = lc_table_entries(lam, mu, printed=printed)
    G = _gamma_from(entries)
    for (i, j) in entries:
        if i != j and (j, i) not in entries:
            G[:, j - 1, i - 1] = G[:, i - 1, j - 1] - C[:, i - 1, j - 1]
    return G


def nabla0_table_entries(lam: float, mu: float, *, printed: bool = False) -> dict:
    """Components ``nabla^0_{e_i} e_j``.

    The printed last line reads ``nabla^0_{e_2} e_4 = nabla^0_{e_4} e_4 = -lambda e_3``,
    which clashes with ``-nabla^0_{e_4} e_4 = -mu e_3`` on the same line; the
    pattern of the table and the computation give ``nabla^0_{e_3} e_4``.
    """
    entries = {}
    for j, (a, b) in {1: (_e((mu, 2)), _e((lam, 2))), 2: (_e((-mu, 1)), _e((-lam, 1))),
                      3: (_e((mu, 4)), _e((lam, 4))), 4: (_e((-mu, 3)), _e((-lam, 3)))}.items():
        entries[(1, j)] = a
        entries[(4, j)] = -a
        entries[(2, j)] = b
        entries[(3, j)] = b
    if printed:
        del entries[(3, 4)]
        entries[(4, 4)] = _e((-lam, 3))
    return entries


def expected_nabla0(lam: float, mu: float, *, printed: bool = False) -> np.ndarray:
    return _gamma_from(nabla0_table_entries(lam, mu, printed=printed))
