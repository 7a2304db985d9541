"""Seeded property checks of the curvature operators on random Norden pairs."""

from __future__ import annotations

import numpy as np

from .curvature import bochner, curvature_like_check, hybrid_projection, kahler_check, pi1, pi2, pi3, psi1, psi_diff, weyl
from .example import standard_norden_pair
from .manifold import FrameManifold
from .report import VerificationReport
from .tensor import DEFAULT_TOL, Tolerance


def random_norden_pair(n: int, rng: np.random.Generator, spread: float = 0.1) -> tuple[np.ndarray, np.ndarray]:
    """The standard pair in a random frame ``e'_i = P e_i`` close to the identity."""
    g0, J0 = standard_norden_pair(n)
    P = np.eye(2 * n) + spread * rng.normal(size=(2 * n, 2 * n))
    return P.T @ g0 @ P, np.linalg.solve(P, J0 @ P)


def random_point(n: int, rng: np.random.Generator) -> FrameManifold:
    """Norden pair with zero brackets: the operators only see ``g`` and ``J``."""
    g, J = random_norden_pair(n, rng)
    return FrameManifold(g, J, np.zeros((2 * n,) * 3), name=f"random Norden pair (dim={2 * n})")


def _bound(tol: Tolerance, *arrays) -> float:
    return tol.scaled_bound(max([1.0] + [float(np.abs(a).max()) for a in arrays]))


def operator_identities(n: int, trials: int, seed: int, tol: Tolerance = DEFAULT_TOL) -> VerificationReport:
    """Worst residual over ``trials`` random (g, J, S) of each operator identity in dimension 2n."""
    rng = np.random.default_rng(seed)
    rep = VerificationReport(title=f"operator identities (dim={2 * n}, trials={trials})", seed=seed)
    names = ["psi1(S) curvature-like", "{psi1 - psi2}(S_h) Kaehler", "pi1 - pi2 Kaehler", "pi3 Kaehler",
             "W(psi1(S)) = 0"]
    if n >= 3:
        names.append("B({psi1 - psi2}(S_h)) = 0")
    worst: dict = {}

    def keep(name, res, bound):
        # the trial closest to (or furthest past) its bound
        if name not in worst or res / bound > worst[name][0] / worst[name][1]:
            worst[name] = (res, bound)

    for _ in range(trials):
        m = random_point(n, rng)
        A = rng.normal(size=(2 * n, 2 * n))
        S = A + A.T
        S /= np.abs(S).max()
        Sh = hybrid_projection(m, rng.normal(size=(2 * n, 2 * n)))
        Sh /= np.abs(Sh).max()
        L1 = psi1(m, S)
        keep(names[0], curvature_like_check(L1, tol).residual, _bound(tol, L1))
        Lh = psi_diff(m, Sh)
        keep(names[1], kahler_check(m, Lh, tol).residual, _bound(tol, Lh))
        P12 = pi1(m) - pi2(m)
        keep(names[2], kahler_check(m, P12, tol).residual, _bound(tol, P12))
        P3 = pi3(m)
        keep(names[3], kahler_check(m, P3, tol).residual, _bound(tol, P3))
        keep(names[4], float(np.abs(weyl(m, L1)).max()), _bound(tol, L1))
        if n >= 3:
            keep(names[5], float(np.abs(bochner(m, Lh, tol, check=False)).max()), _bound(tol, Lh))
    for name in names:
        res, bound = worst.get(name, (0.0, tol.absolute))
        rep.add(name, res, bound, parameters={"dim": 2 * n, "trials": trials}, note=f"worst of {trials} trials")
    return rep
