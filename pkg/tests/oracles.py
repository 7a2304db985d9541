"""Loop-based reference implementations, written independently of the package code."""

import itertools

import numpy as np


def bracket(C, x, y):
    d = len(x)
    out = np.zeros(d)
    for i, j, k in itertools.product(range(d), repeat=3):
        out[k] += x[i] * y[j] * C[k, i, j]
    return out


def koszul_christoffel(g, C):
    """gamma[k,i,j] from 2 g(nabla_i e_j, e_l) = g([i,j],l) - g([j,l],i) + g([l,i],j)."""
    d = g.shape[0]
    E = np.eye(d)
    ginv = np.linalg.inv(g)
    low = np.zeros((d, d, d))
    for i, j, l in itertools.product(range(d), repeat=3):
        low[i, j, l] = 0.5 * (
            bracket(C, E[i], E[j]) @ g[:, l]
            - bracket(C, E[j], E[l]) @ g[:, i]
            + bracket(C, E[l], E[i]) @ g[:, j]
        )
    gamma = np.zeros((d, d, d))
    for k, i, j, l in itertools.product(range(d), repeat=4):
        gamma[k, i, j] += ginv[k, l] * low[i, j, l]
    return gamma


def nabla(gamma, x, y):
    """nabla_x y for constant-component vector fields."""
    d = len(x)
    out = np.zeros(d)
    for k, i, j in itertools.product(range(d), repeat=3):
        out[k] += gamma[k, i, j] * x[i] * y[j]
    return out


def curvature04(g, C, gamma):
    """R(x,y,z,u) = g(nabla_x nabla_y z - nabla_y nabla_x z - nabla_[x,y] z, u), one frame entry at a time."""
    d = g.shape[0]
    E = np.eye(d)
    R = np.zeros((d, d, d, d))
    for i, j, k in itertools.product(range(d), repeat=3):
        v = (nabla(gamma, E[i], nabla(gamma, E[j], E[k]))
             - nabla(gamma, E[j], nabla(gamma, E[i], E[k]))
             - nabla(gamma, bracket(C, E[i], E[j]), E[k]))
        for u in range(d):
            R[i, j, k, u] = v @ g[:, u]
    return R


def psi_pair(h, S):
    d = h.shape[0]
    out = np.zeros((d, d, d, d))
    for x, y, z, u in itertools.product(range(d), repeat=4):
        out[x, y, z, u] = h[y, z] * S[x, u] - h[x, z] * S[y, u] + h[x, u] * S[y, z] - h[y, u] * S[x, z]
    return out


def psi1(g, S):
    return psi_pair(g, S)


def psi2(g, J, S):
    """g(y,Jz) S(x,Ju) - g(x,Jz) S(y,Ju) + g(x,Ju) S(y,Jz) - g(y,Ju) S(x,Jz)."""
    d = g.shape[0]
    E = np.eye(d)
    G = lambda a, b: E[a] @ g @ b
    Sv = lambda a, b: E[a] @ S @ b
    out = np.zeros((d, d, d, d))
    for x, y, z, u in itertools.product(range(d), repeat=4):
        Jz, Ju = J @ E[z], J @ E[u]
        out[x, y, z, u] = G(y, Jz) * Sv(x, Ju) - G(x, Jz) * Sv(y, Ju) + G(x, Ju) * Sv(y, Jz) - G(y, Ju) * Sv(x, Jz)
    return out


def metric_trace(ginv, T, a, b):
    """g^{ij} T(.., e_i, .., e_j, ..) over slots a < b by explicit loops."""
    d = ginv.shape[0]
    rest = [s for s in range(T.ndim) if s not in (a, b)]
    out = np.zeros((d,) * len(rest))
    for idx in itertools.product(range(d), repeat=T.ndim):
        key = tuple(idx[s] for s in rest)
        out[key] += ginv[idx[a], idx[b]] * T[idx]
    return out
