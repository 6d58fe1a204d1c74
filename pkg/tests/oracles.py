"""Slow, independent reference implementations used as test oracles."""
import numpy as np

from hankeldoa.hankel import hankel_adjoint, hankelize


def explicit_basis_scores(y, shape, tol):
    """Materialize every normalized basis matrix A_k and evaluate the scores."""
    H = hankelize(y, shape)
    U, s, Vh = np.linalg.svd(H, full_matrices=False)
    r = int(np.count_nonzero(s > tol * s[0]))
    U, V = U[:, :r], Vh[:r].conj().T
    mu = np.empty(shape.n)
    for k in range(shape.n):
        e = np.zeros(shape.n)
        e[k] = 1.0
        A = hankelize(e, shape)
        A = A / np.linalg.norm(A)
        mu[k] = shape.n / r * max(np.linalg.norm(U.conj().T @ A) ** 2,
                                  np.linalg.norm(A @ V) ** 2)
    return mu, r


def reference_nuclear_completion(y_obs, known, shape, iters=6000, q=0.998):
    """Projected subgradient on min ||H(g)||_* s.t. g = y on the mask.

    Geometrically decaying normalized steps; keeps the best iterate.
    """
    g = y_obs.astype(complex).copy()
    step0 = 0.5 * np.linalg.norm(g) / np.sqrt(known.sum())
    best, best_f = g.copy(), np.inf
    for t in range(iters):
        U, s, Vh = np.linalg.svd(hankelize(g, shape), full_matrices=False)
        if s.sum() < best_f:
            best, best_f = g.copy(), s.sum()
        G = hankel_adjoint(U @ Vh, shape)
        G[known] = 0
        nG = np.linalg.norm(G)
        if nG == 0:
            break
        g = g - step0 * q**t * G / nG
    return best
