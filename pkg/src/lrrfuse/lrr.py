"""Low-rank representation of a data matrix, solved by inexact augmented
Lagrangian splitting.

Solves  min ||Z||_* + lam * ||E||_{2,1}  s.t.  X = X Z + E,  using X itself
as the dictionary. Z captures the shared subspace structure of the columns;
the column-sparse E absorbs sample-specific corruption. The splitting
introduces an auxiliary J for Z, updates J by singular value thresholding,
Z by a dense linear solve (the system matrix is factored once per call),
and E by the l2,1 proximal operator, with a geometrically growing penalty.
"""

from dataclasses import dataclass

import numpy as np

ZERO_INPUT_CUTOFF = 1e-12


@dataclass(frozen=True)
class AlmParams:
    """Solver knobs: balance coefficient and penalty schedule."""

    lam: float = 1.0
    mu0: float = 0.1
    mu_max: float = 1e8
    rho: float = 1.5
    tol: float = 1e-6
    max_iter: int = 200

    def __post_init__(self):
        if self.lam <= 0:
            raise ValueError(f"lam must be positive, got {self.lam}")
        if self.mu0 <= 0:
            raise ValueError(f"mu0 must be positive, got {self.mu0}")
        if self.rho <= 1:
            raise ValueError(f"rho must exceed 1, got {self.rho}")
        if self.tol <= 0:
            raise ValueError(f"tol must be positive, got {self.tol}")
        if self.max_iter < 1:
            raise ValueError(f"max_iter must be >= 1, got {self.max_iter}")


@dataclass
class LrrSolution:
    """Result of one solve: coefficients, noise split, and diagnostics."""

    Z: np.ndarray
    E: np.ndarray
    iterations: int
    converged: bool
    final_residual: float  # ||X - X Z - E||_inf at exit


def svt(M, tau):
    """Singular value thresholding: U max(S - tau, 0) V^T.

    The proximal operator of tau * nuclear norm.
    """
    if tau < 0:
        raise ValueError(f"threshold must be >= 0, got {tau}")
    M = np.asarray(M, dtype=float)
    if not np.all(np.isfinite(M)):
        raise ValueError("svt: input has non-finite entries")
    U, s, Vt = np.linalg.svd(M, full_matrices=False)
    return (U * np.maximum(s - tau, 0.0)) @ Vt


def l21_shrink(M, tau):
    """Columnwise shrinkage: scale each column of norm c by (c - tau)/c, or
    zero it when c <= tau. The proximal operator of tau * l2,1 norm."""
    if tau < 0:
        raise ValueError(f"threshold must be >= 0, got {tau}")
    M = np.asarray(M, dtype=float)
    norms = np.linalg.norm(M, axis=0)
    scale = np.where(norms > tau, (norms - tau) / np.where(norms > 0, norms, 1.0), 0.0)
    return M * scale


def nuclear_norm(M):
    """Sum of singular values."""
    M = np.asarray(M, dtype=float)
    if not np.all(np.isfinite(M)):
        raise ValueError("nuclear_norm: input has non-finite entries")
    return float(np.linalg.svd(M, compute_uv=False).sum())


def l21_norm(M):
    """Sum of column Euclidean norms."""
    return float(np.linalg.norm(np.asarray(M, dtype=float), axis=0).sum())


def lrr_solve(X, params=AlmParams()):
    """Solve min ||Z||_* + lam ||E||_{2,1} s.t. X = X Z + E by inexact ALM.

    Iterates until max(||X - XZ - E||_inf, ||Z - J||_inf) <= tol or max_iter;
    non-convergence is reported through the `converged` flag, not raised.
    A (near-)zero X short-circuits to the exact zero solution.
    """
    X = np.asarray(X, dtype=float)
    if X.ndim != 2 or X.size == 0:
        raise ValueError("lrr_solve expects a non-empty 2-D matrix")
    if not np.all(np.isfinite(X)):
        raise ValueError("lrr_solve: input has non-finite entries")
    m = X.shape[1]
    if np.max(np.abs(X)) < ZERO_INPUT_CUTOFF:
        return LrrSolution(
            Z=np.zeros((m, m)), E=np.zeros_like(X), iterations=0, converged=True, final_residual=0.0
        )

    # (X^T X + I) is constant across iterations; factor once
    gram_inv = np.linalg.inv(X.T @ X + np.eye(m))
    Xt = X.T
    Z = np.zeros((m, m))
    E = np.zeros_like(X)
    Y1 = np.zeros_like(X)
    Y2 = np.zeros((m, m))
    mu = params.mu0
    converged = False
    residual = np.inf
    iterations = 0
    for iterations in range(1, params.max_iter + 1):
        J = svt(Z + Y2 / mu, 1.0 / mu)
        Z = gram_inv @ (Xt @ (X - E + Y1 / mu) + J - Y2 / mu)
        E = l21_shrink(X - X @ Z + Y1 / mu, params.lam / mu)
        R1 = X - X @ Z - E
        R2 = Z - J
        residual = float(np.max(np.abs(R1)))
        if max(residual, float(np.max(np.abs(R2)))) <= params.tol:
            converged = True
            break
        Y1 = Y1 + mu * R1
        Y2 = Y2 + mu * R2
        mu = min(mu * params.rho, params.mu_max)
    return LrrSolution(Z=Z, E=E, iterations=iterations, converged=converged, final_residual=residual)
