"""Deterministic dense solvers for the Hermitian Galerkin systems.

Singular measures make the mass and stiffness forms positive semidefinite:
coefficient directions that vanish mu-a.e. (together with their curls) span
a pure-gauge kernel.  Systems are solved either by Cholesky after adding
the orthogonal projector onto a known kernel basis (fast path; exact
because consistent right-hand sides are orthogonal to the kernel), or by a
spectral pseudo-inverse with relative eigenvalue truncation (fallback).
All factorizations are LAPACK-deterministic, so repeated runs reproduce
results bit-for-bit.
"""

from __future__ import annotations

import numpy as np
import scipy.linalg as sla

from .errors import IllPosedDiscretisationError

#: relative eigenvalue cutoff separating kernel from physics
KERNEL_RTOL = 1e-11


def eigh_pseudo_solve(K: np.ndarray, rhs: np.ndarray, rtol: float = KERNEL_RTOL,
                      check_consistent: bool = True):
    """Minimum-norm solution of a Hermitian (possibly singular) system.

    Truncates eigenvalues with |w| <= rtol * max|w|.  Raises
    IllPosedDiscretisationError when the right-hand side has a component in
    the truncated subspace beyond tolerance (inconsistent system).
    """
    w, v = sla.eigh(K, driver="evr")
    wmax = np.abs(w).max() if w.size else 0.0
    keep = np.abs(w) > rtol * wmax
    coeffs = v.conj().T @ rhs
    if check_consistent and not np.all(keep):
        dropped = coeffs[~keep]
        scale = np.linalg.norm(rhs) + 1e-300
        worst = np.abs(dropped).max() / scale if dropped.size else 0.0
        if worst > 1e-6:
            bad = w[~keep][np.argmax(np.abs(dropped))]
            raise IllPosedDiscretisationError(
                f"singular Galerkin system with inconsistent right-hand side "
                f"(relative defect {worst:.2e})", offending_value=float(bad))
    inv = np.zeros_like(w)
    inv[keep] = 1.0 / w[keep]
    if rhs.ndim == 1:
        return v @ (inv * coeffs)
    return v @ (inv[:, None] * coeffs)


class HermitianSolver:
    """Factorized Hermitian PSD system with optional gauge-kernel projector.

    ``kernel`` is an orthonormal basis of directions known to be annihilated
    by the matrix; adding their projector makes the system definite without
    touching the physical subspace.  Falls back to the spectral
    pseudo-inverse if the regularized Cholesky still breaks down.
    """

    def __init__(self, K: np.ndarray, kernel: np.ndarray = None):
        self._n = K.shape[0]
        self._kernel = kernel if kernel is not None and kernel.shape[1] > 0 else None
        self._K = K
        mat = K
        if self._kernel is not None:
            mat = K + self._kernel @ self._kernel.conj().T
        try:
            self._cho = sla.cho_factor(mat, lower=True, check_finite=False)
            self._mode = "cholesky"
        except np.linalg.LinAlgError:
            self._cho = None
            self._mode = "pseudo"

    @property
    def mode(self) -> str:
        return self._mode

    def solve(self, rhs: np.ndarray) -> np.ndarray:
        if self._mode == "cholesky":
            x = sla.cho_solve(self._cho, rhs, check_finite=False)
            if self._kernel is not None:
                # remove any kernel component injected by the regularizer
                x = x - self._kernel @ (self._kernel.conj().T @ x)
            return x
        return eigh_pseudo_solve(self._K, rhs)

    def cond_estimate(self, iterations: int = 12, seed: int = 0) -> float:
        """Power/inverse-iteration estimate of the regular condition number."""
        rng = np.random.default_rng(seed)
        x = rng.standard_normal(self._n) + 1j * rng.standard_normal(self._n)
        x /= np.linalg.norm(x)
        lam_max = 0.0
        for _ in range(iterations):
            y = self._K @ x
            lam_max = np.linalg.norm(y)
            if lam_max == 0:
                return np.inf
            x = y / lam_max
        y = rng.standard_normal(self._n) + 1j * rng.standard_normal(self._n)
        if self._kernel is not None:
            y = y - self._kernel @ (self._kernel.conj().T @ y)
        y /= np.linalg.norm(y)
        lam_min = lam_max
        for _ in range(iterations):
            z = self.solve(y)
            nz = np.linalg.norm(z)
            if nz == 0:
                return np.inf
            lam_min = 1.0 / nz
            y = z / nz
        return float(lam_max / lam_min)


def constrained_nullspace(rows: np.ndarray, rtol: float = 1e-12) -> np.ndarray:
    """Orthonormal basis of {x: rows @ x = 0} via a deterministic SVD."""
    if rows.size == 0:
        n = rows.shape[1]
        return np.eye(n, dtype=complex)
    u, s, vh = np.linalg.svd(rows, full_matrices=True)
    smax = s[0] if s.size else 0.0
    rank = int(np.sum(s > rtol * smax))
    return vh[rank:].conj().T


def householder_complement(a: np.ndarray) -> np.ndarray:
    """Orthonormal basis of the hyperplane a^H x = 0 (deterministic).

    Completes a/||a|| to an orthonormal basis via a Householder reflection
    and returns the trailing columns.
    """
    n = a.size
    a = a / np.linalg.norm(a)
    e0 = np.zeros(n, dtype=complex)
    e0[0] = 1.0
    alpha = a[0]
    phase = alpha / abs(alpha) if abs(alpha) > 0 else 1.0
    v = a + phase * e0
    nv = np.linalg.norm(v)
    if nv < 1e-14:
        return np.eye(n, dtype=complex)[:, 1:]
    v = v / nv
    H = np.eye(n, dtype=complex) - 2.0 * np.outer(v, v.conj())
    # columns 1.. of H are orthonormal and orthogonal to a (up to phase)
    return H[:, 1:]
