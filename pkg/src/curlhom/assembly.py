"""Shared dense assembly of measure-weighted Galerkin forms.

A SpectralSpace bundles everything that depends only on (measure, cube):
the Gram matrix, the pure-gauge kernel, and constructors for the
kappa-dependent operators (curl stiffness, gradient stiffness, divergence
pairings, potential operator).  The curl stiffness against a coefficient A
is assembled through the transfer table

    Xi(d) = sum_k A_hat(k) mu_hat(d - k),

so each entry is the exact integral int_Q A curl(phi_j) . conj(curl(phi_i))
d mu of the band-limited data; no quadrature is involved anywhere.
"""

from __future__ import annotations

from functools import lru_cache

import numpy as np

from .coefficients import CoefficientField
from .errors import IllPosedDiscretisationError
from .fields import SpectralField
from .frequencies import FrequencyCube, wavevectors
from .linalg import KERNEL_RTOL, householder_complement
from .measure import PeriodicMeasure, gram_matrix

_EYE = np.eye(3)
# (e_a x e_c) components: CROSS[a, c] = e_a x e_c as a 3-vector
_CROSS = np.array([[np.cross(_EYE[a], _EYE[c]) for c in range(3)] for a in range(3)])


def cross_matrix(v) -> np.ndarray:
    """Matrix C with C @ x = v x x."""
    v = np.asarray(v, dtype=float)
    return np.array([
        [0.0, -v[2], v[1]],
        [v[2], 0.0, -v[0]],
        [-v[1], v[0], 0.0],
    ])


class PotentialOperator:
    """Galerkin solve of the scalar potential problem at fixed kappa.

    Maps a vector field u to the zero-mu-mean scalar Phi_u with
    <grad_k Phi_u, grad_k phi>_mu = <u, grad_k phi>_mu for every zero-mean
    test scalar phi.  Kernel directions of the reduced stiffness are
    truncated spectrally, which realizes the quotient-space solve.
    """

    def __init__(self, space: "SpectralSpace", kappa):
        self.space = space
        self.kappa = np.asarray(kappa, dtype=float)
        cube = space.cube
        G = space.gram.matrix
        k = wavevectors(cube, kappa)  # (B, 3)
        self.stiffness = (k @ k.T) * G
        self.div_rows = -1j * k[:, :, None] * G[:, None, :]  # (B rows, 3, B)
        # zero-mu-mean constraint a^H phi = 0 with a_l = mu_hat(l)
        m = cube.cutoff
        lat = cube.lattice
        table = space.mu.moment_table(m)
        a = table[lat[:, 0] + m, lat[:, 1] + m, lat[:, 2] + m]
        self._zero_mean_basis = householder_complement(a)
        Z = self._zero_mean_basis
        sz = Z.conj().T @ self.stiffness @ Z
        w, v = np.linalg.eigh(sz)
        wmax = max(np.abs(w).max(), 0.0) if w.size else 0.0
        keep = w > KERNEL_RTOL * wmax
        if wmax > 0 and np.any(w < -1e-8 * wmax):
            raise IllPosedDiscretisationError(
                "potential stiffness not positive semidefinite",
                offending_value=float(w.min()))
        inv = np.zeros_like(w)
        inv[keep] = 1.0 / w[keep]
        # pseudo-inverse of the reduced stiffness, mapped back to full space
        self._solve_mat = (Z @ (v * inv[None, :]) @ v.conj().T) @ Z.conj().T

    def divergence_pairings(self, coeffs: np.ndarray) -> np.ndarray:
        """d_m = <u, grad_k e_m>_mu for all basis scalars m (row m = 0 included)."""
        return np.einsum("mcj,cj->m", self.div_rows, coeffs)

    def solve(self, coeffs: np.ndarray) -> np.ndarray:
        """Potential coefficients Phi for a vector coefficient array (3, B)."""
        return self._solve_mat @ self.divergence_pairings(coeffs)

    def gradient_of(self, phi: np.ndarray) -> np.ndarray:
        """Coefficient array (3, B) of e_k-conjugated grad(e_k Phi)."""
        k = wavevectors(self.space.cube, self.kappa)
        return 1j * k.T * phi[None, :]

    def potential_map(self) -> np.ndarray:
        """Dense (B, 3B) matrix of u -> Phi_u."""
        B = self.space.cube.size
        rows = self.div_rows.reshape(B, 3 * B)
        return self._solve_mat @ rows

    def phi_energy_matrix(self) -> np.ndarray:
        """(3B, 3B) matrix of (u, v) -> <grad Phi_u, grad Phi_v>_mu."""
        P = self.potential_map()
        return P.conj().T @ (self.stiffness @ P)


class SpectralSpace:
    """All measure-level assembly state for one (measure, cube) pair."""

    def __init__(self, mu: PeriodicMeasure, cube: FrequencyCube):
        self.mu = mu
        self.cube = cube
        self.gram = gram_matrix(mu, cube)
        self._gauge = None
        self._potentials = {}

    # -- simple lookups -------------------------------------------------------
    @property
    def size(self) -> int:
        return self.cube.size

    def moment_lookup(self, lat_rows: np.ndarray) -> np.ndarray:
        m = self.cube.cutoff
        table = self.mu.moment_table(m)
        return table[lat_rows[:, 0] + m, lat_rows[:, 1] + m, lat_rows[:, 2] + m]

    def mean_rows(self) -> np.ndarray:
        """(3, 3, B) array with mean(u)_c = sum_j rows[c, c', j] u_{c', j}."""
        lat = self.cube.lattice
        mom = self.moment_lookup(-lat)
        rows = np.zeros((3, 3, self.size), dtype=complex)
        for c in range(3):
            rows[c, c, :] = mom
        return rows

    def vector_norm(self, coeffs: np.ndarray) -> float:
        val = np.sum(np.conj(coeffs) * self.gram.apply(coeffs)).real
        return float(np.sqrt(max(val, 0.0)))

    def vector_inner(self, u: np.ndarray, v: np.ndarray) -> complex:
        return complex(np.sum(np.conj(v) * self.gram.apply(u)))

    def mean_of(self, coeffs: np.ndarray) -> np.ndarray:
        lat = self.cube.lattice
        return coeffs @ self.moment_lookup(-lat)

    def field(self, coeffs: np.ndarray) -> SpectralField:
        return SpectralField(self.cube, coeffs)

    # -- kappa-dependent operators ---------------------------------------------
    def curl_factors(self, kappa) -> np.ndarray:
        """X[a, c, i] = ((kappa + 2*pi*l_i) x e_c)_a; curl of basis (c,i) is i*X[:,c,i]."""
        k = wavevectors(self.cube, kappa)  # (B, 3)
        # (k_i x e_c)_a = sum_b k[i,b] * (e_b x e_c)_a
        return np.einsum("ib,bca->aci", k, _CROSS)

    def transfer_table(self, A: CoefficientField) -> np.ndarray:
        """Xi(d) = sum_k A_hat(k) mu_hat(d-k) on the difference cube {-2L..2L}^3."""
        L = self.cube.cutoff
        band = A.band if A.band is not None else 2 * L
        band = min(band, 2 * L)
        mom = self.mu.moment_table(2 * L + band)
        a_tab = A.coefficient_table(band)
        dside = 4 * L + 1
        xi = np.zeros((dside, dside, dside, 3, 3), dtype=complex)
        off = 2 * L + band
        for k1 in range(-band, band + 1):
            for k2 in range(-band, band + 1):
                for k3 in range(-band, band + 1):
                    mat = a_tab[k1 + band, k2 + band, k3 + band]
                    if not np.any(mat):
                        continue
                    block = mom[
                        off - 2 * L - k1: off + 2 * L + 1 - k1,
                        off - 2 * L - k2: off + 2 * L + 1 - k2,
                        off - 2 * L - k3: off + 2 * L + 1 - k3,
                    ]
                    xi += block[..., None, None] * mat[None, None, None]
        return xi

    def curl_stiffness(self, A: CoefficientField, kappa, xi: np.ndarray = None) -> np.ndarray:
        """Dense (3B, 3B) matrix of <A curl_k u, curl_k v>_mu (Hermitian PSD)."""
        if xi is None:
            xi = self.transfer_table(A)
        B = self.size
        X = self.curl_factors(kappa)  # (a, c, i)
        Xc = X.conj()
        idx, _ = self.cube.difference_index()
        flat = xi.reshape(-1, 3, 3)
        K = np.zeros((3, B, 3, B), dtype=complex)
        for a in range(3):
            for b in range(3):
                xi_ab = flat[:, a, b][idx]  # (B, B)
                if not np.any(xi_ab):
                    continue
                # K[c,i,d,j] += conj(X[a,c,i]) * Xi_ab[i,j] * X[b,d,j]
                K += np.einsum("ci,ij,dj->cidj", Xc[a], xi_ab, X[b], optimize=True)
        K = K.reshape(3 * B, 3 * B)
        return 0.5 * (K + K.conj().T)

    def mass_matrix(self) -> np.ndarray:
        """Dense (3B, 3B) block-diagonal Gram mass matrix."""
        B = self.size
        M = np.zeros((3 * B, 3 * B), dtype=complex)
        for c in range(3):
            M[c * B:(c + 1) * B, c * B:(c + 1) * B] = self.gram.matrix
        return M

    def potential_operator(self, kappa) -> PotentialOperator:
        key = tuple(np.round(np.asarray(kappa, dtype=float), 15))
        if key not in self._potentials:
            self._potentials[key] = PotentialOperator(self, np.asarray(kappa, dtype=float))
        return self._potentials[key]

    def gauge_kernel(self) -> np.ndarray:
        """Orthonormal basis of {c: c and curl(c) both mu-null} (3B x k).

        This joint null space is independent of kappa and of the (elliptic)
        coefficient, so one basis regularizes every fibre system.
        """
        if self._gauge is None:
            B = self.size
            null = self.gram.null_space()  # (B, g0)
            g0 = null.shape[1]
            if g0 == 0:
                self._gauge = np.zeros((3 * B, 0), dtype=complex)
            else:
                N3 = np.zeros((3 * B, 3 * g0), dtype=complex)
                for c in range(3):
                    N3[c * B:(c + 1) * B, c * g0:(c + 1) * g0] = null
                identity = CoefficientField.identity()
                S0 = self.curl_stiffness(identity, np.zeros(3))
                T = N3.conj().T @ (S0 @ N3)
                w, v = np.linalg.eigh(0.5 * (T + T.conj().T))
                wmax = max(np.abs(w).max(), 0.0) if w.size else 0.0
                keep = w <= KERNEL_RTOL * max(wmax, 1.0)
                self._gauge = N3 @ v[:, keep]
        return self._gauge

    # -- solenoidal structure ---------------------------------------------------
    def divergence_rows(self, kappa) -> np.ndarray:
        """(B, 3B) matrix D with (D u)_m = <u, grad_k e_m>_mu."""
        pot = self.potential_operator(kappa)
        B = self.size
        return pot.div_rows.reshape(B, 3 * B)

    def solenoidal_basis(self, kappa) -> np.ndarray:
        """Orthonormal (Euclidean) basis of the weakly div_k-free subspace."""
        from .linalg import constrained_nullspace

        return constrained_nullspace(self.divergence_rows(kappa))


@lru_cache(maxsize=8)
def spectral_space(mu: PeriodicMeasure, cube: FrequencyCube) -> SpectralSpace:
    return SpectralSpace(mu, cube)
