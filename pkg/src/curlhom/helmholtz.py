"""Quasiperiodic Helmholtz decomposition with respect to the measure.

Splits a vector field into its mu-mean, a quasi-gradient part driven by a
scalar potential with zero mu-mean, and the solenoidal remainder.  The
potential solves the Galerkin form of the weak problem

    <grad_k Phi_u, grad_k phi>_mu = <u, grad_k phi>_mu

over zero-mean test scalars.  For measures satisfying the gradient-mean-zero
condition the three parts are pairwise mu-orthogonal and the solenoidal part
has zero mean; for measures violating it those identities degrade by exactly
the measured violation, and callers gate on check_gradient_mean_zero.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .assembly import spectral_space
from .fields import Quasimomentum, SpectralField
from .measure import PeriodicMeasure


@dataclass
class HelmholtzSplit:
    """u = solenoidal + mean + quasi-gradient(potential), modulo ker(Gram)."""

    mean: np.ndarray            # complex 3-vector, int_Q u d mu
    solenoidal: SpectralField   # zero-mean divergence-free remainder
    potential: SpectralField    # scalar Phi_u with zero mu-mean

    def reconstruct(self, q: Quasimomentum) -> SpectralField:
        from .fields import grad_quasi

        out = self.solenoidal.copy()
        out.coefficients[:, out.cube.index_of((0, 0, 0))] += self.mean
        return out + grad_quasi(self.potential, q)


def solve_potential(u: SpectralField, q: Quasimomentum, mu: PeriodicMeasure) -> SpectralField:
    """Zero-mean scalar potential of the quasi-gradient part of u."""
    if not u.is_vector:
        raise ValueError("solve_potential expects a vector field")
    space = spectral_space(mu, u.cube)
    pot = space.potential_operator(q.kappa)
    phi = pot.solve(u.coefficients)
    return SpectralField(u.cube, phi[None, :])


def decompose(u: SpectralField, q: Quasimomentum, mu: PeriodicMeasure) -> HelmholtzSplit:
    """Helmholtz split of u at quasimomentum kappa = epsilon * theta."""
    space = spectral_space(mu, u.cube)
    pot = space.potential_operator(q.kappa)
    phi = pot.solve(u.coefficients)
    grad = pot.gradient_of(phi)
    mean = space.mean_of(u.coefficients)
    sol = u.coefficients - grad
    sol = sol.copy()
    sol[:, u.cube.index_of((0, 0, 0))] -= mean
    return HelmholtzSplit(
        mean=mean,
        solenoidal=SpectralField(u.cube, sol),
        potential=SpectralField(u.cube, phi[None, :]),
    )


def solenoidal_projector(q: Quasimomentum, mu: PeriodicMeasure, cube) -> np.ndarray:
    """Euclidean projector onto the weakly div_k-free coefficient subspace.

    The subspace is the null space of all gradient pairings (including the
    m = 0 row, which encodes kappa . mean(u) = 0); used by the right-hand
    side generator so that fibre data satisfies the solenoidality contract
    exactly on the truncated space.
    """
    space = spectral_space(mu, cube)
    basis = space.solenoidal_basis(q.kappa)
    return basis @ basis.conj().T
