"""Truncated Fourier fields and the quasiperiodic differential operators.

A SpectralField stores the coefficients of a scalar (1 component) or
vector (3 components) trigonometric polynomial on the unit cell.  All
operators act frequency-wise through the shifted wavevectors kappa + 2*pi*l,
so the quasimomentum phase exp(i*kappa.y) never has to be materialized.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .frequencies import FrequencyCube, wavevectors
from .measure import PeriodicMeasure, gram_matrix


@dataclass(frozen=True)
class Quasimomentum:
    """Fibre parameter pair (theta, epsilon) with kappa = epsilon*theta in Q'."""

    theta: tuple
    epsilon: float

    def __post_init__(self):
        theta = tuple(float(t) for t in np.asarray(self.theta, dtype=float))
        object.__setattr__(self, "theta", theta)
        if not self.epsilon > 0:
            raise ValueError("epsilon must be positive")
        k = self.kappa
        if np.any(k < -np.pi - 1e-12) or np.any(k >= np.pi + 1e-12):
            raise ValueError(f"kappa = epsilon*theta = {k} outside [-pi, pi)^3")

    @property
    def kappa(self) -> np.ndarray:
        return self.epsilon * np.asarray(self.theta, dtype=float)

    @staticmethod
    def from_kappa(kappa, epsilon: float) -> "Quasimomentum":
        kappa = np.asarray(kappa, dtype=float)
        return Quasimomentum(theta=tuple(kappa / epsilon), epsilon=float(epsilon))


class SpectralField:
    """Scalar- or vector-valued truncated Fourier series on the cell.

    coefficients has shape (components, cube.size) with components in
    {1, 3}; entry (c, i) multiplies exp(2*pi*i l_i . y).
    """

    def __init__(self, cube: FrequencyCube, coefficients: np.ndarray):
        coefficients = np.asarray(coefficients, dtype=complex)
        if coefficients.ndim == 1:
            coefficients = coefficients[None, :]
        if coefficients.shape[0] not in (1, 3):
            raise ValueError("fields are scalar (1 component) or vector (3 components)")
        if coefficients.shape[1] != cube.size:
            raise ValueError(
                f"coefficient length {coefficients.shape[1]} != cube size {cube.size}"
            )
        self.cube = cube
        self.coefficients = coefficients

    # -- constructors ------------------------------------------------------
    @staticmethod
    def zeros(cube: FrequencyCube, components: int = 3) -> "SpectralField":
        return SpectralField(cube, np.zeros((components, cube.size), dtype=complex))

    @staticmethod
    def constant(cube: FrequencyCube, value) -> "SpectralField":
        value = np.atleast_1d(np.asarray(value, dtype=complex))
        f = SpectralField.zeros(cube, components=value.size)
        f.coefficients[:, cube.index_of((0, 0, 0))] = value
        return f

    @staticmethod
    def from_modes(cube: FrequencyCube, modes, components: int = 3) -> "SpectralField":
        """Build from {frequency tuple: coefficient vector} pairs."""
        f = SpectralField.zeros(cube, components=components)
        for l, val in modes.items():
            f.coefficients[:, cube.index_of(l)] = np.atleast_1d(np.asarray(val, dtype=complex))
        return f

    # -- basic structure ----------------------------------------------------
    @property
    def components(self) -> int:
        return self.coefficients.shape[0]

    @property
    def is_vector(self) -> bool:
        return self.components == 3

    def copy(self) -> "SpectralField":
        return SpectralField(self.cube, self.coefficients.copy())

    def restricted_to(self, cube: FrequencyCube) -> "SpectralField":
        """Project onto a smaller cube / embed into a larger one."""
        out = SpectralField.zeros(cube, self.components)
        lat = self.cube.lattice
        keep = np.all(np.abs(lat) <= cube.cutoff, axis=1)
        src = np.nonzero(keep)[0]
        side = cube.side
        dst = ((lat[src, 0] + cube.cutoff) * side + (lat[src, 1] + cube.cutoff)) * side + (
            lat[src, 2] + cube.cutoff
        )
        out.coefficients[:, dst] = self.coefficients[:, src]
        return out

    def __add__(self, other: "SpectralField") -> "SpectralField":
        self._check_compatible(other)
        return SpectralField(self.cube, self.coefficients + other.coefficients)

    def __sub__(self, other: "SpectralField") -> "SpectralField":
        self._check_compatible(other)
        return SpectralField(self.cube, self.coefficients - other.coefficients)

    def __mul__(self, scalar) -> "SpectralField":
        return SpectralField(self.cube, self.coefficients * scalar)

    __rmul__ = __mul__

    def _check_compatible(self, other: "SpectralField"):
        if self.cube.cutoff != other.cube.cutoff or self.components != other.components:
            raise ValueError("incompatible fields")

    def evaluate(self, points: np.ndarray) -> np.ndarray:
        """Pointwise values at (n, 3) sample points (for oracles and checks)."""
        points = np.atleast_2d(np.asarray(points, dtype=float))
        phases = np.exp(2j * np.pi * points @ self.cube.lattice.T.astype(float))
        return phases @ self.coefficients.T


# -- differential operators --------------------------------------------------

def grad_quasi(phi: SpectralField, q: Quasimomentum) -> SpectralField:
    """e_kappa-conjugated gradient: coefficients i*(kappa + 2*pi*l)*phi_l."""
    if phi.is_vector:
        raise ValueError("grad_quasi expects a scalar field")
    k = wavevectors(phi.cube, q.kappa)
    coeffs = 1j * k.T * phi.coefficients[0][None, :]
    return SpectralField(phi.cube, coeffs)


def curl_quasi(u: SpectralField, q: Quasimomentum) -> SpectralField:
    """e_kappa-conjugated curl: per-frequency i*(kappa + 2*pi*l) x u_l."""
    if not u.is_vector:
        raise ValueError("curl_quasi expects a vector field")
    k = wavevectors(u.cube, q.kappa)
    coeffs = 1j * np.cross(k, u.coefficients.T).T
    return SpectralField(u.cube, coeffs)


# -- measure-weighted pairings ------------------------------------------------

def inner_product_mu(u: SpectralField, v: SpectralField, mu: PeriodicMeasure) -> complex:
    """<u, v>_mu = sum_{l,m} u_l conj(v_m) mu_hat(m - l), summed over components."""
    u._check_compatible(v)
    gram = gram_matrix(mu, u.cube)
    return complex(np.sum(np.conj(v.coefficients) * gram.apply(u.coefficients)))


def norm_mu(u: SpectralField, mu: PeriodicMeasure) -> float:
    val = inner_product_mu(u, u, mu).real
    return float(np.sqrt(max(val, 0.0)))


def mean_mu(u: SpectralField, mu: PeriodicMeasure) -> np.ndarray:
    """Per-component mean int_Q u d mu = sum_l u_l mu_hat(-l)."""
    table = mu.moment_table(u.cube.cutoff)
    lat = u.cube.lattice
    m = u.cube.cutoff
    moments = table[(-lat[:, 0]) + m, (-lat[:, 1]) + m, (-lat[:, 2]) + m]
    return u.coefficients @ moments


def gradient_pairings(u: SpectralField, q: Quasimomentum, mu: PeriodicMeasure) -> np.ndarray:
    """Vector of weak-divergence pairings <e_k u, grad(e_k e_m)>_mu over m.

    Entry m equals -i*(kappa + 2*pi*m) . (G u)_m where G is the Gram matrix,
    i.e. the integral int_Q e_k u . conj(grad(e_k e_m)) d mu.  Includes the
    m = 0 row, whose vanishing is the transversality condition
    kappa . int_Q u = 0.
    """
    if not u.is_vector:
        raise ValueError("expected a vector field")
    gram = gram_matrix(mu, u.cube)
    gu = gram.apply(u.coefficients)  # (3, B)
    k = wavevectors(u.cube, q.kappa)  # (B, 3)
    return -1j * np.sum(k.T * gu, axis=0)


def weak_div_residual(u: SpectralField, q: Quasimomentum, mu: PeriodicMeasure) -> float:
    """Relative mu-norm of the gradient-subspace component of u.

    Computed as sqrt(d^H S^+ d)/||u||_mu where d are the gradient pairings
    and S is the Gram matrix of the quasi-gradients of basis scalars; this
    equals the mu-norm of the mu-orthogonal projection of u onto the span of
    quasi-gradients, so 0 means weakly solenoidal on the truncated space.
    """
    nu = norm_mu(u, mu)
    if nu == 0.0:
        return 0.0
    d = gradient_pairings(u, q, mu)
    gram = gram_matrix(mu, u.cube)
    k = wavevectors(u.cube, q.kappa)  # (B, 3)
    # S[m, m'] = <g_{m'}, g_m>_mu = (k_m . k_{m'}) * G[m, m']
    s = (k @ k.T) * gram.matrix
    w, v = np.linalg.eigh(s)
    tol = 1e-12 * max(w[-1], 0.0)
    inv = np.where(w > tol, 1.0 / np.where(w > tol, w, 1.0), 0.0)
    val = np.vdot(d, (v * inv[None, :]) @ (v.conj().T @ d)).real
    return float(np.sqrt(max(val, 0.0)) / nu)
