"""Periodic Borel measures with closed-form Fourier moments.

The admissible class is a nonnegative combination of the Lebesgue measure
on the unit cell Q = [0,1)^3 and finitely many axis-parallel flat pieces
(planes, lines, points) carrying lower-dimensional Lebesgue weight.  Every
moment

    mu_hat(l) = int_Q exp(-2*pi*i l.x) d mu(x)

is then an exact finite sum of Kronecker deltas times unit-modulus phases,
which keeps all Gram matrices and weak forms free of quadrature error.
The total mass is normalized to mu(Q) = 1; the pre-normalization mass is
retained for reproducibility of scenario files.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from typing import Mapping, Sequence

import numpy as np

from .frequencies import FrequencyCube

_AXES = (1, 2, 3)


def _as_offset(value):
    """Normalize an offset to Fraction when exact, float otherwise."""
    if isinstance(value, Fraction):
        off = value
    elif isinstance(value, str):
        off = Fraction(value)
    elif isinstance(value, (int, np.integer)):
        off = Fraction(int(value))
    else:
        off = float(value)
    f = float(off)
    if not 0.0 <= f < 1.0:
        raise ValueError(f"offset {value!r} outside [0, 1)")
    return off


@dataclass(frozen=True)
class FlatComponent:
    """One axis-parallel flat piece of the support.

    free_axes spans the piece (its dimension is len(free_axes)); offsets fix
    the remaining coordinates.  weight multiplies the len(free_axes)-
    dimensional Lebesgue measure carried by the piece.  An empty free_axes
    is a point mass.
    """

    free_axes: frozenset
    offsets: tuple  # sorted tuple of (axis, offset) pairs for the fixed axes
    weight: float

    @staticmethod
    def build(free_axes: Sequence[int], offsets: Mapping[int, object], weight: float) -> "FlatComponent":
        free = frozenset(int(a) for a in free_axes)
        if not free <= set(_AXES):
            raise ValueError(f"free_axes {sorted(free)} must be a subset of {{1,2,3}}")
        fixed = tuple(a for a in _AXES if a not in free)
        off_in = {int(a): v for a, v in offsets.items()}
        extra = set(off_in) - set(fixed)
        if extra:
            raise ValueError(f"offsets given for free axes {sorted(extra)}")
        missing = set(fixed) - set(off_in)
        if missing:
            raise ValueError(f"missing offsets for fixed axes {sorted(missing)}")
        if weight <= 0:
            raise ValueError("flat component weight must be positive")
        pairs = tuple((a, _as_offset(off_in[a])) for a in fixed)
        return FlatComponent(free_axes=free, offsets=pairs, weight=float(weight))

    @property
    def dimension(self) -> int:
        return len(self.free_axes)

    def offset_of(self, axis: int):
        for a, v in self.offsets:
            if a == axis:
                return v
        raise KeyError(axis)

    def geometry_key(self):
        """Support identity (free axes + offsets), ignoring the weight."""
        return (tuple(sorted(self.free_axes)), tuple((a, float(v)) for a, v in self.offsets))

    def moment_factors(self, l_values: np.ndarray, axis: int) -> np.ndarray:
        """Per-axis factor of the moment at integer frequencies l_values."""
        l_values = np.asarray(l_values)
        if axis in self.free_axes:
            return (l_values == 0).astype(complex)
        c = float(self.offset_of(axis))
        return np.exp(-2j * np.pi * l_values * c)


@dataclass(frozen=True)
class PeriodicMeasure:
    """Normalized periodic Borel measure on Q = [0,1)^3.

    lebesgue_weight and the component weights are stored after
    normalization, so fourier_moment(mu, 0) == 1 exactly; ``normalization``
    records the total mass they were divided by.
    """

    lebesgue_weight: float
    flat_components: tuple
    normalization: float

    @staticmethod
    def build(lebesgue_weight: float = 0.0, flat_components: Sequence[FlatComponent] = ()) -> "PeriodicMeasure":
        if lebesgue_weight < 0:
            raise ValueError("lebesgue_weight must be nonnegative")
        comps = tuple(flat_components)
        keys = [c.geometry_key() for c in comps]
        if len(set(keys)) != len(keys):
            raise ValueError("duplicate flat components (identical support)")
        total = float(lebesgue_weight) + sum(c.weight for c in comps)
        if total <= 0:
            raise ValueError("measure must have positive total mass")
        scaled = tuple(
            FlatComponent(free_axes=c.free_axes, offsets=c.offsets, weight=c.weight / total)
            for c in comps
        )
        return PeriodicMeasure(
            lebesgue_weight=float(lebesgue_weight) / total,
            flat_components=scaled,
            normalization=total,
        )

    @staticmethod
    def lebesgue() -> "PeriodicMeasure":
        return PeriodicMeasure.build(lebesgue_weight=1.0)

    @staticmethod
    def coordinate_planes(weights=(1.0, 1.0, 1.0), offsets=(0, 0, 0)) -> "PeriodicMeasure":
        """Union of the three coordinate planes {x_j = offset_j}."""
        comps = []
        for j, (w, c) in enumerate(zip(weights, offsets), start=1):
            free = [a for a in _AXES if a != j]
            comps.append(FlatComponent.build(free, {j: c}, w))
        return PeriodicMeasure.build(flat_components=comps)

    @property
    def is_lebesgue_only(self) -> bool:
        return not self.flat_components

    def content_key(self):
        """Canonical tuple for content hashing / caching."""
        return (
            round(self.lebesgue_weight, 15),
            tuple(
                (tuple(sorted(c.free_axes)), tuple((a, float(v)) for a, v in c.offsets), round(c.weight, 15))
                for c in self.flat_components
            ),
        )

    def moment_table(self, max_abs: int) -> np.ndarray:
        """mu_hat on the cube {-max_abs..max_abs}^3 as a dense array.

        Indexed as table[l1 + m, l2 + m, l3 + m] with m = max_abs; this is
        the lookup backing every Gram/stiffness assembly.
        """
        side = np.arange(-max_abs, max_abs + 1)
        table = np.zeros((side.size,) * 3, dtype=complex)
        if self.lebesgue_weight:
            table[max_abs, max_abs, max_abs] += self.lebesgue_weight
        for comp in self.flat_components:
            f1 = comp.moment_factors(side, 1)
            f2 = comp.moment_factors(side, 2)
            f3 = comp.moment_factors(side, 3)
            table += comp.weight * f1[:, None, None] * f2[None, :, None] * f3[None, None, :]
        return table


def fourier_moment(mu: PeriodicMeasure, l) -> complex:
    """Exact moment mu_hat(l) = int_Q exp(-2*pi*i l.x) d mu."""
    l = np.asarray(l, dtype=int)
    val = 0.0 + 0.0j
    if mu.lebesgue_weight and np.all(l == 0):
        val += mu.lebesgue_weight
    for comp in mu.flat_components:
        term = comp.weight + 0.0j
        for axis in _AXES:
            term *= comp.moment_factors(np.asarray([l[axis - 1]]), axis)[0]
            if term == 0:
                break
        val += term
    return complex(val)


class GramOperator:
    """Gram matrix of the truncated Fourier basis in L^2(Q, d mu).

    entry (i, j) = mu_hat(l_i - l_j), so <u, v>_mu = v^H G u for coefficient
    vectors in the cube enumeration.  Hermitian positive semidefinite with
    unit diagonal; for singular measures the kernel collects coefficient
    differences of mu-a.e. equal fields.
    """

    #: relative eigenvalue threshold below which directions count as kernel
    NULL_TOL = 1e-10

    def __init__(self, mu: PeriodicMeasure, cube: FrequencyCube):
        if cube.size == 0:
            raise ValueError("empty frequency cube")
        self.mu = mu
        self.cube = cube
        table = mu.moment_table(2 * cube.cutoff)
        idx, _ = cube.difference_index()
        self.matrix = table.ravel()[idx]
        self._eig = None

    def _eigh(self):
        if self._eig is None:
            w, v = np.linalg.eigh(self.matrix)
            self._eig = (w, v)
        return self._eig

    @property
    def eigenvalues(self) -> np.ndarray:
        return self._eigh()[0]

    def null_space(self) -> np.ndarray:
        """Orthonormal basis of the mu-null coefficient directions."""
        w, v = self._eigh()
        tol = self.NULL_TOL * max(w[-1], 0.0)
        return v[:, w <= tol]

    def range_space(self) -> np.ndarray:
        w, v = self._eigh()
        tol = self.NULL_TOL * max(w[-1], 0.0)
        return v[:, w > tol]

    @property
    def rank(self) -> int:
        w = self.eigenvalues
        tol = self.NULL_TOL * max(w[-1], 0.0)
        return int(np.sum(w > tol))

    def apply(self, coeffs: np.ndarray) -> np.ndarray:
        """G @ coeffs along the last axis (coeffs shape (..., size))."""
        return coeffs @ self.matrix.T


@lru_cache(maxsize=16)
def gram_matrix(mu: PeriodicMeasure, cube: FrequencyCube) -> GramOperator:
    """Gram operator for (mu, cube); memoized since both are immutable."""
    return GramOperator(mu, cube)


def check_gradient_mean_zero(mu: PeriodicMeasure, cube: FrequencyCube) -> float:
    """Largest violation of int_Q d_j(phi) d mu = 0 on the truncated basis.

    Returns max over j and l in the cube of |2*pi*i*l_j*mu_hat(-l)|; zero
    means the measure satisfies the gradient-mean-zero condition for every
    basis exponential, which gates several downstream identities.
    """
    table = mu.moment_table(cube.cutoff)
    lat = cube.lattice
    m = cube.cutoff
    moments = table[(-lat[:, 0]) + m, (-lat[:, 1]) + m, (-lat[:, 2]) + m]
    viol = 2.0 * np.pi * np.abs(lat) * np.abs(moments)[:, None]
    return float(viol.max())
