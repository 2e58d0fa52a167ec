"""Material coefficient matrices A(y) and their exact frequency action.

A is real, symmetric and uniformly elliptic, supplied either through a
finite set of Fourier modes or as piecewise-constant values on a dyadic
partition of the cell (whose Fourier coefficients are known analytically at
every frequency).  Products A*u of in-band fields are computed as exact
frequency-domain convolutions on a padded cube.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Optional

import numpy as np

from .errors import InvalidCoefficientError
from .fields import SpectralField
from .frequencies import FrequencyCube
from .measure import PeriodicMeasure


def _check_symmetric(mat, what):
    mat = np.asarray(mat)
    if mat.shape != (3, 3):
        raise InvalidCoefficientError(f"{what} must be 3x3, got {mat.shape}")
    if not np.allclose(mat, mat.T, atol=1e-14 * max(1.0, np.abs(mat).max())):
        raise InvalidCoefficientError(f"{what} must be symmetric")
    return mat


@dataclass(frozen=True)
class CoefficientField:
    """3x3 coefficient matrix field with closed-form Fourier coefficients.

    ``coefficient_fn(k)`` returns the 3x3 complex Fourier coefficient at the
    integer frequency k; ``band`` is the support radius in the max-norm
    (None means unbounded, e.g. piecewise-constant data).  ``evaluate_fn``
    gives exact pointwise values for the ellipticity spot-check.
    """

    coefficient_fn: Callable
    band: Optional[int]
    lambda_min: float
    lambda_max: float
    evaluate_fn: Callable
    label: str = "coefficient"

    def __post_init__(self):
        if not 0 < self.lambda_min <= self.lambda_max:
            raise InvalidCoefficientError("need 0 < lambda_min <= lambda_max")

    # -- constructors -------------------------------------------------------
    @staticmethod
    def identity() -> "CoefficientField":
        return CoefficientField.constant(np.eye(3))

    @staticmethod
    def constant(mat) -> "CoefficientField":
        mat = _check_symmetric(np.asarray(mat, dtype=float), "constant coefficient")
        eigs = np.linalg.eigvalsh(mat)
        if eigs[0] <= 0:
            raise InvalidCoefficientError("constant coefficient must be positive definite")

        def fn(k):
            return mat if np.all(np.asarray(k) == 0) else np.zeros((3, 3))

        return CoefficientField(
            coefficient_fn=fn,
            band=0,
            lambda_min=float(eigs[0]),
            lambda_max=float(eigs[-1]),
            evaluate_fn=lambda x: mat,
            label="constant",
        )

    @staticmethod
    def from_modes(base, modes, lambda_min=None, lambda_max=None) -> "CoefficientField":
        """Real field base + sum of cos/sin modes.

        ``modes`` is a sequence of (l, matrix, kind) with integer frequency
        l, real symmetric 3x3 matrix, kind in {"cos", "sin"}: the mode
        contributes matrix*cos(2*pi*l.x) or matrix*sin(2*pi*l.x).
        """
        base = _check_symmetric(np.asarray(base, dtype=float), "base matrix")
        table = {}
        parsed = []
        for l, mat, kind in modes:
            l = tuple(int(v) for v in l)
            mat = _check_symmetric(np.asarray(mat, dtype=float), f"mode {l}")
            if kind == "cos":
                half = mat / 2.0 + 0j
                for ll, coeff in ((l, half), (tuple(-v for v in l), half)):
                    table[ll] = table.get(ll, 0) + coeff
            elif kind == "sin":
                for ll, coeff in ((l, -0.5j * mat), (tuple(-v for v in l), 0.5j * mat)):
                    table[ll] = table.get(ll, 0) + coeff
            else:
                raise InvalidCoefficientError(f"unknown mode kind {kind!r}")
            parsed.append((np.asarray(l), mat, kind))
        table[(0, 0, 0)] = table.get((0, 0, 0), 0) + base
        band = max((max(abs(v) for v in l) for l in table), default=0)

        def fn(k):
            return np.asarray(table.get(tuple(int(v) for v in k), np.zeros((3, 3))), dtype=complex)

        def evaluate(x):
            x = np.asarray(x, dtype=float)
            val = base.copy()
            for l, mat, kind in parsed:
                phase = 2.0 * np.pi * float(l @ x)
                val = val + mat * (np.cos(phase) if kind == "cos" else np.sin(phase))
            return val

        lo, hi = _ellipticity_bounds_from_samples(evaluate, lambda_min, lambda_max)
        return CoefficientField(fn, int(band), lo, hi, evaluate, label="fourier")

    @staticmethod
    def piecewise_dyadic(values, lambda_min=None, lambda_max=None) -> "CoefficientField":
        """Piecewise-constant A on the dyadic partition of Q into n^3 boxes.

        ``values`` has shape (n, n, n, 3, 3) (or (n, n, n) of scalars, taken
        times the identity).  Fourier coefficients are exact products of the
        per-axis box integrals, available at every frequency.
        """
        values = np.asarray(values, dtype=float)
        if values.ndim == 3:
            values = values[..., None, None] * np.eye(3)
        if values.ndim != 5 or values.shape[3:] != (3, 3):
            raise InvalidCoefficientError("piecewise values must be (n,n,n) or (n,n,n,3,3)")
        n = values.shape[0]
        if values.shape[:3] != (n, n, n):
            raise InvalidCoefficientError("dyadic partition must have equal subdivision per axis")
        for idx in np.ndindex(n, n, n):
            _check_symmetric(values[idx], f"cell {idx}")

        h = 1.0 / n

        def axis_integrals(k):
            # int_{ih}^{(i+1)h} exp(-2*pi*i*k*x) dx for each box index i
            i = np.arange(n)
            if k == 0:
                return np.full(n, h, dtype=complex)
            a = i * h
            return (np.exp(-2j * np.pi * k * a) - np.exp(-2j * np.pi * k * (a + h))) / (
                2j * np.pi * k
            )

        def fn(k):
            k = np.asarray(k, dtype=int)
            f1 = axis_integrals(int(k[0]))
            f2 = axis_integrals(int(k[1]))
            f3 = axis_integrals(int(k[2]))
            w = f1[:, None, None] * f2[None, :, None] * f3[None, None, :]
            return np.tensordot(w, values, axes=([0, 1, 2], [0, 1, 2]))

        def evaluate(x):
            idx = tuple(min(int(np.floor(v % 1.0 * n)), n - 1) for v in np.asarray(x, dtype=float))
            return values[idx]

        lo, hi = _ellipticity_bounds_from_samples(evaluate, lambda_min, lambda_max)
        return CoefficientField(fn, None, lo, hi, evaluate, label="piecewise")

    # -- frequency tables ----------------------------------------------------
    def coefficient_table(self, max_abs: int) -> np.ndarray:
        """A_hat on {-max_abs..max_abs}^3, shape (side, side, side, 3, 3)."""
        side = 2 * max_abs + 1
        out = np.zeros((side, side, side, 3, 3), dtype=complex)
        if self.band is not None and self.band == 0:
            out[max_abs, max_abs, max_abs] = self.coefficient_fn((0, 0, 0))
            return out
        rng = range(-max_abs, max_abs + 1)
        bound = self.band if self.band is not None else max_abs
        for k1 in rng:
            if abs(k1) > bound:
                continue
            for k2 in rng:
                if abs(k2) > bound:
                    continue
                for k3 in rng:
                    if abs(k3) > bound:
                        continue
                    out[k1 + max_abs, k2 + max_abs, k3 + max_abs] = self.coefficient_fn(
                        (k1, k2, k3)
                    )
        return out

    @property
    def is_constant(self) -> bool:
        return self.band == 0

    def mean_matrix(self, mu: PeriodicMeasure, max_abs: int) -> np.ndarray:
        """int_Q A d mu using the coefficient band up to max_abs."""
        table = self.coefficient_table(max_abs)
        mom = mu.moment_table(max_abs)
        # int A_hat(k) e^{2 pi i k.x} dmu = sum_k A_hat(k) mu_hat(-k)
        rev = mom[::-1, ::-1, ::-1]
        return np.tensordot(rev, table, axes=([0, 1, 2], [0, 1, 2]))

    # -- validation -----------------------------------------------------------
    def spot_check_ellipticity(self, mu: PeriodicMeasure, samples_per_axis: int = 5,
                               tol: float = 1e-8):
        """Verify the declared bounds on a sample grid over supp(mu)."""
        pts = _support_samples(mu, samples_per_axis)
        for x in pts:
            eigs = np.linalg.eigvalsh(np.real(self.evaluate_fn(x)))
            if eigs[0] < self.lambda_min - tol or eigs[-1] > self.lambda_max + tol:
                raise InvalidCoefficientError(
                    f"ellipticity spot-check failed at {x}: eigenvalues {eigs} "
                    f"outside [{self.lambda_min}, {self.lambda_max}]"
                )

    def content_key(self, max_abs: int = 4):
        table = self.coefficient_table(max_abs)
        return (self.label, round(self.lambda_min, 12), round(self.lambda_max, 12),
                tuple(np.round(table.ravel(), 12).tolist()))


def _ellipticity_bounds_from_samples(evaluate, lambda_min, lambda_max, n: int = 7):
    """Default declared bounds from a coarse grid when the user gave none."""
    if lambda_min is not None and lambda_max is not None:
        return float(lambda_min), float(lambda_max)
    grid = (np.arange(n) + 0.5) / n
    lo, hi = np.inf, -np.inf
    for x1 in grid:
        for x2 in grid:
            for x3 in grid:
                eigs = np.linalg.eigvalsh(np.real(evaluate((x1, x2, x3))))
                lo = min(lo, eigs[0])
                hi = max(hi, eigs[-1])
    if lo <= 0:
        raise InvalidCoefficientError(f"sampled coefficient not positive definite (min eig {lo})")
    return (float(lambda_min) if lambda_min is not None else float(lo),
            float(lambda_max) if lambda_max is not None else float(hi))


def _support_samples(mu: PeriodicMeasure, n: int) -> np.ndarray:
    grid = (np.arange(n) + 0.5) / n
    pts = []
    if mu.lebesgue_weight > 0:
        g1, g2, g3 = np.meshgrid(grid, grid, grid, indexing="ij")
        pts.append(np.stack([g1.ravel(), g2.ravel(), g3.ravel()], axis=1))
    for comp in mu.flat_components:
        free = sorted(comp.free_axes)
        if free:
            axes_grids = np.meshgrid(*([grid] * len(free)), indexing="ij")
        base = np.zeros((max(1, n ** len(free)), 3))
        for a, v in comp.offsets:
            base[:, a - 1] = float(v)
        for j, a in enumerate(free):
            base[:, a - 1] = axes_grids[j].ravel()
        pts.append(base)
    return np.concatenate(pts, axis=0)


def multiply_coeff(A: CoefficientField, u: SpectralField, out_cutoff: Optional[int] = None,
                   band: Optional[int] = None) -> SpectralField:
    """Pointwise product A*u as an exact frequency convolution.

    The convolution is computed on the padded cube of cutoff 2L (so products
    of in-band data with a band <= L coefficient are exact) and truncated to
    ``out_cutoff`` (default: the input cutoff).  For unbounded coefficient
    spectra (piecewise data) the coefficient is truncated at ``band``
    (default 2L); with a purely Lebesgue measure this still yields exact
    Galerkin pairings of in-band fields.
    """
    if not u.is_vector:
        raise ValueError("multiply_coeff expects a vector field")
    L = u.cube.cutoff
    pad = u.cube.padded(2)
    out_cutoff = L if out_cutoff is None else out_cutoff
    a_band = A.band if A.band is not None else (band if band is not None else 2 * L)
    a_band = min(a_band, 2 * L)

    table = A.coefficient_table(a_band)
    result = SpectralField.zeros(pad, components=3)
    lat = u.cube.lattice
    pside = pad.side
    for k1 in range(-a_band, a_band + 1):
        for k2 in range(-a_band, a_band + 1):
            for k3 in range(-a_band, a_band + 1):
                mat = table[k1 + a_band, k2 + a_band, k3 + a_band]
                if not np.any(mat):
                    continue
                shifted = lat + np.array([k1, k2, k3])
                dst = ((shifted[:, 0] + pad.cutoff) * pside + (shifted[:, 1] + pad.cutoff)) * pside + (
                    shifted[:, 2] + pad.cutoff
                )
                result.coefficients[:, dst] += mat @ u.coefficients
    if out_cutoff == pad.cutoff:
        return result
    return result.restricted_to(FrequencyCube(out_cutoff))
