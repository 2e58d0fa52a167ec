"""Truncated frequency lattice underlying every spectral representation.

Fields live on the symmetric integer cube {-L..L}^3.  The enumeration is
fixed once and for all (axis 1 slowest, axis 3 fastest) so that coefficient
arrays, Gram matrices and factorizations are reproducible bit-for-bit
across runs.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np


@dataclass(frozen=True)
class FrequencyCube:
    """Index set {-L..L}^3 in a fixed lexicographic enumeration.

    ``lattice[i]`` is the integer frequency vector of basis element i; the
    flat index of (l1, l2, l3) is ((l1+L)*(2L+1) + (l2+L))*(2L+1) + (l3+L).
    """

    cutoff: int
    _lattice: np.ndarray = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        if self.cutoff < 0:
            raise ValueError("cutoff must be nonnegative")
        side = np.arange(-self.cutoff, self.cutoff + 1)
        l1, l2, l3 = np.meshgrid(side, side, side, indexing="ij")
        lattice = np.stack([l1.ravel(), l2.ravel(), l3.ravel()], axis=1)
        lattice.setflags(write=False)
        object.__setattr__(self, "_lattice", lattice)

    @property
    def side(self) -> int:
        return 2 * self.cutoff + 1

    @property
    def size(self) -> int:
        return self.side ** 3

    @property
    def lattice(self) -> np.ndarray:
        """Integer array of shape (size, 3), row i = frequency of basis i."""
        return self._lattice

    def index_of(self, l) -> int:
        l = np.asarray(l, dtype=int)
        if np.any(np.abs(l) > self.cutoff):
            raise KeyError(f"frequency {tuple(l)} outside cube of cutoff {self.cutoff}")
        s = self.side
        return int(((l[0] + self.cutoff) * s + (l[1] + self.cutoff)) * s + (l[2] + self.cutoff))

    def contains(self, l) -> bool:
        l = np.asarray(l, dtype=int)
        return bool(np.all(np.abs(l) <= self.cutoff))

    def padded(self, factor: int = 2) -> "FrequencyCube":
        """Cube of cutoff factor*L, used for exact products of in-band fields."""
        return FrequencyCube(factor * self.cutoff)

    def difference_index(self, other: "FrequencyCube" = None):
        """Flat lookup index of pairwise differences l_i - l_j.

        Returns (diff_idx, table_shape): for a table ``t`` indexed over the
        difference cube {-(L+L')..L+L'}^3 flattened in the same lexicographic
        order, ``t.ravel()[diff_idx[i, j]] = t[l_i - l_j]``.
        """
        other = other if other is not None else self
        m = self.cutoff + other.cutoff
        side = 2 * m + 1
        d = self.lattice[:, None, :] - other.lattice[None, :, :]
        idx = ((d[..., 0] + m) * side + (d[..., 1] + m)) * side + (d[..., 2] + m)
        return idx, (side, side, side)


def wavevectors(cube: FrequencyCube, kappa=None) -> np.ndarray:
    """Per-basis-element wavevectors kappa + 2*pi*l, shape (size, 3)."""
    k = 2.0 * np.pi * cube.lattice.astype(float)
    if kappa is not None:
        k = k + np.asarray(kappa, dtype=float)[None, :]
    return k
