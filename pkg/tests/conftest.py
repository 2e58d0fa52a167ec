import numpy as np
import pytest

from curlhom.measure import FlatComponent, PeriodicMeasure


@pytest.fixture
def lebesgue():
    return PeriodicMeasure.lebesgue()


@pytest.fixture
def plane_z0():
    """Single coordinate plane {x3 = 0} with unit weight."""
    return PeriodicMeasure.build(
        flat_components=[FlatComponent.build([1, 2], {3: 0}, 1.0)]
    )


@pytest.fixture
def grid_measure():
    """Equal-weight union of the three coordinate planes through 0."""
    return PeriodicMeasure.coordinate_planes()


def support_quadrature(mu, f, n=17):
    """Deterministic quadrature of f over supp(mu), exact for trig integrands.

    Uses the periodic midpoint rule per component; for n > 2*max frequency
    the rule integrates every basis exponential exactly, so it serves as the
    independent oracle for closed-form moments and inner products.
    """
    grid = np.arange(n) / n
    total = 0.0 + 0.0j
    if mu.lebesgue_weight > 0:
        g1, g2, g3 = np.meshgrid(grid, grid, grid, indexing="ij")
        pts = np.stack([g1.ravel(), g2.ravel(), g3.ravel()], axis=1)
        total += mu.lebesgue_weight * np.mean(f(pts))
    for comp in mu.flat_components:
        free = sorted(comp.free_axes)
        npts = n ** len(free) if free else 1
        pts = np.zeros((npts, 3))
        for a, v in comp.offsets:
            pts[:, a - 1] = float(v)
        if free:
            meshes = np.meshgrid(*([grid] * len(free)), indexing="ij")
            for j, a in enumerate(free):
                pts[:, a - 1] = meshes[j].ravel()
        total += comp.weight * np.mean(f(pts))
    return total


@pytest.fixture
def quadrature():
    return support_quadrature
