import numpy as np
import pytest

from curlhom.frequencies import FrequencyCube
from curlhom.measure import (
    FlatComponent,
    PeriodicMeasure,
    check_gradient_mean_zero,
    fourier_moment,
    gram_matrix,
)


def test_lebesgue_moments(lebesgue):
    assert fourier_moment(lebesgue, (0, 0, 0)) == pytest.approx(1.0)
    assert fourier_moment(lebesgue, (1, 0, 0)) == pytest.approx(0.0)
    assert fourier_moment(lebesgue, (2, -1, 3)) == pytest.approx(0.0)


def test_plane_moments(plane_z0):
    # the integral over the plane kills only the free axes
    assert fourier_moment(plane_z0, (0, 0, 5)) == pytest.approx(1.0)
    assert fourier_moment(plane_z0, (1, 0, 5)) == pytest.approx(0.0)
    assert fourier_moment(plane_z0, (0, 0, 0)) == pytest.approx(1.0)


def test_grid_measure_axis_moment(grid_measure):
    # components {x3=0} -> 1, {x1=0} and {x2=0} -> 0, each weighted 1/3
    assert fourier_moment(grid_measure, (0, 0, 1)) == pytest.approx(1.0 / 3.0)
    assert fourier_moment(grid_measure, (0, 2, 0)) == pytest.approx(1.0 / 3.0)
    # two nonzero entries kill every plane component
    assert fourier_moment(grid_measure, (1, 1, 0)) == pytest.approx(0.0)
    assert fourier_moment(grid_measure, (1, 1, 1)) == pytest.approx(0.0)


def test_moment_normalization_and_conjugation():
    mu = PeriodicMeasure.build(
        lebesgue_weight=0.5,
        flat_components=[
            FlatComponent.build([1, 2], {3: "1/3"}, 1.0),
            FlatComponent.build([3], {1: 0.25, 2: 0.5}, 0.25),
        ],
    )
    assert mu.normalization == pytest.approx(1.75)
    assert fourier_moment(mu, (0, 0, 0)) == pytest.approx(1.0)
    rng = np.random.default_rng(7)
    for _ in range(10):
        l = rng.integers(-3, 4, size=3)
        a = fourier_moment(mu, l)
        b = fourier_moment(mu, -l)
        assert a == pytest.approx(np.conj(b))


def test_moments_match_support_quadrature(quadrature):
    mu = PeriodicMeasure.build(
        lebesgue_weight=0.3,
        flat_components=[
            FlatComponent.build([1, 2], {3: "1/4"}, 0.9),
            FlatComponent.build([2], {1: 0.5, 3: 0.125}, 0.4),
            FlatComponent.build([], {1: 0.5, 2: 0.25, 3: 0.75}, 0.2),
        ],
    )
    rng = np.random.default_rng(11)
    for _ in range(20):
        l = rng.integers(-3, 4, size=3)
        oracle = quadrature(mu, lambda pts: np.exp(-2j * np.pi * pts @ l))
        closed = fourier_moment(mu, l)
        assert closed == pytest.approx(oracle, abs=1e-12)


def test_moment_table_agrees_with_pointwise():
    mu = PeriodicMeasure.coordinate_planes(offsets=(0, 0.25, "1/3"))
    table = mu.moment_table(3)
    for l in [(-3, 0, 2), (0, 1, 0), (3, 3, 3), (0, 0, -2)]:
        assert table[l[0] + 3, l[1] + 3, l[2] + 3] == pytest.approx(fourier_moment(mu, l))


def test_gram_lebesgue_is_identity(lebesgue):
    cube = FrequencyCube(2)
    g = gram_matrix(lebesgue, cube)
    assert np.allclose(g.matrix, np.eye(cube.size))
    assert g.rank == cube.size


def test_gram_plane_rank_deficiency(plane_z0):
    # rows with equal (l1, l2) and differing l3 are identical on the plane
    cube = FrequencyCube(1)
    g = gram_matrix(plane_z0, cube)
    i = cube.index_of((0, 0, 0))
    j = cube.index_of((0, 0, 1))
    assert np.allclose(g.matrix[i], g.matrix[j])
    assert g.rank == (2 * 1 + 1) ** 2
    assert g.null_space().shape[1] == cube.size - 9


def test_gram_hermitian_psd_unit_diagonal(grid_measure):
    cube = FrequencyCube(2)
    g = gram_matrix(grid_measure, cube)
    m = g.matrix
    assert np.allclose(m, m.conj().T)
    assert np.allclose(np.diag(m), 1.0)
    w = np.linalg.eigvalsh(m)
    assert w.min() >= -1e-12 * w.max()
    # eigenvalue oracle: all within [0, 3 * cube size], nontrivial kernel
    assert w.max() <= 3 * cube.size
    assert np.sum(np.abs(w) < 1e-10 * w.max()) > 0


def test_gradient_mean_zero_values(lebesgue, plane_z0):
    cube = FrequencyCube(2)
    assert check_gradient_mean_zero(lebesgue, cube) == pytest.approx(0.0)
    # line along x1: worst violation |2 pi * l_j * mu_hat(-l)| = 2 pi at l=(0,0,1), j=3
    line = PeriodicMeasure.build(flat_components=[FlatComponent.build([1], {2: 0, 3: 0}, 1.0)])
    v = check_gradient_mean_zero(line, FrequencyCube(1))
    assert v == pytest.approx(2 * np.pi)
    assert check_gradient_mean_zero(plane_z0, cube) == pytest.approx(2 * np.pi * 2)


def test_measure_validation_errors():
    with pytest.raises(ValueError):
        PeriodicMeasure.build(lebesgue_weight=-1.0)
    with pytest.raises(ValueError):
        PeriodicMeasure.build(lebesgue_weight=0.0)
    with pytest.raises(ValueError):
        FlatComponent.build([1, 2], {3: 1.5}, 1.0)
    with pytest.raises(ValueError):
        PeriodicMeasure.build(
            flat_components=[
                FlatComponent.build([1, 2], {3: 0}, 1.0),
                FlatComponent.build([1, 2], {3: 0}, 2.0),
            ]
        )
