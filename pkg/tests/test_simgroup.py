import math

import numpy as np
import pytest

from clifford_cwt.field import GridSpec
from clifford_cwt.simgroup import (
    GroupGrid,
    GroupPoint,
    axis_angle,
    build_group_grid,
    compose_rotations,
    invert_rotation,
    log_scales,
    matrix_to_quaternion,
    rotation_matrix,
    so3_octahedral,
    so3_superfibonacci,
)


def test_log_scales_integrate_the_haar_weight():
    for n in (2, 3):
        a, w = log_scales(0.25, 4.0, 64, n)
        exact = (0.25 ** -n - 4.0 ** -n) / n
        assert np.sum(w) == pytest.approx(exact, rel=1e-3)
        assert np.all(np.diff(a) > 0)
    with pytest.raises(ValueError):
        log_scales(1.0, 0.5, 4, 2)


@pytest.mark.parametrize("q", so3_superfibonacci(10))
def test_quaternion_matrices_are_rotations(q):
    m = rotation_matrix(q, 3)
    np.testing.assert_allclose(m @ m.T, np.eye(3), atol=1e-14)
    assert np.linalg.det(m) == pytest.approx(1.0)
    np.testing.assert_allclose(matrix_to_quaternion(m), q, atol=1e-12)


def test_composition_matches_matrix_product():
    q1, q2 = axis_angle([1, 2, 3], 0.7), axis_angle([0, -1, 1], 2.1)
    np.testing.assert_allclose(rotation_matrix(compose_rotations(q1, q2, 3), 3),
                               rotation_matrix(q1, 3) @ rotation_matrix(q2, 3), atol=1e-14)
    np.testing.assert_allclose(rotation_matrix(invert_rotation(q1, 3), 3), rotation_matrix(q1, 3).T, atol=1e-14)
    assert compose_rotations(1.0, 6.0, 2) == pytest.approx(7.0 - 2 * math.pi)


def test_octahedral_group_is_closed():
    rots = so3_octahedral()
    assert len(rots) == 24
    mats = [np.round(rotation_matrix(q, 3)).astype(int) for q in rots]
    keys = {m.tobytes() for m in mats}
    assert len(keys) == 24
    assert all((a @ b).tobytes() in keys for a in mats[:6] for b in mats)


def test_superfibonacci_covers_so3_evenly():
    # mean of the rotation matrices over a uniform set is zero
    mats = np.array([rotation_matrix(q, 3) for q in so3_superfibonacci(2000)])
    assert np.abs(mats.mean(axis=0)).max() < 0.02


@pytest.mark.parametrize("n", [2, 3])
def test_group_law(n):
    theta = 0.4 if n == 2 else axis_angle([1, 1, 0], 0.9)
    g = GroupPoint(1.5, theta, (0.2,) * n)
    h = GroupPoint(0.7, theta, tuple(range(n)))
    x = np.random.default_rng(0).standard_normal((n, 5))
    np.testing.assert_allclose(g.compose(h).apply(x), g.apply(h.apply(x)), atol=1e-13)
    np.testing.assert_allclose(g.inverse().apply(g.apply(x)), x, atol=1e-13)
    np.testing.assert_allclose(g.inverse_apply(g.apply(x)), x, atol=1e-13)
    with pytest.raises(ValueError):
        GroupPoint(0.0, theta, (0.0,) * n)


def test_group_grid_roundtrip_and_points():
    spatial = GridSpec.centered(3, 4, 2.0)
    grid = build_group_grid((0.5, 2.0, 3), 5, spatial)
    assert grid.shape == (3, 5)
    assert GroupGrid.from_dict(grid.to_dict()) == grid
    np.testing.assert_allclose(grid.measure_weights().sum(axis=1), grid.scale_weights)
    p = grid.point(1, 2, (0, 1, 3))
    assert p.a == grid.scales[1] and p.b == (-1.0, -0.5, 0.5)
    with pytest.raises(ValueError):
        build_group_grid((0.5, 2.0, 3), 5, spatial, so3="octahedral")
