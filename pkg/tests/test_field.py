import numpy as np
import pytest

from clifford_cwt.clifford_core import get_algebra
from clifford_cwt.field import GridMismatch, GridSpec, MultivectorField, inner_product, norm


def random_field(grid, seed=0):
    rng = np.random.default_rng(seed)
    return MultivectorField(grid, rng.standard_normal((1 << grid.n,) + grid.shape))


def test_grid_geometry():
    g = GridSpec.centered(2, [8, 4], [4.0, 2.0])
    assert g.lower == (-2.0, -1.0)
    np.testing.assert_allclose(g.spacing, [0.5, 0.5])
    assert g.cell_volume == 0.25
    assert g.points().shape == (2, 8, 4)
    assert g.index_of((0.5, -1.0)) == (5, 0)
    with pytest.raises(GridMismatch):
        g.index_of((0.3, 0.0))
    assert GridSpec.from_dict(g.to_dict()) == g


def test_grid_validation():
    with pytest.raises(ValueError):
        GridSpec((0.0,), (1.0, 2.0), (4,))
    with pytest.raises(ValueError):
        GridSpec((1.0, 0.0), (0.0, 1.0), (4, 4))


def test_wrap_is_minimal_image():
    g = GridSpec.centered(2, 8, 4.0)
    d = np.array([[3.0, -2.5], [0.1, 2.0]])
    np.testing.assert_allclose(g.wrap(d), [[-1.0, 1.5], [0.1, -2.0]])


def test_inner_product_is_reverse_symmetric_and_matches_norm():
    grid = GridSpec.centered(3, 4, 2.0)
    f, g = random_field(grid, 1), random_field(grid, 2)
    fg, gf = inner_product(f, g), inner_product(g, f)
    assert fg.allclose(gf.reverse(), atol=1e-12)
    assert inner_product(f, f).scalar == pytest.approx(norm(f) ** 2)


def test_pointwise_products():
    alg = get_algebra(2)
    grid = GridSpec.centered(2, 4, 1.0)
    f = random_field(grid)
    m = alg.multivector([0.5, -1.0, 2.0, 0.25])
    right = f * m
    left = m * f
    idx = (1, 2)
    assert right.at(idx).allclose(f.at(idx) * m)
    assert left.at(idx).allclose(m * f.at(idx))
    assert (f * MultivectorField.constant(grid, m)).allclose(right)


def test_parity_and_roll():
    grid = GridSpec.centered(2, 4, 1.0)
    f = random_field(grid)
    even, odd = f.parity_split()
    assert even.parity() == 1 and odd.parity() == -1 and f.parity() is None
    shifted = f.roll((1, 0))
    assert shifted.at((1, 0)).allclose(f.at((0, 0)))


def test_fields_are_immutable_and_checked():
    grid = GridSpec.centered(2, 4, 1.0)
    f = random_field(grid)
    with pytest.raises(AttributeError):
        f.data = None
    with pytest.raises(GridMismatch):
        f + random_field(GridSpec.centered(2, 4, 2.0))


def test_left_scaling_by_pseudoscalar_is_isometric():
    grid = GridSpec.centered(3, 4, 2.0)
    f = random_field(grid, 3)
    i3 = get_algebra(3).pseudoscalar()
    assert norm(i3 * f) == pytest.approx(norm(f), rel=1e-14)
    assert norm(f + (-f)) == 0.0
    even, odd = f.parity_split()
    assert (even + odd).allclose(f, atol=0.0)
