import itertools

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from clifford_cwt.clifford_core import (
    CliffordError,
    DimensionMismatch,
    Multivector,
    NonInvertible,
    UnsupportedGradeContent,
    dual,
    exp_pseudoscalar,
    geometric_product,
    get_algebra,
    invert_grade01,
    outer_product,
    parity_split,
    reverse,
    scalar_product,
    subspace_contains,
)


def blade_product(a, b):
    """Multiply two blades given as sorted index tuples by bubble sorting."""
    word = list(a) + list(b)
    sign = 1
    for i in range(len(word)):
        for j in range(len(word) - 1 - i):
            if word[j] > word[j + 1]:
                word[j], word[j + 1] = word[j + 1], word[j]
                sign = -sign
    out = []
    for g in word:
        if out and out[-1] == g:
            out.pop()  # e_k e_k = +1 in Cl(n,0)
        else:
            out.append(g)
    return sign, tuple(out)


def oracle_product(alg, x, y):
    blades = [tuple(int(c) for c in name[1:]) if name != "1" else () for name in alg.names]
    pos = {b: i for i, b in enumerate(blades)}
    out = np.zeros(alg.size)
    for i, j in itertools.product(range(alg.size), repeat=2):
        s, b = blade_product(blades[i], blades[j])
        out[pos[b]] += s * x[i] * y[j]
    return out


@pytest.mark.parametrize("n", [2, 3])
def test_blade_pairs_match_oracle(n):
    alg = get_algebra(n)
    eye = np.eye(alg.size)
    for i, j in itertools.product(range(alg.size), repeat=2):
        got = geometric_product(Multivector(alg, eye[i]), Multivector(alg, eye[j])).coeffs
        np.testing.assert_array_equal(got, oracle_product(alg, eye[i], eye[j]))


@pytest.mark.parametrize("n", [2, 3])
def test_random_products_match_oracle(n):
    alg = get_algebra(n)
    rng = np.random.default_rng(0)
    for _ in range(50):
        x, y = rng.standard_normal((2, alg.size))
        np.testing.assert_allclose((Multivector(alg, x) * Multivector(alg, y)).coeffs,
                                   oracle_product(alg, x, y), atol=1e-13)


def test_blade_order_and_names():
    assert get_algebra(2).blade_order == "1,e1,e2,e12"
    assert get_algebra(3).blade_order == "1,e1,e2,e3,e12,e13,e23,e123"
    alg = get_algebra(3)
    assert alg.blade("e31") == -alg.blade("e13")
    assert alg.blade("e21")["e12"] == -1.0
    assert alg.blade("e11") == alg.scalar(1.0)
    with pytest.raises(CliffordError):
        alg.blade("e14")


@pytest.mark.parametrize("n", [2, 3])
def test_pseudoscalar_squares_to_minus_one(n):
    i_n = get_algebra(n).pseudoscalar()
    assert (i_n * i_n).allclose(get_algebra(n).scalar(-1.0))
    e = exp_pseudoscalar(n, 0.7)
    assert e.allclose(np.cos(0.7) + np.sin(0.7) * i_n)


coeff = st.floats(-10, 10, allow_nan=False)


@settings(max_examples=60, deadline=None)
@given(st.sampled_from([2, 3]), st.lists(coeff, min_size=24, max_size=24))
def test_associativity_and_reverse(n, values):
    alg = get_algebra(n)
    a, b, c = (Multivector(alg, values[k * 8:k * 8 + alg.size]) for k in range(3))
    lhs, rhs = (a * b) * c, a * (b * c)
    scale = 1.0 + a.norm() * b.norm() * c.norm()
    assert (lhs - rhs).norm() <= 1e-13 * scale
    assert (reverse(a * b) - reverse(b) * reverse(a)).norm() <= 1e-13 * (1 + a.norm() * b.norm())


def test_outer_product_of_vectors_is_antisymmetric():
    alg = get_algebra(3)
    u, v = alg.vector([1.0, 2.0, 0.5]), alg.vector([-0.3, 1.0, 4.0])
    assert (outer_product(u, v) + outer_product(v, u)).norm() < 1e-14
    assert (u ^ u).norm() == 0.0
    # u v = u . v + u ^ v
    assert (u * v).allclose(scalar_product(u, v) + (u ^ v))


def test_scalar_product_is_scalar_part_of_product_with_reverse():
    alg = get_algebra(3)
    rng = np.random.default_rng(1)
    a, b = alg.random(rng), alg.random(rng)
    assert scalar_product(a, b) == pytest.approx((a * reverse(b)).scalar, rel=1e-13)


def test_dual_and_subspace():
    alg = get_algebra(3)
    e12 = alg.blade("e12")
    assert dual(e12).allclose(alg.blade("e3"))
    assert subspace_contains(e12, alg.vector([1.0, -2.0, 0.0]))
    assert not subspace_contains(e12, alg.vector([0.0, 0.0, 1.0]))


def test_invert_grade01():
    alg = get_algebra(3)
    m = alg.scalar(2.0) + alg.vector([0.5, -0.25, 1.0])
    assert (m * invert_grade01(m)).allclose(alg.scalar(1.0))
    with pytest.raises(NonInvertible):
        invert_grade01(alg.scalar(1.0) + alg.vector([1.0, 0.0, 0.0]))
    with pytest.raises(UnsupportedGradeContent):
        invert_grade01(alg.scalar(1.0) + alg.blade("e12"))


def test_parity_split_and_mismatch():
    alg = get_algebra(2)
    m = Multivector(alg, [1.0, 2.0, 3.0, 4.0])
    even, odd = parity_split(m)
    assert even.grades_present() == {0, 2} and odd.grades_present() == {1}
    with pytest.raises(DimensionMismatch):
        m * get_algebra(3).scalar(1.0)
