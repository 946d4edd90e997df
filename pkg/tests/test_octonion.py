import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from g2deform.g2core import chi, cross
from g2deform.octonion import (
    Octonion,
    associator_im,
    conj,
    cross_from_oct,
    im,
    oct_mul_array,
    quat_mul,
    re,
)

one = Octonion.real(1.0)
i, j, k, l = (Octonion.unit(m) for m in (1, 2, 3, 4))

oct8 = st.lists(st.floats(-5, 5, allow_nan=False), min_size=8, max_size=8).map(np.array)


def test_quaternion_table():
    e = np.eye(4)
    assert np.array_equal(quat_mul(e[1], e[2]), e[3])
    assert np.array_equal(quat_mul(e[2], e[1]), -e[3])
    assert np.array_equal(quat_mul(e[1], e[1]), -e[0])


def test_unit_and_quaternion_subalgebra():
    x = Octonion(np.arange(1.0, 9.0))
    assert one * x == x and x * one == x
    assert i * j == k


def test_every_imaginary_unit_squares_to_minus_one():
    for m in range(1, 8):
        assert Octonion.unit(m) * Octonion.unit(m) == Octonion.real(-1.0)


def test_documented_products_with_l():
    e5, e6, e7 = (Octonion.unit(m) for m in (5, 6, 7))
    assert i * l == e5 and j * l == e6 and k * l == -e7
    assert l * i == -e5 and l * j == -e6 and l * k == e7


def test_conj_re_im_examples():
    assert conj(one) == one
    assert conj(i) == -i
    assert re(i * i) == -1.0
    x = Octonion(np.arange(8.0))
    assert Octonion.real(re(x)) + Octonion.from_imag(im(x)) == x


def test_cross_examples(E):
    assert np.array_equal(cross_from_oct(E[0], E[1]), E[2])
    assert np.array_equal(cross_from_oct(E[0], E[0]), np.zeros(7))
    assert np.array_equal(cross_from_oct(E[1], E[4]), -E[6])


def test_cross_agrees_with_phi_on_all_basis_pairs(G, E):
    for a in range(7):
        for b in range(7):
            assert np.array_equal(cross_from_oct(E[a], E[b]), cross(G, E[a], E[b]))


def test_associator_is_twice_chi_on_basis(G, E):
    lhs = (i * j) * l - i * (j * l)
    assert np.array_equal(lhs.im(), 2 * chi(G, E[0], E[1], E[3]))
    assert np.array_equal(lhs.im(), -2 * E[6])
    assert lhs.re() == 0


def test_associator_random_batch(G, rng):
    u, v, w = rng.standard_normal((3, 500, 7))
    np.testing.assert_allclose(associator_im(u, v, w), 2 * chi(G, u, v, w), atol=1e-10)


def test_batched_product_matches_scalar(rng):
    x, y = rng.standard_normal((2, 10, 8))
    batch = oct_mul_array(x, y)
    for r in range(10):
        np.testing.assert_array_equal(batch[r], (Octonion(x[r]) * Octonion(y[r])).c)


def test_not_associative():
    assert (i * j) * l != i * (j * l)


@settings(max_examples=200, deadline=None)
@given(oct8, oct8)
def test_composition_and_conjugation(x, y):
    X, Y = Octonion(x), Octonion(y)
    assert (X * Y).norm() == pytest.approx(X.norm() * Y.norm(), rel=1e-12, abs=1e-12)
    assert (X * Y).conj().allclose(Y.conj() * X.conj(), 1e-10)


@settings(max_examples=100, deadline=None)
@given(oct8, oct8)
def test_alternative_law(x, y):
    X, Y = Octonion(x), Octonion(y)
    assert ((X * X) * Y).allclose(X * (X * Y), 1e-9)
    assert ((Y * X) * X).allclose(Y * (X * X), 1e-9)


def test_cross_antisymmetric_and_orthogonal(rng):
    u, v = rng.standard_normal((2, 100, 7))
    c = cross_from_oct(u, v)
    np.testing.assert_allclose(c, -cross_from_oct(v, u), atol=1e-12)
    np.testing.assert_allclose(np.sum(c * u, axis=1), 0, atol=1e-12)
    np.testing.assert_allclose(np.sum(c * v, axis=1), 0, atol=1e-12)


def test_rejects_wrong_length():
    with pytest.raises(ValueError):
        Octonion(np.zeros(7))
