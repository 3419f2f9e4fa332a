import math
from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from conicp3p.errors import SingularMatrix, ZeroVector
from conicp3p.geom import (
    as_vec,
    cross,
    cross_k,
    invert3,
    normalize,
    solve3,
    two_prod_k,
    two_sum_k,
)

coord = st.floats(-1e3, 1e3, allow_nan=False)
vec3 = st.tuples(coord, coord, coord)


def test_cross_basis():
    assert cross((1, 0, 0), (0, 1, 0)).tolist() == [0.0, 0.0, 1.0]


def test_cross_self_is_zero():
    assert cross((1.5, -2.0, 7.0), (1.5, -2.0, 7.0)).tolist() == [0.0, 0.0, 0.0]


@given(vec3, vec3)
def test_cross_orthogonal(u, v):
    w = cross(u, v)
    # hypot: squaring tiny coordinates in a plain norm underflows to 0
    nu, nv = math.hypot(*u), math.hypot(*v)
    bound = 1e-14 * nu * nv * max(nu, nv)
    assert abs(w @ np.array(u)) <= bound + 1e-300
    assert abs(w @ np.array(v)) <= bound + 1e-300


@given(vec3, vec3)
def test_cross_antisymmetric_bitwise(u, v):
    a = cross_k(u, v)
    b = cross_k(v, u)
    assert a == tuple(-x for x in b)


def test_solve3_identity_and_diagonal():
    assert solve3(np.eye(3), (1, 2, 3)).tolist() == [1.0, 2.0, 3.0]
    assert solve3(np.diag([2.0, 4.0, 8.0]), (2, 4, 8)).tolist() == [1.0, 1.0, 1.0]


def test_solve3_singular():
    A = np.array([[1.0, 2.0, 3.0], [2.0, 4.0, 6.0], [0.0, 1.0, 1.0]])
    with pytest.raises(SingularMatrix):
        solve3(A, (1, 1, 1))


def test_solve3_random_residual(rng):
    for _ in range(500):
        A = rng.standard_normal((3, 3))
        if np.linalg.cond(A) > 1e6:
            continue
        b = rng.standard_normal(3)
        s = solve3(A, b)
        assert np.linalg.norm(A @ s - b) <= 1e-12 * np.abs(A).max() * max(1.0, np.linalg.norm(s))


def test_invert3_examples():
    np.testing.assert_array_equal(invert3(np.eye(3)), np.eye(3))
    np.testing.assert_array_equal(invert3(2.0 * np.eye(3)), 0.5 * np.eye(3))


def test_invert3_random_and_agrees_with_solve(rng):
    for _ in range(500):
        A = rng.standard_normal((3, 3))
        if np.linalg.cond(A) > 1e6:
            continue
        inv = invert3(A)
        np.testing.assert_allclose(A @ inv, np.eye(3), atol=1e-12 * np.linalg.cond(A))
        b = rng.standard_normal(3)
        scale = np.abs(inv).max() * np.abs(b).max()
        np.testing.assert_allclose(inv @ b, solve3(A, b), atol=1e-12 * scale)


def test_invert3_singular():
    with pytest.raises(SingularMatrix):
        invert3(np.zeros((3, 3)))


def test_normalize_examples():
    assert normalize((0, 0, 2)).tolist() == [0.0, 0.0, 1.0]
    np.testing.assert_allclose(normalize((3, 4, 0)), [0.6, 0.8, 0.0], rtol=0, atol=1e-16)


@given(vec3.filter(lambda v: np.linalg.norm(v) > 1e-100))
def test_normalize_unit(v):
    n = normalize(v)
    assert abs(np.linalg.norm(n) - 1.0) <= 1e-15
    assert np.linalg.norm(np.cross(n, v)) <= 1e-14 * np.linalg.norm(v)


def test_normalize_zero():
    with pytest.raises(ZeroVector):
        normalize((0, 0, 0))


def test_as_vec_rejects_wrong_shape():
    with pytest.raises(ValueError):
        as_vec([1.0, 2.0])


finite = st.floats(-1e150, 1e150, allow_nan=False, allow_infinity=False)


@given(finite, finite)
def test_two_sum_exact(a, b):
    s, e = two_sum_k(a, b)
    assert Fraction(s) + Fraction(e) == Fraction(a) + Fraction(b)


@given(finite, finite)
def test_two_prod_exact(a, b):
    p, e = two_prod_k(a, b)
    if abs(p) > 1e-270:  # the low part must not underflow
        assert Fraction(p) + Fraction(e) == Fraction(a) * Fraction(b)
