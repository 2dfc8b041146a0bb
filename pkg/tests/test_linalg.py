"""Exact matrix arithmetic over GF(q)."""

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from spreadlab import gf, linalg
from spreadlab.errors import DomainError, SingularMatrixError


def _rand_mat(rng, q, rows, cols):
    return rng.integers(0, q, size=(rows, cols), dtype=np.int64)


def test_identity_and_scalar():
    f = gf.gf_of_order(9)
    I = linalg.identity(f, 3)
    a = _rand_mat(np.random.default_rng(1), 9, 3, 3)
    assert np.array_equal(linalg.mat_mul(f, I, a), a)
    assert np.array_equal(linalg.mat_mul(f, a, I), a)
    two = linalg.scalar_matrix(f, 3, 2)
    # scalar matrices are central
    assert np.array_equal(linalg.mat_mul(f, two, a), linalg.mat_mul(f, a, two))


def test_mat_mul_against_naive():
    f = gf.gf_of_order(4)
    rng = np.random.default_rng(7)
    for _ in range(25):
        a = _rand_mat(rng, 4, 3, 2)
        b = _rand_mat(rng, 4, 2, 4)
        got = linalg.mat_mul(f, a, b)
        want = np.zeros((3, 4), dtype=np.int64)
        for i in range(3):
            for j in range(4):
                acc = 0
                for k in range(2):
                    acc = f.add_(acc, f.mul_(int(a[i, k]), int(b[k, j])))
                want[i, j] = acc
        assert np.array_equal(got, want)


def test_rref_shape_and_idempotence():
    f = gf.gf_of_order(3)
    rng = np.random.default_rng(3)
    for _ in range(40):
        m = _rand_mat(rng, 3, 4, 6)
        R, r = linalg.rref(f, m)
        assert r <= 4
        R2, r2 = linalg.rref(f, R[:r])
        assert r2 == r
        assert np.array_equal(R2[:r], R[:r])
        # pivot columns are unit columns
        for i in range(r):
            piv = int(np.argmax(R[i] != 0))
            assert R[i, piv] == 1
            col = R[:r, piv]
            assert col[i] == 1 and np.count_nonzero(col) == 1


def test_rank_row_space_invariance():
    f = gf.gf_of_order(5)
    rng = np.random.default_rng(11)
    m = _rand_mat(rng, 5, 3, 5)
    r = linalg.rank(f, m)
    # appending a row combination cannot change the rank
    comb = np.zeros(5, dtype=np.int64)
    for row, c in zip(m, (2, 0, 4)):
        comb = np.array([f.add_(int(x), f.mul_(c, int(y))) for x, y in zip(comb, row)])
    m2 = np.vstack([m, comb[None, :]])
    assert linalg.rank(f, m2) == r


def test_inverse_round_trip():
    for q in (2, 3, 4, 9):
        f = gf.gf_of_order(q)
        rng = np.random.default_rng(q)
        found = 0
        while found < 10:
            m = _rand_mat(rng, q, 3, 3)
            if not linalg.is_invertible(f, m):
                continue
            found += 1
            mi = linalg.inverse(f, m)
            assert np.array_equal(linalg.mat_mul(f, m, mi), linalg.identity(f, 3))
            assert np.array_equal(linalg.mat_mul(f, mi, m), linalg.identity(f, 3))


def test_inverse_singular_raises():
    f = gf.gf_of_order(3)
    m = np.array([[1, 2], [2, 1]], dtype=np.int64)  # rows proportional mod 3
    assert not linalg.is_invertible(f, m)
    with pytest.raises(SingularMatrixError):
        linalg.inverse(f, m)


def test_det_multiplicative():
    f = gf.gf_of_order(4)
    rng = np.random.default_rng(5)
    for _ in range(20):
        a = _rand_mat(rng, 4, 3, 3)
        b = _rand_mat(rng, 4, 3, 3)
        ab = linalg.mat_mul(f, a, b)
        assert linalg.det(f, ab) == f.mul_(linalg.det(f, a), linalg.det(f, b))


def test_det_detects_singularity():
    f = gf.gf_of_order(9)
    rng = np.random.default_rng(17)
    for _ in range(30):
        m = _rand_mat(rng, 9, 3, 3)
        assert (linalg.det(f, m) != 0) == linalg.is_invertible(f, m)


def test_kernel_is_left_null_space():
    f = gf.gf_of_order(3)
    rng = np.random.default_rng(23)
    for _ in range(30):
        m = _rand_mat(rng, 3, 4, 3)
        K = linalg.kernel(f, m)
        assert K.shape[0] == 4 - linalg.rank(f, m)
        for row in K:
            prod = linalg.vec_mat(f, row, m)
            assert not prod.any()


def test_block_matrix():
    f = gf.gf_of_order(3)
    I = linalg.identity(f, 2)
    Z = linalg.zeros(f, 2)
    m = linalg.block_matrix(f, [[I, Z], [Z, I]])
    assert np.array_equal(m, linalg.identity(f, 4))


def test_mat_json_round_trip():
    f = gf.gf_of_order(9)
    m = np.array([[0, 4], [7, 1]], dtype=np.int64)
    obj = linalg.mat_to_json(f, m)
    back = linalg.mat_from_json(f, obj)
    assert np.array_equal(back, m)


def test_entry_validation():
    f = gf.gf_of_order(3)
    with pytest.raises(DomainError):
        linalg.as_matrix(f, [[0, 5], [1, 1]])


@settings(max_examples=40, deadline=None)
@given(st.sampled_from([2, 3, 4]), st.integers(0, 10**6))
def test_mat_mul_associative(q, seed):
    f = gf.gf_of_order(q)
    rng = np.random.default_rng(seed)
    a = _rand_mat(rng, q, 2, 2)
    b = _rand_mat(rng, q, 2, 2)
    c = _rand_mat(rng, q, 2, 2)
    lhs = linalg.mat_mul(f, linalg.mat_mul(f, a, b), c)
    rhs = linalg.mat_mul(f, a, linalg.mat_mul(f, b, c))
    assert np.array_equal(lhs, rhs)
