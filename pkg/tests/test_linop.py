import numpy as np
import pytest

from msrcodes.errors import SingularMatrixError
from msrcodes.gf import binary_field, prime_field
from msrcodes.linop import (
    StructuredOperator,
    apply,
    block_vandermonde_solve,
    commute,
    compose,
    diff_solve,
    difference_invertible,
    power,
)
from oracle import dense_block_vandermonde, dense_diag, dense_power, dense_shift, ref_field_for


def dense(op):
    D = np.zeros((op.l, op.l), dtype=np.int64)
    D[np.arange(op.l), op.target] = op.coeff
    return D


def test_digit_shift_matches_definition():
    F = prime_field(7)
    ref = ref_field_for(F)
    for i in (1, 2, 3):
        w = [3, 1, 5]
        op = StructuredOperator.digit_shift(F, 3, 3, i, w)
        assert np.array_equal(dense(op), dense_shift(ref, 3, 3, i, w))
        d = StructuredOperator.digit_diagonal(F, 3, 3, i, w)
        assert np.array_equal(dense(d), dense_diag(ref, 3, 3, i, w))
        assert d.is_diagonal and not op.is_diagonal and op.moved_digits == (i,)


@pytest.mark.parametrize("F", [prime_field(13), binary_field(4)], ids=str)
def test_apply_compose_power_against_dense(F):
    ref = ref_field_for(F)
    rng = np.random.default_rng(1)
    s, n = 2, 4
    A = StructuredOperator.digit_shift(F, s, n, 2, [4, 9])
    B = StructuredOperator.digit_shift(F, s, n, 3, [2, 1])
    v = F.random(rng, s**n)
    assert np.array_equal(apply(A, v), ref.matmul(dense(A), v[:, None])[:, 0])
    assert np.array_equal(dense(compose(A, B)), ref.matmul(dense(A), dense(B)))
    for t in range(5):
        assert np.array_equal(dense(power(A, t)), dense_power(ref, dense(A), t))
    assert power(A, 0) == StructuredOperator.identity(F, s, n)
    assert commute(A, B)
    batch = F.random(rng, (3, 2, s**n))
    assert np.array_equal(apply(A, batch)[1, 0], apply(A, batch[1, 0]))


def test_noncommuting_pair_detected():
    F = prime_field(7)
    A = StructuredOperator.digit_shift(F, 2, 2, 1, [2, 1])
    D = StructuredOperator.digit_diagonal(F, 2, 2, 1, [1, 3])
    assert not commute(A, D)


def test_power_of_shift_is_scalar():
    # weights (g, 1, ..., 1) give A**s = g * I
    F = prime_field(7)
    for s in (2, 3):
        A = StructuredOperator.digit_shift(F, s, 3, 2, [5] + [1] * (s - 1))
        P = power(A, s)
        assert P.is_diagonal and np.all(P.coeff == 5)


def test_diff_solve_and_singularity():
    F = prime_field(7)
    ref = ref_field_for(F)
    A = StructuredOperator.digit_shift(F, 2, 3, 1, [3, 1])
    B = StructuredOperator.digit_shift(F, 2, 3, 2, [2, 1])
    assert difference_invertible(A, B)
    y = np.arange(8) % 7
    x = diff_solve(A, B, y)
    assert np.array_equal(x, ref.solve(ref.sub(dense(A), dense(B)), y))
    C = StructuredOperator.digit_shift(F, 2, 3, 1, [3, 1])
    assert not difference_invertible(A, C)
    with pytest.raises(SingularMatrixError):
        diff_solve(A, C, y)
    D1 = StructuredOperator.digit_diagonal(F, 2, 3, 1, [1, 2])
    D2 = StructuredOperator.digit_diagonal(F, 2, 3, 2, [3, 4])
    assert np.array_equal(diff_solve(D1, D2, y), ref.solve(ref.sub(dense(D1), dense(D2)), y))
    D3 = StructuredOperator.digit_diagonal(F, 2, 3, 2, [1, 4])
    with pytest.raises(SingularMatrixError):
        diff_solve(D1, D3, y)


def test_single_unknown_and_mismatch():
    F = prime_field(7)
    A = StructuredOperator.identity(F, 2, 2)
    assert np.array_equal(block_vandermonde_solve([A], [np.arange(4)])[0], np.arange(4))
    assert block_vandermonde_solve([], []) == []
    with pytest.raises(ValueError):
        block_vandermonde_solve([A], [])
    with pytest.raises(ValueError):
        apply(A, np.zeros(3))
    with pytest.raises(ValueError):
        StructuredOperator(F, 2, 2, [1, 2, 3])


def test_block_vandermonde_small_dense():
    F = binary_field(4)
    ref = ref_field_for(F)
    rng = np.random.default_rng(5)
    ops = [StructuredOperator.digit_shift(F, 2, 3, i, [int(F.pow(2, i)), 1]) for i in (1, 2, 3)]
    X = F.random(rng, (3, 8))
    S = [F.sum(np.stack([apply(power(op, t), x) for op, x in zip(ops, X)]), axis=0) for t in range(3)]
    got = block_vandermonde_solve(ops, S)
    V = dense_block_vandermonde(ref, [dense(o) for o in ops])
    want = ref.solve(V, np.concatenate(S)).reshape(3, 8)
    assert np.array_equal(np.stack(got), want) and np.array_equal(want, X)
