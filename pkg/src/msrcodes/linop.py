"""Generalized-permutation operators on F^(s^n) and the block solvers.

An operator ``M`` is stored as two length-``l`` arrays, ``coeff`` and
``target``, meaning ``(M v)[a] = coeff[a] * v[target[a]]``.  Diagonal
operators have ``target[a] == a``.  Dense matrices are never built here.
"""

from __future__ import annotations

from collections.abc import Sequence
from functools import cached_property

import numpy as np

from .errors import SingularMatrixError
from .gf import GF
from .radix import digit_table, shift_digit


class StructuredOperator:
    """``M = sum_a coeff[a] * e_a e_{target[a]}^T`` on coordinates ``[0, s**n)``."""

    def __init__(self, field: GF, s: int, n: int, coeff, target=None):
        self.field = field
        self.s = s
        self.n = n
        self.l = s**n
        self.coeff = np.asarray(coeff, dtype=np.int64)
        if target is None:
            target = np.arange(self.l, dtype=np.int64)
        self.target = np.asarray(target, dtype=np.int64)
        if self.coeff.shape != (self.l,) or self.target.shape != (self.l,):
            raise ValueError(f"operator arrays must have length {self.l}")
        self.coeff.setflags(write=False)
        self.target.setflags(write=False)

    @classmethod
    def identity(cls, field: GF, s: int, n: int) -> "StructuredOperator":
        return cls(field, s, n, np.ones(s**n, dtype=np.int64))

    @classmethod
    def digit_shift(cls, field: GF, s: int, n: int, i: int, weights: Sequence[int]) -> "StructuredOperator":
        """Shift digit ``i`` by one, scaling coordinate ``a`` by ``weights[a_i]``."""
        a = np.arange(s**n, dtype=np.int64)
        d = (a // s ** (i - 1)) % s
        return cls(field, s, n, np.asarray(weights, dtype=np.int64)[d], shift_digit(a, i, 1, s))

    @classmethod
    def digit_diagonal(cls, field: GF, s: int, n: int, i: int, weights: Sequence[int]) -> "StructuredOperator":
        """Diagonal operator with entry ``weights[a_i]`` at coordinate ``a``."""
        a = np.arange(s**n, dtype=np.int64)
        d = (a // s ** (i - 1)) % s
        return cls(field, s, n, np.asarray(weights, dtype=np.int64)[d])

    @property
    def is_diagonal(self) -> bool:
        return bool(np.array_equal(self.target, np.arange(self.l)))

    @property
    def is_permutation(self) -> bool:
        return bool(np.array_equal(np.sort(self.target), np.arange(self.l)))

    @property
    def is_invertible(self) -> bool:
        return self.is_permutation and bool(np.all(self.coeff != 0))

    @cached_property
    def moved_digits(self) -> tuple[int, ...]:
        """Digits (1-based) that ``target`` changes for at least one coordinate."""
        if self.n == 0:
            return ()
        src = digit_table(self.s, self.n)
        dst = src[:, self.target]
        return tuple(int(i) + 1 for i in np.nonzero((src != dst).any(axis=1))[0])

    def describe(self) -> str:
        if self.is_diagonal:
            return f"diag(l={self.l})"
        return f"gperm(l={self.l}, moves digits {list(self.moved_digits)})"

    def __repr__(self):
        return f"<StructuredOperator {self.describe()} over {self.field!r}>"

    def __eq__(self, other):
        return (
            isinstance(other, StructuredOperator)
            and self.field == other.field
            and self.l == other.l
            and np.array_equal(self.coeff, other.coeff)
            and np.array_equal(self.target, other.target)
        )

    __hash__ = None

    def __matmul__(self, other: "StructuredOperator") -> "StructuredOperator":
        return compose(self, other)

    def scaled(self, c: int) -> "StructuredOperator":
        return StructuredOperator(self.field, self.s, self.n, self.field.mul(self.coeff, c), self.target)


def _same_space(*ops: StructuredOperator):
    first = ops[0]
    for op in ops[1:]:
        if op.field != first.field or op.l != first.l or op.s != first.s:
            raise ValueError("operators act on different spaces")


def apply(M: StructuredOperator, v) -> np.ndarray:
    """``M v`` in O(l); ``v`` may carry leading batch axes."""
    v = np.asarray(v, dtype=np.int64)
    if v.shape[-1] != M.l:
        raise ValueError(f"vector length {v.shape[-1]} != operator size {M.l}")
    return M.field.mul(M.coeff, v[..., M.target])


def compose(M: StructuredOperator, N: StructuredOperator) -> StructuredOperator:
    """The product ``M N``."""
    _same_space(M, N)
    coeff = M.field.mul(M.coeff, N.coeff[M.target])
    return StructuredOperator(M.field, M.s, M.n, coeff, N.target[M.target])


def power(M: StructuredOperator, t: int) -> StructuredOperator:
    if t < 0:
        raise ValueError("negative operator power")
    out = StructuredOperator.identity(M.field, M.s, M.n)
    base = M
    while t:
        if t & 1:
            out = compose(out, base)
        base = compose(base, base)
        t >>= 1
    return out


def commute(M: StructuredOperator, N: StructuredOperator) -> bool:
    return compose(M, N) == compose(N, M)


def _blocks(A: StructuredOperator, B: StructuredOperator):
    """Coordinates grouped into blocks invariant under both operators.

    Returns ``(coords, local)``: ``coords[blk, j]`` is the ``j``-th coordinate
    of block ``blk`` and ``local[a]`` the position of ``a`` inside its block.
    """
    s, n = A.s, A.n
    moved = sorted(set(A.moved_digits) | set(B.moved_digits))
    a = np.arange(A.l, dtype=np.int64)
    weights = np.array([s ** (i - 1) for i in moved], dtype=np.int64)
    if moved:
        dig = np.stack([(a // w) % s for w in weights])
        local = np.zeros(A.l, dtype=np.int64)
        for k in range(len(moved)):
            local = local * s + dig[k]
        base = a - (dig * weights[:, None]).sum(axis=0)
    else:
        local = np.zeros(A.l, dtype=np.int64)
        base = a
    bs = s ** len(moved)
    order = np.lexsort((local, base))
    return a[order].reshape(-1, bs), local


def _difference_blocks(A: StructuredOperator, B: StructuredOperator):
    F = A.field
    coords, local = _blocks(A, B)
    nb, bs = coords.shape
    rows = np.arange(bs)[None, :].repeat(nb, axis=0)
    blk = np.arange(nb)[:, None].repeat(bs, axis=1)
    DA = np.zeros((nb, bs, bs), dtype=np.int64)
    DB = np.zeros((nb, bs, bs), dtype=np.int64)
    DA[blk, rows, local[A.target[coords]]] = A.coeff[coords]
    DB[blk, rows, local[B.target[coords]]] = B.coeff[coords]
    return coords, F.sub(DA, DB)


def difference_invertible(A: StructuredOperator, B: StructuredOperator) -> bool:
    """Whether ``A - B`` is nonsingular (block-wise elimination)."""
    _same_space(A, B)
    _, D = _difference_blocks(A, B)
    try:
        A.field.solve(D, np.zeros(D.shape[:-1], dtype=np.int64))
    except SingularMatrixError:
        return False
    return True


def diff_solve(A: StructuredOperator, B: StructuredOperator, y) -> np.ndarray:
    """Solve ``(A - B) x = y`` exactly.

    Coordinates are grouped by every digit the two operators leave alone;
    each group of ``s**(#moved digits)`` coordinates is an independent small
    dense system.  ``y`` may carry leading batch axes.
    """
    _same_space(A, B)
    F = A.field
    y = np.asarray(y, dtype=np.int64)
    if y.shape[-1] != A.l:
        raise ValueError("right-hand side has the wrong length")
    if not A.moved_digits and not B.moved_digits:
        d = F.sub(A.coeff, B.coeff)
        if np.any(d == 0):
            raise SingularMatrixError("A - B is singular (zero diagonal entry)")
        return F.div(y, d)
    coords, D = _difference_blocks(A, B)
    # bring the rhs into block layout, batch axes last
    rhs = np.moveaxis(y[..., coords], (-2, -1), (0, 1))
    shape = rhs.shape
    rhs = rhs.reshape(shape[0], shape[1], -1)
    try:
        sol = F.solve(D, rhs)
    except SingularMatrixError as exc:
        raise SingularMatrixError("A - B is singular") from exc
    sol = np.moveaxis(sol.reshape(shape), (0, 1), (-2, -1))
    x = np.empty_like(y)
    x[..., coords] = sol
    return x


def block_vandermonde_solve(operators: Sequence[StructuredOperator], syndromes: Sequence) -> list[np.ndarray]:
    """Solve ``sum_i M_i^t X_i = S_t`` for ``t = 0 .. w-1``.

    The operators must commute pairwise and have invertible pairwise
    differences.  Eliminates the last unknown by ``S'_t = S_{t+1} - M_w S_t``,
    which leaves the same system in ``Y_i = (M_i - M_w) X_i`` for the first
    ``w - 1`` operators; recovers ``X_i`` by :func:`diff_solve` and ``X_w``
    from the ``t = 0`` row.
    """
    w = len(operators)
    if len(syndromes) != w:
        raise ValueError(f"need {w} syndromes, got {len(syndromes)}")
    if w == 0:
        return []
    S = [np.asarray(x, dtype=np.int64) for x in syndromes]
    if w == 1:
        return [S[0].copy()]
    F = operators[0].field
    last = operators[-1]
    reduced = [F.sub(S[t + 1], apply(last, S[t])) for t in range(w - 1)]
    Y = block_vandermonde_solve(operators[:-1], reduced)
    X = [diff_solve(op, last, y) for op, y in zip(operators[:-1], Y)]
    xw = S[0]
    for x in X:
        xw = F.sub(xw, x)
    X.append(xw)
    return X
