"""s-ary coordinate arithmetic.

A coordinate ``a`` in ``[0, s**n)`` is identified with its digit vector
``(a_n, ..., a_1)`` where ``a = sum(a_i * s**(i-1))``.  Digit ``i`` belongs to
node ``i``; digit 1 is the least significant.  Coordinates stay plain ints
(or int arrays) and the ``(s, n)`` context is passed alongside.
"""

from __future__ import annotations

from collections.abc import Iterator, Sequence
from itertools import product

import numpy as np


def _check_index(i: int, n: int):
    if not 1 <= i <= n:
        raise IndexError(f"digit index {i} outside [1, {n}]")


def _check(positions: Sequence[int], values: Sequence[int], s: int, n: int):
    if len(positions) != len(values):
        raise ValueError("positions and values differ in length")
    if len(set(positions)) != len(positions):
        raise ValueError(f"duplicate positions in {tuple(positions)}")
    for i in positions:
        _check_index(i, n)
    for v in values:
        if not 0 <= v < s:
            raise ValueError(f"digit value {v} outside [0, {s - 1}]")


def digit(a, i: int, s: int, n: int):
    """The ``i``-th digit of ``a`` (works elementwise on arrays)."""
    _check_index(i, n)
    return (a // s ** (i - 1)) % s


def digits(a: int, s: int, n: int) -> tuple[int, ...]:
    """All digits, most significant first: ``(a_n, ..., a_1)``."""
    return tuple(int(digit(a, i, s, n)) for i in range(n, 0, -1))


def from_digits(ds: Sequence[int], s: int) -> int:
    """Inverse of :func:`digits`."""
    a = 0
    for v in ds:
        a = a * s + v
    return a


def with_digits(a, positions: Sequence[int], values: Sequence[int], s: int, n: int):
    """``a(i_1, ..., i_j; u_1, ..., u_j)``: replace the listed digits."""
    _check(positions, values, s, n)
    for i, v in zip(positions, values):
        w = s ** (i - 1)
        a = a + (v - (a // w) % s) * w
    return a


def shift_digit(a, i: int, t: int, s: int):
    """``a(i; a_i + t mod s)``, elementwise."""
    w = s ** (i - 1)
    cur = (a // w) % s
    return a + (((cur + t) % s) - cur) * w


def enumerate_slots(positions: Sequence[int], values: Sequence[int], s: int, n: int) -> Iterator[int]:
    """Every coordinate carrying the given fixed digits, increasing order."""
    yield from slot_array(positions, values, s, n).tolist()


def slot_array(positions: Sequence[int], values: Sequence[int], s: int, n: int) -> np.ndarray:
    """Array form of :func:`enumerate_slots`: ``s**(n - len(positions))`` ints."""
    _check(positions, values, s, n)
    fixed = dict(zip(positions, values))
    free = [i for i in range(1, n + 1) if i not in fixed]
    base = sum(v * s ** (i - 1) for i, v in fixed.items())
    out = np.full(1, base, dtype=np.int64)
    # most significant free digit varies slowest -> ascending output
    for i in reversed(free):
        out = (out[:, None] + np.arange(s, dtype=np.int64)[None, :] * s ** (i - 1)).ravel()
    return out


def digit_tuples(s: int, length: int) -> Iterator[tuple[int, ...]]:
    """All of ``Z_s^length`` in lexicographic order."""
    return product(range(s), repeat=length)


def digit_table(s: int, n: int) -> np.ndarray:
    """``table[i - 1, a]`` is digit ``i`` of ``a`` for all ``a < s**n``."""
    a = np.arange(s**n, dtype=np.int64)
    return np.stack([(a // s**i) % s for i in range(n)]) if n else np.zeros((0, 1), dtype=np.int64)
