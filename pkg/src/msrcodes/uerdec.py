"""Error-and-erasure decoding of the short inner codes used during repair.

Both inner codes are handled by the same exhaustive search: for every
choice of ``e`` observed positions to distrust, erasure-decode from the rest
and keep the result only if it satisfies the spare parity checks.  By the
minimum-distance argument at most one codeword can pass when no more than
``e`` positions are wrong, so a second distinct passing candidate is treated
as a hard error rather than resolved.

A code view has to provide

* ``positions``: the ordered position labels,
* ``num_checks``: the number of parity checks,
* ``fill(known, unknown)``: erasure decoding using the first ``len(unknown)``
  checks,
* ``syndromes(word)``: all parity checks evaluated on a full word.

Values are arrays; a position holds a whole column (columnar mode) or one
symbol per slot (scalar mode, batched over slots).  Errors are counted per
position, so a lying helper may corrupt its entire column.
"""

from __future__ import annotations

from collections.abc import Mapping, Sequence
from dataclasses import dataclass
from itertools import combinations

import numpy as np

from .errors import DecodingAmbiguityError, IntegrityError
from .gf import GF


@dataclass
class DecodeResult:
    word: dict
    error_positions: list
    attempts: int


class InnerCodeView:
    """A batch of GRS-type codes, one per slot.

    ``points`` has shape ``(L, N)``: slot ``x`` is the length-``N`` code with
    parity checks ``sum_p points[x, p]**t * value[p] = 0`` for ``t < checks``.
    """

    def __init__(self, field: GF, points, checks: int):
        points = np.asarray(points, dtype=np.int64)
        if points.ndim == 1:
            points = points[None]
        self.field = field
        self.points = points
        self.num_checks = checks
        self.positions = list(range(points.shape[1]))
        self._powers = field.vandermonde(points, checks)  # (L, checks, N)

    @property
    def length(self) -> int:
        return self.points.shape[1]

    @property
    def dimension(self) -> int:
        return self.length - self.num_checks

    def _stack(self, word: Mapping[int, np.ndarray], keys: Sequence[int]) -> np.ndarray:
        return np.stack([np.broadcast_to(np.asarray(word[p], dtype=np.int64), (self.points.shape[0],)) for p in keys])

    def syndromes(self, word: Mapping[int, np.ndarray]) -> np.ndarray:
        W = self._stack(word, self.positions)  # (N, L)
        F = self.field
        return F.sum(F.mul(self._powers, W.T[:, None, :]), axis=-1).T

    def fill(self, known: Mapping[int, np.ndarray], unknown: Sequence[int]) -> dict[int, np.ndarray]:
        F = self.field
        w = len(unknown)
        if w == 0:
            return {}
        if w > self.num_checks:
            raise ValueError("more unknowns than parity checks")
        keys = sorted(known)
        P = self._powers[:, :w, :]
        rhs = F.neg(F.sum(F.mul(P[:, :, keys], self._stack(known, keys).T[:, None, :]), axis=-1))
        x = F.solve(P[:, :, list(unknown)], rhs)
        return {p: x[:, j] for j, p in enumerate(unknown)}


def _first_violation(syn: np.ndarray):
    bad = np.nonzero(np.asarray(syn).reshape(-1, syn.shape[-1]).any(axis=0))[0]
    return int(bad[0]) if bad.size else None


def subset_search(view, observed: Mapping, e: int) -> DecodeResult:
    """Core decoder shared by :func:`decode_scalar` and :func:`decode_columnar`."""
    positions = list(view.positions)
    unknown_pos = [p for p in observed if p not in positions]
    if unknown_pos:
        raise ValueError(f"observed positions {unknown_pos} are not part of the code")
    obs = [p for p in positions if p in observed]
    missing = [p for p in positions if p not in observed]
    if e < 0 or e > len(obs):
        raise ValueError("error budget out of range")
    if len(missing) + e > view.num_checks:
        raise ValueError("too few observations for the error budget")
    observed = {p: np.asarray(v, dtype=np.int64) for p, v in observed.items()}
    result = None
    attempts = 0
    violation = None
    for distrusted in combinations(obs, e):
        attempts += 1
        trusted = {p: observed[p] for p in obs if p not in distrusted}
        unknown = [p for p in positions if p not in trusted]
        word = dict(trusted)
        word.update(view.fill(trusted, unknown))
        spare = view.syndromes(word)[len(unknown):]
        if np.any(spare):
            if violation is None:
                violation = _first_violation(spare)
            continue
        if result is None:
            result = word
        elif any(not np.array_equal(result[p], word[p]) for p in positions):
            raise DecodingAmbiguityError("two distinct codewords fit the observation; error budget exceeded")
    if result is None:
        err = IntegrityError(
            f"no choice of {e} distrusted positions gives a consistent codeword", slot=violation
        )
        raise err
    errors = [p for p in obs if not np.array_equal(result[p], observed[p])]
    return DecodeResult(result, errors, attempts)


def decode_scalar(view: InnerCodeView, observed: Mapping[int, np.ndarray], e: int) -> DecodeResult:
    """Decode a batch of inner GRS words from ``d`` observed positions.

    ``observed`` maps position index to an array of per-slot values.  The
    same ``e`` positions are assumed faulty across all slots of the batch
    (a faulty helper taints its whole response).
    """
    return subset_search(view, observed, e)


def decode_columnar(view, observed: Mapping[int, np.ndarray], e: int) -> DecodeResult:
    """Decode an array code view (e.g. the repair-group code of the permutation
    construction) from ``d`` observed columns, ``<= e`` of them arbitrary."""
    return subset_search(view, observed, e)
