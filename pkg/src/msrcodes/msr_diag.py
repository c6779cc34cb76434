"""MSR array code with diagonal node operators and optimal-bandwidth repair.

Node ``i`` carries the diagonal operator with entry ``lambda[i, a_i]`` at
coordinate ``a``, so every coordinate is an independent scalar Vandermonde
code.  To repair ``h`` failures at once, each helper sends, per repair group
``b in Z_s^(h-1)`` and per slot, the sum of its ``s`` symbols that line up
with the failed nodes' shifted digits.  Those sums together with the unknown
failed symbols form a GRS code of length ``hs + n - h`` and dimension
``d - 2e``, which is what lets the repair center correct ``e`` lying
helpers.
"""

from __future__ import annotations

import time
from collections.abc import Mapping, Sequence

import numpy as np

from .errors import IntegrityError, ParameterError
from .linop import StructuredOperator
from .mdscore import ArrayCode, CodeParams, normalize_failed, normalize_helpers
from .radix import digit, digit_tuples, slot_array
from .transcript import RepairTranscript
from .uerdec import InnerCodeView, decode_scalar


class DiagCode(ArrayCode):
    construction = "diag"

    def __init__(self, params: CodeParams, lambdas):
        F = params.field
        s, n = params.s, params.n
        lambdas = np.asarray(lambdas, dtype=np.int64)
        if lambdas.shape != (n, s):
            raise ValueError(f"lambda table must have shape {(n, s)}")
        ops = [StructuredOperator.digit_diagonal(F, s, n, i, lambdas[i - 1]) for i in range(1, n + 1)]
        super().__init__(params, ops)
        self.lambdas = lambdas

    def lam(self, i: int, u: int) -> int:
        return int(self.lambdas[i - 1, u])

    # -- repair groups ------------------------------------------------------

    def groups(self) -> list[tuple[int, ...]]:
        """Repair groups ``(b_1, ..., b_{h-1})`` in lexicographic order."""
        return list(digit_tuples(self.params.s, self.params.h - 1))

    def group_coords(self, failed: Sequence[int], b: Sequence[int]) -> np.ndarray:
        """``coords[u, x]`` = ``a(i_1..i_h; u, u+b_1, ..., u+b_{h-1})`` for slot ``x``."""
        s, n = self.params.s, self.params.n
        E = sorted(failed)
        free = slot_array(E, [0] * len(E), s, n)
        offs = (0,) + tuple(b)
        out = np.empty((s, free.size), dtype=np.int64)
        for u in range(s):
            out[u] = free + sum(((u + o) % s) * s ** (i - 1) for i, o in zip(E, offs))
        return out

    def helper_sum(self, column, j: int, failed: Sequence[int], b: Sequence[int]) -> np.ndarray:
        """What helper ``j`` sends for group ``b``: one sum of ``s`` symbols per slot."""
        if j in failed:
            raise ValueError(f"node {j} is in the failed set")
        column = np.asarray(column, dtype=np.int64)
        return self.field.sum(column[self.group_coords(failed, b)], axis=0)

    def helper_response(self, column, j: int, failed: Sequence[int]) -> np.ndarray:
        """All groups stacked: shape ``(s**(h-1), s**(n-h))``."""
        E = normalize_failed(self.params, failed)
        return np.stack([self.helper_sum(column, j, E, b) for b in self.groups()])

    def inner_code_points(self, failed: Sequence[int], b: Sequence[int]) -> InnerCodeView:
        """The per-slot GRS code linking failed unknowns and helper sums.

        Positions ``m*s + u`` hold failed node ``i_{m+1}`` at shifted digit
        ``u + b_m``; positions ``hs + t`` hold the ``t``-th surviving node.
        """
        p = self.params
        s, n, h = p.s, p.n, p.h
        E = sorted(failed)
        offs = (0,) + tuple(b)
        free = slot_array(E, [0] * h, s, n)
        survivors = [i for i in range(1, n + 1) if i not in E]
        L = free.size
        pts = np.empty((L, h * s + len(survivors)), dtype=np.int64)
        labels = []
        for m, (i, o) in enumerate(zip(E, offs)):
            for u in range(s):
                pts[:, m * s + u] = self.lam(i, (u + o) % s)
                labels.append(("failed", i, u))
        for t, i in enumerate(survivors):
            pts[:, h * s + t] = self.lambdas[i - 1][digit(free, i, s, n)]
            labels.append(("helper", i))
        view = InnerCodeView(self.field, pts, p.r)
        view.labels = labels
        view.survivors = survivors
        return view

    def repair(
        self,
        failed: Sequence[int],
        helpers: Sequence[int] | None,
        responses: Mapping[int, np.ndarray],
    ) -> tuple[dict[int, np.ndarray], RepairTranscript]:
        """Rebuild all ``h`` failed columns from ``d`` helper responses.

        ``responses[j]`` is helper ``j``'s :meth:`helper_response` (or a
        corrupted version of it).  Raises :class:`IntegrityError` when no
        consistent codeword can be found in some group.
        """
        p = self.params
        E = normalize_failed(p, failed)
        R = normalize_helpers(p, E, helpers)
        tr = RepairTranscript(self.construction, p.as_tuple(), E, R)
        start = time.perf_counter()
        s, L = p.s, p.slots
        out = {i: np.zeros(self.l, dtype=np.int64) for i in E}
        seen = {i: np.zeros(self.l, dtype=np.int64) for i in E}
        flagged = set()
        for g, b in enumerate(self.groups()):
            view = self.inner_code_points(E, b)
            pos = {i: p.h * s + t for t, i in enumerate(view.survivors)}
            observed = {}
            for j in R:
                resp = np.asarray(responses[j], dtype=np.int64)
                if resp.shape != (p.groups, L):
                    raise ValueError(f"response of helper {j} has shape {resp.shape}")
                observed[pos[j]] = resp[g]
                tr.record_group(j, L, s * L)
            try:
                res = decode_scalar(view, observed, p.e)
            except IntegrityError as exc:
                exc.group = tuple(b)
                tr.outcome = "integrity-failure"
                tr.wall_time = time.perf_counter() - start
                exc.transcript = tr
                raise
            back = {v: k for k, v in pos.items()}
            flagged.update(back[q] for q in res.error_positions)
            coords = self.group_coords(E, b)
            for m, i in enumerate(E):
                for u in range(s):
                    out[i][coords[u]] = res.word[m * s + u]
                    seen[i][coords[u]] += 1
        for i in E:
            if not np.all(seen[i] == 1):  # pragma: no cover - partition is structural
                raise AssertionError(f"groups did not cover node {i} exactly once")
        tr.flagged = sorted(flagged)
        tr.outcome = "success"
        tr.wall_time = time.perf_counter() - start
        return out, tr


def build_diag(params: CodeParams, lambda_assignment=None) -> DiagCode:
    """Construct the diagonal code.

    Without an explicit assignment, ``lambda[i, u]`` is the element with
    canonical index ``(i-1)*s + u + 1`` (nonzero, so every ``A_i`` is
    invertible) when the field has room, else ``(i-1)*s + u``.
    """
    F = params.field
    if F is None:
        raise ParameterError("field-missing", "the diagonal construction needs a field")
    s, n = params.s, params.n
    if F.q < s * n:
        raise ParameterError("field-size", f"need |F| >= sn = {s * n}, got {F.q}")
    if lambda_assignment is None:
        offset = 1 if F.q > s * n else 0
        lambdas = np.arange(s * n, dtype=np.int64).reshape(n, s) + offset
    else:
        lambdas = F.check(lambda_assignment).reshape(n, s)
        flat = lambdas.ravel().tolist()
        if len(set(flat)) != len(flat):
            seen = {}
            for idx, v in enumerate(flat):
                if v in seen:
                    a, b = divmod(seen[v], s), divmod(idx, s)
                    raise ParameterError(
                        "lambda-injective",
                        f"lambda[{a[0] + 1},{a[1]}] = lambda[{b[0] + 1},{b[1]}] = {v}",
                    )
                seen[v] = idx
    return DiagCode(params, lambdas)
