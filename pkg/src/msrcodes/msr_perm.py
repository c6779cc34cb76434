"""MSR array code with generalized-permutation operators and optimal access.

``A_i`` cycles digit ``i`` forward by one and scales coordinate ``a`` by
``lambda[i, a_i]``, where ``lambda[i, 0] = gamma**i`` and ``lambda[i, u] = 1``
otherwise, so ``A_i**s = gamma**i * I``.  Repair groups are indexed by
``Gamma(h, s)``, the digit tuples summing to zero mod ``s``; for group ``b``
every helper just reads the ``s**(n-h)`` symbols whose failed-node digits
equal ``b``.  Downloaded and accessed symbols coincide.
"""

from __future__ import annotations

import time
from collections.abc import Mapping, Sequence
from itertools import product

import numpy as np

from .errors import IntegrityError, ParameterError
from .gf import FieldElement, primitive_element
from .linop import StructuredOperator, apply, block_vandermonde_solve
from .mdscore import ArrayCode, CodeParams, normalize_failed, normalize_helpers
from .radix import shift_digit, slot_array
from .transcript import RepairTranscript
from .uerdec import decode_columnar


def gamma_set(h: int, s: int) -> list[tuple[int, ...]]:
    """``Gamma(h, s)`` as tuples ``(a_h, ..., a_1)``, lexicographic."""
    if h < 1 or s < 1:
        raise ValueError("h and s must be positive")
    return [t for t in product(range(s), repeat=h) if sum(t) % s == 0]


def _by_failed(b: Sequence[int]) -> tuple[int, ...]:
    """Reorder a ``(a_h, ..., a_1)`` group tuple to match ``i_1 < ... < i_h``."""
    return tuple(reversed(tuple(b)))


class CbCode:
    """The ``(n-h, d-2e, s**(n-h))`` array code formed by one repair group.

    Positions are labelled by the original indices of the surviving nodes.
    Reduced digit ``j`` corresponds to the ``j``-th survivor, so its operator
    is node ``nodes[j-1]``'s operator restricted to ``s**(n-h)`` coordinates.
    Parity checks: ``sum_j mult_j B_j**m C_j = 0`` for ``m < r - hs``.
    """

    def __init__(self, code: "PermCode", failed: Sequence[int], b: Sequence[int]):
        p = code.params
        F = code.field
        self.field = F
        self.failed = list(failed)
        self.group = tuple(b)
        self.nodes = [i for i in range(1, p.n + 1) if i not in failed]
        self.positions = list(self.nodes)
        self.length = len(self.nodes)
        self.l = p.s ** self.length
        self.num_checks = p.r - p.h * p.s
        # old-index table: reduced digit j -> original node nodes[j-1]
        self.operators = {
            i: StructuredOperator.digit_shift(F, p.s, self.length, j, code.lambdas[i - 1])
            for j, i in enumerate(self.nodes, start=1)
        }
        g = code.gamma
        self.multipliers = {}
        for i in self.nodes:
            c = 1
            for f in failed:
                c = int(F.mul(c, F.sub(int(F.pow(g, i)), int(F.pow(g, f)))))
            self.multipliers[i] = c

    @property
    def dimension(self) -> int:
        return self.length - self.num_checks

    def syndromes(self, word: Mapping[int, np.ndarray]) -> np.ndarray:
        F = self.field
        cur = {i: F.mul(self.multipliers[i], np.asarray(word[i], dtype=np.int64)) for i in self.nodes}
        out = np.zeros((self.num_checks, self.l), dtype=np.int64)
        for m in range(self.num_checks):
            out[m] = F.sum(np.stack(list(cur.values())), axis=0)
            if m + 1 < self.num_checks:
                cur = {i: apply(self.operators[i], v) for i, v in cur.items()}
        return out

    def fill(self, known: Mapping[int, np.ndarray], unknown: Sequence[int]) -> dict[int, np.ndarray]:
        """Erasure-decode ``unknown`` columns using the first ``len(unknown)`` checks."""
        F = self.field
        w = len(unknown)
        if w == 0:
            return {}
        if w > self.num_checks:
            raise ValueError("more erased columns than parity checks")
        cur = {i: F.mul(self.multipliers[i], np.asarray(v, dtype=np.int64)) for i, v in known.items()}
        S = []
        for m in range(w):
            acc = F.sum(np.stack(list(cur.values())), axis=0) if cur else np.zeros(self.l, dtype=np.int64)
            S.append(F.neg(acc))
            if m + 1 < w:
                cur = {i: apply(self.operators[i], v) for i, v in cur.items()}
        Y = block_vandermonde_solve([self.operators[i] for i in unknown], S)
        return {i: F.div(y, self.multipliers[i]) for i, y in zip(unknown, Y)}


class PermCode(ArrayCode):
    construction = "perm"

    def __init__(self, params: CodeParams, gamma: int):
        F = params.field
        s, n = params.s, params.n
        self.gamma = int(gamma)
        lambdas = np.ones((n, s), dtype=np.int64)
        for i in range(1, n + 1):
            lambdas[i - 1, 0] = int(F.pow(self.gamma, i))
        self.lambdas = lambdas
        ops = [StructuredOperator.digit_shift(F, s, n, i, lambdas[i - 1]) for i in range(1, n + 1)]
        super().__init__(params, ops)

    def lam(self, i: int, u: int) -> int:
        return int(self.lambdas[i - 1, u])

    def beta(self, i: int, u: int, t: int) -> int:
        """Coefficient of ``A_i**t`` at any coordinate whose digit ``i`` is ``u``."""
        p = self.params
        if not 1 <= i <= p.n or not 0 <= u < p.s or not 0 <= t < max(p.r, 1):
            raise ValueError(f"beta index out of range: i={i}, u={u}, t={t}")
        F = self.field
        j, rest = divmod(t, p.s)
        out = 1
        for v in range(rest):
            out = int(F.mul(out, self.lam(i, (u + v) % p.s)))
        if j:
            out = int(F.mul(out, F.pow(self.gamma, j * i)))
        return out

    def groups(self) -> list[tuple[int, ...]]:
        return gamma_set(self.params.h, self.params.s)

    def access_rows(self, j: int, failed: Sequence[int], b: Sequence[int]) -> np.ndarray:
        """Coordinates helper ``j`` reads (and sends) for group ``b``, ascending."""
        if j in failed:
            raise ValueError(f"node {j} is in the failed set")
        E = sorted(failed)
        return slot_array(E, list(_by_failed(b)), self.params.s, self.params.n)

    def helper_response(self, column, j: int, failed: Sequence[int]) -> np.ndarray:
        E = normalize_failed(self.params, failed)
        column = np.asarray(column, dtype=np.int64)
        return np.stack([column[self.access_rows(j, E, b)] for b in self.groups()])

    def cb_code(self, failed: Sequence[int], b: Sequence[int]) -> CbCode:
        return CbCode(self, sorted(failed), b)

    def group_matrix(self, failed: Sequence[int], b: Sequence[int], p: int) -> np.ndarray:
        """``h x h`` system for shift ``p``: row ``j`` is equation ``t = j*s + p``."""
        E = sorted(failed)
        bb = _by_failed(b)
        h, s = self.params.h, self.params.s
        return np.array(
            [[self.beta(i, bm, j * s + p) for i, bm in zip(E, bb)] for j in range(h)],
            dtype=np.int64,
        )

    def solve_group(
        self, failed: Sequence[int], b: Sequence[int], columns: Mapping[int, np.ndarray]
    ) -> dict[int, tuple[np.ndarray, np.ndarray]]:
        """Recover the ``s * s**(n-h)`` symbols of each failed node owned by group ``b``.

        ``columns`` maps every surviving node to its (corrected) group column.
        Returns ``{node: (coordinates, values)}``.
        """
        F = self.field
        p = self.params
        E = sorted(failed)
        h, s = p.h, p.s
        cb = self.cb_code(E, b)
        base = slot_array(E, list(_by_failed(b)), s, p.n)
        # rhs_t = -sum_j B_j^t C_j for t < hs
        cur = {i: np.asarray(columns[i], dtype=np.int64) for i in cb.nodes}
        rhs = []
        for t in range(h * s):
            rhs.append(F.neg(F.sum(np.stack(list(cur.values())), axis=0)))
            if t + 1 < h * s:
                cur = {i: apply(cb.operators[i], v) for i, v in cur.items()}
        out = {i: ([], []) for i in E}
        for shift in range(s):
            G = self.group_matrix(E, b, shift)
            x = F.solve(G, np.stack([rhs[j * s + shift] for j in range(h)]))
            for m, i in enumerate(E):
                out[i][0].append(shift_digit(base, i, shift, s))
                out[i][1].append(x[m])
        return {i: (np.concatenate(c), np.concatenate(v)) for i, (c, v) in out.items()}

    def repair(
        self,
        failed: Sequence[int],
        helpers: Sequence[int] | None,
        responses: Mapping[int, np.ndarray],
    ) -> tuple[dict[int, np.ndarray], RepairTranscript]:
        """Rebuild the ``h`` failed columns; see :meth:`DiagCode.repair`."""
        p = self.params
        E = normalize_failed(p, failed)
        R = normalize_helpers(p, E, helpers)
        tr = RepairTranscript(self.construction, p.as_tuple(), E, R)
        start = time.perf_counter()
        L = p.slots
        out = {i: np.zeros(self.l, dtype=np.int64) for i in E}
        seen = {i: np.zeros(self.l, dtype=np.int64) for i in E}
        flagged = set()
        for g, b in enumerate(self.groups()):
            cb = self.cb_code(E, b)
            observed = {}
            for j in R:
                resp = np.asarray(responses[j], dtype=np.int64)
                if resp.shape != (p.groups, L):
                    raise ValueError(f"response of helper {j} has shape {resp.shape}")
                observed[j] = resp[g]
                tr.record_group(j, L, L)
            try:
                res = decode_columnar(cb, observed, p.e)
            except IntegrityError as exc:
                exc.group = tuple(b)
                tr.outcome = "integrity-failure"
                tr.wall_time = time.perf_counter() - start
                exc.transcript = tr
                raise
            flagged.update(res.error_positions)
            for i, (coords, vals) in self.solve_group(E, b, res.word).items():
                out[i][coords] = vals
                seen[i][coords] += 1
        for i in E:
            if not np.all(seen[i] == 1):  # pragma: no cover - partition is structural
                raise AssertionError(f"groups did not cover node {i} exactly once")
        tr.flagged = sorted(flagged)
        tr.outcome = "success"
        tr.wall_time = time.perf_counter() - start
        return out, tr


def build_perm(params: CodeParams, gamma: int | FieldElement | None = None) -> PermCode:
    """Construct the permutation code; ``gamma`` defaults to the smallest primitive element."""
    F = params.field
    if F is None:
        raise ParameterError("field-missing", "the permutation construction needs a field")
    if F.q < params.n + 1:
        raise ParameterError("field-size", f"need |F| >= n + 1 = {params.n + 1}, got {F.q}")
    if gamma is None:
        gamma = primitive_element(F)
    gamma = int(gamma)
    # invertibility and the repair systems only need gamma^1..gamma^n distinct;
    # gamma^n = 1 is allowed (n = q - 1)
    powers = [int(F.pow(gamma, i)) for i in range(1, params.n + 1)]
    if len(set(powers)) != params.n:
        raise ParameterError("gamma-order", f"gamma = {gamma} has multiplicative order < n")
    return PermCode(params, gamma)
