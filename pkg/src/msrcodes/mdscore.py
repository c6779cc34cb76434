"""The generic (n, k, l) array code with block-Vandermonde parity checks.

A codeword is an ``(n, l)`` integer array whose row ``i - 1`` is node
``C_i``; it satisfies ``sum_i A_i^t C_i = 0`` for ``t = 0 .. r-1``.  Nodes
``1..k`` are systematic, ``k+1..n`` parity.
"""

from __future__ import annotations

import math
from collections.abc import Mapping, Sequence
from dataclasses import dataclass, field
from itertools import combinations

import numpy as np

from .errors import ParameterError, SingularMatrixError
from .gf import GF
from .linop import StructuredOperator, apply, block_vandermonde_solve, commute, difference_invertible


@dataclass(frozen=True)
class CodeParams:
    n: int
    k: int
    h: int
    d: int
    e: int
    field: GF | None = None

    @property
    def r(self) -> int:
        return self.n - self.k

    @property
    def s(self) -> int:
        return (self.d - 2 * self.e - self.k + self.h) // self.h

    @property
    def l(self) -> int:
        return self.s**self.n

    @property
    def groups(self) -> int:
        """Number of repair groups, ``s**(h-1)``."""
        return self.s ** (self.h - 1)

    @property
    def slots(self) -> int:
        """Symbols per helper per group, ``s**(n-h)``."""
        return self.s ** (self.n - self.h)

    @property
    def bound_denominator(self) -> int:
        return self.d - 2 * self.e - self.k + self.h

    def cut_set_bound(self) -> int:
        """``d h l / (d - 2e - k + h)``, exact because ``s`` is integral."""
        return self.d * self.h * self.l // self.bound_denominator

    def as_tuple(self) -> tuple[int, int, int, int, int]:
        return (self.n, self.k, self.h, self.d, self.e)


def validate(n: int, k: int, h: int, d: int, e: int, field: GF | None = None) -> CodeParams:
    """Check a raw parameter tuple; raise :class:`ParameterError` naming the failure."""
    for name, v in (("n", n), ("k", k), ("h", h), ("d", d), ("e", e)):
        if not isinstance(v, (int, np.integer)) or isinstance(v, bool):
            raise ParameterError("integer", f"{name} must be an integer")
    if k < 1:
        raise ParameterError("k-positive", f"k = {k} must be at least 1")
    if n <= k:
        raise ParameterError("r-positive", f"need n > k, got n = {n}, k = {k}")
    if e < 0:
        raise ParameterError("e-nonnegative", f"e = {e} must be >= 0")
    r = n - k
    if not 2 <= h <= r:
        raise ParameterError("h-range", f"need 2 <= h <= r = {r}, got h = {h}")
    if d < k + 2 * e:
        raise ParameterError("d-lower", f"need d >= k + 2e = {k + 2 * e}, got d = {d}")
    if d > n - h:
        raise ParameterError("d-upper", f"need d <= n - h = {n - h}, got d = {d}")
    if (d - k - 2 * e) % h != 0:
        raise ParameterError(
            "d-congruence", f"need d = k + 2e (mod h): d - k - 2e = {d - k - 2 * e} is not divisible by h = {h}"
        )
    params = CodeParams(int(n), int(k), int(h), int(d), int(e), field)
    if params.s < 1:  # pragma: no cover - implied by d-lower
        raise ParameterError("s-positive", "s must be a positive integer")
    if params.h * params.s > r:  # pragma: no cover - implied by d-upper
        raise ParameterError("hs-le-r", "h s must not exceed r")
    return params


@dataclass
class MDSReport:
    ok: bool
    mode: str
    checked: int
    failure: str | None = None
    detail: dict = field(default_factory=dict)


class ArrayCode:
    """An array code given by node operators ``A_1..A_n``.

    Subclasses fill in ``self.operators``; everything here only relies on
    them commuting with invertible pairwise differences.
    """

    construction = "generic"

    def __init__(self, params: CodeParams, operators: Sequence[StructuredOperator]):
        if len(operators) != params.n:
            raise ValueError("need one operator per node")
        self.params = params
        self.field = operators[0].field
        self.operators = list(operators)

    @property
    def n(self):
        return self.params.n

    @property
    def k(self):
        return self.params.k

    @property
    def r(self):
        return self.params.r

    @property
    def l(self):
        return self.params.l

    def op(self, i: int) -> StructuredOperator:
        """Operator of node ``i`` (1-based)."""
        return self.operators[i - 1]

    def syndromes(self, cw) -> np.ndarray:
        """``S_t = sum_i A_i^t C_i`` for ``t < r``; shape ``(r, l)``."""
        cw = np.asarray(cw, dtype=np.int64)
        if cw.shape != (self.n, self.l):
            raise ValueError(f"codeword must have shape {(self.n, self.l)}")
        F = self.field
        cur = cw.copy()
        out = np.zeros((self.r, self.l), dtype=np.int64)
        for t in range(self.r):
            out[t] = F.sum(cur, axis=0)
            if t + 1 < self.r:
                cur = np.stack([apply(A, c) for A, c in zip(self.operators, cur)])
        return out

    def is_codeword(self, cw) -> bool:
        return not np.any(self.syndromes(cw))

    def _solve_nodes(self, known: Mapping[int, np.ndarray], unknown: Sequence[int]) -> dict[int, np.ndarray]:
        F = self.field
        w = len(unknown)
        if w == 0:
            return {}
        cur = {i: np.asarray(c, dtype=np.int64) for i, c in known.items()}
        S = []
        for t in range(w):
            acc = np.zeros(self.l, dtype=np.int64)
            for c in cur.values():
                acc = F.add(acc, c)
            S.append(F.neg(acc))
            if t + 1 < w:
                cur = {i: apply(self.op(i), c) for i, c in cur.items()}
        X = block_vandermonde_solve([self.op(i) for i in unknown], S)
        return dict(zip(unknown, X))

    def encode(self, data) -> np.ndarray:
        """Systematic encoding of ``k`` data columns into an ``(n, l)`` codeword."""
        data = self.field.check(data)
        if data.shape != (self.k, self.l):
            raise ValueError(f"data must have shape {(self.k, self.l)}")
        parity = self._solve_nodes({i + 1: data[i] for i in range(self.k)}, range(self.k + 1, self.n + 1))
        return np.vstack([data] + [parity[i][None] for i in range(self.k + 1, self.n + 1)])

    def erasure_decode(self, available: Mapping[int, np.ndarray]) -> np.ndarray:
        """Rebuild the full codeword from any ``>= k`` surviving columns."""
        missing = [i for i in range(1, self.n + 1) if i not in available]
        if len(missing) > self.r:
            raise ValueError(f"{len(missing)} erasures exceed r = {self.r}")
        solved = self._solve_nodes(available, missing)
        return np.vstack([np.asarray(available[i] if i in available else solved[i])[None] for i in range(1, self.n + 1)])

    def random_codeword(self, rng: np.random.Generator) -> np.ndarray:
        return self.encode(self.field.random(rng, (self.k, self.l)))

    def verify_mds(self, mode: str = "structural", *, rng=None, cap: int = 10_000) -> MDSReport:
        """Check the MDS property.

        ``structural``: every operator pair commutes and has an invertible
        difference.  ``exhaustive``: a random codeword survives every maximal
        erasure pattern; uniformly sampled down to ``cap`` patterns if needed.
        """
        if mode == "structural":
            checked = 0
            for i, j in combinations(range(1, self.n + 1), 2):
                checked += 1
                if not commute(self.op(i), self.op(j)):
                    return MDSReport(False, mode, checked, f"A_{i} and A_{j} do not commute", {"pair": (i, j)})
                if not difference_invertible(self.op(i), self.op(j)):
                    return MDSReport(False, mode, checked, f"A_{i} - A_{j} is singular", {"pair": (i, j)})
            return MDSReport(True, mode, checked)
        if mode != "exhaustive":
            raise ValueError(f"unknown mode {mode!r}")
        rng = np.random.default_rng(0) if rng is None else rng
        cw = self.random_codeword(rng)
        total = math.comb(self.n, self.r)
        if total <= cap:
            patterns = list(combinations(range(1, self.n + 1), self.r))
        else:
            picked = set()
            while len(picked) < cap:
                picked.add(tuple(sorted(rng.choice(np.arange(1, self.n + 1), self.r, replace=False).tolist())))
            patterns = sorted(picked)
        for pat in patterns:
            avail = {i: cw[i - 1] for i in range(1, self.n + 1) if i not in pat}
            try:
                got = self.erasure_decode(avail)
            except SingularMatrixError:
                return MDSReport(False, mode, len(patterns), f"pattern {pat} is singular", {"pattern": pat})
            if not np.array_equal(got, cw):
                return MDSReport(False, mode, len(patterns), f"pattern {pat} decoded wrongly", {"pattern": pat})
        return MDSReport(True, mode, len(patterns), detail={"total_patterns": total})


def normalize_failed(params: CodeParams, failed) -> list[int]:
    E = sorted(int(i) for i in failed)
    if len(set(E)) != len(E):
        raise ValueError(f"duplicate failed nodes in {failed}")
    if any(not 1 <= i <= params.n for i in E):
        raise ValueError(f"failed nodes {E} outside [1, {params.n}]")
    if len(E) != params.h:
        raise ValueError(f"code repairs exactly h = {params.h} failures, got {len(E)}")
    return E


def default_helpers(params: CodeParams, failed) -> list[int]:
    """The ``d`` lowest-indexed surviving nodes."""
    fs = set(failed)
    return [i for i in range(1, params.n + 1) if i not in fs][: params.d]


def normalize_helpers(params: CodeParams, failed, helpers) -> list[int]:
    if helpers is None:
        return default_helpers(params, failed)
    R = sorted(int(i) for i in helpers)
    if len(set(R)) != len(R) or len(R) != params.d:
        raise ValueError(f"need exactly d = {params.d} distinct helpers, got {helpers}")
    if set(R) & set(failed):
        raise ValueError("helpers overlap the failed set")
    if any(not 1 <= i <= params.n for i in R):
        raise ValueError(f"helpers {R} outside [1, {params.n}]")
    return R
