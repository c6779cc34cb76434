"""Build either construction from a parameter tuple."""

from __future__ import annotations

from .gf import GF, is_prime, prime_field
from .mdscore import validate
from .msr_diag import build_diag
from .msr_perm import build_perm

CONSTRUCTIONS = ("diag", "perm")


def default_field(construction: str, n: int, k: int, h: int, d: int, e: int) -> GF:
    """Smallest prime field the construction accepts.

    The diagonal code gets one spare element so every ``lambda`` is nonzero.
    """
    p = validate(n, k, h, d, e)
    need = p.s * p.n + 1 if construction == "diag" else p.n + 1
    q = max(need, 2)
    while not is_prime(q):
        q += 1
    return prime_field(q)


def build_code(construction: str, params, field: GF | None = None, gamma: int | None = None):
    """``params`` is ``(n, k, h, d, e)``; the field defaults to :func:`default_field`."""
    if construction not in CONSTRUCTIONS:
        raise ValueError(f"construction must be one of {CONSTRUCTIONS}, got {construction!r}")
    n, k, h, d, e = (int(x) for x in params)
    field = field or default_field(construction, n, k, h, d, e)
    p = validate(n, k, h, d, e, field)
    if construction == "diag":
        if gamma is not None:
            raise ValueError("gamma only applies to the permutation construction")
        return build_diag(p)
    return build_perm(p, gamma)
