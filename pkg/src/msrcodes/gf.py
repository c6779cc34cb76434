"""Finite-field arithmetic over GF(p) and GF(2^m).

Elements are canonical non-negative integers below the field order, so
numpy int64 arrays double as vectors of field elements.  Every arithmetic
method on :class:`GF` accepts Python ints or arrays and broadcasts like the
corresponding numpy ufunc.

Binary extension fields use a polynomial basis with the coefficients packed
into an integer (bit ``i`` is the coefficient of ``x**i``); multiplication goes
through log/antilog tables.
"""

from __future__ import annotations

import re
from functools import lru_cache

import numpy as np

from .errors import FieldError

PRIME = "prime"
BINARY = "binary-extension"

DEFAULT_POLYNOMIALS = {
    1: 0b11,
    2: 0b111,
    3: 0b1011,
    4: 0b10011,  # x^4 + x + 1
    5: 0b100101,
    6: 0b1000011,
    7: 0b10000011,
    8: 0x11B,  # x^8 + x^4 + x^3 + x + 1
    9: 0x211,
    10: 0x409,
    11: 0x805,
    12: 0x1053,
    13: 0x201B,
    14: 0x4443,
    15: 0x8003,
    16: 0x1002D,
}

TABLE_LIMIT = 1 << 16


def is_prime(p: int) -> bool:
    if p < 2:
        return False
    if p < 4:
        return True
    if p % 2 == 0:
        return False
    f = 3
    while f * f <= p:
        if p % f == 0:
            return False
        f += 2
    return True


def prime_factors(x: int) -> list[int]:
    out = []
    f = 2
    while f * f <= x:
        if x % f == 0:
            out.append(f)
            while x % f == 0:
                x //= f
        f += 1
    if x > 1:
        out.append(x)
    return out


def _poly_mod(a: int, b: int) -> int:
    db = b.bit_length()
    while a.bit_length() >= db:
        a ^= b << (a.bit_length() - db)
    return a


def is_irreducible_gf2(poly: int) -> bool:
    """Trial division by every polynomial of degree 1..deg/2."""
    m = poly.bit_length() - 1
    if m < 1:
        return False
    for cand in range(2, 1 << (m // 2 + 1)):
        if _poly_mod(poly, cand) == 0:
            return False
    return True


def _clmul_mod(a: int, b: int, poly: int, m: int) -> int:
    out = 0
    while b:
        if b & 1:
            out ^= a
        b >>= 1
        a <<= 1
        if a >> m:
            a ^= poly
    return out


class GF:
    """A finite field GF(p) or GF(2^m).

    Use :func:`field_new` or :func:`parse_field` rather than calling this
    directly; those cache instances so equal specs share tables.
    """

    def __init__(self, kind: str, p: int, m: int = 1, poly: int | None = None):
        if kind not in (PRIME, BINARY):
            raise FieldError(f"unknown field kind {kind!r}")
        if not is_prime(p):
            raise FieldError(f"characteristic {p} is not prime")
        if m < 1:
            raise FieldError("extension degree must be >= 1")
        if kind == PRIME:
            if m != 1:
                raise FieldError("GF(p^m) with m > 1 only supported for p = 2")
            poly = None
        else:
            if p != 2:
                raise FieldError("binary extension fields need p = 2")
            if poly is None:
                if m not in DEFAULT_POLYNOMIALS:
                    raise FieldError(f"no default polynomial for m = {m}")
                poly = DEFAULT_POLYNOMIALS[m]
            if poly.bit_length() - 1 != m:
                raise FieldError(f"polynomial {poly:#x} does not have degree {m}")
            if not is_irreducible_gf2(poly):
                raise FieldError(f"polynomial {poly:#x} is reducible over GF(2)")
        self.kind = kind
        self.p = p
        self.m = m
        self.poly = poly
        self.q = p**m
        if self.q < 2:
            raise FieldError("field order must be at least 2")
        if kind == BINARY and self.q > TABLE_LIMIT:
            raise FieldError("binary fields larger than GF(2^16) are not supported")
        self._build_tables()

    # -- construction -------------------------------------------------------

    def _build_tables(self):
        q = self.q
        self._log = None
        self._exp = None
        self._inv = None
        if q > TABLE_LIMIT:
            return
        if q == 2:
            self._inv = np.array([0, 1], dtype=np.int64)
            return
        if self.kind == PRIME:
            mul = lambda a, b: (a * b) % q  # noqa: E731
        else:
            mul = lambda a, b: _clmul_mod(a, b, self.poly, self.m)  # noqa: E731
        g = self._search_primitive(mul)
        exp = np.zeros(2 * (q - 1), dtype=np.int64)
        log = np.zeros(q, dtype=np.int64)
        x = 1
        for i in range(q - 1):
            exp[i] = x
            log[x] = i
            x = mul(x, g)
        exp[q - 1 :] = exp[: q - 1]
        self._exp = exp
        self._log = log
        inv = np.zeros(q, dtype=np.int64)
        nz = np.arange(1, q)
        inv[nz] = exp[(q - 1 - log[nz]) % (q - 1)]
        self._inv = inv
        self._generator = g

    def _search_primitive(self, mul) -> int:
        order = self.q - 1
        factors = prime_factors(order)
        for g in range(2, self.q):
            if all(self._scalar_pow(g, order // f, mul) != 1 for f in factors):
                return g
        # q = 3 lands here only if 2 fails, which cannot happen
        raise FieldError("no primitive element found")  # pragma: no cover

    @staticmethod
    def _scalar_pow(a: int, e: int, mul) -> int:
        out = 1
        while e:
            if e & 1:
                out = mul(out, a)
            a = mul(a, a)
            e >>= 1
        return out

    # -- identity -----------------------------------------------------------

    def _key(self):
        return (self.kind, self.p, self.m, self.poly)

    def __eq__(self, other):
        return isinstance(other, GF) and self._key() == other._key()

    def __hash__(self):
        return hash(self._key())

    def __repr__(self):
        return f"GF({self.spec_string()})"

    def spec_string(self) -> str:
        """Textual form accepted by :func:`parse_field`."""
        if self.kind == PRIME:
            return f"gf({self.p})"
        return f"gf(2^{self.m},poly={self.poly:#x})"

    @property
    def symbol_width(self) -> int:
        """Bytes needed to hold the largest element, q - 1."""
        return max(1, ((self.q - 1).bit_length() + 7) // 8)

    # -- elements -----------------------------------------------------------

    def __call__(self, value: int) -> "FieldElement":
        return FieldElement(self, value)

    def elements(self) -> range:
        """All elements in canonical integer order."""
        return range(self.q)

    def check(self, a) -> np.ndarray:
        arr = np.asarray(a, dtype=np.int64)
        if arr.size and (arr.min() < 0 or arr.max() >= self.q):
            raise FieldError(f"values outside [0, {self.q - 1}]")
        return arr

    def random(self, rng: np.random.Generator, size=None) -> np.ndarray:
        return rng.integers(0, self.q, size=size, dtype=np.int64)

    # -- arithmetic (broadcasting) -------------------------------------------

    def add(self, a, b):
        if self.kind == BINARY:
            return np.bitwise_xor(a, b)
        return np.mod(np.add(a, b), self.q)

    def sub(self, a, b):
        if self.kind == BINARY:
            return np.bitwise_xor(a, b)
        return np.mod(np.subtract(a, b), self.q)

    def neg(self, a):
        if self.kind == BINARY:
            return np.asarray(a, dtype=np.int64)
        return np.mod(np.negative(a), self.q)

    def mul(self, a, b):
        if self.kind == PRIME:
            return np.mod(np.multiply(a, b), self.q)
        a = np.asarray(a, dtype=np.int64)
        b = np.asarray(b, dtype=np.int64)
        if self._exp is None:  # GF(2)
            return a & b
        out = self._exp[self._log[a] + self._log[b]]
        return np.where((a == 0) | (b == 0), 0, out)

    def inv(self, a):
        a = np.asarray(a, dtype=np.int64)
        if np.any(a == 0):
            raise ZeroDivisionError("inverse of zero in " + self.spec_string())
        if self._inv is not None:
            return self._inv[a]
        return self.pow(a, self.q - 2)

    def div(self, a, b):
        return self.mul(a, self.inv(b))

    def pow(self, a, e: int):
        """``a**e`` for a non-negative integer exponent (0**0 == 1)."""
        if e < 0:
            return self.pow(self.inv(a), -e)
        a = np.asarray(a, dtype=np.int64)
        out = np.ones_like(a)
        base = a
        while e:
            if e & 1:
                out = self.mul(out, base)
            base = self.mul(base, base)
            e >>= 1
        return out

    def sum(self, a, axis=None):
        """Field sum along ``axis``."""
        a = np.asarray(a, dtype=np.int64)
        if self.kind == BINARY:
            return np.bitwise_xor.reduce(a, axis=axis)
        return np.mod(a.sum(axis=axis), self.q)

    def dot(self, a, b, axis=-1):
        return self.sum(self.mul(a, b), axis=axis)

    # -- linear algebra -----------------------------------------------------

    def solve(self, A, b):
        """Solve ``A x = b`` for a batch of square systems.

        ``A`` has shape ``(..., n, n)``; ``b`` is ``(..., n)`` or ``(..., n, k)``.
        Gauss-Jordan elimination with first-nonzero pivoting, vectorised over
        the leading batch axes.  Raises :class:`SingularMatrixError` if any
        system in the batch is singular.
        """
        from .errors import SingularMatrixError

        A = np.array(A, dtype=np.int64)
        b = np.array(b, dtype=np.int64)
        n = A.shape[-1]
        if A.shape[-2] != n:
            raise ValueError("coefficient matrices must be square")
        vector_rhs = b.ndim == A.ndim - 1
        if vector_rhs:
            b = b[..., None]
        batch = A.shape[:-2]
        A = A.reshape((-1, n, n))
        b = np.broadcast_to(b, batch + b.shape[-2:]).reshape((-1, n, b.shape[-1])).copy()
        idx = np.arange(A.shape[0])
        for col in range(n):
            nz = A[:, col:, col] != 0
            if not nz.any(axis=1).all():
                raise SingularMatrixError("singular system")
            piv = col + np.argmax(nz, axis=1)
            swap = piv != col
            if swap.any():
                rows = idx[swap]
                for M in (A, b):
                    tmp = M[rows, col].copy()
                    M[rows, col] = M[rows, piv[swap]]
                    M[rows, piv[swap]] = tmp
            pinv = self.inv(A[:, col, col])
            A[:, col] = self.mul(A[:, col], pinv[:, None])
            b[:, col] = self.mul(b[:, col], pinv[:, None])
            f = A[:, :, col].copy()
            f[:, col] = 0
            A = self.sub(A, self.mul(f[:, :, None], A[:, col][:, None, :]))
            b = self.sub(b, self.mul(f[:, :, None], b[:, col][:, None, :]))
        out = b.reshape(batch + (n, b.shape[-1]))
        return out[..., 0] if vector_rhs else out

    def matmul(self, A, B):
        """Field matrix product over the last two axes."""
        A = np.asarray(A, dtype=np.int64)
        B = np.asarray(B, dtype=np.int64)
        return self.sum(self.mul(A[..., :, :, None], B[..., None, :, :]), axis=-2)

    def vandermonde(self, points, rows: int):
        """Matrix with entry ``[..., t, j] = points[..., j] ** t``."""
        points = np.asarray(points, dtype=np.int64)
        out = np.empty(points.shape[:-1] + (rows, points.shape[-1]), dtype=np.int64)
        cur = np.ones_like(points)
        for t in range(rows):
            out[..., t, :] = cur
            cur = self.mul(cur, points)
        return out

    def element_order(self, a: int) -> int:
        if a % self.q == 0:
            raise FieldError("zero has no multiplicative order")
        order = self.q - 1
        for f in prime_factors(order):
            while order % f == 0 and int(self.pow(a, order // f)) == 1:
                order //= f
        return order


class FieldElement:
    """A single field element bound to its field.

    Handy for interactive work and tests; bulk computation uses arrays.
    """

    __slots__ = ("field", "value")

    def __init__(self, field: GF, value: int):
        value = int(value)
        if not 0 <= value < field.q:
            raise FieldError(f"{value} is not a canonical element of {field!r}")
        self.field = field
        self.value = value

    def _other(self, other) -> int:
        if isinstance(other, FieldElement):
            if other.field != self.field:
                raise FieldError("operands belong to different fields")
            return other.value
        if isinstance(other, int):
            return FieldElement(self.field, other % self.field.q if self.field.kind == PRIME else other).value
        return NotImplemented

    def _wrap(self, v) -> "FieldElement":
        return FieldElement(self.field, int(v))

    def __add__(self, other):
        o = self._other(other)
        return NotImplemented if o is NotImplemented else self._wrap(self.field.add(self.value, o))

    __radd__ = __add__

    def __sub__(self, other):
        o = self._other(other)
        return NotImplemented if o is NotImplemented else self._wrap(self.field.sub(self.value, o))

    def __rsub__(self, other):
        o = self._other(other)
        return NotImplemented if o is NotImplemented else self._wrap(self.field.sub(o, self.value))

    def __mul__(self, other):
        o = self._other(other)
        return NotImplemented if o is NotImplemented else self._wrap(self.field.mul(self.value, o))

    __rmul__ = __mul__

    def __truediv__(self, other):
        o = self._other(other)
        return NotImplemented if o is NotImplemented else self._wrap(self.field.div(self.value, o))

    def __neg__(self):
        return self._wrap(self.field.neg(self.value))

    def __pow__(self, e: int):
        return self._wrap(self.field.pow(self.value, e))

    def inv(self) -> "FieldElement":
        return self._wrap(self.field.inv(self.value))

    def order(self) -> int:
        return self.field.element_order(self.value)

    def __int__(self):
        return self.value

    __index__ = __int__

    def __eq__(self, other):
        if isinstance(other, FieldElement):
            return self.field == other.field and self.value == other.value
        if isinstance(other, int):
            return self.value == other
        return NotImplemented

    def __hash__(self):
        return hash((self.field, self.value))

    def __repr__(self):
        return f"{self.field!r}({self.value})"


@lru_cache(maxsize=None)
def _cached(kind: str, p: int, m: int, poly: int | None) -> GF:
    return GF(kind, p, m, poly)


def field_new(kind: str, p: int, m: int = 1, poly: int | None = None) -> GF:
    """Build (or fetch from cache) the field with the given description."""
    if kind == BINARY and poly is None and m in DEFAULT_POLYNOMIALS:
        poly = DEFAULT_POLYNOMIALS[m]
    return _cached(kind, p, m, poly)


def prime_field(p: int) -> GF:
    return field_new(PRIME, p)


def binary_field(m: int, poly: int | None = None) -> GF:
    return field_new(BINARY, 2, m, poly)


_SPEC_RE = re.compile(
    r"^\s*gf\(\s*(\d+)\s*(?:\^\s*(\d+))?\s*(?:,\s*poly\s*=\s*(0x[0-9a-f]+|\d+)\s*)?\)\s*$",
    re.IGNORECASE,
)


def parse_field(text: str) -> GF:
    """Parse ``gf(p)``, ``gf(2^m)`` or ``gf(2^m,poly=0x13)``."""
    match = _SPEC_RE.match(text)
    if not match:
        raise FieldError(f"cannot parse field spec {text!r}")
    p = int(match.group(1))
    m = int(match.group(2) or 1)
    poly = match.group(3)
    poly = int(poly, 0) if poly is not None else None
    if m == 1 and poly is None:
        return prime_field(p)
    if p != 2:
        raise FieldError("only GF(p) and GF(2^m) are supported")
    return binary_field(m, poly)


def primitive_element(field: GF) -> FieldElement:
    """Smallest element (canonical integer order) of multiplicative order q - 1."""
    if field.q < 3:
        raise FieldError("GF(2) has no element of order >= 2")
    order = field.q - 1
    factors = prime_factors(order)
    for g in range(1, field.q):
        if all(int(field.pow(g, order // f)) != 1 for f in factors):
            return field(g)
    raise FieldError("no primitive element")  # pragma: no cover
