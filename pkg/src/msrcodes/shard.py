"""On-disk node shards and byte/symbol packing.

File layout::

    b"MSRA" | version (u8) | field count (u8) | fields... | payload

Each header field is ``tag (u8) | length (u32 LE) | value``.  The payload is
``stripes * l`` symbols, each stored little-endian in the smallest number of
bytes that holds ``q - 1``.
"""

from __future__ import annotations

import json
import struct
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .gf import GF, parse_field

MAGIC = b"MSRA"
VERSION = 1

_TAGS = {
    "construction": 1,
    "params": 2,
    "field": 3,
    "node": 4,
    "data_length": 5,
    "stripes": 6,
    "gamma": 7,
}
_NAMES = {v: k for k, v in _TAGS.items()}


class ShardFormatError(OSError):
    """A shard file is truncated, has the wrong magic, or disagrees with its peers."""


@dataclass
class ShardHeader:
    construction: str
    params: tuple[int, int, int, int, int]
    field: str
    node: int
    data_length: int
    stripes: int = 1
    gamma: int | None = None

    def gf(self) -> GF:
        return parse_field(self.field)

    def same_code(self, other: "ShardHeader") -> bool:
        return (self.construction, self.params, self.field, self.data_length, self.stripes, self.gamma) == (
            other.construction,
            other.params,
            other.field,
            other.data_length,
            other.stripes,
            other.gamma,
        )


def _encode_fields(h: ShardHeader) -> list[tuple[int, bytes]]:
    out = [
        (_TAGS["construction"], h.construction.encode()),
        (_TAGS["params"], struct.pack("<5I", *h.params)),
        (_TAGS["field"], h.field.encode()),
        (_TAGS["node"], struct.pack("<I", h.node)),
        (_TAGS["data_length"], struct.pack("<Q", h.data_length)),
        (_TAGS["stripes"], struct.pack("<I", h.stripes)),
    ]
    if h.gamma is not None:
        out.append((_TAGS["gamma"], struct.pack("<Q", h.gamma)))
    return out


def symbols_to_bytes(symbols: np.ndarray, width: int) -> bytes:
    v = np.asarray(symbols, dtype=np.int64).reshape(-1)
    out = np.empty((v.size, width), dtype=np.uint8)
    for b in range(width):
        out[:, b] = (v >> (8 * b)) & 0xFF
    return out.tobytes()


def bytes_to_symbols(raw: bytes, width: int) -> np.ndarray:
    if len(raw) % width:
        raise ShardFormatError("payload is not a whole number of symbols")
    a = np.frombuffer(raw, dtype=np.uint8).reshape(-1, width).astype(np.int64)
    return (a << (8 * np.arange(width, dtype=np.int64))).sum(axis=1)


def write_shard(path, header: ShardHeader, payload: np.ndarray):
    F = header.gf()
    payload = np.asarray(payload, dtype=np.int64).reshape(-1)
    l = stripe_length(header)
    if payload.size != header.stripes * l:
        raise ValueError(f"payload has {payload.size} symbols, expected {header.stripes * l}")
    fields = _encode_fields(header)
    parts = [MAGIC, struct.pack("<BB", VERSION, len(fields))]
    for tag, value in fields:
        parts.append(struct.pack("<BI", tag, len(value)))
        parts.append(value)
    parts.append(symbols_to_bytes(payload, F.symbol_width))
    Path(path).write_bytes(b"".join(parts))


def stripe_length(header: ShardHeader) -> int:
    n, k, h, d, e = header.params
    s = (d - 2 * e - k + h) // h
    return s**n


def read_shard(path) -> tuple[ShardHeader, np.ndarray]:
    raw = Path(path).read_bytes()
    if raw[:4] != MAGIC:
        raise ShardFormatError(f"{path}: bad magic")
    if len(raw) < 6:
        raise ShardFormatError(f"{path}: truncated header")
    version, count = struct.unpack_from("<BB", raw, 4)
    if version != VERSION:
        raise ShardFormatError(f"{path}: unsupported version {version}")
    pos = 6
    vals = {}
    for _ in range(count):
        if pos + 5 > len(raw):
            raise ShardFormatError(f"{path}: truncated header")
        tag, size = struct.unpack_from("<BI", raw, pos)
        pos += 5
        vals[_NAMES.get(tag, tag)] = raw[pos : pos + size]
        pos += size
    try:
        header = ShardHeader(
            construction=vals["construction"].decode(),
            params=struct.unpack("<5I", vals["params"]),
            field=vals["field"].decode(),
            node=struct.unpack("<I", vals["node"])[0],
            data_length=struct.unpack("<Q", vals["data_length"])[0],
            stripes=struct.unpack("<I", vals["stripes"])[0],
            gamma=struct.unpack("<Q", vals["gamma"])[0] if "gamma" in vals else None,
        )
    except (KeyError, struct.error, UnicodeDecodeError) as exc:
        raise ShardFormatError(f"{path}: malformed header ({exc})") from None
    F = header.gf()
    payload = bytes_to_symbols(raw[pos:], F.symbol_width)
    if payload.size != header.stripes * stripe_length(header):
        raise ShardFormatError(f"{path}: payload has {payload.size} symbols, expected {header.stripes * stripe_length(header)}")
    if np.any(payload >= F.q):
        raise ShardFormatError(f"{path}: payload symbol outside the field")
    return header, payload


def shard_name(node: int) -> str:
    return f"node_{node:03d}.msra"


def bits_per_symbol(field: GF) -> int:
    """Data bits carried per symbol: ``floor(log2 q)``."""
    return field.q.bit_length() - 1


def pack_bytes(data: bytes, field: GF, per_stripe: int) -> np.ndarray:
    """Spread ``data`` over symbols, zero-padding to whole stripes.

    Returns shape ``(stripes, per_stripe)`` with at least one stripe.
    """
    b = bits_per_symbol(field)
    bits = np.unpackbits(np.frombuffer(data, dtype=np.uint8))
    nsym = -(-bits.size // b)
    stripes = max(1, -(-nsym // per_stripe))
    padded = np.zeros(stripes * per_stripe * b, dtype=np.int64)
    padded[: bits.size] = bits
    weights = 1 << np.arange(b - 1, -1, -1, dtype=np.int64)
    return (padded.reshape(-1, b) * weights).sum(axis=1).reshape(stripes, per_stripe)


def unpack_bytes(symbols: np.ndarray, field: GF, length: int) -> bytes:
    b = bits_per_symbol(field)
    v = np.asarray(symbols, dtype=np.int64).reshape(-1)
    if np.any(v >> b):
        raise ValueError("data symbol exceeds the packing width")
    bits = ((v[:, None] >> np.arange(b - 1, -1, -1, dtype=np.int64)) & 1).astype(np.uint8).reshape(-1)
    if bits.size < 8 * length:
        raise ValueError("not enough symbols for the recorded length")
    return np.packbits(bits[: 8 * length]).tobytes()


def header_json(h: ShardHeader) -> str:
    return json.dumps(
        {
            "construction": h.construction,
            "params": list(h.params),
            "field": h.field,
            "node": h.node,
            "data_length": h.data_length,
            "stripes": h.stripes,
            "gamma": h.gamma,
        },
        sort_keys=True,
    )
