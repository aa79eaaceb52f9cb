"""Points of the boolean hypercube Q_d under the Hamming (l1) metric.

A :class:`Point` keeps its bits as a Python integer whose most significant
bit is the first character of the canonical 0/1 string.  Bulk work goes
through :func:`pack`, which lays a point set out as ``(n, W)`` uint64 words so
distances reduce to xor + popcount.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Sequence

import numpy as np

WORD_BITS = 64


class DimensionMismatchError(ValueError):
    """Two points (or point sets) live in hypercubes of different dimension."""


class PointParseError(ValueError):
    """Text could not be decoded as a point of the requested dimension."""


@dataclass(frozen=True, order=True)
class Point:
    value: int
    d: int

    def __post_init__(self) -> None:
        if self.d < 1:
            raise ValueError(f"dimension must be >= 1, got {self.d}")
        if self.value < 0 or self.value >> self.d:
            raise ValueError(f"value does not fit in {self.d} bits")

    @classmethod
    def from_bits(cls, bits: Sequence[int]) -> "Point":
        value = 0
        for b in bits:
            if b not in (0, 1):
                raise PointParseError(f"bit must be 0 or 1, got {b!r}")
            value = (value << 1) | int(b)
        return cls(value, len(bits))

    @property
    def bits(self) -> tuple[int, ...]:
        return tuple((self.value >> (self.d - 1 - i)) & 1 for i in range(self.d))

    def weight(self) -> int:
        return self.value.bit_count()

    def encode(self) -> str:
        """Canonical 0/1 string of length ``d``."""
        return format(self.value, f"0{self.d}b")

    def to_hex(self) -> str:
        return format(self.value, f"0{-(-self.d // 4)}x")

    def __str__(self) -> str:
        return self.encode()


def hamming_distance(p: Point, q: Point) -> int:
    if p.d != q.d:
        raise DimensionMismatchError(f"dimension mismatch: {p.d} != {q.d}")
    return (p.value ^ q.value).bit_count()


def parse_point(text: str, d: int, encoding: str = "auto") -> Point:
    """Decode ``text`` as a point of Q_d.

    ``encoding`` is ``"bin"`` (0/1 string of length d), ``"hex"`` (length
    ceil(d/4), high padding bits zero) or ``"auto"``, which prefers the binary
    reading whenever the text is a 0/1 string of length d.
    """
    if d < 1:
        raise PointParseError(f"dimension must be >= 1, got {d}")
    text = text.strip()
    hex_len = -(-d // 4)
    if encoding not in ("auto", "bin", "hex"):
        raise ValueError(f"unknown encoding {encoding!r}")

    if encoding == "bin" or (encoding == "auto" and len(text) == d and set(text) <= {"0", "1"}):
        if len(text) != d:
            raise PointParseError(f"expected {d} bits, got {len(text)} characters")
        if not set(text) <= {"0", "1"}:
            raise PointParseError(f"non-binary character in {text!r}")
        return Point(int(text, 2), d)

    if encoding == "auto" and len(text) != hex_len:
        raise PointParseError(
            f"{text!r} is neither a {d}-bit string nor a {hex_len}-digit hex string"
        )
    if len(text) != hex_len:
        raise PointParseError(f"expected {hex_len} hex digits, got {len(text)}")
    try:
        value = int(text, 16)
    except ValueError:
        raise PointParseError(f"non-hex character in {text!r}") from None
    if value >> d:
        raise PointParseError(f"hex value {text!r} has bits set above dimension {d}")
    return Point(value, d)


def common_dimension(points: Iterable[Point]) -> int:
    dims = {p.d for p in points}
    if not dims:
        raise ValueError("empty point set")
    if len(dims) > 1:
        raise DimensionMismatchError(f"mixed dimensions {sorted(dims)}")
    return dims.pop()


def n_words(d: int) -> int:
    return -(-d // WORD_BITS)


def pack(points: Sequence[Point], d: int | None = None) -> np.ndarray:
    """Pack points into an ``(n, W)`` uint64 array, left-aligned, MSB first."""
    if d is None:
        d = common_dimension(points)
    W = n_words(d)
    shift = W * WORD_BITS - d
    mask = (1 << WORD_BITS) - 1
    out = np.zeros((len(points), W), dtype=np.uint64)
    for i, p in enumerate(points):
        if p.d != d:
            raise DimensionMismatchError(f"dimension mismatch: {p.d} != {d}")
        v = p.value << shift
        for k in range(W):
            out[i, k] = (v >> (WORD_BITS * (W - 1 - k))) & mask
    return out


def unpack(words: np.ndarray, d: int) -> list[Point]:
    W = words.shape[1]
    shift = W * WORD_BITS - d
    points = []
    for row in words:
        v = 0
        for w in row:
            v = (v << WORD_BITS) | int(w)
        points.append(Point(v >> shift, d))
    return points


def distance_matrix(a: np.ndarray, b: np.ndarray, chunk: int = 512) -> np.ndarray:
    """All-pairs Hamming distances between packed sets ``a`` (n, W) and ``b`` (m, W).

    Returned as int32; rows are processed in fixed chunks so the result does
    not depend on how the work is split.
    """
    if a.shape[1] != b.shape[1]:
        raise DimensionMismatchError(f"word count mismatch: {a.shape[1]} != {b.shape[1]}")
    n, m = a.shape[0], b.shape[0]
    out = np.empty((n, m), dtype=np.int32)
    for lo in range(0, n, chunk):
        x = a[lo : lo + chunk, None, :] ^ b[None, :, :]
        out[lo : lo + chunk] = np.bitwise_count(x).sum(axis=2, dtype=np.int32)
    return out


def pairwise_distances(points: Sequence[Point], others: Sequence[Point] | None = None) -> np.ndarray:
    a = pack(points)
    b = a if others is None else pack(others, points[0].d if points else None)
    return distance_matrix(a, b)
