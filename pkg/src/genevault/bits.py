"""Bit-packed binary vectors, MSB-first within each byte.

Tracks are stored 8 positions per byte: bit i lives in byte i // 8 at bit
position 7 - (i % 8). Padding bits in the final byte are always zero.
Instances are immutable; mutation-style operations return new vectors.
"""
from __future__ import annotations

from typing import Iterable, Iterator

import numpy as np


class BitVector:
    """Immutable sequence of bits backed by packed bytes."""

    __slots__ = ("_buf", "_n")

    def __init__(self, buf: bytes, n: int):
        """Wrap packed bytes. Padding bits beyond n must be zero."""
        nbytes = (n + 7) // 8
        if len(buf) != nbytes:
            raise ValueError(f"need {nbytes} bytes for {n} bits, got {len(buf)}")
        if n % 8 and buf and buf[-1] & ((1 << (8 - n % 8)) - 1):
            raise ValueError("nonzero padding bits in final byte")
        self._buf = bytes(buf)
        self._n = n

    @classmethod
    def zeros(cls, n: int) -> BitVector:
        return cls(bytes((n + 7) // 8), n)

    @classmethod
    def from_bools(cls, bits: Iterable[bool | int]) -> BitVector:
        arr = np.fromiter((1 if b else 0 for b in bits), dtype=np.uint8)
        return cls.from_numpy(arr)

    @classmethod
    def from_numpy(cls, arr: np.ndarray) -> BitVector:
        """Build from a 1-D array of 0/1 values (any integer or bool dtype)."""
        arr = np.asarray(arr)
        return cls(np.packbits(arr.astype(bool)).tobytes(), int(arr.size))

    @classmethod
    def from01(cls, text: str) -> BitVector:
        """Parse a string of '0'/'1' characters (the ASCII export format)."""
        if text and set(text) - {"0", "1"}:
            raise ValueError("expected only '0'/'1' characters")
        arr = np.frombuffer(text.encode("ascii"), dtype=np.uint8) - ord("0")
        return cls.from_numpy(arr)

    def to_numpy(self) -> np.ndarray:
        """Unpack to a uint8 array of 0/1 values, length n."""
        return np.unpackbits(np.frombuffer(self._buf, dtype=np.uint8), count=self._n)

    def to01(self) -> str:
        return "".join("01"[b] for b in self.to_numpy())

    @property
    def packed(self) -> bytes:
        return self._buf

    def popcount(self) -> int:
        return int(self.to_numpy().sum()) if self._n else 0

    def window_int(self, offset: int, nbits: int) -> int:
        """Bits [offset, offset+nbits) read MSB-first as an unsigned integer."""
        if offset < 0 or nbits < 0 or offset + nbits > self._n:
            raise ValueError(f"window [{offset}, {offset + nbits}) outside {self._n} bits")
        if nbits == 0:
            return 0
        total = 8 * len(self._buf)
        whole = int.from_bytes(self._buf, "big")
        return (whole >> (total - offset - nbits)) & ((1 << nbits) - 1)

    def flipped(self, i: int) -> BitVector:
        """Copy with bit i inverted."""
        if not 0 <= i < self._n:
            raise IndexError(i)
        buf = bytearray(self._buf)
        buf[i // 8] ^= 1 << (7 - i % 8)
        return BitVector(bytes(buf), self._n)

    def __len__(self) -> int:
        return self._n

    def __getitem__(self, i: int) -> int:
        if not 0 <= i < self._n:
            raise IndexError(i)
        return (self._buf[i // 8] >> (7 - i % 8)) & 1

    def __iter__(self) -> Iterator[int]:
        return iter(self.to_numpy().tolist())

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, BitVector):
            return NotImplemented
        return self._n == other._n and self._buf == other._buf

    def __hash__(self) -> int:
        return hash((self._n, self._buf))

    def __repr__(self) -> str:
        preview = self.to01() if self._n <= 64 else self.to01()[:61] + "..."
        return f"BitVector({self._n}, {preview!r})"
