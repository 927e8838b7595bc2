"""One-time-pad XOR with single-use enforcement, and track-keyed textbook RSA.

The pad ledger records every consumed byte interval of a pad and refuses
overlap outright: XOR reuse leaks plaintext structure, so reuse is an error,
never a warning. RSA here is the bare modular-exponentiation operation keyed
from two binary tracks (primes nearest to track windows); it has no padding
scheme and is not semantically secure. It demonstrates the keying
construction, nothing more.
"""
from __future__ import annotations

import hashlib
import math
import os
import random
from bisect import bisect_left
from contextlib import contextmanager
from dataclasses import dataclass, field
from pathlib import Path
from typing import BinaryIO, Iterator

import numpy as np

from .bits import BitVector

PUBLIC_EXPONENT = 65537
KEYGEN_RETRY_BUDGET = 1024

# Strong-probable-prime witnesses proving primality for all n below this
# bound (Sorenson & Webster); larger inputs fall back to random rounds.
_MR_DETERMINISTIC_BOUND = 3_317_044_064_679_887_385_961_981
_MR_WITNESSES = (2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37)
_MR_RANDOM_ROUNDS = 64

_SMALL_PRIMES = (
    2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37, 41, 43, 47, 53, 59, 61, 67,
    71, 73, 79, 83, 89, 97, 101, 103, 107, 109, 113, 127, 131, 137, 139, 149,
    151, 157, 163, 167, 173, 179, 181, 191, 193, 197, 199, 211, 223, 227, 229,
)

_sysrand = random.SystemRandom()


class CryptoError(ValueError):
    """Base class for crypto-layer failures."""


class PadExhausted(CryptoError):
    pass


class PadReuse(CryptoError):
    """The requested pad interval intersects an already-consumed one."""

    def __init__(self, requested: tuple[int, int], clashing: tuple[int, int]):
        self.requested = requested
        self.clashing = clashing
        super().__init__(
            f"pad interval (offset={requested[0]}, length={requested[1]}) overlaps "
            f"consumed interval (offset={clashing[0]}, length={clashing[1]}); "
            "a pad byte may be used only once"
        )


class LedgerMismatch(CryptoError):
    """Ledger belongs to a different pad (content digest differs)."""


class TrackTooShort(CryptoError):
    pass


class RetryBudgetExhausted(CryptoError):
    pass


class MessageOutOfRange(CryptoError):
    pass


class CorruptFrame(CryptoError):
    pass


# ---------------------------------------------------------------------------
# One-time pad
# ---------------------------------------------------------------------------

@dataclass
class PadLedger:
    """Consumed-interval record for one pad, keyed by the pad's content digest.

    used_intervals stays sorted and disjoint; adjacent intervals are merged.
    """

    pad_id: str
    used_intervals: list[tuple[int, int]] = field(default_factory=list)

    def overlapping(self, offset: int, length: int) -> tuple[int, int] | None:
        """Return the first consumed interval intersecting [offset, offset+length)."""
        if length <= 0:
            return None
        i = bisect_left(self.used_intervals, (offset + length, 0))
        for off, ln in self.used_intervals[max(0, i - 1) : i + 1]:
            if off < offset + length and offset < off + ln:
                return (off, ln)
        return None

    def consume(self, offset: int, length: int) -> None:
        """Record [offset, offset+length) as used; PadReuse on any overlap."""
        if length <= 0:
            return
        clash = self.overlapping(offset, length)
        if clash is not None:
            raise PadReuse((offset, length), clash)
        i = bisect_left(self.used_intervals, (offset, length))
        self.used_intervals.insert(i, (offset, length))
        self._coalesce()

    def _coalesce(self) -> None:
        merged: list[tuple[int, int]] = []
        for off, ln in self.used_intervals:
            if merged and merged[-1][0] + merged[-1][1] == off:
                prev_off, prev_ln = merged[-1]
                merged[-1] = (prev_off, prev_ln + ln)
            else:
                merged.append((off, ln))
        self.used_intervals = merged


def pad_digest(pad: bytes) -> str:
    return hashlib.sha256(pad).hexdigest()


def otp_xor(
    data: bytes,
    pad: bytes | BinaryIO | str | os.PathLike,
    offset: int,
    ledger: PadLedger,
) -> bytes:
    """XOR data against pad[offset:], consuming that interval in the ledger.

    Raises PadExhausted when the pad is too short and PadReuse when any byte
    of the interval was consumed before. XOR is an involution: running the
    output through the same pad slice (with a fresh ledger) restores data.
    """
    if offset < 0:
        raise ValueError("offset must be >= 0")
    pad_bytes = _read_pad(pad, offset, len(data))
    ledger.consume(offset, len(data))
    if not data:
        return b""
    a = np.frombuffer(data, dtype=np.uint8)
    b = np.frombuffer(pad_bytes, dtype=np.uint8)
    return np.bitwise_xor(a, b).tobytes()


def _read_pad(pad, offset: int, length: int) -> bytes:
    if isinstance(pad, (str, os.PathLike)):
        size = os.path.getsize(pad)
        if size < offset + length:
            raise PadExhausted(f"pad is {size} bytes, need {offset + length}")
        with open(pad, "rb") as fh:
            fh.seek(offset)
            return fh.read(length)
    if isinstance(pad, (bytes, bytearray)):
        if len(pad) < offset + length:
            raise PadExhausted(f"pad is {len(pad)} bytes, need {offset + length}")
        return bytes(pad[offset : offset + length])
    pad.seek(0, os.SEEK_END)
    size = pad.tell()
    if size < offset + length:
        raise PadExhausted(f"pad is {size} bytes, need {offset + length}")
    pad.seek(offset)
    return pad.read(length)


def load_ledger(path: str | os.PathLike) -> PadLedger:
    """Read the sidecar: first line pad digest hex, then 'offset length' lines."""
    lines = Path(path).read_text().splitlines()
    if not lines:
        raise ValueError(f"empty ledger file {path}")
    intervals = []
    for line in lines[1:]:
        line = line.strip()
        if not line:
            continue
        off_s, len_s = line.split()
        intervals.append((int(off_s), int(len_s)))
    ledger = PadLedger(lines[0].strip())
    for off, ln in sorted(intervals):
        ledger.consume(off, ln)
    return ledger


def save_ledger(ledger: PadLedger, path: str | os.PathLike) -> None:
    path = Path(path)
    text = ledger.pad_id + "\n" + "".join(f"{o} {l}\n" for o, l in ledger.used_intervals)
    tmp = path.with_name(path.name + ".tmp")
    tmp.write_text(text)
    os.replace(tmp, path)


@contextmanager
def exclusive_ledger(
    ledger_path: str | os.PathLike,
    pad_path: str | os.PathLike,
) -> Iterator[PadLedger]:
    """Load (or create) a ledger under an exclusive advisory lock, save on exit.

    The lock is held on the sidecar for the whole read-modify-write so that
    concurrent writers cannot both consume the same interval. A fresh ledger
    is initialized from the pad's digest; an existing one must match it.
    """
    ledger_path = Path(ledger_path)
    digest = pad_digest(Path(pad_path).read_bytes())
    lock_fd = os.open(ledger_path.parent, os.O_RDONLY)
    try:
        try:
            import fcntl

            fcntl.flock(lock_fd, fcntl.LOCK_EX)
        except ImportError:  # non-POSIX; single-process use only
            pass
        if ledger_path.exists():
            ledger = load_ledger(ledger_path)
            if ledger.pad_id != digest:
                raise LedgerMismatch(
                    f"ledger {ledger_path} records pad {ledger.pad_id[:12]}..., "
                    f"but this pad digests to {digest[:12]}..."
                )
        else:
            ledger = PadLedger(digest)
        yield ledger
        save_ledger(ledger, ledger_path)
    finally:
        os.close(lock_fd)


# ---------------------------------------------------------------------------
# Primality and nearest prime
# ---------------------------------------------------------------------------

def is_prime(n: int) -> bool:
    """Miller-Rabin: deterministic witnesses below the proven bound, 64
    random strong-probable-prime rounds above it."""
    if n < 2:
        return False
    for p in _SMALL_PRIMES:
        if n == p:
            return True
        if n % p == 0:
            return False
    d, s = n - 1, 0
    while d % 2 == 0:
        d //= 2
        s += 1
    if n < _MR_DETERMINISTIC_BOUND:
        witnesses = _MR_WITNESSES
    else:
        witnesses = tuple(_sysrand.randrange(2, n - 1) for _ in range(_MR_RANDOM_ROUNDS))
    for a in witnesses:
        if _is_composite_witness(a, d, s, n):
            return False
    return True


def _is_composite_witness(a: int, d: int, s: int, n: int) -> bool:
    x = pow(a, d, n)
    if x in (1, n - 1):
        return False
    for _ in range(s - 1):
        x = x * x % n
        if x == n - 1:
            return False
    return True


def nearest_prime(value: int) -> int:
    """The prime minimizing |p - value|; equidistant ties go to the smaller."""
    if value < 2:
        raise ValueError("value must be >= 2")
    for dist in range(0, max(value, 2)):
        below = value - dist
        if below >= 2 and is_prime(below):
            return below
        if is_prime(value + dist):
            return value + dist
    raise AssertionError("unreachable: primes are unbounded")


# ---------------------------------------------------------------------------
# RSA keyed from binary tracks
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class RsaKeyPair:
    n: int
    e: int
    d: int
    p: int
    q: int

    @property
    def carmichael(self) -> int:
        return math.lcm(self.p - 1, self.q - 1)


def _window_value(track: BitVector, offset: int, window_bits: int) -> int:
    if offset + window_bits > len(track):
        raise TrackTooShort(
            f"track has {len(track)} bits, window [{offset}, {offset + window_bits}) needs more"
        )
    # Top bit forced to 1 so the derived prime has full bit-length.
    return track.window_int(offset, window_bits) | (1 << (window_bits - 1))


def rsa_keygen(
    track1: BitVector,
    track2: BitVector,
    window_bits: int = 512,
    offset_bits: int = 0,
) -> RsaKeyPair:
    """Derive an RSA keypair from two tracks: p and q are the primes nearest
    to the tracks' window values.

    Equal primes shift the second window by one bit and retry; a public
    exponent clash (gcd(e, lcm(p-1, q-1)) != 1) shifts both windows. Retries
    are bounded.
    """
    if window_bits < 16:
        raise ValueError("window_bits must be >= 16")
    off1 = off2 = offset_bits
    p = nearest_prime(_window_value(track1, off1, window_bits))
    q = nearest_prime(_window_value(track2, off2, window_bits))
    for _ in range(KEYGEN_RETRY_BUDGET):
        if p == q:
            off2 += 1
            q = nearest_prime(_window_value(track2, off2, window_bits))
            continue
        lam = math.lcm(p - 1, q - 1)
        if math.gcd(PUBLIC_EXPONENT, lam) != 1:
            off1 += 1
            off2 += 1
            p = nearest_prime(_window_value(track1, off1, window_bits))
            q = nearest_prime(_window_value(track2, off2, window_bits))
            continue
        return RsaKeyPair(n=p * q, e=PUBLIC_EXPONENT, d=pow(PUBLIC_EXPONENT, -1, lam), p=p, q=q)
    raise RetryBudgetExhausted(f"no usable prime pair within {KEYGEN_RETRY_BUDGET} retries")


def rsa_encrypt(m: int, key: RsaKeyPair) -> int:
    """c = m^e mod n. Textbook operation on the public part, no padding."""
    if not 0 <= m < key.n:
        raise MessageOutOfRange(f"message must satisfy 0 <= m < n, got {m}")
    return pow(m, key.e, key.n)


def rsa_decrypt(c: int, key: RsaKeyPair) -> int:
    """m = c^d mod n. Inverse of rsa_encrypt for the same keypair."""
    if not 0 <= c < key.n:
        raise MessageOutOfRange(f"ciphertext must satisfy 0 <= c < n, got {c}")
    return pow(c, key.d, key.n)


def _block_sizes(key: RsaKeyPair) -> tuple[int, int]:
    bitlen = key.n.bit_length()
    plain = (bitlen - 1) // 8
    cipher = (bitlen + 7) // 8
    if plain == 0:
        raise ValueError("modulus too small for byte-block framing")
    return plain, cipher


def rsa_encrypt_track(track: BitVector, key: RsaKeyPair) -> bytes:
    """Encrypt a track as a framed ciphertext stream.

    Frame: block count (u64 BE), original bit length (u64 BE), then ciphertext
    blocks of fixed width ceil(bitlen(n)/8) bytes, big-endian. Plaintext blocks
    take floor((bitlen(n)-1)/8) bytes each so every block value is below n.
    """
    plain_bs, cipher_bs = _block_sizes(key)
    payload = track.packed
    count = (len(payload) + plain_bs - 1) // plain_bs
    out = [count.to_bytes(8, "big"), len(track).to_bytes(8, "big")]
    for i in range(count):
        block = payload[i * plain_bs : (i + 1) * plain_bs]
        c = rsa_encrypt(int.from_bytes(block, "big"), key)
        out.append(c.to_bytes(cipher_bs, "big"))
    return b"".join(out)


def rsa_decrypt_track(blob: bytes, key: RsaKeyPair) -> BitVector:
    """Invert rsa_encrypt_track exactly, validating the frame structure."""
    plain_bs, cipher_bs = _block_sizes(key)
    if len(blob) < 16:
        raise CorruptFrame(f"frame header needs 16 bytes, got {len(blob)}")
    count = int.from_bytes(blob[0:8], "big")
    nbits = int.from_bytes(blob[8:16], "big")
    payload_len = (nbits + 7) // 8
    if count != (payload_len + plain_bs - 1) // plain_bs:
        raise CorruptFrame(f"block count {count} inconsistent with bit length {nbits}")
    if len(blob) != 16 + count * cipher_bs:
        raise CorruptFrame(
            f"frame is {len(blob)} bytes, expected {16 + count * cipher_bs} for {count} blocks"
        )
    chunks = []
    for i in range(count):
        c = int.from_bytes(blob[16 + i * cipher_bs : 16 + (i + 1) * cipher_bs], "big")
        if c >= key.n:
            raise CorruptFrame(f"ciphertext block {i} is not below the modulus")
        block_len = plain_bs if i < count - 1 else payload_len - plain_bs * (count - 1)
        m = rsa_decrypt(c, key)
        if m >> (8 * block_len):
            raise CorruptFrame(f"plaintext block {i} overflows its {block_len}-byte slot")
        chunks.append(m.to_bytes(block_len, "big"))
    try:
        return BitVector(b"".join(chunks), nbits)
    except ValueError as exc:
        raise CorruptFrame(str(exc)) from exc


def save_keypair(key: RsaKeyPair, path: str | os.PathLike) -> None:
    """Key file: n, e, d, p, q as decimal text, one per line."""
    path = Path(path)
    tmp = path.with_name(path.name + ".tmp")
    tmp.write_text("".join(f"{v}\n" for v in (key.n, key.e, key.d, key.p, key.q)))
    os.replace(tmp, path)


def load_keypair(path: str | os.PathLike) -> RsaKeyPair:
    values = [int(line) for line in Path(path).read_text().split()]
    if len(values) != 5:
        raise ValueError(f"key file must hold 5 integers (n e d p q), got {len(values)}")
    return RsaKeyPair(*values)
