"""One-hot splitting of a sequence into four binary tracks, and the GBIN codec.

Each base gets an indicator track: bit i of the A track is 1 exactly when
position i of the sequence is an A. A valid share set is one-hot per column
(exactly one 1 across the four tracks at every position); a freshly loaded
or possibly tampered set must pass verify_integrity before merge will
reconstruct the sequence from it.
"""
from __future__ import annotations

import zlib
from dataclasses import dataclass

import numpy as np

from .bits import BitVector
from .sequence_io import LiteralSequence

BASES = "ATGC"

GBIN_MAGIC = b"GBN1"
GBIN_HEADER_LEN = 13  # magic(4) + base(1) + n(8)
GBIN_CRC_LEN = 4


class GbinError(ValueError):
    """Base class for GBIN container decode failures."""


class BadMagic(GbinError):
    pass


class BadBase(GbinError):
    pass


class ChecksumMismatch(GbinError):
    pass


class TruncatedPayload(GbinError):
    pass


class NonzeroPadding(GbinError):
    pass


@dataclass(frozen=True)
class BaseShares:
    """The four Bin(base) indicator tracks of one sequence.

    Construction does not enforce the one-hot column rule; call
    verify_integrity to establish validity (split output always passes).
    """

    track_a: BitVector
    track_t: BitVector
    track_g: BitVector
    track_c: BitVector

    @property
    def n(self) -> int:
        return len(self.track_a)

    def track(self, base: str) -> BitVector:
        try:
            return getattr(self, f"track_{base.lower()}")
        except AttributeError:
            raise KeyError(base) from None

    def tracks(self) -> dict[str, BitVector]:
        return {b: self.track(b) for b in BASES}


@dataclass(frozen=True)
class IntegrityReport:
    """Outcome of the length and one-hot column checks.

    length_mismatch is (expected n, per-track lengths) when the four tracks
    disagree; column checks are skipped in that case since columns are
    undefined. violations lists (column, ones count) for every column whose
    count differs from 1: 0 marks a deletion/zeroing, >= 2 an insertion.
    """

    ok: bool
    length_mismatch: tuple[int, dict[str, int]] | None
    violations: list[tuple[int, int]]

    def describe(self) -> str:
        if self.ok:
            return "ok: all tracks equal length, every column one-hot"
        lines = []
        if self.length_mismatch:
            expected, per_track = self.length_mismatch
            detail = ", ".join(f"{b}={per_track[b]}" for b in BASES)
            lines.append(f"length mismatch: expected {expected} ({detail})")
        for col, count in self.violations[:20]:
            lines.append(f"column {col}: ones count {count}")
        if len(self.violations) > 20:
            lines.append(f"... {len(self.violations) - 20} more violating columns")
        return "\n".join(lines)


class IntegrityError(ValueError):
    """Merge refused: the share set failed verification."""

    def __init__(self, report: IntegrityReport):
        self.report = report
        super().__init__(report.describe())


def split(seq: LiteralSequence) -> BaseShares:
    """Project a sequence onto its four one-hot indicator tracks."""
    codes = np.frombuffer(seq.bases.encode("ascii"), dtype=np.uint8)
    tracks = [BitVector.from_numpy(codes == ord(b)) for b in BASES]
    return BaseShares(*tracks)


def verify_integrity(shares: BaseShares) -> IntegrityReport:
    """Check equal track lengths, then the one-hot column rule."""
    lengths = {b: len(shares.track(b)) for b in BASES}
    if len(set(lengths.values())) > 1:
        counts: dict[int, int] = {}
        for v in lengths.values():
            counts[v] = counts.get(v, 0) + 1
        expected = max(counts, key=lambda v: (counts[v], v))
        return IntegrityReport(False, (expected, lengths), [])

    column_sums = sum(shares.track(b).to_numpy().astype(np.int32) for b in BASES)
    bad = np.flatnonzero(column_sums != 1)
    violations = [(int(i), int(column_sums[i])) for i in bad]
    return IntegrityReport(not violations, None, violations)


def merge(shares: BaseShares) -> LiteralSequence:
    """Reconstruct the literal sequence from a verified one-hot share set."""
    report = verify_integrity(shares)
    if not report.ok:
        raise IntegrityError(report)
    out = np.zeros(shares.n, dtype=np.uint8)
    for base in BASES:
        out[shares.track(base).to_numpy().astype(bool)] = ord(base)
    return LiteralSequence(out.tobytes().decode("ascii"))


def residual_combinations(n: int, known_tracks: int) -> int:
    """Count of candidate sequences left to an attacker holding some tracks.

    With k of the four tracks known, each unresolved position still admits
    4 - k bases, so the count is (4 - k)^n; three tracks pin the sequence
    (the fourth is redundant under the one-hot rule), giving 1.
    """
    if not 0 <= known_tracks <= 4:
        raise ValueError("known_tracks must be in 0..4")
    if n < 0:
        raise ValueError("n must be >= 0")
    if known_tracks >= 3:
        return 1
    return (4 - known_tracks) ** n


def encode_gbin(track: BitVector, base: str) -> bytes:
    """Serialize one track to the GBIN container.

    Layout: magic "GBN1", base letter, length as u64 little-endian, packed
    MSB-first payload (zero padding), CRC-32 of everything before it,
    little-endian.
    """
    if base not in BASES:
        raise BadBase(f"base must be one of {BASES}, got {base!r}")
    body = GBIN_MAGIC + base.encode("ascii") + len(track).to_bytes(8, "little") + track.packed
    return body + (zlib.crc32(body)).to_bytes(4, "little")


def decode_gbin(blob: bytes) -> tuple[str, int, BitVector]:
    """Parse a GBIN container back to (base, n, track). Inverse of encode_gbin."""
    if len(blob) < GBIN_HEADER_LEN + GBIN_CRC_LEN:
        raise TruncatedPayload(
            f"length mismatch: {len(blob)} bytes on disk, at least "
            f"{GBIN_HEADER_LEN + GBIN_CRC_LEN} expected"
        )
    if blob[:4] != GBIN_MAGIC:
        raise BadMagic(f"magic {blob[:4]!r} != {GBIN_MAGIC!r}")
    base = chr(blob[4])
    if base not in BASES:
        raise BadBase(f"base byte {blob[4]:#04x} is not one of {BASES}")
    n = int.from_bytes(blob[5:13], "little")
    expected_len = GBIN_HEADER_LEN + (n + 7) // 8 + GBIN_CRC_LEN
    if len(blob) != expected_len:
        raise TruncatedPayload(
            f"length mismatch: {len(blob)} bytes on disk, {expected_len} expected for n={n}"
        )
    body, crc_field = blob[:-GBIN_CRC_LEN], blob[-GBIN_CRC_LEN:]
    if zlib.crc32(body) != int.from_bytes(crc_field, "little"):
        raise ChecksumMismatch("CRC-32 mismatch")
    payload = body[GBIN_HEADER_LEN:]
    if n % 8 and payload and payload[-1] & ((1 << (8 - n % 8)) - 1):
        raise NonzeroPadding("padding bits beyond n are not zero")
    return base, n, BitVector(payload, n)
