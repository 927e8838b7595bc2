"""FASTA ingest, emit, and reference download for literal A/C/G/T sequences."""
from __future__ import annotations

import gzip
import os
import urllib.error
import urllib.request
import zlib
from dataclasses import dataclass, field
from enum import Enum
from pathlib import Path

ALPHABET = frozenset("ACGT")

DEFAULT_FETCH_TIMEOUT = 30.0
FETCH_TIMEOUT_ENV = "GENEVAULT_FETCH_TIMEOUT"


class AmbiguityPolicy(Enum):
    """What to do with characters outside A/C/G/T (for example N runs)."""

    REJECT = "reject"
    STRIP = "strip"


class NonAlphabetCharacter(ValueError):
    """A sequence character outside {A,C,G,T} under the REJECT policy."""

    def __init__(self, position: int, char: str, record_id: str = ""):
        self.position = position
        self.char = char
        self.record_id = record_id
        where = f" in record {record_id!r}" if record_id else ""
        super().__init__(f"non-alphabet character {char!r} at position {position}{where}")


class EmptyInput(ValueError):
    """No '>' record found in the input."""


class NetworkError(OSError):
    """Transport failure or HTTP status >= 400 while fetching."""


class DecompressError(OSError):
    """Payload looked like gzip but could not be decompressed."""


@dataclass(frozen=True)
class LiteralSequence:
    """A validated uppercase A/C/G/T string with provenance metadata.

    `source` and `stripped_count` are provenance only and do not take part
    in equality; two sequences compare equal when id and bases match.
    """

    bases: str
    id: str = ""
    source: str | None = field(default=None, compare=False)
    stripped_count: int = field(default=0, compare=False)

    def __post_init__(self):
        bad = set(self.bases) - ALPHABET
        if bad:
            pos = next(i for i, c in enumerate(self.bases) if c in bad)
            raise NonAlphabetCharacter(pos, self.bases[pos], self.id)

    def __len__(self) -> int:
        return len(self.bases)


def parse_fasta(
    raw: bytes | str,
    policy: AmbiguityPolicy = AmbiguityPolicy.REJECT,
    source: str | None = None,
) -> list[LiteralSequence]:
    """Parse FASTA text into one LiteralSequence per '>' record, in file order.

    Sequence lines may be multi-line and mixed case; CRLF and LF both work.
    Lowercase is uppercased. Under STRIP, characters outside the alphabet are
    removed and counted on the record's `stripped_count`; under REJECT the
    first such character raises NonAlphabetCharacter with its position in the
    record's concatenated sequence.
    """
    text = raw.decode("utf-8", errors="replace") if isinstance(raw, bytes) else raw
    records: list[LiteralSequence] = []
    header: str | None = None
    chunks: list[str] = []

    def close_record() -> None:
        if header is None:
            return
        kept: list[str] = []
        stripped = 0
        pos = 0
        for chunk in chunks:
            for c in chunk:
                u = c.upper()
                if u in ALPHABET:
                    kept.append(u)
                elif policy is AmbiguityPolicy.STRIP:
                    stripped += 1
                else:
                    raise NonAlphabetCharacter(pos, c, header)
                pos += 1
        records.append(
            LiteralSequence("".join(kept), id=header, source=source, stripped_count=stripped)
        )

    for line in text.splitlines():
        line = line.strip()
        if not line:
            continue
        if line.startswith(">"):
            close_record()
            header = line[1:].strip()
            chunks = []
        else:
            if header is None:
                raise EmptyInput("sequence data before any '>' header")
            chunks.append(line.replace(" ", "").replace("\t", ""))
    close_record()

    if not records:
        raise EmptyInput("no '>' record found")
    return records


def read_fasta(
    path: str | os.PathLike,
    policy: AmbiguityPolicy = AmbiguityPolicy.REJECT,
) -> list[LiteralSequence]:
    path = Path(path)
    return parse_fasta(path.read_bytes(), policy, source=str(path))


def write_fasta(seq: LiteralSequence, width: int = 60) -> bytes:
    """Emit one FASTA record with sequence lines wrapped at `width` columns."""
    if width < 1:
        raise ValueError("width must be >= 1")
    lines = [">" + seq.id]
    lines.extend(seq.bases[i : i + width] for i in range(0, len(seq.bases), width))
    return ("\n".join(lines) + "\n").encode("ascii")


def fetch_timeout() -> float:
    return float(os.environ.get(FETCH_TIMEOUT_ENV, DEFAULT_FETCH_TIMEOUT))


def fetch_reference(
    url: str,
    destination: str | os.PathLike,
    timeout: float | None = None,
) -> Path:
    """Download an http(s) resource, transparently gunzipping gzip payloads.

    Gzip is detected by the 0x1F 0x8B magic bytes, not by the URL suffix.
    The destination is written atomically (temp file, then rename).
    """
    if not url.startswith(("http://", "https://")):
        raise ValueError(f"unsupported URL scheme: {url}")
    if timeout is None:
        timeout = fetch_timeout()
    try:
        with urllib.request.urlopen(url, timeout=timeout) as resp:
            payload = resp.read()
    except urllib.error.HTTPError as exc:
        raise NetworkError(f"HTTP {exc.code} fetching {url}") from exc
    except (urllib.error.URLError, OSError) as exc:
        raise NetworkError(f"failed to fetch {url}: {exc}") from exc

    if payload[:2] == b"\x1f\x8b":
        try:
            payload = gzip.decompress(payload)
        except (OSError, EOFError, zlib.error) as exc:
            raise DecompressError(f"bad gzip payload from {url}: {exc}") from exc

    destination = Path(destination)
    tmp = destination.with_name(destination.name + ".tmp")
    tmp.write_bytes(payload)
    os.replace(tmp, destination)
    return destination
