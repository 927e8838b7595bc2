"""genevault: genomic sequence protection via one-hot binary splitting.

A sequence over {A,C,G,T} splits into four indicator tracks that are stored
apart; one track alone reveals almost nothing, three reconstruct the
sequence, and the one-hot column rule makes tampering visible. The tracks
double as cryptographic material (one-time pads gated by spectral screening,
RSA primes derived from track windows), and a seeded state-vector simulator
models transferring bases as entangled Bell pairs with eavesdropper
detection.
"""

from .bits import BitVector
from .sequence_io import AmbiguityPolicy, LiteralSequence, parse_fasta, read_fasta, write_fasta
from .shares import (
    BaseShares,
    IntegrityError,
    IntegrityReport,
    decode_gbin,
    encode_gbin,
    merge,
    residual_combinations,
    split,
    verify_integrity,
)

__version__ = "0.1.0"

__all__ = [
    "AmbiguityPolicy",
    "BaseShares",
    "BitVector",
    "IntegrityError",
    "IntegrityReport",
    "LiteralSequence",
    "decode_gbin",
    "encode_gbin",
    "merge",
    "parse_fasta",
    "read_fasta",
    "residual_combinations",
    "split",
    "verify_integrity",
    "write_fasta",
    "__version__",
]
