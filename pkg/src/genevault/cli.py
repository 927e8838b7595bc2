"""Command-line surface: vault split/merge/verify, OTP, RSA, spectral
screening, reference fetching, and the quantum transfer simulator.

Exit codes: 0 success, 1 usage error, 2 integrity failure (including an
unsuitable pad screen), 3 crypto error, 4 I/O or network error, 5 internal
invariant violation. All file outputs are written to a temp file and renamed
so a failing command never leaves a partial file behind.
"""
from __future__ import annotations

import argparse
import os
import sys
from pathlib import Path

from . import __version__, crypto, quantum, sequence_io, shares, spectral
from .sequence_io import AmbiguityPolicy, LiteralSequence

EXIT_OK = 0
EXIT_USAGE = 1
EXIT_INTEGRITY = 2
EXIT_CRYPTO = 3
EXIT_IO = 4
EXIT_INTERNAL = 5


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):  # argparse default exits with 2; we reserve that
        raise UsageError(message)


def _atomic_write(path: str | os.PathLike, data: bytes) -> None:
    path = Path(path)
    tmp = path.with_name(path.name + ".tmp")
    tmp.write_bytes(data)
    os.replace(tmp, path)


def _load_sequence(path: str, strip: bool, record: int) -> LiteralSequence:
    policy = AmbiguityPolicy.STRIP if strip else AmbiguityPolicy.REJECT
    records = sequence_io.read_fasta(path, policy)
    if not 0 <= record < len(records):
        raise UsageError(f"record index {record} out of range; file has {len(records)} record(s)")
    seq = records[record]
    if seq.stripped_count:
        print(f"stripped {seq.stripped_count} non-ACGT character(s)", file=sys.stderr)
    return seq


def _add_fasta_flags(p: argparse.ArgumentParser) -> None:
    p.add_argument("--strip", action="store_true", help="drop non-ACGT characters instead of failing")
    p.add_argument("--record", type=int, default=0, help="record index in a multi-FASTA (default 0)")


def _vault_paths(directory: Path, stem: str) -> dict[str, Path]:
    return {base: directory / f"{stem}.{base}.gbin" for base in shares.BASES}


def _discover_stem(directory: Path, stem: str | None) -> str:
    if stem is not None:
        return stem
    stems = sorted(p.name[: -len(".A.gbin")] for p in directory.glob("*.A.gbin"))
    if not stems:
        raise FileNotFoundError(f"no *.A.gbin share file in {directory}")
    if len(stems) > 1:
        raise UsageError(f"multiple share sets in {directory} ({', '.join(stems)}); use --stem")
    return stems[0]


def _load_vault(directory: str, stem: str | None) -> tuple[str, shares.BaseShares]:
    directory = Path(directory)
    stem = _discover_stem(directory, stem)
    tracks = {}
    for base, path in _vault_paths(directory, stem).items():
        tag, _, track = shares.decode_gbin(path.read_bytes())
        if tag != base:
            raise shares.BadBase(f"{path} is tagged {tag!r}, expected {base!r}")
        tracks[base] = track
    return stem, shares.BaseShares(tracks["A"], tracks["T"], tracks["G"], tracks["C"])


def _load_track(path: str) -> tuple[str, shares.BitVector]:
    base, _, track = shares.decode_gbin(Path(path).read_bytes())
    return base, track


# ---------------------------------------------------------------------------
# subcommand bodies
# ---------------------------------------------------------------------------

def _cmd_split(args) -> int:
    seq = _load_sequence(args.fasta, args.strip, args.record)
    share_set = shares.split(seq)
    out_dir = Path(args.out)
    out_dir.mkdir(parents=True, exist_ok=True)
    stem = Path(args.fasta).stem
    for base, path in _vault_paths(out_dir, stem).items():
        track = share_set.track(base)
        _atomic_write(path, shares.encode_gbin(track, base))
        if args.ascii:
            _atomic_write(out_dir / f"{stem}.{base}.txt", (track.to01() + "\n").encode("ascii"))
    print(f"wrote 4 share files for {len(seq)} bases under {out_dir}", file=sys.stderr)
    return EXIT_OK


def _cmd_merge(args) -> int:
    stem, share_set = _load_vault(args.dir, args.stem)
    seq = shares.merge(share_set)
    _atomic_write(args.out, sequence_io.write_fasta(LiteralSequence(seq.bases, id=stem)))
    return EXIT_OK


def _cmd_verify(args) -> int:
    _, share_set = _load_vault(args.dir, args.stem)
    report = shares.verify_integrity(share_set)
    print(report.describe())
    return EXIT_OK if report.ok else EXIT_INTEGRITY


def _cmd_combos(args) -> int:
    print(shares.residual_combinations(args.n, args.known))
    return EXIT_OK


def _cmd_otp(args) -> int:
    data = Path(args.infile).read_bytes()
    with crypto.exclusive_ledger(args.ledger, args.pad) as ledger:
        result = crypto.otp_xor(data, args.pad, args.offset, ledger)
    _atomic_write(args.out, result)
    return EXIT_OK


def _cmd_rsa_keygen(args) -> int:
    _, track1 = _load_track(args.track1)
    _, track2 = _load_track(args.track2)
    key = crypto.rsa_keygen(track1, track2, window_bits=args.window, offset_bits=args.offset)
    crypto.save_keypair(key, args.out)
    print(f"modulus: {key.n.bit_length()} bits", file=sys.stderr)
    return EXIT_OK


def _cmd_rsa_enc(args) -> int:
    _, track = _load_track(args.track)
    key = crypto.load_keypair(args.keyfile)
    _atomic_write(args.out, crypto.rsa_encrypt_track(track, key))
    return EXIT_OK


def _cmd_rsa_dec(args) -> int:
    blob = Path(args.frame).read_bytes()
    key = crypto.load_keypair(args.keyfile)
    track = crypto.rsa_decrypt_track(blob, key)
    _atomic_write(args.out, shares.encode_gbin(track, args.base))
    return EXIT_OK


def _cmd_spectrum(args) -> int:
    seq = _load_sequence(args.fasta, args.strip, args.record)
    track = shares.split(seq).track(args.base)
    try:
        report = spectral.analyze_track(track)
    except spectral.DegenerateSpectrum:
        print(f"track {args.base} has a degenerate (constant) spectrum", file=sys.stderr)
        report = spectral.degenerate_report(track)
    mode = "log" if args.log else "linear"
    _atomic_write(args.out, spectral.export_spectrum(report, mode).encode("ascii"))
    if args.plot is not False:
        from . import plotting

        target = args.plot if args.plot else Path(args.out).with_suffix(".png")
        plotting.plot_spectrum(report, target, log=args.log, title=f"track {args.base}")
        print(f"figure: {target}", file=sys.stderr)
    return EXIT_OK


def _cmd_screen(args) -> int:
    seq = _load_sequence(args.fasta, args.strip, args.record)
    result = spectral.screen_pad(seq, args.threshold, args.low_cutoff)
    for base in shares.BASES:
        report = result.reports[base]
        if report.degenerate:
            detail = "degenerate spectrum"
        else:
            flags = [name for name, on in (("codon_peak", report.codon_peak),
                                           ("low_freq", report.low_freq_flag)) if on]
            detail = ", ".join(flags) if flags else "no significant peaks"
        verdict = "suitable" if report.suitable_for_pad else "unsuitable"
        print(f"track {base}: {verdict} ({detail})")
    print(f"overall: {'suitable' if result.suitable else 'unsuitable'}")
    if args.plot is not False:
        from . import plotting

        target = args.plot if args.plot else f"{args.fasta}.screen.png"
        plotting.plot_screen(result, target)
        print(f"figure: {target}", file=sys.stderr)
    return EXIT_OK if result.suitable else EXIT_INTEGRITY


def _cmd_fetch(args) -> int:
    path = sequence_io.fetch_reference(args.url, args.out)
    print(f"wrote {path}", file=sys.stderr)
    return EXIT_OK


def _cmd_qtransfer(args) -> int:
    seq = _load_sequence(args.fasta, args.strip, args.record)
    report = quantum.simulate_transfer(seq, eve=args.eve, seed=args.seed)
    sys.stdout.write(report.to_text())
    return EXIT_OK


def _cmd_qencode(args) -> int:
    print(quantum.bell_encode(args.base))
    return EXIT_OK


def _cmd_qdecode(args) -> int:
    amps = [complex(a.replace("i", "j")) for a in args.amplitudes]
    state = quantum.TwoQubitState(amps)
    base, concentration = quantum.decode_base(state)
    print(f"decoded: {quantum.bell_decode(state)}")
    if base is not None:
        print(f"base: {base} (probability {concentration:.6f})")
    else:
        print(f"base: indeterminate (max probability {concentration:.6f}; possible tamper)")
    return EXIT_OK


# ---------------------------------------------------------------------------
# parser
# ---------------------------------------------------------------------------

def build_parser() -> _Parser:
    parser = _Parser(prog="genevault", description=__doc__.split("\n\n")[0])
    parser.add_argument("--version", action="version", version=f"genevault {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("split", help="split a FASTA sequence into four share files")
    p.add_argument("fasta")
    p.add_argument("--out", required=True, help="output directory for <stem>.{A,T,G,C}.gbin")
    p.add_argument("--ascii", action="store_true", help="also write '0'/'1' text tracks")
    _add_fasta_flags(p)
    p.set_defaults(func=_cmd_split)

    p = sub.add_parser("merge", help="reconstruct the sequence from a share directory")
    p.add_argument("dir")
    p.add_argument("--out", required=True)
    p.add_argument("--stem", help="share set stem when the directory holds several")
    p.set_defaults(func=_cmd_merge)

    p = sub.add_parser("verify", help="check share integrity (exit 2 on failure)")
    p.add_argument("dir")
    p.add_argument("--stem")
    p.set_defaults(func=_cmd_verify)

    p = sub.add_parser("combos", help="count sequences consistent with known tracks")
    p.add_argument("n", type=int)
    p.add_argument("known", type=int)
    p.set_defaults(func=_cmd_combos)

    p = sub.add_parser("otp", help="one-time-pad XOR with ledger-enforced single use")
    otp_sub = p.add_subparsers(dest="action", required=True)
    for action in ("enc", "dec"):
        q = otp_sub.add_parser(action)
        q.add_argument("infile")
        q.add_argument("pad")
        q.add_argument("--offset", type=int, default=0)
        q.add_argument("--ledger", required=True)
        q.add_argument("--out", required=True)
        q.set_defaults(func=_cmd_otp)

    p = sub.add_parser("rsa", help="track-keyed textbook RSA")
    rsa_sub = p.add_subparsers(dest="action", required=True)
    q = rsa_sub.add_parser("keygen")
    q.add_argument("track1")
    q.add_argument("track2")
    q.add_argument("--window", type=int, default=512, help="window width in bits")
    q.add_argument("--offset", type=int, default=0, help="window start bit")
    q.add_argument("--out", required=True)
    q.set_defaults(func=_cmd_rsa_keygen)
    q = rsa_sub.add_parser("enc")
    q.add_argument("track")
    q.add_argument("keyfile")
    q.add_argument("--out", required=True)
    q.set_defaults(func=_cmd_rsa_enc)
    q = rsa_sub.add_parser("dec")
    q.add_argument("frame")
    q.add_argument("keyfile")
    q.add_argument("--out", required=True)
    q.add_argument("--base", choices=list(shares.BASES), default="A",
                   help="base tag for the reconstructed track file")
    q.set_defaults(func=_cmd_rsa_dec)

    p = sub.add_parser("spectrum", help="export one track's amplitude spectrum as CSV")
    p.add_argument("fasta")
    p.add_argument("--base", choices=list(shares.BASES), required=True)
    p.add_argument("--log", action="store_true", help="log10 magnitudes")
    p.add_argument("--out", required=True)
    p.add_argument("--plot", nargs="?", default=False, const="",
                   help="also render a figure (default: CSV path with .png)")
    _add_fasta_flags(p)
    p.set_defaults(func=_cmd_spectrum)

    p = sub.add_parser("screen", help="pad suitability screen (exit 2 if unsuitable)")
    p.add_argument("fasta")
    p.add_argument("--threshold", type=float, default=spectral.DEFAULT_THRESHOLD_RATIO)
    p.add_argument("--low-cutoff", dest="low_cutoff", type=float,
                   default=spectral.DEFAULT_LOW_FREQ_CUTOFF)
    p.add_argument("--plot", nargs="?", default=False, const="",
                   help="render the four-track spectrum panel")
    _add_fasta_flags(p)
    p.set_defaults(func=_cmd_screen)

    p = sub.add_parser("fetch", help="download a reference (gunzips gzip payloads)")
    p.add_argument("url")
    p.add_argument("--out", required=True)
    p.set_defaults(func=_cmd_fetch)

    p = sub.add_parser("qtransfer", help="simulate Bell-state transfer of a sequence")
    p.add_argument("fasta")
    p.add_argument("--eve", type=float, default=None, help="interception probability")
    p.add_argument("--seed", type=int, default=0)
    _add_fasta_flags(p)
    p.set_defaults(func=_cmd_qtransfer)

    p = sub.add_parser("qencode", help="print the Bell state encoding a base")
    p.add_argument("base", choices=list(shares.BASES))
    p.set_defaults(func=_cmd_qencode)

    p = sub.add_parser("qdecode", help="decode a two-qubit state back to a base")
    p.add_argument("amplitudes", nargs=4, help="four complex amplitudes, e.g. 0.7071 0 0 0.7071")
    p.set_defaults(func=_cmd_qdecode)

    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
        return args.func(args)
    except UsageError as exc:
        print(f"error: {exc}", file=sys.stderr)
        parser.print_usage(sys.stderr)
        return EXIT_USAGE
    except shares.IntegrityError as exc:
        print(f"integrity failure:\n{exc}", file=sys.stderr)
        return EXIT_INTEGRITY
    except shares.GbinError as exc:
        print(f"share container rejected: {exc}", file=sys.stderr)
        return EXIT_INTEGRITY
    except crypto.CryptoError as exc:
        print(f"crypto error: {exc}", file=sys.stderr)
        return EXIT_CRYPTO
    except (sequence_io.NetworkError, sequence_io.DecompressError) as exc:
        print(f"fetch failed: {exc}", file=sys.stderr)
        return EXIT_IO
    except (sequence_io.NonAlphabetCharacter, sequence_io.EmptyInput) as exc:
        print(f"bad input: {exc}", file=sys.stderr)
        return EXIT_IO
    except OSError as exc:
        print(f"i/o error: {exc}", file=sys.stderr)
        return EXIT_IO
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except Exception as exc:  # pragma: no cover - invariant violations
        print(f"internal error: {exc!r}", file=sys.stderr)
        return EXIT_INTERNAL


if __name__ == "__main__":
    sys.exit(main())
