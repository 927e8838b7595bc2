import gzip
import http.server
import threading

import numpy as np
import pytest

from genevault import shares
from genevault.bits import BitVector
from genevault.cli import main
from genevault.sequence_io import LiteralSequence, parse_fasta, write_fasta


@pytest.fixture
def sample_fasta(tmp_path):
    path = tmp_path / "sample.fasta"
    path.write_bytes(b">probe\nAGTCAAG\n")
    return path


def random_fasta(tmp_path, name, n, seed=0):
    rng = np.random.default_rng(seed)
    bases = "".join(np.array(list("ACGT"))[rng.integers(0, 4, n)])
    path = tmp_path / name
    path.write_bytes(write_fasta(LiteralSequence(bases, id=name)))
    return path, bases


def test_split_merge_round_trip(tmp_path, sample_fasta):
    vault = tmp_path / "vault"
    assert main(["split", str(sample_fasta), "--out", str(vault)]) == 0
    for base in "ATGC":
        assert (vault / f"sample.{base}.gbin").exists()
    out = tmp_path / "r.fasta"
    assert main(["merge", str(vault), "--out", str(out)]) == 0
    (rec,) = parse_fasta(out.read_bytes())
    assert rec.bases == "AGTCAAG"


def test_split_ascii_export(tmp_path, sample_fasta):
    vault = tmp_path / "vault"
    assert main(["split", str(sample_fasta), "--out", str(vault), "--ascii"]) == 0
    assert (vault / "sample.A.txt").read_text() == "1000110\n"


def test_verify_ok(tmp_path, sample_fasta, capsys):
    vault = tmp_path / "vault"
    main(["split", str(sample_fasta), "--out", str(vault)])
    assert main(["verify", str(vault)]) == 0
    assert "ok" in capsys.readouterr().out


def test_verify_truncated_file_exit_2(tmp_path, sample_fasta, capsys):
    vault = tmp_path / "vault"
    main(["split", str(sample_fasta), "--out", str(vault)])
    t_file = vault / "sample.T.gbin"
    t_file.write_bytes(t_file.read_bytes()[:-3])
    assert main(["verify", str(vault)]) == 2
    assert "length" in capsys.readouterr().err


def test_verify_tampered_track_exit_2(tmp_path, sample_fasta, capsys):
    vault = tmp_path / "vault"
    main(["split", str(sample_fasta), "--out", str(vault)])
    _, _, track = shares.decode_gbin((vault / "sample.G.gbin").read_bytes())
    (vault / "sample.G.gbin").write_bytes(shares.encode_gbin(track.flipped(3), "G"))
    assert main(["verify", str(vault)]) == 2
    assert "column 3" in capsys.readouterr().out


def test_merge_refuses_tampered_vault(tmp_path, sample_fasta):
    vault = tmp_path / "vault"
    main(["split", str(sample_fasta), "--out", str(vault)])
    _, _, track = shares.decode_gbin((vault / "sample.A.gbin").read_bytes())
    (vault / "sample.A.gbin").write_bytes(shares.encode_gbin(track.flipped(0), "A"))
    out = tmp_path / "r.fasta"
    assert main(["merge", str(vault), "--out", str(out)]) == 2
    assert not out.exists()  # no partial output


def test_merge_missing_vault(tmp_path):
    assert main(["merge", str(tmp_path), "--out", str(tmp_path / "x.fasta")]) == 4


def test_combos(capsys):
    assert main(["combos", "7", "1"]) == 0
    assert capsys.readouterr().out.strip() == "2187"
    assert main(["combos", "7", "3"]) == 0
    assert capsys.readouterr().out.strip() == "1"


def test_usage_errors_exit_1(capsys):
    assert main(["frobnicate"]) == 1
    assert main([]) == 1
    assert main(["split"]) == 1
    assert main(["combos", "5", "9"]) == 1  # known out of range


def test_otp_round_trip_and_reuse(tmp_path):
    message = tmp_path / "m.bin"
    message.write_bytes(b"attack at dawn")
    pad = tmp_path / "pad.bin"
    pad.write_bytes(bytes(np.random.default_rng(1).integers(0, 256, 256, dtype=np.uint8)))
    sender = tmp_path / "sender.ledger"
    receiver = tmp_path / "receiver.ledger"
    cipher = tmp_path / "c.bin"
    plain = tmp_path / "p.bin"

    assert main(["otp", "enc", str(message), str(pad), "--offset", "16",
                 "--ledger", str(sender), "--out", str(cipher)]) == 0
    assert cipher.read_bytes() != message.read_bytes()
    assert main(["otp", "dec", str(cipher), str(pad), "--offset", "16",
                 "--ledger", str(receiver), "--out", str(plain)]) == 0
    assert plain.read_bytes() == b"attack at dawn"

    # the sender may not reuse any byte of [16, 30)
    again = tmp_path / "c2.bin"
    assert main(["otp", "enc", str(message), str(pad), "--offset", "20",
                 "--ledger", str(sender), "--out", str(again)]) == 3
    assert not again.exists()


def test_otp_pad_too_short(tmp_path):
    message = tmp_path / "m.bin"
    message.write_bytes(b"0123456789")
    pad = tmp_path / "pad.bin"
    pad.write_bytes(b"1234")
    assert main(["otp", "enc", str(message), str(pad), "--ledger",
                 str(tmp_path / "l"), "--out", str(tmp_path / "c")]) == 3


def test_rsa_workflow(tmp_path):
    fasta, bases = random_fasta(tmp_path, "kmat.fasta", 2000, seed=3)
    vault = tmp_path / "vault"
    main(["split", str(fasta), "--out", str(vault)])
    key = tmp_path / "key.txt"
    assert main(["rsa", "keygen", str(vault / "kmat.A.gbin"), str(vault / "kmat.T.gbin"),
                 "--window", "64", "--out", str(key)]) == 0
    frame = tmp_path / "g.rsa"
    assert main(["rsa", "enc", str(vault / "kmat.G.gbin"), str(key),
                 "--out", str(frame)]) == 0
    back = tmp_path / "g.gbin"
    assert main(["rsa", "dec", str(frame), str(key), "--out", str(back),
                 "--base", "G"]) == 0
    assert back.read_bytes() == (vault / "kmat.G.gbin").read_bytes()


def test_rsa_keygen_track_too_short(tmp_path, sample_fasta):
    vault = tmp_path / "vault"
    main(["split", str(sample_fasta), "--out", str(vault)])
    assert main(["rsa", "keygen", str(vault / "sample.A.gbin"),
                 str(vault / "sample.T.gbin"), "--window", "64",
                 "--out", str(tmp_path / "k")]) == 3


def test_spectrum_csv_and_plot(tmp_path):
    fasta = tmp_path / "codon.fasta"
    fasta.write_bytes(write_fasta(LiteralSequence("ATG" * 192, id="codon")))
    csv = tmp_path / "spec.csv"
    png = tmp_path / "spec.png"
    assert main(["spectrum", str(fasta), "--base", "A", "--out", str(csv),
                 "--plot", str(png)]) == 0
    lines = csv.read_text().strip().split("\n")
    assert lines[0] == "frequency,magnitude"
    assert len(lines) == 1 + 576 // 2 + 1
    assert png.read_bytes()[:8] == b"\x89PNG\r\n\x1a\n"


def test_spectrum_log_mode(tmp_path):
    fasta = tmp_path / "c.fasta"
    fasta.write_bytes(write_fasta(LiteralSequence("ATG" * 64, id="c")))
    csv = tmp_path / "s.csv"
    assert main(["spectrum", str(fasta), "--base", "A", "--log", "--out", str(csv)]) == 0
    values = [float(line.split(",")[1]) for line in csv.read_text().strip().split("\n")[1:]]
    assert min(values) == -12.0


def test_screen_verdicts(tmp_path, capsys):
    codon, _ = random_fasta(tmp_path, "x.fasta", 0)  # placeholder, rewritten below
    codon.write_bytes(write_fasta(LiteralSequence("ATG" * 1000, id="codon")))
    assert main(["screen", str(codon)]) == 2
    assert "unsuitable" in capsys.readouterr().out

    good, _ = random_fasta(tmp_path, "good.fasta", 50_000, seed=9)
    png = tmp_path / "screen.png"
    assert main(["screen", str(good), "--plot", str(png)]) == 0
    assert "overall: suitable" in capsys.readouterr().out
    assert png.exists()


def test_screen_strip_policy(tmp_path, capsys):
    path = tmp_path / "n.fasta"
    rng = np.random.default_rng(2)
    bases = "".join(np.array(list("ACGT"))[rng.integers(0, 4, 5000)])
    path.write_bytes(f">n\n{bases[:2000]}NNN{bases[2000:]}\n".encode())
    assert main(["screen", str(path)]) == 4  # reject by default
    assert main(["screen", str(path), "--strip"]) == 0
    assert "stripped 3" in capsys.readouterr().err


class _Handler(http.server.BaseHTTPRequestHandler):
    payloads = {}

    def do_GET(self):
        entry = self.payloads.get(self.path)
        if entry is None:
            self.send_error(404)
            return
        self.send_response(200)
        self.send_header("Content-Length", str(len(entry)))
        self.end_headers()
        self.wfile.write(entry)

    def log_message(self, *args):
        pass


@pytest.fixture()
def http_url():
    server = http.server.HTTPServer(("127.0.0.1", 0), _Handler)
    thread = threading.Thread(target=server.serve_forever, daemon=True)
    thread.start()
    yield f"http://127.0.0.1:{server.server_address[1]}"
    server.shutdown()


def test_fetch_command(tmp_path, http_url):
    _Handler.payloads["/r.fa.gz"] = gzip.compress(b">r\nAGTC\n")
    out = tmp_path / "r.fasta"
    assert main(["fetch", f"{http_url}/r.fa.gz", "--out", str(out)]) == 0
    assert out.read_bytes() == b">r\nAGTC\n"
    assert main(["fetch", f"{http_url}/gone", "--out", str(tmp_path / "x")]) == 4


def test_qtransfer_reports(tmp_path, capsys):
    fasta, _ = random_fasta(tmp_path, "q.fasta", 20_000, seed=4)
    assert main(["qtransfer", str(fasta), "--seed", "7"]) == 0
    out = capsys.readouterr().out
    assert "mismatches: 0" in out

    assert main(["qtransfer", str(fasta), "--eve", "1.0", "--seed", "7"]) == 0
    out = capsys.readouterr().out
    rate = float(out.strip().split("detection_rate: ")[1])
    assert 0.47 <= rate <= 0.53


def test_qtransfer_deterministic_output(tmp_path, capsys):
    fasta, _ = random_fasta(tmp_path, "d.fasta", 3000, seed=5)
    main(["qtransfer", str(fasta), "--eve", "0.25", "--seed", "3"])
    first = capsys.readouterr().out
    main(["qtransfer", str(fasta), "--eve", "0.25", "--seed", "3"])
    assert capsys.readouterr().out == first


def test_qencode_qdecode(capsys):
    assert main(["qencode", "T"]) == 0
    printed = capsys.readouterr().out.strip()
    assert printed == "0+0i 0.707106781187+0i 0.707106781187+0i 0+0i"
    amps = ["0", "0.7071067811865476", "0.7071067811865476", "0"]
    assert main(["qdecode", *amps]) == 0
    out = capsys.readouterr().out
    assert "base: T" in out


def test_qdecode_flags_tampered_state(capsys):
    assert main(["qdecode", "1", "0", "0", "0"]) == 0
    assert "indeterminate" in capsys.readouterr().out


def test_multi_record_selection(tmp_path, capsys):
    path = tmp_path / "multi.fasta"
    path.write_bytes(b">one\nAAAA\n>two\nGGGG\n")
    vault = tmp_path / "v"
    assert main(["split", str(path), "--out", str(vault), "--record", "1"]) == 0
    _, _, track = shares.decode_gbin((vault / "multi.G.gbin").read_bytes())
    assert track.to01() == "1111"
    assert main(["split", str(path), "--out", str(vault), "--record", "5"]) == 1


def test_version_banner():
    with pytest.raises(SystemExit) as exc:
        main(["--version"])
    assert exc.value.code == 0
