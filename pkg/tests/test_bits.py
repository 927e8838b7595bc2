import numpy as np
import pytest

from genevault.bits import BitVector


def test_msb_first_packing():
    v = BitVector.from01("1000110")
    # 1000110 padded with one zero bit -> 10001100
    assert v.packed == bytes([0x8C])
    assert len(v) == 7
    assert [v[i] for i in range(7)] == [1, 0, 0, 0, 1, 1, 0]


def test_round_trip_through_packed():
    rng = np.random.default_rng(11)
    for n in (0, 1, 7, 8, 9, 63, 64, 65, 1000):
        bits = rng.integers(0, 2, n)
        v = BitVector.from_numpy(bits)
        assert BitVector(v.packed, n) == v
        assert v.to01() == "".join(str(b) for b in bits)


def test_nonzero_padding_rejected():
    with pytest.raises(ValueError):
        BitVector(bytes([0x8D]), 7)  # low bit set beyond n


def test_wrong_byte_count_rejected():
    with pytest.raises(ValueError):
        BitVector(b"\x00\x00", 7)


def test_window_int_msb_first():
    v = BitVector.from01("10110100")
    assert v.window_int(0, 8) == 0b10110100
    assert v.window_int(2, 4) == 0b1101
    assert v.window_int(5, 3) == 0b100
    assert v.window_int(0, 0) == 0
    with pytest.raises(ValueError):
        v.window_int(3, 6)


def test_window_int_spans_bytes():
    v = BitVector.from01("1" * 9 + "0" * 7)
    assert v.window_int(7, 4) == 0b1100


def test_flipped_touches_one_bit():
    v = BitVector.from01("0000")
    w = v.flipped(2)
    assert w.to01() == "0010"
    assert v.to01() == "0000"
    assert w.flipped(2) == v


def test_popcount():
    assert BitVector.from01("").popcount() == 0
    assert BitVector.from01("10110100").popcount() == 4
    assert BitVector.zeros(100).popcount() == 0


def test_from01_rejects_other_chars():
    with pytest.raises(ValueError):
        BitVector.from01("0102")


def test_iter_and_numpy_agree():
    v = BitVector.from01("110100101")
    assert list(v) == v.to_numpy().tolist()
