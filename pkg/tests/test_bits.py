import pytest
from hypothesis import given, strategies as st

from starcdc.bits import Bits, xor_all


def test_msb_first_packing():
    b = Bits.from_int(0b101, 3)
    assert b.data == bytes([0b1010_0000])
    assert [b.bit(j) for j in range(3)] == [1, 0, 1]


def test_padding_must_be_zero():
    with pytest.raises(ValueError):
        Bits(3, bytes([0b1010_0001]))


def test_from_bytes_takes_leading_bits():
    assert Bits.from_bytes(b"\xf0\x0f", 4).value == 0b1111
    assert Bits.from_bytes(b"\xf0\x0f", 12).value == 0xF00


def test_split_and_concat():
    b = Bits.from_int(0b110010, 6)
    assert [p.value for p in b.split(3)] == [0b11, 0b00, 0b10]
    assert Bits.concat(b.split(2)) == b
    with pytest.raises(ValueError):
        b.split(4)


def test_xor_length_mismatch():
    with pytest.raises(ValueError):
        Bits.zeros(3) ^ Bits.zeros(4)


def test_first_difference():
    a = Bits.from_int(0b1000, 4)
    assert a.first_difference(a) is None
    assert a.first_difference(Bits.from_int(0b1010, 4)) == 2


@given(st.integers(0, 200).flatmap(lambda n: st.tuples(st.just(n), st.integers(0, 2**n - 1), st.integers(0, 2**n - 1))))
def test_xor_matches_integer_xor(args):
    n, x, y = args
    a, b = Bits.from_int(x, n), Bits.from_int(y, n)
    assert (a ^ b).value == x ^ y
    assert Bits(n, a.data) == a
    assert xor_all([a, b, a], n) == b


@given(st.integers(1, 100).flatmap(lambda n: st.tuples(st.just(n), st.integers(0, 2**n - 1), st.integers(0, n), st.integers(0, n))))
def test_slice_matches_bit_string(args):
    n, x, lo, hi = args
    lo, hi = min(lo, hi), max(lo, hi)
    s = format(x, f"0{n}b")
    got = Bits.from_int(x, n).slice(lo, hi)
    assert "".join(str(got.bit(j)) for j in range(hi - lo)) == s[lo:hi]
