"""Fixed-length bit vectors.

Storage is byte-packed, most significant bit first within each byte; the
unused tail of the last byte is always zero.  Bit 0 is the MSB of byte 0.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable


@dataclass(frozen=True)
class Bits:
    nbits: int
    data: bytes

    def __post_init__(self):
        if self.nbits < 0:
            raise ValueError("negative bit length")
        if len(self.data) != (self.nbits + 7) // 8:
            raise ValueError(f"{len(self.data)} bytes cannot hold exactly {self.nbits} bits")
        pad = (-self.nbits) % 8
        if pad and self.data[-1] & ((1 << pad) - 1):
            raise ValueError("nonzero padding bits")

    @classmethod
    def from_int(cls, value: int, nbits: int) -> "Bits":
        if value < 0 or value >> nbits:
            raise ValueError(f"{value} does not fit in {nbits} bits")
        pad = (-nbits) % 8
        return cls(nbits, (value << pad).to_bytes((nbits + 7) // 8, "big"))

    @classmethod
    def from_bytes(cls, data: bytes, nbits: int) -> "Bits":
        """Take the first ``nbits`` bits of ``data``."""
        if 8 * len(data) < nbits:
            raise ValueError(f"need {nbits} bits, got {8 * len(data)}")
        value = int.from_bytes(data, "big") >> (8 * len(data) - nbits) if data else 0
        return cls.from_int(value, nbits)

    @classmethod
    def zeros(cls, nbits: int) -> "Bits":
        return cls(nbits, bytes((nbits + 7) // 8))

    @classmethod
    def concat(cls, parts: Iterable["Bits"]) -> "Bits":
        value, n = 0, 0
        for p in parts:
            value = (value << p.nbits) | p.value
            n += p.nbits
        return cls.from_int(value, n)

    @property
    def value(self) -> int:
        return int.from_bytes(self.data, "big") >> ((-self.nbits) % 8)

    def __len__(self) -> int:
        return self.nbits

    def __xor__(self, other: "Bits") -> "Bits":
        if other.nbits != self.nbits:
            raise ValueError(f"XOR of {self.nbits}-bit and {other.nbits}-bit vectors")
        return Bits(self.nbits, bytes(a ^ b for a, b in zip(self.data, other.data)))

    def slice(self, start: int, stop: int) -> "Bits":
        if not 0 <= start <= stop <= self.nbits:
            raise IndexError(f"[{start}:{stop}) out of range for {self.nbits} bits")
        n = stop - start
        return Bits.from_int((self.value >> (self.nbits - stop)) & ((1 << n) - 1), n)

    def split(self, parts: int) -> list["Bits"]:
        """Cut into ``parts`` equal consecutive pieces."""
        if parts < 1 or self.nbits % parts:
            raise ValueError(f"{self.nbits} bits do not split into {parts} equal pieces")
        w = self.nbits // parts
        return [self.slice(p * w, (p + 1) * w) for p in range(parts)]

    def bit(self, index: int) -> int:
        return (self.data[index // 8] >> (7 - index % 8)) & 1

    def first_difference(self, other: "Bits") -> int | None:
        """Offset of the first differing bit, or None if equal."""
        if self.nbits != other.nbits:
            return min(self.nbits, other.nbits)
        diff = self.value ^ other.value
        if not diff:
            return None
        return self.nbits - diff.bit_length()

    def __repr__(self) -> str:
        if self.nbits <= 64:
            return f"Bits({self.nbits}, 0b{self.value:0{self.nbits}b})" if self.nbits else "Bits(0)"
        return f"Bits({self.nbits}, {self.data[:8].hex()}...)"


def xor_all(items: Iterable[Bits], nbits: int) -> Bits:
    acc = Bits.zeros(nbits)
    for b in items:
        acc = acc ^ b
    return acc
