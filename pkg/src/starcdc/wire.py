"""Serialised forms: signals, traces, load reports, rationals.

Signal layout (big-endian, 20-byte header then payload)::

    offset size field
    0      2    magic b"XS"
    2      1    format version (1)
    3      1    label tag: 1 uplink-part, 2 uplink-aggregate,
                3 downlink-chain, 4 downlink-forward
    4      1    |S| (0 when the signal has no group)
    5      1    block count (i for a chain-coded X_S, else 1)
    6      2    sender node id (0 for the AP)
    8      4    colex rank of S (0 when |S| = 0)
    12     8    payload length in bits
    20     -    payload, ceil(bits/8) bytes, MSB-first, zero tail padding

Traces are JSON lines, one signal per line, with keys ``phase``, ``label``,
``subset_size``, ``subset_rank``, ``sender``, ``bits``, ``blocks``.  A load
report is one JSON object whose load fields are "p/q" strings.
"""
from __future__ import annotations

import json
import struct
from fractions import Fraction
from typing import BinaryIO, Iterator

from .bits import Bits
from .combinatorics import subset_rank, subset_unrank
from .scheme import DOWNLINK_CHAIN, DOWNLINK_FORWARD, UPLINK_AGGREGATE, UPLINK_PART, Signal

MAGIC = b"XS"
VERSION = 1
HEADER = struct.Struct(">2sBBBBHIQ")

TAGS = {UPLINK_PART: 1, UPLINK_AGGREGATE: 2, DOWNLINK_CHAIN: 3, DOWNLINK_FORWARD: 4}
LABELS = {v: k for k, v in TAGS.items()}


def fmt_rational(x: Fraction | int) -> str:
    x = Fraction(x)
    return f"{x.numerator}/{x.denominator}"


def parse_rational(s: str) -> Fraction:
    return Fraction(s.strip())


def fmt_decimal(x: Fraction, places: int = 6) -> str:
    return f"{float(x):.{places}f}"


def encode_signal(sig: Signal) -> bytes:
    size = len(sig.S) if sig.S else 0
    rank = subset_rank(sig.S, max(sig.S)) if sig.S else 0
    head = HEADER.pack(MAGIC, VERSION, TAGS[sig.kind], size, sig.blocks, sig.sender or 0, rank,
                       sig.payload.nbits)
    return head + sig.payload.data


def decode_signal(buf: bytes) -> tuple[Signal, int]:
    """Parse one signal from the front of ``buf``; returns it and the bytes consumed."""
    if len(buf) < HEADER.size:
        raise ValueError("truncated signal header")
    magic, version, tag, size, blocks, sender, rank, nbits = HEADER.unpack_from(buf)
    if magic != MAGIC or version != VERSION:
        raise ValueError(f"not a version-{VERSION} signal record")
    if tag not in LABELS:
        raise ValueError(f"unknown label tag {tag}")
    end = HEADER.size + (nbits + 7) // 8
    if len(buf) < end:
        raise ValueError("truncated signal payload")
    S = subset_unrank(rank, size) if size else None
    payload = Bits(nbits, bytes(buf[HEADER.size:end]))
    return Signal(LABELS[tag], S, sender or None, payload, blocks), end


def write_signals(stream: BinaryIO, signals) -> int:
    n = 0
    for s in signals:
        n += stream.write(encode_signal(s))
    return n


def read_signals(stream: BinaryIO) -> Iterator[Signal]:
    buf = stream.read()
    pos = 0
    while pos < len(buf):
        sig, used = decode_signal(buf[pos:])
        pos += used
        yield sig


def trace_lines(trace) -> list[str]:
    return [json.dumps({
        "phase": r.phase,
        "label": r.label,
        "subset_size": r.subset_size,
        "subset_rank": r.subset_rank,
        "sender": r.sender,
        "bits": r.bits,
        "blocks": r.blocks,
    }, separators=(",", ":")) for r in trace.records]


def report_record(report, job=None, verdict=None) -> dict:
    rec = {
        "r": fmt_rational(report.r),
        "c": fmt_rational(report.c),
        "L": fmt_rational(report.L),
        "D": fmt_rational(report.D),
        "r_decimal": fmt_decimal(report.r),
        "c_decimal": fmt_decimal(report.c),
        "L_decimal": fmt_decimal(report.L),
        "D_decimal": fmt_decimal(report.D),
        "stored_files": report.stored_files,
        "iv_count": report.iv_count,
        "uplink_bits": report.uplink_bits,
        "downlink_bits": report.downlink_bits,
    }
    if job is not None:
        rec.update(K=job.K, N=job.N, W=job.W, V=job.V, seed=job.seed)
    if verdict is not None:
        rec["verdict"] = "pass" if verdict.passed else "fail"
        if verdict.mismatch is not None:
            m = verdict.mismatch
            rec["mismatch"] = {"node": m.node, "iv": list(m.iv) if m.iv else None,
                               "bit_offset": m.bit_offset, "what": m.what}
    return rec
