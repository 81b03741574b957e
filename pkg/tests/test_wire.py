import io
import json
from fractions import Fraction

from hypothesis import given, strategies as st

from starcdc.bits import Bits
from starcdc.scheme import DOWNLINK_CHAIN, UPLINK_AGGREGATE, UPLINK_PART, JobSpec, Signal
from starcdc.sim import execute, trace
from starcdc.wire import HEADER, decode_signal, encode_signal, fmt_rational, parse_rational, read_signals, \
    report_record, trace_lines, write_signals


def test_header_layout():
    sig = Signal(UPLINK_PART, (2, 3, 5), 3, Bits.from_int(0b1011, 4))
    raw = encode_signal(sig)
    assert HEADER.size == 20
    assert raw[:2] == b"XS" and raw[2] == 1 and raw[3] == 1
    assert raw[4] == 3  # |S|
    assert int.from_bytes(raw[6:8], "big") == 3
    assert int.from_bytes(raw[8:12], "big") == 6  # colex rank of {2,3,5}
    assert int.from_bytes(raw[12:20], "big") == 4
    assert raw[20:] == bytes([0b1011_0000])


def test_round_trip_stream():
    ex = execute(JobSpec(4, 6, V=2, seed=3), 2)
    signals = [p for k in ex.uplink for p in ex.uplink[k]] + ex.downlink
    signals.append(Signal(UPLINK_AGGREGATE, None, 2, Bits.from_int(5, 3), 1))
    buf = io.BytesIO()
    write_signals(buf, signals)
    buf.seek(0)
    assert list(read_signals(buf)) == signals
    assert any(s.kind == DOWNLINK_CHAIN and s.blocks == 2 for s in signals)


@given(st.fractions())
def test_rational_round_trip(x):
    assert parse_rational(fmt_rational(x)) == x


def test_report_record_renders_p_over_q():
    ex = execute(JobSpec(3, 6, V=2), 2)
    rec = report_record(ex.report, ex.job, ex.verdict)
    assert (rec["r"], rec["c"], rec["L"], rec["D"]) == ("2/1", "4/3", "1/6", "1/9")
    assert parse_rational(rec["D"]) == Fraction(1, 9)
    assert rec["verdict"] == "pass"


def test_trace_lines_are_json_records():
    lines = trace_lines(trace(execute(JobSpec(3, 6, V=2), 2)))
    recs = [json.loads(line) for line in lines]
    assert [r["phase"] for r in recs] == ["uplink"] * 3 + ["downlink"]
    assert recs[-1]["blocks"] == 2 and recs[-1]["bits"] == 4
    assert set(recs[0]) == {"phase", "label", "subset_size", "subset_rank", "sender", "bits", "blocks"}
