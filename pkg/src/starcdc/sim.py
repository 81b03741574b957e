"""Logical-time star network harness.

Phases are barriers: every node maps, every node uploads its aggregate
signal, the AP encodes and broadcasts, every node decodes and reduces.  Loads
are computed from what was actually stored, computed and transmitted.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from math import comb, gcd, lcm
from typing import Sequence

from .bits import Bits
from .combinatorics import subset_rank
from .errors import ParameterError
from .scheme import (
    ChainCoder,
    FileStore,
    IvId,
    JobSpec,
    SchemeInstance,
    Signal,
    aggregate_uplink,
    build_scheme,
    encode_downlink,
    encode_uplink,
    forward_downlink,
    map_function,
    recover_ivs,
    reduce_function,
    run_map,
)

RELAY_CHAIN = "chain"
RELAY_FORWARD = "forward"


@dataclass(frozen=True)
class LoadReport:
    r: Fraction
    c: Fraction
    L: Fraction
    D: Fraction
    stored_files: int
    iv_count: int
    uplink_bits: int
    downlink_bits: int

    @classmethod
    def from_counts(cls, job: JobSpec, stored_files: int, iv_count: int,
                    uplink_bits: int, downlink_bits: int) -> "LoadReport":
        N, K, V = job.N, job.K, job.V
        return cls(Fraction(stored_files, N), Fraction(iv_count, N * K),
                   Fraction(uplink_bits, N * K * V), Fraction(downlink_bits, N * K * V),
                   stored_files, iv_count, uplink_bits, downlink_bits)

    def quadruple(self) -> tuple[Fraction, Fraction, Fraction, Fraction]:
        return self.r, self.c, self.L, self.D

    def in_regime(self, K: int) -> bool:
        r, c, L, D = self.quadruple()
        return 1 <= c <= r <= K and 0 <= D <= L <= 1 - r / K


@dataclass(frozen=True)
class Mismatch:
    node: int
    iv: IvId | None
    bit_offset: int | None
    what: str = "iv"


@dataclass(frozen=True)
class Verdict:
    passed: bool
    mismatch: Mismatch | None = None

    def __bool__(self) -> bool:
        return self.passed


@dataclass(frozen=True)
class TraceRecord:
    phase: str
    label: str
    subset_size: int
    subset_rank: int | None
    sender: int | None
    bits: int
    blocks: int

    @property
    def nbytes(self) -> int:
        return (self.bits + 7) // 8


@dataclass(frozen=True)
class Trace:
    K: int
    N: int
    V: int
    records: tuple[TraceRecord, ...]
    compute_sets: dict[int, frozenset[IvId]]
    placement: dict[int, frozenset[int]]

    def signals(self, phase: str | None = None) -> list[TraceRecord]:
        return [r for r in self.records if phase is None or r.phase == phase]

    def bits(self, phase: str) -> int:
        return sum(r.bits for r in self.signals(phase))


@dataclass
class Execution:
    job: JobSpec
    schemes: list[SchemeInstance]
    relay: str
    report: LoadReport
    verdict: Verdict
    uplink: dict[int, list[Signal]]
    downlink: list[Signal]
    rows: dict[int, list[Bits]]
    outputs: dict[int, Bits]
    peak_ap_buffer: int
    theta: tuple[Fraction, ...] | None = None
    _trace: Trace | None = field(default=None, repr=False)

    def __iter__(self):
        # allows ``report, verdict = execute(...)``
        return iter((self.report, self.verdict))


def _record(phase: str, sig: Signal, K: int) -> TraceRecord:
    size = len(sig.S) if sig.S else 0
    rank = subset_rank(sig.S, K) if sig.S else None
    return TraceRecord(phase, sig.kind, size, rank, sig.sender, sig.nbits, sig.blocks)


def _run(job: JobSpec, schemes: Sequence[SchemeInstance], relay: str,
         store: FileStore | None = None) -> Execution:
    K = job.K
    store = store if store is not None else FileStore.random(job)
    store.check(job)

    tables: dict[int, dict] = {k: {} for k in range(1, K + 1)}
    parts: dict[int, list[Signal]] = {k: [] for k in range(1, K + 1)}
    for s in schemes:
        local = run_map(s, store)
        for k in tables:
            tables[k].update(local[k])
        for k, sigs in encode_uplink(s, local).items():
            parts[k].extend(sigs)
    aggregates = {k: aggregate_uplink(k, parts[k]) for k in parts}

    all_parts = [p for k in sorted(parts) for p in parts[k]]
    coder = ChainCoder()
    if relay == RELAY_CHAIN:
        downlink = encode_downlink(all_parts, coder)
    elif relay == RELAY_FORWARD:
        downlink = forward_downlink(all_parts)
    else:
        raise ParameterError(f"unknown relay mode {relay!r}")

    rows, outputs = {}, {}
    for k in range(1, K + 1):
        row: dict[int, Bits] = {}
        for s in schemes:
            local = {iv: v for iv, v in tables[k].items() if iv.n in s.placement[k]}
            row.update(recover_ivs(s, k, local, downlink))
        rows[k] = [row[n] for n in range(1, job.N + 1)]
        outputs[k] = reduce_function(rows[k])

    report = LoadReport.from_counts(
        job,
        stored_files=sum(len(s.placement[k]) for s in schemes for k in range(1, K + 1)),
        iv_count=sum(len(tables[k]) for k in tables),
        uplink_bits=sum(a.nbits for a in aggregates.values()),
        downlink_bits=sum(d.nbits for d in downlink),
    )
    verdict = _verify(job, store, rows, outputs)
    ex = Execution(job, list(schemes), relay, report, verdict, parts, downlink, rows, outputs,
                   coder.peak_buffer)
    ex._trace = _build_trace(ex, tables)
    return ex


def _verify(job: JobSpec, store: FileStore, rows, outputs) -> Verdict:
    for k in range(1, job.K + 1):
        expected = [map_function(job, k, n, store[n]) for n in range(1, job.N + 1)]
        for n, (got, want) in enumerate(zip(rows[k], expected), start=1):
            off = got.first_difference(want)
            if off is not None:
                return Verdict(False, Mismatch(k, IvId(k, n), off))
        off = outputs[k].first_difference(reduce_function(expected))
        if off is not None:
            return Verdict(False, Mismatch(k, None, off, "reduce"))
    return Verdict(True)


def _build_trace(ex: Execution, tables) -> Trace:
    K = ex.job.K
    records = [_record("uplink", p, K) for k in sorted(ex.uplink) for p in ex.uplink[k]]
    records += [_record("downlink", d, K) for d in ex.downlink]
    placement = {k: frozenset().union(*(s.placement[k] for s in ex.schemes)) for k in range(1, K + 1)}
    return Trace(K, ex.job.N, ex.job.V, tuple(records),
                 {k: frozenset(tables[k]) for k in tables}, placement)


def execute(job: JobSpec, i: int, *, relay: str = RELAY_CHAIN, store: FileStore | None = None) -> Execution:
    """Run the pure scheme ``i`` end to end."""
    return _run(job, [build_scheme(job, i)], relay, store)


def run_forwarding(job: JobSpec, i: int, store: FileStore | None = None) -> Execution:
    """Same map and uplink as :func:`execute`, but the AP just rebroadcasts (D = L)."""
    return execute(job, i, relay=RELAY_FORWARD, store=store)


def trace(execution: Execution) -> Trace:
    return execution._trace


def _theta(theta: Sequence) -> tuple[Fraction, Fraction, Fraction]:
    if len(theta) != 3:
        raise ParameterError("theta needs exactly three weights")
    t = tuple(Fraction(x) for x in theta)
    if any(x < 0 for x in t) or sum(t) != 1:
        raise ParameterError(f"theta must be nonnegative and sum to 1, got {[str(x) for x in t]}")
    return t


def mixture_params(K: int, i: int) -> tuple[int, int, int]:
    return i - 1, i, K


def minimal_mixture_n(K: int, i: int, theta: Sequence) -> int:
    """Least N making every group size theta_j*N an integer multiple of its C(K, i_j)."""
    t = _theta(theta)
    n = 1
    for w, p in zip(t, mixture_params(K, i)):
        if w:
            b = comb(K, p)
            # b | N*num/den  <=>  den*b/gcd(b, num) | N
            n = lcm(n, w.denominator * b // gcd(b, w.numerator))
    return n


def mixture_problems(job: JobSpec, i: int, theta: Sequence) -> list[str]:
    K = job.K
    if not 2 <= i <= K - 1:
        return [f"mixture base parameter i={i} must lie in [2..{K - 1}]"]
    t = _theta(theta)
    out = []
    for w, p in zip(t, mixture_params(K, i)):
        size = w * job.N
        if w and (size.denominator != 1 or size.numerator % comb(K, p)):
            out.append(f"group for P_{p} has {size} files, not a multiple of C({K},{p})={comb(K, p)}")
    if out:
        out.append(f"smallest feasible N is {minimal_mixture_n(K, i, t)}")
    need = lcm(1, *(p for w, p in zip(t, mixture_params(K, i)) if w and p < K))
    if job.V % need:
        out.append(f"V={job.V} must be a multiple of {need}")
    return out


def run_mixture(job: JobSpec, i: int, theta: Sequence, *, relay: str = RELAY_CHAIN,
                store: FileStore | None = None) -> Execution:
    """Memory sharing: split the files into groups run under P_{i-1}, P_i and P_K."""
    problems = mixture_problems(job, i, theta)
    if problems:
        raise ParameterError("; ".join(problems))
    t = _theta(theta)
    schemes, start = [], 1
    for w, p in zip(t, mixture_params(job.K, i)):
        size = int(w * job.N)
        if size:
            schemes.append(build_scheme(job, p, range(start, start + size)))
            start += size
    ex = _run(job, schemes, relay, store)
    ex.theta = t
    return ex
