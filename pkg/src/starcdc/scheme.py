"""The coded computing scheme for a star network, executed bit-exactly.

For a parameter ``i`` the files are cut into C(K, i) batches, one per i-subset
T of the nodes, and every node of T stores the batch.  Node k computes its own
IVs for every stored file, plus the IVs of the nodes outside T (these are what
it codes with).  For each (i+1)-subset S, each k in S uploads the XOR of the
k-th pieces of the IV groups the other members of S are missing.  The AP
XORs consecutive uploads of a group (chain coding) and broadcasts i blocks per
group, from which every member recovers the other uploads and then its
missing IV pieces.

Concrete map/reduce functions
-----------------------------
``v_{k,n}`` is the first V bits of SHAKE-256 over (seed, k, n, SHA-256 of
``w_n``), so IVs depend on file contents.  ``u_k`` is the XOR-fold of
``v_{k,1..N}``.

Sub-blocks
----------
Each V-bit IV is cut into i pieces of V/i bits.  Within batch T the piece at
position p (0-based) belongs to the p-th smallest node of T; ``U^k_{T,j}`` is
the concatenation, over the batch files in increasing id order, of node k's
piece of ``v_{j,n}``.
"""
from __future__ import annotations

import hashlib
import struct
from dataclasses import dataclass, field
from math import comb, lcm
from typing import Iterable, Mapping, NamedTuple, Sequence

import numpy as np

from .bits import Bits, xor_all
from .combinatorics import NodeSet, enumerate_subsets, position_in, subset_rank
from .errors import DecodeError, MissingSignalError, ParameterError, SchemeError

UPLINK_PART = "uplink-part"
UPLINK_AGGREGATE = "uplink-aggregate"
DOWNLINK_CHAIN = "downlink-chain"
DOWNLINK_FORWARD = "downlink-forward"


@dataclass(frozen=True)
class JobSpec:
    K: int
    N: int
    W: int = 64
    V: int = 8
    seed: int = 0

    def __post_init__(self):
        if self.K < 2:
            raise ParameterError(f"K must be >= 2, got {self.K}")
        for name in ("N", "W", "V"):
            if getattr(self, name) < 1:
                raise ParameterError(f"{name} must be >= 1, got {getattr(self, name)}")
        if not 0 <= self.seed < 2**64:
            raise ParameterError("seed must be a 64-bit unsigned integer")


class IvId(NamedTuple):
    """Index of v_{k,n}: the IV of file n wanted by node k."""

    k: int
    n: int


@dataclass(frozen=True)
class FileStore:
    files: tuple[Bits, ...]

    @classmethod
    def random(cls, job: JobSpec) -> "FileStore":
        rng = np.random.default_rng(job.seed)
        raw = rng.integers(0, 256, size=(job.N, (job.W + 7) // 8), dtype=np.uint8)
        return cls(tuple(Bits.from_bytes(row.tobytes(), job.W) for row in raw))

    def __getitem__(self, n: int) -> Bits:
        """File ``w_n`` (1-based)."""
        return self.files[n - 1]

    def check(self, job: JobSpec) -> None:
        if len(self.files) != job.N or any(f.nbits != job.W for f in self.files):
            raise ParameterError(f"file store does not hold {job.N} files of {job.W} bits")


def map_function(job: JobSpec, k: int, n: int, w: Bits) -> Bits:
    digest = hashlib.sha256(struct.pack(">Q", w.nbits) + w.data).digest()
    h = hashlib.shake_256(struct.pack(">QII", job.seed, k, n) + digest)
    return Bits.from_bytes(h.digest((job.V + 7) // 8), job.V)


def reduce_function(row: Sequence[Bits]) -> Bits:
    return xor_all(row, row[0].nbits)


@dataclass(frozen=True, eq=False)
class SchemeInstance:
    """Placement and compute sets for one scheme parameter ``i``.

    ``file_ids`` are the global ids the scheme runs on (all of 1..N for a
    pure run, one group of a memory-sharing mixture otherwise).
    """

    job: JobSpec
    i: int
    file_ids: tuple[int, ...]
    batch_sets: tuple[NodeSet, ...]
    batches: Mapping[int, tuple[int, ...]]
    placement: Mapping[int, frozenset[int]]
    own_ivs: Mapping[int, frozenset[IvId]]
    aux_ivs: Mapping[int, frozenset[IvId]]
    _label: dict[int, NodeSet] = field(repr=False, default_factory=dict)

    @property
    def K(self) -> int:
        return self.job.K

    @property
    def eta(self) -> int:
        return len(self.file_ids) // len(self.batch_sets)

    @property
    def piece_bits(self) -> int:
        return self.job.V // self.i

    def batch_label(self, n: int) -> NodeSet:
        return self._label[n]

    def files_of(self, T: NodeSet) -> tuple[int, ...]:
        return self.batches[subset_rank(T, self.K)]

    def compute_set(self, k: int) -> frozenset[IvId]:
        return self.own_ivs[k] | self.aux_ivs[k]

    def subblock_range(self, T: NodeSet, k: int) -> tuple[int, int]:
        """Bit range, inside every IV of batch T, that node k of T is responsible for."""
        p = position_in(T, k)
        return p * self.piece_bits, (p + 1) * self.piece_bits

    def subblock_owner(self, T: NodeSet, piece: int) -> int:
        return T[piece]

    def groups(self) -> list[NodeSet]:
        """Multicast groups S (the (i+1)-subsets), in colex order."""
        return [] if self.i == self.K else enumerate_subsets(self.K, self.i + 1)


def feasibility_problems(K: int, N: int, V: int, i: int) -> list[str]:
    """Every violated precondition of :func:`build_scheme`, each with its minimal fix."""
    if not 1 <= i <= K:
        return [f"scheme parameter i={i} must lie in [1..{K}]"]
    out = []
    b = comb(K, i)
    if N % b:
        out.append(f"C({K},{i})={b} must divide N={N}; smallest feasible N is {-(-N // b) * b}")
    if i < K and V % i:
        out.append(f"i={i} must divide V={V}; smallest feasible V is {-(-V // i) * i}")
    return out


def minimal_feasible(K: int, i: int) -> tuple[int, int]:
    """Smallest (N, V) for which the pure scheme ``i`` is defined."""
    return comb(K, i), i


def build_scheme(job: JobSpec, i: int, files: Sequence[int] | None = None) -> SchemeInstance:
    K = job.K
    file_ids = tuple(files) if files is not None else tuple(range(1, job.N + 1))
    problems = feasibility_problems(K, len(file_ids), job.V, i)
    if problems:
        raise ParameterError("; ".join(problems))
    if len(set(file_ids)) != len(file_ids) or any(not 1 <= n <= job.N for n in file_ids):
        raise ParameterError("file ids must be distinct and within [1..N]")

    batch_sets = tuple(enumerate_subsets(K, i))
    eta = len(file_ids) // len(batch_sets)
    batches = {b: file_ids[b * eta:(b + 1) * eta] for b in range(len(batch_sets))}
    label = {n: T for b, T in enumerate(batch_sets) for n in batches[b]}

    placement, own, aux = {}, {}, {}
    for k in range(1, K + 1):
        stored = [n for n in file_ids if k in label[n]]
        placement[k] = frozenset(stored)
        own[k] = frozenset(IvId(k, n) for n in stored)
        aux[k] = frozenset(IvId(q, n) for n in stored for q in range(1, K + 1) if q not in label[n])
    return SchemeInstance(job, i, file_ids, batch_sets, batches, placement, own, aux, label)


def oracle_ivs(job: JobSpec, store: FileStore) -> dict[IvId, Bits]:
    """All NK IVs, computed centrally."""
    return {IvId(k, n): map_function(job, k, n, store[n])
            for k in range(1, job.K + 1) for n in range(1, job.N + 1)}


def run_map(scheme: SchemeInstance, store: FileStore) -> dict[int, dict[IvId, Bits]]:
    """Per-node IV tables: node k materialises exactly its compute set."""
    job = scheme.job
    store.check(job)
    return {k: {iv: map_function(job, iv.k, iv.n, store[iv.n]) for iv in sorted(scheme.compute_set(k))}
            for k in range(1, job.K + 1)}


@dataclass(frozen=True)
class Signal:
    kind: str
    S: NodeSet | None
    sender: int | None
    payload: Bits
    blocks: int = 1

    @property
    def nbits(self) -> int:
        return self.payload.nbits


def subblock(scheme: SchemeInstance, table: Mapping[IvId, Bits], T: NodeSet, j: int, k: int) -> Bits:
    """``U^k_{T,j}``: node k's piece of every IV for node j in batch T."""
    lo, hi = scheme.subblock_range(T, k)
    return Bits.concat(table[IvId(j, n)].slice(lo, hi) for n in scheme.files_of(T))


def uplink_part(scheme: SchemeInstance, k: int, table: Mapping[IvId, Bits], S: NodeSet) -> Signal:
    """``X^k_S``, the XOR over l in S\\{k} of ``U^k_{S\\{l}, l}``."""
    pieces = []
    for l in S:
        if l == k:
            continue
        T = tuple(m for m in S if m != l)
        try:
            pieces.append(subblock(scheme, table, T, l, k))
        except KeyError:
            raise MissingSignalError(f"node {k} lacks an IV for (S={S}, k={k}, l={l})") from None
    return Signal(UPLINK_PART, S, k, xor_all(pieces, scheme.eta * scheme.piece_bits))


def encode_uplink(scheme: SchemeInstance, ivs: Mapping[int, Mapping[IvId, Bits]]) -> dict[int, list[Signal]]:
    """Uplink parts of every node, each node's list ordered by group rank."""
    out: dict[int, list[Signal]] = {k: [] for k in range(1, scheme.K + 1)}
    for S in scheme.groups():
        for k in S:
            out[k].append(uplink_part(scheme, k, ivs[k], S))
    return out


def aggregate_uplink(k: int, parts: Iterable[Signal]) -> Signal:
    """``X_k``: the concatenation of node k's parts, as sent to the AP."""
    parts = list(parts)
    return Signal(UPLINK_AGGREGATE, None, k, Bits.concat(p.payload for p in parts), len(parts))


class ChainCoder:
    """Streaming chain coder at the AP.

    Parts of one group are consumed in ascending sender order; each arrival is
    XORed with the single buffered predecessor and then replaces it.
    ``peak_buffer`` records the largest number of parts ever held at once.
    """

    def __init__(self):
        self.peak_buffer = 0

    def encode_group(self, S: NodeSet, arrivals: Iterable[Signal]) -> Signal:
        buffer: list[Signal] = []
        blocks = []
        for part in arrivals:
            if buffer:
                blocks.append(buffer.pop().payload ^ part.payload)
            buffer.append(part)
            self.peak_buffer = max(self.peak_buffer, len(buffer))
        return Signal(DOWNLINK_CHAIN, S, None, Bits.concat(blocks), len(blocks))


def _grouped(parts: Iterable[Signal]) -> list[tuple[NodeSet, list[Signal]]]:
    groups: dict[NodeSet, dict[int, Signal]] = {}
    for p in parts:
        if p.kind != UPLINK_PART:
            raise SchemeError(f"expected uplink parts, got {p.kind}")
        groups.setdefault(p.S, {})[p.sender] = p
    out = []
    for S in sorted(groups, key=lambda s: (len(s), s[::-1])):
        for k in S:
            if k not in groups[S]:
                raise MissingSignalError(f"missing uplink part (S={S}, k={k})")
        out.append((S, [groups[S][k] for k in S]))
    return out


def encode_downlink(parts: Iterable[Signal], coder: ChainCoder | None = None) -> list[Signal]:
    """Chain-code every multicast group: ``X_S = (X^{k1}+X^{k2}, ..., X^{ki}+X^{k(i+1)})``."""
    coder = coder or ChainCoder()
    return [coder.encode_group(S, members) for S, members in _grouped(parts)]


def forward_downlink(parts: Iterable[Signal]) -> list[Signal]:
    """Uncoded relay: the AP rebroadcasts every uplink part as received."""
    return [Signal(DOWNLINK_FORWARD, S, p.sender, p.payload)
            for S, members in _grouped(parts) for p in members]


def unchain(signal: Signal, anchor: int, own: Bits) -> dict[int, Bits]:
    """Recover every ``X^j_S`` from a chain-coded ``X_S`` and the anchor's own part."""
    S = signal.S
    blocks = signal.payload.split(signal.blocks)
    parts: list[Bits | None] = [None] * len(S)
    a = position_in(S, anchor)
    parts[a] = own
    for m in range(a + 1, len(S)):
        parts[m] = parts[m - 1] ^ blocks[m - 1]
    for m in range(a - 1, -1, -1):
        parts[m] = parts[m + 1] ^ blocks[m]
    return dict(zip(S, parts))


def recover_ivs(scheme: SchemeInstance, k: int, table: Mapping[IvId, Bits],
                downlink: Iterable[Signal]) -> dict[int, Bits]:
    """Node k's IVs ``v_{k,n}`` for every file of the scheme, local or decoded."""
    i, K = scheme.i, scheme.K
    chain, forwarded = {}, {}
    for sig in downlink:
        if sig.S is None or len(sig.S) != i + 1:
            continue
        if sig.kind == DOWNLINK_CHAIN:
            chain[sig.S] = sig
        elif sig.kind == DOWNLINK_FORWARD:
            forwarded[(sig.S, sig.sender)] = sig.payload

    row = {iv.n: table[iv] for iv in scheme.own_ivs[k]}
    for T in scheme.batch_sets:
        if k in T:
            continue
        S = tuple(sorted(T + (k,)))
        if S in chain:
            received = unchain(chain[S], k, uplink_part(scheme, k, table, S).payload)
        else:
            received = {j: forwarded.get((S, j)) for j in T}
        pieces = {}
        for j in T:
            if received.get(j) is None:
                raise DecodeError(f"node {k}: no downlink signal carries (T={T}, j={j})")
            try:
                known = [subblock(scheme, table, tuple(m for m in S if m != l), l, j) for l in T if l != j]
            except KeyError:
                raise DecodeError(f"node {k}: side information missing for (T={T}, j={j})") from None
            pieces[j] = xor_all(known, received[j].nbits) ^ received[j]
        # U^j_{T,k} holds node j's piece of each batch file, in file order
        per_file = {j: pieces[j].split(scheme.eta) for j in T}
        for idx, n in enumerate(scheme.files_of(T)):
            row[n] = Bits.concat(per_file[j][idx] for j in T)
    missing = set(scheme.file_ids) - row.keys()
    if missing:
        raise DecodeError(f"node {k}: files {sorted(missing)} unrecovered")
    return row


def decode_and_reduce(scheme: SchemeInstance, k: int, table: Mapping[IvId, Bits],
                      downlink: Iterable[Signal]) -> tuple[list[Bits], Bits]:
    row = recover_ivs(scheme, k, table, downlink)
    full = [row[n] for n in scheme.file_ids]
    return full, reduce_function(full)


def default_v(*params: int) -> int:
    """Least V every listed scheme parameter divides."""
    return lcm(*params) if params else 1
