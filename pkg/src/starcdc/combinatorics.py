"""Subsets of the node set [K] used to label file batches and multicast groups.

Node ids are 1-based at this interface (``{1, ..., K}``); ranks are 0-based.
A node set is a strictly increasing tuple of ids.

The canonical order is colexicographic: subsets are compared by their largest
element first, then the next largest, and so on.  For ``K=3, i=2`` this gives
``(1, 2), (1, 3), (2, 3)``.  The colex rank of a set does not depend on K,
which is what lets serialized signals carry just (size, rank).
"""
from __future__ import annotations

from itertools import combinations
from math import comb
from typing import Iterable, Sequence

from .errors import ParameterError

NodeSet = tuple[int, ...]


def node_set(members: Iterable[int], K: int) -> NodeSet:
    """Validate and normalise ``members`` into a sorted NodeSet over [K]."""
    s = tuple(sorted(members))
    if len(set(s)) != len(s):
        raise ParameterError(f"duplicate node ids in {s}")
    for m in s:
        if not 1 <= m <= K:
            raise ParameterError(f"node id {m} outside [1..{K}]")
    return s


def enumerate_subsets(K: int, i: int) -> list[NodeSet]:
    """All i-subsets of [K] in colex order; position j has rank j."""
    if K < 1 or not 1 <= i <= K:
        raise ParameterError(f"need 1 <= i <= K, got K={K}, i={i}")
    return sorted(combinations(range(1, K + 1), i), key=lambda s: s[::-1])


def subset_rank(s: Sequence[int], K: int) -> int:
    s = node_set(s, K)
    if not s:
        raise ParameterError("empty node set has no rank")
    # colex rank = sum_j C(e_j, j+1) with 0-based elements e_0 < e_1 < ...
    return sum(comb(m - 1, j + 1) for j, m in enumerate(s))


def subset_unrank(rank: int, i: int) -> NodeSet:
    """Inverse of :func:`subset_rank` for sets of size ``i``."""
    if i < 1 or rank < 0:
        raise ParameterError(f"bad (rank={rank}, size={i})")
    out = []
    for j in range(i, 0, -1):
        # largest e with C(e, j) <= rank
        e = j - 1
        while comb(e + 1, j) <= rank:
            e += 1
        out.append(e + 1)
        rank -= comb(e, j)
    return tuple(reversed(out))


def position_in(s: NodeSet, k: int) -> int:
    """0-based position of node ``k`` within the sorted set ``s``."""
    try:
        return s.index(k)
    except ValueError:
        raise ParameterError(f"node {k} not in {s}") from None
