"""Converse side: exclusivity statistics, the two lemmas, and plane lower bounds.

The entropy of the downlink signal is operationalised as its bit length, so
the only checkable direction is ``measured >= bound``.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import NamedTuple

from .combinatorics import NodeSet
from .errors import InvalidSchemeError
from .geometry import (
    DOWNLINK,
    UPLINK,
    PiecewiseLinear,
    check_regime,
    downlink_plane,
    lower_convex_envelope,
    uplink_plane,
)
from .scheme import IvId
from .sim import LoadReport, Trace
from .wire import fmt_rational

ENVELOPE_CORRECTED = "corrected"
ENVELOPE_LITERAL = "literal"


@dataclass(frozen=True)
class ExclusivityStats:
    """b_j: IVs not computed by their requester but computed by exactly j other nodes."""

    K: int
    N: int
    b: dict[int, int]
    b_tilde: dict[int, int]
    per_pair: dict[tuple[int, NodeSet], int] = field(repr=False)

    @property
    def b_tilde_total(self) -> int:
        return sum(self.b_tilde.values())

    def partition_holds(self) -> bool:
        """b~_k + sum_S b_{k,S} = N for every node k."""
        rows = {k: self.b_tilde[k] for k in range(1, self.K + 1)}
        for (k, _), cnt in self.per_pair.items():
            rows[k] += cnt
        return all(v == self.N for v in rows.values())


def extract_stats(trace: Trace) -> ExclusivityStats:
    K, N = trace.K, trace.N
    holders: dict[IvId, list[int]] = {}
    for node, ivs in trace.compute_sets.items():
        for iv in ivs:
            holders.setdefault(iv, []).append(node)

    b = {j: 0 for j in range(1, K)}
    b_tilde = {k: 0 for k in range(1, K + 1)}
    per_pair: dict[tuple[int, NodeSet], int] = {}
    for k in range(1, K + 1):
        for n in range(1, N + 1):
            nodes = holders.get(IvId(k, n))
            if not nodes:
                raise InvalidSchemeError(f"IV v_({k},{n}) is computed by no node")
            if k in nodes:
                b_tilde[k] += 1
                continue
            S = tuple(sorted(nodes))
            per_pair[(k, S)] = per_pair.get((k, S), 0) + 1
            b[len(S)] += 1
    return ExclusivityStats(K, N, b, b_tilde, per_pair)


class Lemma2Result(NamedTuple):
    coverage_slack: Fraction   # sum_j b_j - N(K - r) >= 0
    redundancy_slack: Fraction  # (c - 1)NK - sum_j (j-1) b_j >= 0

    @property
    def holds(self) -> bool:
        return self.coverage_slack >= 0 and self.redundancy_slack >= 0

    @property
    def tight(self) -> bool:
        return self.coverage_slack == 0 and self.redundancy_slack == 0


def lemma2_check(stats: ExclusivityStats, report: LoadReport) -> Lemma2Result:
    K, N = stats.K, stats.N
    total = sum(stats.b.values())
    weighted = sum((j - 1) * bj for j, bj in stats.b.items())
    return Lemma2Result(Fraction(total) - N * (K - report.r), (report.c - 1) * N * K - weighted)


def lemma1_bound(stats: ExclusivityStats, V: int) -> Fraction:
    """Least downlink length in bits: V * sum_j b_j / (j + 1)."""
    return V * sum((Fraction(bj, j + 1) for j, bj in stats.b.items()), Fraction(0))


# plane coefficients of the downlink argument


def c_point(i: int, r, K: int) -> Fraction:
    """c_i = 1 + (1 - r/K)(i - 1)."""
    return 1 + (1 - Fraction(r) / K) * (i - 1)


def lam(i: int) -> Fraction:
    return Fraction(-1, i * (i + 1))


def mu(i: int, r, K: int) -> Fraction:
    return Fraction(2 * i - 1, i * (i + 1)) * (1 - Fraction(r) / K) + Fraction(1, i * (i + 1))


def download_curve(x, r, K: int) -> Fraction:
    """(1 - r/K)^2 / (x + 1 - 2r/K), the per-IV cost the lines lam*x + mu support."""
    a = 1 - Fraction(r) / K
    return a * a / (x + 1 - 2 * Fraction(r) / K)


def check_signs(i: int, r, K: int) -> bool:
    """lam_i < 0, mu_i > 0 and lam_i + mu_i > 0 (the last needs r < K)."""
    return lam(i) < 0 and mu(i, r, K) > 0 and lam(i) + mu(i, r, K) > 0


def envelope(K: int, space: str, variant: str = ENVELOPE_CORRECTED) -> PiecewiseLinear:
    """Lower convex envelope over integer r of the storage-only optimum.

    The downlink uses (1/(r+1))(1 - r/K); ``variant="literal"`` evaluates the
    1/r form instead, which over-bounds achievable points.
    """
    if space == UPLINK or variant == ENVELOPE_LITERAL:
        pts = [(r, (1 - Fraction(r, K)) / r) for r in range(1, K + 1)]
    else:
        pts = [(r, (1 - Fraction(r, K)) / (r + 1)) for r in range(1, K + 1)]
    return lower_convex_envelope(pts)


@dataclass(frozen=True)
class BoundReport:
    space: str
    r: Fraction
    c: Fraction
    best_plane: int | None
    plane_value: Fraction | None
    envelope_value: Fraction
    bound: Fraction


def _space_bound(K: int, r: Fraction, c: Fraction, space: str, variant: str) -> BoundReport:
    plane = uplink_plane if space == UPLINK else downlink_plane
    best_i, best_v = None, None
    for i in range(2, K):
        a_r, a_c, a_0 = plane(K, i)
        v = a_r * r + a_c * c + a_0
        if best_v is None or v > best_v:
            best_i, best_v = i, v
    env = envelope(K, space, variant)(r)
    bound = env if best_v is None else max(env, best_v)
    return BoundReport(space, r, c, best_i, best_v, env, bound)


def plane_bounds(K: int, r, c, *, variant: str = ENVELOPE_CORRECTED) -> tuple[BoundReport, BoundReport]:
    """Lower bounds on (L, D) at (r, c): best plane over i in [2..K-1] vs the r-envelope."""
    r, c = Fraction(r), Fraction(c)
    check_regime(K, r, c)
    return _space_bound(K, r, c, UPLINK, variant), _space_bound(K, r, c, DOWNLINK, variant)


BOUND_COLUMNS = ("space", "r", "c", "best_plane", "plane_value", "envelope_value", "bound")


def bound_rows(reports) -> list[dict[str, str]]:
    rows = []
    for b in reports:
        rows.append({
            "space": b.space,
            "r": fmt_rational(b.r),
            "c": fmt_rational(b.c),
            "best_plane": "" if b.best_plane is None else str(b.best_plane),
            "plane_value": "" if b.plane_value is None else fmt_rational(b.plane_value),
            "envelope_value": fmt_rational(b.envelope_value),
            "bound": fmt_rational(b.bound),
        })
    return rows
