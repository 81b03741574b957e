"""Optimal load surfaces L*(r, c) and D*(r, c), exactly.

The corner quadruples are

    P_i = (i, i(1 - (i-1)/K), (1/i)(1 - i/K), (1/(i+1))(1 - i/K))
    Q_i = (i, i,              (1/i)(1 - i/K), (1/(i+1))(1 - i/K))

Over the r-c region 1 <= c <= r <= K each surface is a union of planar
facets: the fan triangles P_{i-1} P_i P_K (i = 2..K-1), the triangle
P_1 P_2 Q_2, and the trapezoids P_i Q_i Q_{i+1} P_{i+1} (i = 2..K-1).  The
last two kinds are parallel to the c-axis.  All arithmetic is in Fractions.
"""
from __future__ import annotations

from bisect import bisect_right
from dataclasses import dataclass
from fractions import Fraction
from typing import NamedTuple, Sequence

from .errors import RegimeError

UPLINK = "uplink"
DOWNLINK = "downlink"
SPACES = (UPLINK, DOWNLINK)

Number = Fraction | int


class Quadruple(NamedTuple):
    r: Fraction
    c: Fraction
    L: Fraction
    D: Fraction

    def load(self, space: str) -> Fraction:
        return self.L if space == UPLINK else self.D

    def project(self, space: str) -> "SccPoint":
        return SccPoint(self.r, self.c, self.load(space), space)


@dataclass(frozen=True)
class SccPoint:
    r: Fraction
    c: Fraction
    load: Fraction
    space: str


def _q(x) -> Fraction:
    return x if isinstance(x, Fraction) else Fraction(x)


def p_point(K: int, i: int) -> Quadruple:
    slack = 1 - Fraction(i, K)
    return Quadruple(Fraction(i), i * (1 - Fraction(i - 1, K)), slack / i, slack / (i + 1))


def q_point(K: int, i: int) -> Quadruple:
    p = p_point(K, i)
    return p._replace(c=Fraction(i))


def pareto_points(K: int) -> tuple[dict[int, Quadruple], dict[int, Quadruple]]:
    """``({i: P_i}, {i: Q_i})`` for i in [K]."""
    if K < 2:
        raise RegimeError(f"K must be >= 2, got {K}")
    return ({i: p_point(K, i) for i in range(1, K + 1)},
            {i: q_point(K, i) for i in range(1, K + 1)})


def uplink_plane(K: int, i: int) -> tuple[Fraction, Fraction, Fraction]:
    """(a_r, a_c, a_0) of the plane through P_{i-1}, P_i, P_K in r-c-L space."""
    return Fraction(-2, K * i), Fraction(-1, i * (i - 1)), Fraction(2 * i - 1, i * (i - 1))


def downlink_plane(K: int, i: int) -> tuple[Fraction, Fraction, Fraction]:
    """(a_r, a_c, a_0) of the plane through P_{i-1}, P_i, P_K in r-c-D space."""
    return Fraction(-(2 * i - 1), K * i * (i + 1)), Fraction(-1, i * (i + 1)), Fraction(2, i + 1)


def fan_plane(K: int, i: int, space: str):
    return uplink_plane(K, i) if space == UPLINK else downlink_plane(K, i)


@dataclass(frozen=True)
class Facet:
    kind: str  # "triangle" or "trapezoid"
    name: str
    vertices: tuple[SccPoint, ...]
    plane: tuple[Fraction, Fraction, Fraction]
    index: int

    def __post_init__(self):
        for v in self.vertices:
            if self.value(v.r, v.c) != v.load:
                raise AssertionError(f"vertex {v} off the plane of {self.name}")
        xy = [(v.r, v.c) for v in self.vertices]
        area = sum(x1 * y2 - x2 * y1 for (x1, y1), (x2, y2) in zip(xy, xy[1:] + xy[:1]))
        sign = 1 if area > 0 else -1
        # inside iff a*r + b*c + d >= 0 for every edge
        edges = tuple((-(y2 - y1) * sign, (x2 - x1) * sign, ((y2 - y1) * x1 - (x2 - x1) * y1) * sign)
                      for (x1, y1), (x2, y2) in zip(xy, xy[1:] + xy[:1]))
        box = (min(x for x, _ in xy), max(x for x, _ in xy), min(y for _, y in xy), max(y for _, y in xy))
        object.__setattr__(self, "_edges", edges)
        object.__setattr__(self, "_box", box)

    @property
    def parallel_to_c(self) -> bool:
        return self.plane[1] == 0

    def value(self, r: Number, c: Number) -> Fraction:
        a_r, a_c, a_0 = self.plane
        return a_r * r + a_c * c + a_0

    def triangles(self) -> list[tuple[SccPoint, SccPoint, SccPoint]]:
        v = self.vertices
        return [v] if len(v) == 3 else [(v[0], v[1], v[2]), (v[0], v[2], v[3])]

    def contains(self, r: Number, c: Number) -> bool:
        r0, r1, c0, c1 = self._box
        if not (r0 <= r <= r1 and c0 <= c <= c1):
            return False
        return all(a * r + b * c + d >= 0 for a, b, d in self._edges)


def barycentric(tri, r: Number, c: Number) -> tuple[Fraction, Fraction, Fraction] | None:
    """Exact barycentric coordinates of (r, c), or None if outside the triangle."""
    (x1, y1), (x2, y2), (x3, y3) = ((v.r, v.c) for v in tri)
    det = (y2 - y3) * (x1 - x3) + (x3 - x2) * (y1 - y3)
    if det == 0:
        return None
    l1 = Fraction((y2 - y3) * (r - x3) + (x3 - x2) * (c - y3)) / det
    l2 = Fraction((y3 - y1) * (r - x3) + (x1 - x3) * (c - y3)) / det
    l3 = 1 - l1 - l2
    if min(l1, l2, l3) < 0:
        return None
    return l1, l2, l3


def _plane_through_edge(a: Quadruple, b: Quadruple, space: str):
    slope = (b.load(space) - a.load(space)) / (b.r - a.r)
    return slope, Fraction(0), a.load(space) - slope * a.r


def facets(K: int, space: str) -> list[Facet]:
    """Facet list in lookup order: fan triangles, then P1P2Q2, then trapezoids."""
    if space not in SPACES:
        raise ValueError(f"space must be one of {SPACES}")
    P, Q = pareto_points(K)
    out = []
    for i in range(2, K):
        verts = tuple(p.project(space) for p in (P[i - 1], P[i], P[K]))
        out.append(Facet("triangle", f"P{i - 1}P{i}P{K}", verts, fan_plane(K, i, space), len(out)))
    out.append(Facet("triangle", "P1P2Q2", tuple(p.project(space) for p in (P[1], P[2], Q[2])),
                     _plane_through_edge(P[1], P[2], space), len(out)))
    for i in range(2, K):
        verts = tuple(p.project(space) for p in (P[i], Q[i], Q[i + 1], P[i + 1]))
        out.append(Facet("trapezoid", f"P{i}Q{i}Q{i + 1}P{i + 1}", verts,
                         _plane_through_edge(P[i], P[i + 1], space), len(out)))
    return out


_FACETS: dict[tuple[int, str], list[Facet]] = {}


def _facets_cached(K: int, space: str) -> list[Facet]:
    key = (K, space)
    if key not in _FACETS:
        _FACETS[key] = facets(K, space)
    return _FACETS[key]


def check_regime(K: int, r: Number, c: Number) -> None:
    if not 1 <= c <= r <= K:
        raise RegimeError(f"(r={r}, c={c}) outside 1 <= c <= r <= {K}")


def containing_facets(K: int, r: Number, c: Number, space: str) -> list[Facet]:
    check_regime(K, r, c)
    return [f for f in _facets_cached(K, space) if f.contains(r, c)]


def locate_facet(K: int, r: Number, c: Number, space: str) -> Facet:
    """First facet (lowest index) whose r-c projection contains the point."""
    found = containing_facets(K, r, c, space)
    if not found:
        raise AssertionError(f"facets do not cover (r={r}, c={c}) for K={K}")
    return found[0]


def surface_value(K: int, r: Number, c: Number, space: str) -> Fraction:
    return locate_facet(K, r, c, space).value(_q(r), _q(c))


def surface_values(K: int, r: Number, c: Number) -> tuple[Fraction, Fraction, Facet]:
    """``(L*(r, c), D*(r, c), uplink facet)``; both surfaces share the r-c facet layout."""
    f = locate_facet(K, r, c, UPLINK)
    g = _facets_cached(K, DOWNLINK)[f.index]
    r, c = _q(r), _q(c)
    return f.value(r, c), g.value(r, c), f


class PiecewiseLinear:
    """Continuous piecewise-linear function given by sorted breakpoints."""

    def __init__(self, points: Sequence[tuple[Number, Number]]):
        self.points = [(_q(x), _q(y)) for x, y in points]
        xs = [x for x, _ in self.points]
        if xs != sorted(set(xs)):
            raise ValueError("breakpoints must have strictly increasing x")
        self._xs = xs

    def __call__(self, x: Number) -> Fraction:
        x = _q(x)
        if not self._xs[0] <= x <= self._xs[-1]:
            raise ValueError(f"{x} outside [{self._xs[0]}, {self._xs[-1]}]")
        j = min(bisect_right(self._xs, x), len(self._xs) - 1)
        (x0, y0), (x1, y1) = self.points[j - 1], self.points[j]
        return y0 + (y1 - y0) * (x - x0) / (x1 - x0)

    def __repr__(self) -> str:
        return f"PiecewiseLinear({[(str(x), str(y)) for x, y in self.points]})"


def lower_convex_envelope(points: Sequence[tuple[Number, Number]]) -> PiecewiseLinear:
    """Lower convex hull of a point set, as a piecewise-linear function."""
    pts = sorted((_q(x), _q(y)) for x, y in points)
    hull: list[tuple[Fraction, Fraction]] = []
    for p in pts:
        if hull and hull[-1][0] == p[0]:
            continue  # sorted, so the lower y at this x is already in
        while len(hull) >= 2:
            (x1, y1), (x2, y2) = hull[-2], hull[-1]
            # drop the middle point unless it lies strictly below the chord
            if (y2 - y1) * (p[0] - x1) >= (p[1] - y1) * (x2 - x1):
                hull.pop()
            else:
                break
        hull.append(p)
    return PiecewiseLinear(hull)


def convex_envelope_curves(K: int) -> tuple[PiecewiseLinear, PiecewiseLinear]:
    """``(L*(r), D*(r))`` on r in [1, K], the c = r slice of the surfaces."""
    if K < 2:
        raise RegimeError(f"K must be >= 2, got {K}")
    up = lower_convex_envelope([(r, (1 - Fraction(r, K)) / r) for r in range(1, K + 1)])
    down = lower_convex_envelope([(r, (1 - Fraction(r, K)) / (r + 1)) for r in range(1, K + 1)])
    # both sequences are strictly convex, so every Q_i is a breakpoint
    _, Q = pareto_points(K)
    assert [(p[0], p[1]) for p in up.points] == [(q.r, q.L) for q in Q.values()]
    assert [(p[0], p[1]) for p in down.points] == [(q.r, q.D) for q in Q.values()]
    return up, down


def solve3(A: list[list[Fraction]], b: list[Fraction]) -> list[Fraction] | None:
    """Exact Gauss-Jordan solve of a 3x3 system; None when singular."""
    M = [list(map(_q, row)) + [_q(v)] for row, v in zip(A, b)]
    n = 3
    for col in range(n):
        piv = next((r for r in range(col, n) if M[r][col] != 0), None)
        if piv is None:
            return None
        M[col], M[piv] = M[piv], M[col]
        for r in range(n):
            if r != col and M[r][col] != 0:
                f = M[r][col] / M[col][col]
                M[r] = [a - f * b for a, b in zip(M[r], M[col])]
    return [M[r][n] / M[r][r] for r in range(n)]


def fan_indices(K: int) -> list[int]:
    # K = 2 has no proper fan triangle; its Pareto set is the segment P_1 P_2,
    # i.e. the degenerate "triangle" P_1 P_2 P_2.
    return list(range(2, K)) if K > 2 else [2]


def theta_decomposition(K: int, point: Sequence[Number]) -> tuple[int, tuple[Fraction, Fraction, Fraction]] | None:
    """``(i, theta)`` with point = th1 P_{i-1} + th2 P_i + th3 P_K, or None."""
    point = Quadruple(*map(_q, point))
    P, _ = pareto_points(K)
    for i in fan_indices(K):
        a, b, z = P[i - 1], P[i], P[K]
        if K == 2:
            # collinear corners: solve along the segment P_1 P_2
            t3 = (point.r - a.r) / (z.r - a.r)
            theta = [1 - t3, Fraction(0), t3]
        else:
            theta = solve3([[a.r, b.r, z.r], [a.c, b.c, z.c], [1, 1, 1]], [point.r, point.c, 1])
        if theta is None or min(theta) < 0:
            continue
        combo = tuple(sum(t * p[m] for t, p in zip(theta, (a, b, z))) for m in range(4))
        if combo == tuple(point):
            return i, tuple(theta)
    return None


def is_feasible(K: int, point: Quadruple) -> bool:
    r, c, L, D = point
    if not (1 <= c <= r <= K and 0 <= D <= L <= 1 - Fraction(r) / K):
        return False
    L_star, D_star, _ = surface_values(K, r, c)
    return L >= L_star and D >= D_star


def is_pareto(K: int, point: Sequence[Number]) -> bool:
    """Whether a feasible quadruple lies on the optimal tradeoff surface.

    Computed two ways (fan-region membership with both loads on the surface,
    and an exact theta-decomposition over P_{i-1}, P_i, P_K); they must agree.
    """
    point = Quadruple(*map(_q, point))
    r, c, L, D = point
    if not (1 <= c <= r <= K and 0 <= D <= L <= 1 - r / K):
        raise RegimeError(f"{tuple(map(str, point))} is outside the regime for K={K}")
    L_star, D_star, facet = surface_values(K, r, c)
    if L < L_star or D < D_star:
        raise RegimeError(f"{tuple(map(str, point))} is below the optimal surface for K={K}")
    # fan triangles come first in lookup order, so the located facet is one iff the point is in the fan
    in_fan = c == 1 if K == 2 else facet.index < K - 2
    by_region = in_fan and (L, D) == (L_star, D_star)
    by_theta = theta_decomposition(K, point) is not None
    if by_region != by_theta:
        raise AssertionError(f"Pareto characterisations disagree at {point}")
    return by_region


def dominates(a: Sequence[Number], b: Sequence[Number]) -> bool:
    """a <= b componentwise with at least one strict inequality."""
    return all(x <= y for x, y in zip(a, b)) and any(x < y for x, y in zip(a, b))


def surface_grid(K: int, resolution: int, *, include_corners: bool = True) -> list[tuple[Fraction, Fraction]]:
    """Rational (r, c) sample points of the regime, sorted by (r, c).

    ``resolution`` points per axis over [1, K]; with ``include_corners`` the
    projections of every P_i and Q_i are added.
    """
    if resolution < 2:
        raise ValueError("resolution must be >= 2")
    axis = [1 + Fraction((K - 1) * a, resolution - 1) for a in range(resolution)]
    pts = {(r, c) for r in axis for c in axis if c <= r}
    if include_corners:
        P, Q = pareto_points(K)
        pts |= {(p.r, p.c) for p in list(P.values()) + list(Q.values())}
    return sorted(pts)
