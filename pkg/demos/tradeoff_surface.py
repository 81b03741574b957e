"""
The storage-computation-communication surface
=============================================

Sweeps the optimal uplink and downlink loads over the (r, c) region for a
fixed number of nodes and shows where the Pareto-optimal corner points sit.
"""
from fractions import Fraction

from starcdc.geometry import DOWNLINK, UPLINK, locate_facet, pareto_points, surface_value

K = 5
P, Q = pareto_points(K)

# %%
# Corner points. P_i uses the least computation that still attains the
# storage-only optimum; Q_i computes everything it stores.
for i in range(1, K + 1):
    p, q = P[i], Q[i]
    print(f"P_{i} = (r={p.r}, c={p.c}, L={p.L}, D={p.D})   Q_{i}.c = {q.c}")

# %%
# A coarse table of L* and D* at integer-plus-half r, with c from 1 up to r.
for r in [Fraction(k, 2) for k in range(2, 2 * K + 1)]:
    cells = []
    for c in [Fraction(1), (1 + r) / 2, r]:
        L = surface_value(K, r, c, UPLINK)
        D = surface_value(K, r, c, DOWNLINK)
        cells.append(f"c={float(c):4.2f}: L={float(L):.4f} D={float(D):.4f}")
    print(f"r={float(r):3.1f}  " + "  ".join(cells))

# %%
# Which facet does a point fall on? Fan triangles come first, then the
# regions where extra computation no longer helps.
for r, c in [(2, 1), (Fraction(5, 2), 2), (3, 3), (4, Fraction(7, 2))]:
    print((str(r), str(c)), "->", locate_facet(K, r, c, UPLINK).name)
