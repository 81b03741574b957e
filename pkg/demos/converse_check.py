"""
Checking the scheme against the lower bounds
============================================

Runs the pure scheme for every storage level, then extracts the
exclusivity statistics from the trace and compares the measured loads with
the plane lower bounds. Equality means the scheme is optimal at that point.
"""
from starcdc import JobSpec, execute, extract_stats, lemma1_bound, lemma2_check, minimal_feasible, plane_bounds, trace
from starcdc.wire import fmt_rational

K = 6

for i in range(1, K):
    N, V = minimal_feasible(K, i)
    ex = execute(JobSpec(K, N, V=V), i)
    rep = ex.report
    stats = extract_stats(trace(ex))
    up, down = plane_bounds(K, rep.r, rep.c)
    l2 = lemma2_check(stats, rep)
    print(f"i={i}: L={fmt_rational(rep.L):>6s} (bound {fmt_rational(up.bound):>6s})"
          f"  D={fmt_rational(rep.D):>6s} (bound {fmt_rational(down.bound):>6s})"
          f"  downlink {rep.downlink_bits} bits >= {lemma1_bound(stats, V)}"
          f"  lemma2 tight: {l2.tight}")

# %%
# The exclusivity statistic b_j counts IVs a node needs but did not compute,
# held by exactly j other nodes. For the pure scheme all mass sits on j = i.
N, V = minimal_feasible(K, 3)
print("b_j for i=3:", extract_stats(trace(execute(JobSpec(K, N, V=V), 3))).b)
