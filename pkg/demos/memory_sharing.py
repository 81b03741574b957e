"""
Memory sharing between corner points
====================================

Splits the files into three groups, runs a different pure scheme on each,
and checks that the loads land exactly on the convex combination. Every
point of the optimal surface's fan region is reached this way.
"""
from fractions import Fraction

from starcdc import JobSpec, is_pareto, pareto_points, run_mixture
from starcdc.geometry import theta_decomposition
from starcdc.sim import minimal_mixture_n
from starcdc.wire import fmt_rational

K, i = 4, 2
P, _ = pareto_points(K)

for theta in [(1, 0, 0), (0, 1, 0), (0, 0, 1), (Fraction(1, 2), Fraction(1, 4), Fraction(1, 4))]:
    theta = tuple(map(Fraction, theta))
    N = minimal_mixture_n(K, i, theta)
    ex = run_mixture(JobSpec(K, N, V=2), i, theta)
    point = ex.report.quadruple()
    print(f"theta={[str(t) for t in theta]} N={N}: "
          f"{tuple(fmt_rational(x) for x in point)}  pareto={is_pareto(K, point)}")

# %%
# Going the other way: recover the weights from a point on the surface.
target = tuple(sum(t * q[m] for t, q in zip((Fraction(1, 2), Fraction(1, 4), Fraction(1, 4)),
                                            (P[1], P[2], P[4]))) for m in range(4))
print("decomposition:", theta_decomposition(K, target))
