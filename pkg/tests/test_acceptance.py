"""Acceptance suite: one test per criterion, each printing a PASS/FAIL line."""
from __future__ import annotations

import random
import time
from contextlib import contextmanager
from fractions import Fraction
from itertools import combinations

import numpy as np
import pytest

from starcdc.bounds import extract_stats, lemma1_bound, lemma2_check, plane_bounds
from starcdc.geometry import (
    DOWNLINK,
    UPLINK,
    Quadruple,
    _facets_cached,
    containing_facets,
    convex_envelope_curves,
    is_pareto,
    pareto_points,
    surface_grid,
    surface_value,
    surface_values,
    theta_decomposition,
)
from starcdc.scheme import JobSpec, minimal_feasible, oracle_ivs, FileStore
from starcdc.sim import execute, minimal_mixture_n, run_forwarding, run_mixture, trace


@contextmanager
def criterion(capsys, n: int, title: str):
    ok = False
    try:
        yield
        ok = True
    finally:
        with capsys.disabled():
            print(f"\n[acceptance {n}] {'PASS' if ok else 'FAIL'} {title}")


def closed_form(K: int, i: int) -> tuple[Fraction, ...]:
    # written out independently of the geometry module
    s = 1 - Fraction(i, K)
    return Fraction(i), i * (1 - Fraction(i - 1, K)), s / i, s / (i + 1)


@pytest.fixture(scope="module")
def sweep():
    """Every (K, i) with K in [2..8], i in [K-1] at minimal feasible (N, V)."""
    t0 = time.perf_counter()
    runs = {}
    for K in range(2, 9):
        for i in range(1, K):
            N, V = minimal_feasible(K, i)
            runs[(K, i)] = execute(JobSpec(K, N, V=V, seed=K * 100 + i), i)
    return runs, time.perf_counter() - t0


def test_toy_example(capsys):
    with criterion(capsys, 1, "toy example K=3, N=6, i=2 gives (2, 4/3, 1/6, 1/9)"):
        t0 = time.perf_counter()
        ex = execute(JobSpec(3, 6, V=8, seed=1), 2)
        elapsed = time.perf_counter() - t0
        assert ex.report.quadruple() == (2, Fraction(4, 3), Fraction(1, 6), Fraction(1, 9))
        assert ex.verdict.passed
        assert elapsed < 1.0


def test_closed_form_sweep(capsys, sweep):
    with criterion(capsys, 2, "closed-form loads for K in [2..8], i in [K-1]"):
        runs, elapsed = sweep
        for (K, i), ex in runs.items():
            assert ex.report.quadruple() == closed_form(K, i), (K, i)
        assert elapsed < 60.0


def test_oracle_decoding(capsys):
    with criterion(capsys, 3, "100 random-seed executions decode bit-exactly"):
        rng = random.Random(20261019)
        mismatches = 0
        for _ in range(100):
            K = rng.randint(2, 6)
            i = rng.randint(1, K - 1)
            N, V = minimal_feasible(K, i)
            job = JobSpec(K, N, V=V * rng.randint(1, 3), seed=rng.getrandbits(32))
            store = FileStore.random(job)
            ex = execute(job, i, store=store)
            truth = oracle_ivs(job, store)
            for k in range(1, K + 1):
                want = [truth[(k, n)] for n in range(1, N + 1)]
                mismatches += sum(a != b for a, b in zip(ex.rows[k], want))
            mismatches += not ex.verdict.passed
        assert mismatches == 0


def test_mixture_linearity(capsys):
    with criterion(capsys, 4, "memory-sharing loads are exact convex combinations (K=4, i=2)"):
        K, i = 4, 2
        corners = [closed_form(K, p) for p in (1, 2, 4)]
        for theta in [(1, 0, 0), (0, 1, 0), (0, 0, 1), (Fraction(1, 2), Fraction(1, 4), Fraction(1, 4))]:
            theta = tuple(map(Fraction, theta))
            N = minimal_mixture_n(K, i, theta)
            ex = run_mixture(JobSpec(K, N, V=2, seed=7), i, theta)
            want = tuple(sum(t * q[m] for t, q in zip(theta, corners)) for m in range(4))
            assert ex.report.quadruple() == want, theta
            assert ex.verdict.passed


def test_converse_tightness(capsys, sweep):
    with criterion(capsys, 5, "plane bounds equal measured (L, D) across the sweep"):
        runs, _ = sweep
        for (K, i), ex in runs.items():
            rep = ex.report
            up, down = plane_bounds(K, rep.r, rep.c)
            assert (up.bound, down.bound) == (rep.L, rep.D), (K, i)


def _lemma_ok(ex, pure: bool) -> bool:
    stats = extract_stats(trace(ex))
    l2 = lemma2_check(stats, ex.report)
    ok = ex.report.downlink_bits >= lemma1_bound(stats, ex.job.V) and l2.holds
    if pure:
        K, N = ex.job.K, ex.job.N
        i = ex.schemes[0].i
        want = N * (K - i) if i < K else 0
        ok = ok and l2.tight and stats.b.get(i, 0) == want
    return ok


def test_lemma_soundness(capsys, sweep):
    with criterion(capsys, 6, "Lemma 1 and Lemma 2 hold for pure, mixture and forwarding runs"):
        runs, _ = sweep
        for key, ex in runs.items():
            assert _lemma_ok(ex, pure=True), key
        for K in (4, 5, 6):
            for i in range(2, K):
                for theta in [(Fraction(1, 3),) * 3, (Fraction(1, 2), Fraction(1, 4), Fraction(1, 4))]:
                    N = minimal_mixture_n(K, i, theta)
                    ex = run_mixture(JobSpec(K, N, V=K * (K - 1) * (K - 2), seed=K + i), i, theta)
                    assert ex.verdict.passed and _lemma_ok(ex, pure=False), (K, i, theta)
        for K in range(2, 7):
            for i in range(1, K):
                N, V = minimal_feasible(K, i)
                ex = run_forwarding(JobSpec(K, N, V=V, seed=3), i)
                assert ex.verdict.passed and _lemma_ok(ex, pure=False), (K, i)


def _shared_edges(K: int, space: str):
    fs = _facets_cached(K, space)
    for f, g in combinations(fs, 2):
        common = {(v.r, v.c) for v in f.vertices} & {(v.r, v.c) for v in g.vertices}
        if len(common) == 2:
            yield f, g, sorted(common)


@pytest.mark.parametrize("K", [3, 5, 10])
def test_surface_properties(capsys, K):
    with criterion(capsys, 7, f"surface properties on a 50x50 grid, K={K}"):
        grid = surface_grid(K, 50)
        vals = {(r, c): surface_values(K, r, c)[:2] for r, c in grid}
        for (r, c), (L, D) in vals.items():
            assert D <= L
            assert (D == L) == (r == K), (r, c)
        # monotone along both axes
        by_r: dict = {}
        by_c: dict = {}
        for (r, c), v in vals.items():
            by_r.setdefault(c, []).append((r, v))
            by_c.setdefault(r, []).append((c, v))
        for line in list(by_r.values()) + list(by_c.values()):
            line.sort()
            for (_, a), (_, b) in zip(line, line[1:]):
                assert b[0] <= a[0] and b[1] <= a[1]
        # every facet containing a grid point gives the same value
        for space in (UPLINK, DOWNLINK):
            for r, c in grid:
                assert len({f.value(r, c) for f in containing_facets(K, r, c, space)}) == 1
            for f, g, (a, b) in _shared_edges(K, space):
                for t in (Fraction(0), Fraction(1, 3), Fraction(1, 2), Fraction(5, 7), Fraction(1)):
                    r = a[0] + t * (b[0] - a[0])
                    c = a[1] + t * (b[1] - a[1])
                    assert f.value(r, c) == g.value(r, c), (f.name, g.name)
        up, down = convex_envelope_curves(K)
        for r in sorted({r for r, _ in grid}):
            assert surface_value(K, r, r, UPLINK) == up(r)
            assert surface_value(K, r, r, DOWNLINK) == down(r)


def test_pareto_dominance(capsys):
    with criterion(capsys, 8, "no sampled surface point dominates a Pareto point (K=5, 10^4 samples)"):
        K = 5
        t0 = time.perf_counter()
        rng = random.Random(5)
        samples = []
        for _ in range(10_000):
            r = 1 + Fraction(rng.randint(0, 1000 * (K - 1)), 1000)
            c = 1 + (r - 1) * Fraction(rng.randint(0, 1000), 1000)
            L, D, _ = surface_values(K, r, c)
            samples.append(Quadruple(r, c, L, D))
        samples += list(pareto_points(K)[0].values()) + list(pareto_points(K)[1].values())
        optimal = [p for p in samples if is_pareto(K, p)]
        assert optimal
        for p in optimal:
            assert theta_decomposition(K, p) is not None

        # float prefilter (loose), then exact confirmation of every candidate
        A = np.array([[float(x) for x in q] for q in samples])
        eps = 1e-9
        for p in optimal:
            pv = np.array([float(x) for x in p])
            cand = np.nonzero(np.all(A <= pv + eps, axis=1))[0]
            for j in cand:
                q = samples[j]
                assert not (all(x <= y for x, y in zip(q, p)) and any(x < y for x, y in zip(q, p))), (q, p)
        assert time.perf_counter() - t0 < 30.0


def test_chain_buffer(capsys, sweep):
    with criterion(capsys, 9, "AP holds at most one uplink part per group across the sweep"):
        runs, _ = sweep
        for key, ex in runs.items():
            assert ex.peak_ap_buffer <= 1, key
