"""Command line front end: ``starcdc {run,surface,pareto,bounds,verify}``.

Output goes to ``--output`` when given, otherwise to ``$STARCDC_OUTPUT_DIR/<command>.<format>``
when that variable is set, otherwise to stdout.

CSV column orders:

    surface   r, c, L_star, D_star, r_exact, c_exact, L_star_exact, D_star_exact
    pareto    point, i, r, c, L, D
    bounds    space, r, c, best_plane, plane_value, envelope_value, bound
    verify    K, i, N, V, oracle, closed_form, lemma1, lemma2, plane_tight, buffer, status
    run       one row of the JSON record keys

Exit status: 0 when every check passed, 1 on a failed check, 2 on invalid input.
"""
from __future__ import annotations

import argparse
import csv
import io
import json
import os
import sys
from dataclasses import dataclass
from fractions import Fraction
from math import comb, lcm
from pathlib import Path

from .bounds import BOUND_COLUMNS, ENVELOPE_CORRECTED, ENVELOPE_LITERAL, bound_rows, extract_stats, \
    lemma1_bound, lemma2_check, plane_bounds
from .errors import ParameterError, RegimeError
from .geometry import DOWNLINK, UPLINK, Quadruple, pareto_points, surface_grid, surface_value
from .scheme import JobSpec, feasibility_problems, minimal_feasible
from .sim import execute, minimal_mixture_n, mixture_params, mixture_problems, run_forwarding, \
    run_mixture, trace
from .wire import fmt_decimal, fmt_rational, parse_rational, report_record, trace_lines

OUTPUT_ENV = "STARCDC_OUTPUT_DIR"
DEFAULT_CEILING = 8
MODES = ("pure", "mixture", "forwarding")


@dataclass
class RunConfig:
    K: int
    N: int
    W: int
    V: int
    seed: int
    mode: str
    i: int
    theta: tuple[Fraction, Fraction, Fraction] | None
    output: str | None
    format: str
    verify: bool
    trace: str | None = None


def _emit(text: str, output: str | None, command: str, fmt: str) -> None:
    if output is None and os.environ.get(OUTPUT_ENV):
        output = str(Path(os.environ[OUTPUT_ENV]) / f"{command}.{fmt}")
    if output is None:
        sys.stdout.write(text)
        return
    path = Path(output)
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(text)


def _csv(rows: list[dict], columns) -> str:
    buf = io.StringIO()
    w = csv.DictWriter(buf, fieldnames=list(columns), lineterminator="\n")
    w.writeheader()
    w.writerows(rows)
    return buf.getvalue()


def _parse_theta(s) -> tuple[Fraction, ...]:
    parts = s.split(",") if isinstance(s, str) else list(s)
    return tuple(parse_rational(str(p)) for p in parts)


def resolve_run_config(args: argparse.Namespace) -> tuple[RunConfig, list[str]]:
    """Merge the JSON config file (if any) with flags; flags win.  Returns the config and an explanation."""
    base = {}
    if args.config:
        base = json.loads(Path(args.config).read_text())
    val = {k: getattr(args, k) if getattr(args, k) is not None else base.get(k)
           for k in ("K", "N", "W", "V", "seed", "i", "mode", "theta", "output", "format", "verify", "trace")}
    notes = []
    problems = []
    if val["K"] is None or val["i"] is None:
        raise ParameterError("--K and --i are required (flag or config file)")
    K, i = int(val["K"]), int(val["i"])
    mode = val["mode"] or "pure"
    if mode not in MODES:
        raise ParameterError(f"mode must be one of {MODES}")
    theta = _parse_theta(val["theta"]) if val["theta"] is not None else None
    if mode == "mixture" and theta is None:
        raise ParameterError("mixture mode needs --theta t1,t2,t3")
    if K < 2:
        raise ParameterError(f"K must be >= 2, got {K}")

    if mode == "mixture":
        params = [p for w, p in zip(theta, mixture_params(K, i)) if w and p < K] if 2 <= i <= K - 1 else []
    else:
        params = [i] if i < K else []
    if val["V"] is None:
        V = lcm(1, *params)
        notes.append(f"V defaulted to lcm of scheme parameters {params or '[]'} = {V}")
    else:
        V = int(val["V"])
    if val["N"] is None:
        if mode == "mixture":
            N = minimal_mixture_n(K, i, theta) if 2 <= i <= K - 1 else 1
            notes.append(f"N defaulted to the least N making every theta-group a multiple of its binomial = {N}")
        else:
            N = comb(K, i) if 1 <= i <= K else 1
            notes.append(f"N defaulted to C({K},{i}) = {N}")
    else:
        N = int(val["N"])
    cfg = RunConfig(K, N, int(val["W"] or 64), V, int(val["seed"] or 0), mode, i, theta,
                    val["output"], val["format"] or "json",
                    True if val["verify"] is None else bool(val["verify"]), val["trace"])
    if mode == "mixture":
        problems = mixture_problems(JobSpec(K, N, cfg.W, V, cfg.seed), i, theta)
    else:
        problems = feasibility_problems(K, N, V, i)
    if problems:
        raise ParameterError("; ".join(problems))
    return cfg, notes


def expected_loads(cfg: RunConfig) -> Quadruple:
    P, _ = pareto_points(cfg.K)
    if cfg.mode == "mixture":
        pts = [P[p] for p in mixture_params(cfg.K, cfg.i)]
        return Quadruple(*(sum(t * p[m] for t, p in zip(cfg.theta, pts)) for m in range(4)))
    p = P[cfg.i]
    return p._replace(D=p.L) if cfg.mode == "forwarding" else p


def cmd_run(args) -> int:
    try:
        cfg, notes = resolve_run_config(args)
    except (ParameterError, ValueError) as exc:
        print(f"invalid configuration: {exc}", file=sys.stderr)
        return 2
    if args.explain:
        for n in notes:
            print(n, file=sys.stderr)
    job = JobSpec(cfg.K, cfg.N, cfg.W, cfg.V, cfg.seed)
    if cfg.mode == "mixture":
        ex = run_mixture(job, cfg.i, cfg.theta)
    elif cfg.mode == "forwarding":
        ex = run_forwarding(job, cfg.i)
    else:
        ex = execute(job, cfg.i)
    rec = report_record(ex.report, job, ex.verdict)
    rec.update(mode=cfg.mode, i=cfg.i)
    closed = tuple(ex.report.quadruple()) == tuple(expected_loads(cfg))
    rec["closed_form"] = "pass" if closed else "fail"
    if cfg.format == "csv":
        text = _csv([{k: json.dumps(v) if isinstance(v, dict) else v for k, v in rec.items()}], rec.keys())
    else:
        text = json.dumps(rec, indent=2) + "\n"
    _emit(text, cfg.output, "run", cfg.format)
    if cfg.trace:
        Path(cfg.trace).write_text("\n".join(trace_lines(trace(ex))) + "\n")
    ok = True
    if cfg.verify:
        ok = ex.verdict.passed and closed
    return 0 if ok else 1


SURFACE_COLUMNS = ("r", "c", "L_star", "D_star", "r_exact", "c_exact", "L_star_exact", "D_star_exact")


def surface_rows(K: int, resolution: int, spaces=(UPLINK, DOWNLINK), places: int = 6) -> list[dict]:
    rows = []
    for r, c in surface_grid(K, resolution):
        row = {"r": fmt_decimal(r, places), "c": fmt_decimal(c, places),
               "r_exact": fmt_rational(r), "c_exact": fmt_rational(c)}
        for space, key in ((UPLINK, "L_star"), (DOWNLINK, "D_star")):
            if space in spaces:
                v = surface_value(K, r, c, space)
                row[key], row[key + "_exact"] = fmt_decimal(v, places), fmt_rational(v)
            else:
                row[key] = row[key + "_exact"] = ""
        rows.append(row)
    return rows


def cmd_surface(args) -> int:
    if args.K < 2 or args.resolution < 2:
        print("invalid configuration: need K >= 2 and resolution >= 2", file=sys.stderr)
        return 2
    spaces = (UPLINK, DOWNLINK) if args.space == "both" else (args.space,)
    _emit(_csv(surface_rows(args.K, args.resolution, spaces, args.precision), SURFACE_COLUMNS),
          args.output, "surface", "csv")
    return 0


def cmd_pareto(args) -> int:
    if args.K < 2:
        print("invalid configuration: need K >= 2", file=sys.stderr)
        return 2
    P, Q = pareto_points(args.K)
    rows = [{"point": name, "i": i, **{f: fmt_rational(getattr(pt, f)) for f in "rcLD"}}
            for name, table in (("P", P), ("Q", Q)) for i, pt in table.items()]
    _emit(_csv(rows, ("point", "i", "r", "c", "L", "D")), args.output, "pareto", "csv")
    return 0


def cmd_bounds(args) -> int:
    try:
        r, c = parse_rational(args.r), parse_rational(args.c)
        reports = plane_bounds(args.K, r, c, variant=args.variant)
    except (RegimeError, ValueError) as exc:
        print(f"invalid configuration: {exc}", file=sys.stderr)
        return 2
    _emit(_csv(bound_rows(reports), BOUND_COLUMNS), args.output, "bounds", "csv")
    return 0


VERIFY_COLUMNS = ("K", "i", "N", "V", "oracle", "closed_form", "lemma1", "lemma2", "plane_tight", "buffer", "status")


def verify_case(K: int, i: int, seed: int = 0) -> dict:
    N, V = minimal_feasible(K, i)
    ex = execute(JobSpec(K, N, V=V, seed=seed), i)
    rep = ex.report
    stats = extract_stats(trace(ex))
    up, down = plane_bounds(K, rep.r, rep.c)
    checks = {
        "oracle": ex.verdict.passed,
        "closed_form": rep.quadruple() == tuple(pareto_points(K)[0][i]),
        "lemma1": rep.downlink_bits >= lemma1_bound(stats, V),
        "lemma2": lemma2_check(stats, rep).tight,
        "plane_tight": (up.bound, down.bound) == (rep.L, rep.D),
        "buffer": ex.peak_ap_buffer <= 1,
    }
    row = {"K": K, "i": i, "N": N, "V": V}
    row.update({k: "pass" if v else "fail" for k, v in checks.items()})
    row["status"] = "pass" if all(checks.values()) else "fail"
    return row


def cmd_verify(args) -> int:
    if not 2 <= args.k_max <= args.ceiling:
        print(f"invalid configuration: K-max must lie in [2..{args.ceiling}]", file=sys.stderr)
        return 2
    rows = [verify_case(K, i) for K in range(2, args.k_max + 1) for i in range(1, K)]
    for row in rows:
        print(f"K={row['K']} i={row['i']}: {row['status']}", file=sys.stderr)
    failed = sum(r["status"] != "pass" for r in rows)
    print(f"{len(rows) - failed}/{len(rows)} cases passed", file=sys.stderr)
    _emit(_csv(rows, VERIFY_COLUMNS), args.output, "verify", "csv")
    return 1 if failed else 0


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="starcdc", description=__doc__.splitlines()[0])
    sub = p.add_subparsers(dest="command", required=True)

    run = sub.add_parser("run", help="execute the scheme and report measured loads")
    run.add_argument("--config", help="JSON file with RunConfig fields; flags override it")
    run.add_argument("--K", type=int)
    run.add_argument("--N", type=int)
    run.add_argument("--W", type=int)
    run.add_argument("--V", type=int)
    run.add_argument("--seed", type=int)
    run.add_argument("--i", type=int)
    run.add_argument("--mode", choices=MODES)
    run.add_argument("--theta", help="mixture weights, e.g. 1/2,1/4,1/4")
    run.add_argument("--output")
    run.add_argument("--format", choices=("json", "csv"))
    run.add_argument("--verify", dest="verify", action="store_true", default=None)
    run.add_argument("--no-verify", dest="verify", action="store_false")
    run.add_argument("--trace", help="write the signal trace as JSON lines to this path")
    run.add_argument("--explain", action="store_true", help="show how defaults were derived")
    run.set_defaults(func=cmd_run)

    surf = sub.add_parser("surface", help="sample L*(r,c) and D*(r,c) on a rational grid")
    surf.add_argument("--K", type=int, required=True)
    surf.add_argument("--resolution", type=int, default=10)
    surf.add_argument("--space", choices=("both", UPLINK, DOWNLINK), default="both")
    surf.add_argument("--precision", type=int, default=6)
    surf.add_argument("--output")
    surf.set_defaults(func=cmd_surface)

    par = sub.add_parser("pareto", help="dump the P_i and Q_i tables")
    par.add_argument("--K", type=int, required=True)
    par.add_argument("--output")
    par.set_defaults(func=cmd_pareto)

    bnd = sub.add_parser("bounds", help="evaluate the converse lower bounds at (r, c)")
    bnd.add_argument("--K", type=int, required=True)
    bnd.add_argument("--r", required=True)
    bnd.add_argument("--c", required=True)
    bnd.add_argument("--variant", choices=(ENVELOPE_CORRECTED, ENVELOPE_LITERAL), default=ENVELOPE_CORRECTED)
    bnd.add_argument("--output")
    bnd.set_defaults(func=cmd_bounds)

    ver = sub.add_parser("verify", help="exhaustive check of every (K, i) up to K-max")
    ver.add_argument("--k-max", type=int, default=DEFAULT_CEILING)
    ver.add_argument("--ceiling", type=int, default=DEFAULT_CEILING)
    ver.add_argument("--output")
    ver.set_defaults(func=cmd_verify)
    return p


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    return args.func(args)


if __name__ == "__main__":
    sys.exit(main())
