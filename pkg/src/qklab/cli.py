"""Command-line front end: ``qklab {solve,picard,verify,barriers,tangency,sweep}``.

Artifacts go to ``--output-dir`` (default $QKLAB_OUTPUT_DIR, else ./qklab_out).
Exit status: 0 success, 1 a gating check failed, 2 usage error, 3 I/O error.
"""
from __future__ import annotations

import argparse
import csv
import json
import logging
import os
import sys
from concurrent.futures import ProcessPoolExecutor
from pathlib import Path

import numpy as np

from . import barriers, exact, graphgeom, picard, rosgeom, shoot, symfunc, tangency
from .errors import ConvergenceError, DomainError
from .report import ResidualReport


EXIT_OK, EXIT_CHECK, EXIT_USAGE, EXIT_IO = 0, 1, 2, 3


class UsageError(Exception):
    pass


def fmt(x) -> str:
    return format(float(x), ".17g")


# ---------------------------------------------------------------- writers

def profile_columns(curve: rosgeom.ProfileCurve) -> dict:
    n = curve.n
    cols = {name: [] for name in ["r", "u", "v", "ddu", "lambda_rot", "lambda_rad",
                                  *[f"S_{l}" for l in range(1, n + 1)], "Q_k", "nu_vertical", "residual"]}
    for jet in curve.jets():
        lam = rosgeom.principal_curvatures(jet)
        s = symfunc.elementary_symmetric_all(lam)
        nu = rosgeom.normal_vertical(jet)
        res = rosgeom.translator_residual(jet) if jet.r > 0 else rosgeom.axis_residual(jet)
        row = [jet.r, jet.u, jet.du, jet.ddu, lam[0], lam[-1], *s[1:], s[jet.k + 1] / s[jet.k], nu, res]
        for name, value in zip(cols, row):
            cols[name].append(float(value))
    return cols


def write_table(path: Path, cols: dict, fmt_name: str) -> Path:
    if fmt_name == "json":
        path = path.with_suffix(".json")
        path.write_text(json.dumps({"columns": cols}, indent=1) + "\n")
        return path
    path = path.with_suffix(".csv")
    names = list(cols)
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(names)
        for row in zip(*(cols[c] for c in names)):
            w.writerow([fmt(x) for x in row])
    return path


def write_plot_script(path: Path, table: Path, columns: list[str], title: str) -> None:
    lines = ["# gnuplot script", "set datafile separator ','", "set key autotitle columnhead",
             f"set title '{title}'", "set xlabel 'r'"]
    plots = [f"'{table.name}' using 1:{columns.index(c) + 1} with lines" for c in columns[1:]]
    lines.append("plot " + ", \\\n     ".join(plots))
    path.write_text("\n".join(lines) + "\n")


def write_report(path: Path, n, k, provenance, blow_up_radius, checks, args, diagnostics=None) -> Path:
    payload = {
        "n": n,
        "k": k,
        "provenance": provenance,
        "blow_up_radius": blow_up_radius,
        "checks": [c if isinstance(c, dict) else c.summary() for c in checks],
        "config_echo": config_echo(args),
    }
    if diagnostics:
        payload["diagnostics"] = diagnostics
    path.write_text(json.dumps(payload, indent=2) + "\n")
    return path


def config_echo(args) -> dict:
    return {k: (str(v) if isinstance(v, Path) else v) for k, v in sorted(vars(args).items())
            if k not in ("func", "output_dir")}


def check(name, passed, max_violation) -> dict:
    return {"name": name, "passed": bool(passed), "max_violation": float(max_violation)}


def all_passed(checks) -> bool:
    return all((c["passed"] if isinstance(c, dict) else c.passed) for c in checks)


# ---------------------------------------------------------------- commands

def integration_config(args) -> shoot.IntegrationConfig:
    return shoot.IntegrationConfig(rel_tol=args.rel_tol, abs_tol=args.abs_tol, r_max=args.r_max)


def solve_checks(curve, report, rel_tol):
    n, k = curve.n, curve.k
    checks, diag = [], {"reason": report.reason, "message": report.message}
    inner = curve.restrict(1e-300)
    ident = [rosgeom.q_k_profile(j) - rosgeom.normal_vertical(j) for j in inner.jets()]
    checks.append(ResidualReport("translator_identity", inner.r, ident, tol=1e-9, kind="equality"))
    if k == n - 1:
        dv = np.diff(curve.du)
        checks.append(check("slope_increasing", np.all(dv > 0), max(0.0, float(-dv.min()))))
        checks += [c for c in barriers.sandwich_verify(curve) if c.gating]
        w2 = [c for c in barriers.sandwich_verify(curve) if not c.gating][0]
        diag["u_vs_w2"] = {"passed": w2.passed, "max_violation": w2.max_violation, "note": w2.note}
        closed = exact.blowup_radius(n)
        diag["blow_up_radius_closed_form"] = closed
        diag["inverse_n"] = 1.0 / n
        if report.reason == "threshold":
            err = abs(report.radius_estimate - closed)
            checks.append(check("blow_up_radius_closed_form", err < 1e-6, err))
        else:
            checks.append(check("blow_up_radius_closed_form", False, float("inf")))
    if (n, k) == (2, 1):
        m = curve.r <= 0.95
        err_v = np.abs(curve.du[m] - exact.explicit_slope(curve.r[m]))
        err_u = np.abs(curve.u[m] - exact.explicit_height(curve.r[m]))
        checks.append(check("explicit_slope", err_v.max() < 1e-8, err_v.max()))
        checks.append(check("explicit_height", err_u.max() < 1e-8, err_u.max()))
    return checks, diag


def solve_one(n, k, args, out: Path) -> tuple[bool, dict]:
    curve, report = shoot.integrate(shoot.SlopeField(n, k), integration_config(args))
    checks, diag = solve_checks(curve, report, args.rel_tol)
    cols = profile_columns(curve)
    stem = out / f"profile_n{n}_k{k}"
    table = write_table(stem, cols, args.format)
    if args.plot_script and table.suffix == ".csv":
        write_plot_script(out / f"plot_n{n}_k{k}.gp", table, ["r", "u", "v"], f"n={n}, k={k}")
    radius = report.radius_estimate if report.reason == "threshold" else None
    write_report(out / f"report_n{n}_k{k}.json", n, k, "shooting", radius, checks, args, diag)
    return all_passed(checks), {"n": n, "k": k, "reason": report.reason, "blow_up_radius": radius,
                                "samples": len(curve)}


def cmd_solve(args) -> int:
    ok, summary = solve_one(args.n, args.k, args, args.output_dir)
    print(json.dumps(summary))
    return EXIT_OK if ok else EXIT_CHECK


def cmd_picard(args) -> int:
    n = args.n
    if args.k != n - 1:
        raise UsageError("picard constructs the k = n-1 profile only")
    window = picard.shrink_to_contraction(n, args.intervals)
    out = args.output_dir
    try:
        curve, trace = picard.iterate_to_fixed_point(window, relaxation=args.relaxation)
        failure = None
    except ConvergenceError as exc:
        curve, trace, failure = None, exc.trace, str(exc)
    coeff = picard.contraction_coefficient(window)
    ratios = trace.contraction_ratios
    write_table(out / f"trace_n{n}", {
        "iteration": [float(i + 1) for i in range(len(trace.sup_diffs))],
        "sup_diff": trace.sup_diffs,
        "ratio": [float("nan")] + ratios,
    }, args.format)
    diag = {"delta": window.delta, "intervals": window.intervals, "relaxation": trace.relaxation,
            "contraction_coefficient": coeff, "asymptotic_ratio": trace.asymptotic_ratio(),
            "tail_max_ratio": trace.tail_max_ratio(),
            "linearized_rate": (picard.linearized_spectral_radius(window, curve.du, trace.relaxation)
                                if curve is not None and window.intervals <= 1024 else None),
            "ratio_within_coefficient_plus_0.05": trace.tail_max_ratio() <= coeff + 0.05,
            "iterations": len(trace.sup_diffs), "sqrt_window_gap": picard.sqrt_window_gap(n, window.delta)}
    checks = [check("converged", trace.converged, trace.sup_diffs[-1] if trace.sup_diffs else float("inf"))]
    if failure:
        diag["failure"] = failure
    else:
        write_table(out / f"profile_picard_n{n}", profile_columns(curve), args.format)
        checks.append(picard.derivative_bound_check(curve))
        sc, _ = shoot.integrate(shoot.SlopeField(n, n - 1), integration_config(args), sample_at=window.grid[1:])
        idx = np.searchsorted(sc.r, window.grid)
        err = np.abs(sc.du[idx] - curve.du)
        checks.append(check("shooting_agreement", err.max() < 1e-6, err.max()))
    write_report(out / f"report_picard_n{n}.json", n, n - 1, "picard", None, checks, args, diag)
    print(json.dumps({"n": n, "converged": trace.converged, "iterations": len(trace.sup_diffs)}))
    return EXIT_OK if all_passed(checks) else EXIT_CHECK


def random_radial_jets(rng, n, k, count):
    """Random (r, u', u'') with the curvatures in Gamma_{k+1}, plus random directions."""
    jets = []
    while len(jets) < count:
        r = rng.uniform(0.05, 2.0)
        du = rng.uniform(-3.0, 3.0)
        ddu = rng.uniform(-5.0, 5.0)
        jet = rosgeom.ProfileJet(r, 0.0, du, ddu, n, k)
        rep = symfunc.in_cone(rosgeom.principal_curvatures(jet), k + 1)
        if rep.member:
            jets.append((jet, rng.normal(size=n)))
    return jets


def oracle_errors(jet, direction) -> dict:
    """Pairwise errors among the curvature routes, relative to max(1, |value|)."""
    n, k = jet.n, jet.k
    gj = graphgeom.radial_jet(n, jet.r, jet.du, jet.ddu, direction)
    lam = rosgeom.principal_curvatures(jet)
    s_sym = symfunc.elementary_symmetric_all(lam)
    worst = {"rosgeom_vs_symfunc": 0.0, "graph_eigen_vs_symfunc": 0.0, "graph_delta_vs_eigen": 0.0,
             "q_profile_vs_q_ratio": 0.0, "graph_residual_vs_profile": 0.0}

    def rel(a, b):
        return abs(a - b) / max(1.0, abs(a), abs(b))

    for l in range(1, n + 1):
        ros = rosgeom.s_l_profile(jet, l)
        eig = graphgeom.graph_s_l(gj, l)
        dlt = graphgeom.graph_s_l(gj, l, method="delta")
        worst["rosgeom_vs_symfunc"] = max(worst["rosgeom_vs_symfunc"], rel(ros, s_sym[l]))
        worst["graph_eigen_vs_symfunc"] = max(worst["graph_eigen_vs_symfunc"], rel(eig, s_sym[l]))
        worst["graph_delta_vs_eigen"] = max(worst["graph_delta_vs_eigen"], rel(dlt, eig))
    q_prof = rosgeom.q_k_profile(jet)
    worst["q_profile_vs_q_ratio"] = rel(q_prof, symfunc.q_ratio(lam, k))
    res_graph = graphgeom.graph_residual(gj, k)
    worst["graph_residual_vs_profile"] = rel(res_graph, q_prof - rosgeom.normal_vertical(jet))
    return worst


def cmd_verify(args) -> int:
    rng = np.random.default_rng(args.seed)
    n, k = args.n, args.k
    rows = {name: [] for name in ["sample", "r", "du", "ddu", "rosgeom_vs_symfunc", "graph_eigen_vs_symfunc",
                                  "graph_delta_vs_eigen", "q_profile_vs_q_ratio", "graph_residual_vs_profile"]}
    for i, (jet, d) in enumerate(random_radial_jets(rng, n, k, args.samples)):
        errs = oracle_errors(jet, d)
        for name, value in [("sample", i), ("r", jet.r), ("du", jet.du), ("ddu", jet.ddu), *errs.items()]:
            rows[name].append(float(value))
    out = args.output_dir
    write_table(out / f"verify_n{n}_k{k}", rows, args.format)
    checks = []
    for name in list(rows)[4:]:
        worst = max(rows[name])
        checks.append(check(name, worst < 1e-9, worst))
    write_report(out / f"report_verify_n{n}_k{k}.json", n, k, "shooting", None, checks, args,
                 {"samples": args.samples, "seed": args.seed})
    worst = max(c["max_violation"] for c in checks)
    print(json.dumps({"n": n, "k": k, "samples": args.samples, "max_error": worst}))
    return EXIT_OK if all_passed(checks) else EXIT_CHECK


def cmd_barriers(args) -> int:
    n = args.n
    grid = barriers.default_grid(n, args.grid)
    results = [barriers.check_w0(n, grid), barriers.check_w1(n, grid), barriers.check_w2(n, grid)]
    cols = {"r": list(grid)}
    for b in results:
        cols[b.name] = list(b.margins)
    table = write_table(args.output_dir / f"barriers_n{n}", cols, args.format)
    if args.plot_script and table.suffix == ".csv":
        write_plot_script(args.output_dir / f"plot_barriers_n{n}.gp", table, list(cols), f"barrier margins n={n}")
    checks = [check(b.name, b.passed, max(0.0, -b.min_margin)) for b in results]
    write_report(args.output_dir / f"report_barriers_n{n}.json", n, n - 1, "barrier", None, checks, args)
    print(json.dumps({"n": n, "passed": all_passed(checks)}))
    return EXIT_OK if all_passed(checks) else EXIT_CHECK


def candidate_curve(args, n):
    if args.candidate == "bowl":
        curve, _ = shoot.integrate(shoot.SlopeField(n, 0), shoot.IntegrationConfig(r_max=args.radius))
        return curve
    r = np.linspace(0.0, args.radius, 4001)
    a = args.coef
    return rosgeom.ProfileCurve(r, a * r * r, 2 * a * r, np.full_like(r, 2 * a), n, n - 1, provenance="barrier")


def cmd_tangency(args) -> int:
    n = args.n
    cand = candidate_curve(args, n)
    report, narrative = tangency.nonexistence_demo(n, cand)
    out = args.output_dir
    write_table(out / f"touch_n{n}", {"r": list(report.radii), "gap": list(report.gap_function)}, args.format)
    checks = [
        check("gap_nonnegative", report.gap_function.min() >= -tangency.GAP_TOL, max(0.0, -report.gap_function.min())),
        check("interior_touch", report.interior, 0.0 if report.interior else 1.0),
        check("tangential_touch", report.tangential, report.gradient_mismatch),
        check("unimodal_gap", report.unimodal, 0.0 if report.unimodal else 1.0),
    ]
    diag = {"shift": report.shift, "touch_radius": report.touch_radius, "ellipticity": report.ellipticity,
            "contact_fraction": report.contact_fraction, "narrative": narrative}
    write_report(out / f"report_tangency_n{n}.json", n, n - 1, "shooting", None, checks, args, diag)
    print(narrative)
    return EXIT_OK if all_passed(checks) else EXIT_CHECK


def _sweep_task(payload):
    n, k, args = payload
    out = args.output_dir / f"n{n}_k{k}"
    out.mkdir(parents=True, exist_ok=True)
    return solve_one(n, k, args, out)


def cmd_sweep(args) -> int:
    pairs = [(n, k) for n in args.n_values for k in (args.k_values if args.k_values else range(n)) if 0 <= k < n]
    if not pairs:
        raise UsageError("empty (n, k) grid")
    tasks = [(n, k, args) for n, k in pairs]
    if args.jobs > 1:
        with ProcessPoolExecutor(max_workers=args.jobs) as pool:
            results = list(pool.map(_sweep_task, tasks))
    else:
        results = [_sweep_task(t) for t in tasks]
    cols = {"n": [], "k": [], "blow_up_radius": [], "closed_form_k_top": [], "passed": []}
    for ok, summary in results:
        n, k = summary["n"], summary["k"]
        cols["n"].append(n)
        cols["k"].append(k)
        cols["blow_up_radius"].append(summary["blow_up_radius"] if summary["blow_up_radius"] is not None else float("nan"))
        cols["closed_form_k_top"].append(exact.blowup_radius(n) if k == n - 1 else float("nan"))
        cols["passed"].append(1.0 if ok else 0.0)
    write_table(args.output_dir / "sweep_summary", cols, args.format)
    print(json.dumps({"runs": len(results), "passed": int(sum(cols["passed"]))}))
    return EXIT_OK if all(ok for ok, _ in results) else EXIT_CHECK


# ---------------------------------------------------------------- parser

def int_list(text):
    out = []
    for part in text.split(","):
        if "-" in part:
            a, b = part.split("-")
            out.extend(range(int(a), int(b) + 1))
        elif part:
            out.append(int(part))
    return out


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="qklab", description="Rotational Q_k-translator laboratory")
    p.add_argument("-v", "--verbose", action="store_true")
    sub = p.add_subparsers(dest="command", required=True)

    def common(sp, needs_n=True):
        if needs_n:
            sp.add_argument("--n", type=int, required=True)
            sp.add_argument("--k", type=int, default=None, help="flow index (default n-1)")
        sp.add_argument("--output-dir", type=Path, default=Path(os.environ.get("QKLAB_OUTPUT_DIR", "qklab_out")))
        sp.add_argument("--format", choices=("csv", "json"), default="csv")
        sp.add_argument("--plot-script", action="store_true", help="also emit a gnuplot script")
        sp.add_argument("--seed", type=int, default=0)
        sp.add_argument("--rel-tol", type=float, default=1e-10)
        sp.add_argument("--abs-tol", type=float, default=1e-12)
        sp.add_argument("--r-max", type=float, default=10.0)

    sp = sub.add_parser("solve", help="shoot one profile")
    common(sp)
    sp.set_defaults(func=cmd_solve)

    sp = sub.add_parser("picard", help="fixed-point iteration near the axis")
    common(sp)
    sp.add_argument("--intervals", type=int, default=1024)
    sp.add_argument("--relaxation", type=float, default=None, help="1 = plain iteration; default 3/(n+2)")
    sp.set_defaults(func=cmd_picard)

    sp = sub.add_parser("verify", help="cross-check curvature oracles on random jets")
    common(sp)
    sp.add_argument("--samples", type=int, default=500)
    sp.set_defaults(func=cmd_verify)

    sp = sub.add_parser("barriers", help="barrier inequalities on a grid")
    common(sp)
    sp.add_argument("--grid", type=int, default=10_000)
    sp.set_defaults(func=cmd_barriers)

    sp = sub.add_parser("tangency", help="first-touch demonstration")
    common(sp)
    sp.add_argument("--candidate", choices=("bowl", "paraboloid"), default="bowl")
    sp.add_argument("--coef", type=float, default=3.0, help="paraboloid u = coef r^2")
    sp.add_argument("--radius", type=float, default=2.0, help="candidate domain radius")
    sp.set_defaults(func=cmd_tangency)

    sp = sub.add_parser("sweep", help="solve over an (n, k) grid")
    common(sp, needs_n=False)
    sp.add_argument("--n-values", type=int_list, default=[2, 3, 4, 5, 6])
    sp.add_argument("--k-values", type=int_list, default=None)
    sp.add_argument("--jobs", type=int, default=1)
    sp.set_defaults(func=cmd_sweep)
    return p


def run(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_USAGE if exc.code not in (0, None) else EXIT_OK
    logging.basicConfig(level=logging.DEBUG if args.verbose else logging.WARNING, format="%(name)s: %(message)s")
    if getattr(args, "n", None) is not None:
        if args.k is None:
            args.k = args.n - 1
        if args.n < 2 or not 0 <= args.k <= args.n - 1:
            parser.print_usage(sys.stderr)
            print(f"qklab: error: need n >= 2 and 0 <= k <= n-1 (got n={args.n}, k={args.k})", file=sys.stderr)
            return EXIT_USAGE
    try:
        args.output_dir.mkdir(parents=True, exist_ok=True)
        return args.func(args)
    except (UsageError, DomainError) as exc:
        parser.print_usage(sys.stderr)
        print(f"qklab: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except OSError as exc:
        print(f"qklab: I/O error: {exc}", file=sys.stderr)
        return EXIT_IO


def main():
    sys.exit(run())
