"""Command-line surface: check a polytope, generate test sets, emit
family certificates, and run the benchmark harness.

Exit codes: 0 on success (for ``check``: inscription found), 2 when the
decision is undetermined (``check`` only; never a non-inscribability
claim), 1 on input or usage errors.
"""

from __future__ import annotations

import argparse
import csv
import json
import os
import sys
import time
from concurrent.futures import ThreadPoolExecutor
from pathlib import Path

from . import core, families, pipeline, sdp
from .errors import InscribeError, RetryLimit
from .numerics import numeric_rank

METHOD_NAMES = ("SDP-λc", "SAP-λc", "SDP-λh", "SAP-λh", "SDP-λ*", "SAP-λ*", "AP-λ*")


def _canonical_method(name: str) -> str:
    """Accept ASCII spellings (e.g. 'sdp-lh', 'AP-l*') for the λ names."""
    folded = name.strip().lower().replace("λ", "l").replace("lambda", "l")
    for canon in METHOD_NAMES:
        if folded == canon.lower().replace("λ", "l"):
            return canon
    raise ValueError(f"unknown method {name!r}; choose from {', '.join(METHOD_NAMES)}")


def _report_json(report: pipeline.PipelineReport) -> dict:
    doc = {
        "method": report.method,
        "inscribed": report.inscribed,
        "rank_at_tol": report.rank_at_tol,
        "iterations": report.iterations,
        "wall_time_s": report.wall_time,
        "f_bad_history": [sorted(f) for f in report.f_bad_history],
    }
    if report.vertices is not None:
        doc["vertices"] = report.vertices.vertices.tolist()
    if report.steps:
        doc["steps"] = [_report_json(s) for s in report.steps]
    return doc


def _pipeline_options(args: argparse.Namespace) -> pipeline.PipelineOptions:
    return pipeline.PipelineOptions(
        solver=sdp.SolverOptions(rho=args.rho, tol=args.sdp_tol, max_iter=args.sdp_max_iter),
        ap_max_iter=args.ap_max_iter,
        sap_max_iter=args.ap_max_iter,
        eps_zero=args.eps_zero,
        rank_tol=args.rank_tol,
    )


def _add_solver_flags(p: argparse.ArgumentParser) -> None:
    p.add_argument("--rho", type=float, default=1.0, help="splitting penalty parameter")
    p.add_argument("--sdp-tol", type=float, default=1e-7, help="solver residual tolerance")
    p.add_argument("--sdp-max-iter", type=int, default=50_000, help="solver iteration cap")
    p.add_argument("--ap-max-iter", type=int, default=5000, help="outer cap for AP/SAP refinement")
    p.add_argument("--rank-tol", type=float, default=1e-6, help="relative rank tolerance for reports")
    p.add_argument("--eps-zero", type=float, default=1e-7, help="relative slack-zero threshold")


def cmd_check(args: argparse.Namespace) -> int:
    """Run the three-step procedure on a polytope JSON file."""
    try:
        poly, incidence = core.load_polytope(args.input)
    except FileNotFoundError:
        print(f"{args.input}: no such file", file=sys.stderr)
        return 1
    except json.JSONDecodeError as e:
        print(f"{args.input}:{e.lineno}:{e.colno}: {e.msg}", file=sys.stderr)
        return 1
    opts = _pipeline_options(args)
    if incidence is None:
        report = pipeline.run_procedure(poly, opts=opts)
    else:
        report = pipeline.run_procedure(incidence, d=poly.dim, opts=opts)
    json.dump(_report_json(report), sys.stdout, indent=2)
    print()
    return 0 if report.inscribed else 2


def cmd_gen(args: argparse.Namespace) -> int:
    """Write random inscribed polytopes (with facets) as JSON files."""
    out = Path(args.out_dir)
    out.mkdir(parents=True, exist_ok=True)
    for index in range(args.count):
        try:
            poly, incidence = core.random_inscribed(args.n, args.d, args.seed + index)
        except RetryLimit as e:
            print(f"instance {index}: {e}", file=sys.stderr)
            return 1
        core.save_polytope(out / f"{args.n}_{args.d}_{index}.json", poly, incidence)
    return 0


def cmd_family(args: argparse.Namespace) -> int:
    """Emit the closed-form certificate of a canonical family."""
    spec = families.FamilySpec(kind=args.kind, param=args.param)
    cert = families.build_family(spec)
    dual = cert.dual_certificate()
    point = cert.gram_matrix()
    doc = {
        "kind": spec.kind,
        "param": spec.param,
        "n": cert.n,
        "m": cert.m,
        "d": cert.dim,
        "lambda_bar": cert.lambda_bar,
        "u_bar": cert.u_bar,
        "w_bar": cert.w_bar,
        "lambda_max_closed_form": cert.lambda_max_closed_form,
        "lambda_max_numeric": families.family_lambda_max_numeric(cert),
        "duality_gap": sdp.duality_gap(point, dual, cert.incidence),
        "feasibility_margin": sdp.dual_feasibility_margin(dual, cert.incidence),
    }
    if args.solve:
        opts = sdp.SolverOptions(rho=args.rho, tol=args.sdp_tol, max_iter=args.sdp_max_iter)
        sol = sdp.solve_sdp(cert.sdp_instance(), opts)
        doc["solve"] = {
            "objective": sol.objective,
            "rank_at_tol": numeric_rank(sol.X.data, args.rank_tol),
            "iterations": sol.iterations,
            "converged": sol.converged,
        }
    json.dump(doc, sys.stdout, indent=2)
    print()
    return 0


def _run_bench_method(method: str, poly, incidence, opts) -> pipeline.PipelineReport:
    d = poly.dim
    if method == "SDP-λc":
        return pipeline.solve_with_constant_weights(incidence, d, opts, method=method)
    if method == "SDP-λh":
        return pipeline.tune_lambda_heuristic(incidence, d, opts, method=method)
    if method == "SDP-λ*":
        return pipeline.solve_with_tuned_weights(poly, incidence, opts, method=method)
    base, refine = {
        "SAP-λc": ("SDP-λc", "sap"),
        "SAP-λh": ("SDP-λh", "sap"),
        "SAP-λ*": ("SDP-λ*", "sap"),
        "AP-λ*": ("SDP-λ*", "ap"),
    }[method]
    start = _run_bench_method(base, poly, incidence, opts)
    return pipeline.continue_with(start, incidence, d, refine, opts, method=method)


def cmd_bench(args: argparse.Namespace) -> int:
    """Run methods over generated instance sets; write summary and detail CSV."""
    try:
        methods = [_canonical_method(tok) for tok in args.methods.split(",") if tok.strip()]
    except ValueError as e:
        print(str(e), file=sys.stderr)
        return 1
    if not methods:
        print("no methods given", file=sys.stderr)
        return 1
    sets = []
    for spec in args.set:
        parts = spec.split(",")
        if len(parts) != 4:
            print(f"bad --set {spec!r}, expected n,d,count,seed", file=sys.stderr)
            return 1
        sets.append(tuple(int(p) for p in parts))
    opts = _pipeline_options(args)

    instances = []
    for n, d, count, seed in sets:
        for index in range(count):
            poly, incidence = core.random_inscribed(n, d, seed + index)
            instances.append((n, d, index, poly, incidence))

    def work(item):
        n, d, index, poly, incidence = item
        rows = []
        for method in methods:
            t0 = time.perf_counter()
            try:
                report = _run_bench_method(method, poly, incidence, opts)
                solved = report.inscribed
            except InscribeError:
                solved = False
            rows.append((method, n, d, index, solved, time.perf_counter() - t0))
        return rows

    threads = max(1, int(os.environ.get("INSCRIBE_THREADS", "1")))
    if threads > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            detail = [row for rows in pool.map(work, instances) for row in rows]
    else:
        detail = [row for item in instances for row in work(item)]

    out = Path(args.out)
    detail_path = Path(args.detail) if args.detail else out.with_name(out.stem + "_detail.csv")
    with detail_path.open("w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["method", "n", "d", "index", "solved", "time_s"])
        for method, n, d, index, solved, dt in detail:
            w.writerow([method, n, d, index, int(solved), f"{dt:.6f}"])
    with out.open("w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["method", "n", "d", "solved", "total", "avg_time_s", "max_time_s"])
        for method in methods:
            for n, d, count, _ in sets:
                rows = [r for r in detail if r[0] == method and r[1] == n and r[2] == d]
                times = [r[5] for r in rows]
                w.writerow([
                    method, n, d, sum(r[4] for r in rows), len(rows),
                    f"{sum(times) / len(times):.6f}", f"{max(times):.6f}",
                ])
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="inscribe", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("check", help="decide inscribability of a polytope JSON file")
    p.add_argument("input", help="polytope JSON path")
    _add_solver_flags(p)
    p.set_defaults(func=cmd_check)

    p = sub.add_parser("gen", help="generate random inscribed polytopes")
    p.add_argument("n", type=int)
    p.add_argument("d", type=int)
    p.add_argument("count", type=int)
    p.add_argument("seed", type=int)
    p.add_argument("out_dir")
    p.set_defaults(func=cmd_gen)

    p = sub.add_parser("family", help="emit a family certificate")
    p.add_argument("kind", choices=families.FAMILY_KINDS)
    p.add_argument("param", type=int)
    p.add_argument("--solve", action="store_true", help="also solve the SDP and report the rank")
    _add_solver_flags(p)
    p.set_defaults(func=cmd_family)

    p = sub.add_parser("bench", help="benchmark methods on generated instance sets")
    p.add_argument("--set", action="append", required=True, metavar="n,d,count,seed")
    p.add_argument("--methods", required=True, help="comma-separated method names")
    p.add_argument("--out", required=True, help="summary CSV path")
    p.add_argument("--detail", default=None, help="detail CSV path (default: <out>_detail.csv)")
    _add_solver_flags(p)
    p.set_defaults(func=cmd_bench)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except (InscribeError, ValueError, OSError) as e:
        print(f"error: {e}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
