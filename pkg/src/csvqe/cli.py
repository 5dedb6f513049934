"""Command-line front end: ``csvqe {decompose,ground,solve,sweep,random-bench}``.

Exit codes: 0 success, 2 parse error, 3 resource limit, 4 invariant violation.
"""
from __future__ import annotations

import argparse
import csv
import json
import sys
import time

from .bench import BenchConfig, run_bench
from .errors import InvariantError, ParseError, ResourceError
from .heuristics import HEURISTICS, WEIGHTS, SweepContext, retained_for_qubits, run_sweep
from .io import bundled, load
from .oracle import OracleConfig, exact_ground_energy
from .pauli import DEFAULT_DENSE_LIMIT
from .pipeline import solve_classical
from .quasi_model import GroundStateConfig
from .subspace import build_problem, solve

CHEMICAL_ACCURACY = 1.594e-3

EXIT_OK, EXIT_PARSE, EXIT_RESOURCE, EXIT_INVARIANT = 0, 2, 3, 4


def _load(source: str):
    if source.startswith("bundled:"):
        return bundled(source.split(":", 1)[1])
    return load(source)


def _ground_cfg(args) -> GroundStateConfig:
    return GroundStateConfig(seed=args.seed, restarts=args.restarts, steps_per_generator=args.steps)


def _exact_or_none(h, dense_limit: int) -> float | None:
    try:
        return exact_ground_energy(h, OracleConfig(dense_limit=dense_limit))
    except ResourceError:
        return None


def _config_echo(args) -> dict:
    skip = {"func", "json", "timing", "command"}
    return {k: v for k, v in sorted(vars(args).items()) if k not in skip}


def cmd_decompose(args) -> dict:
    hf = _load(args.file)
    cl = solve_classical(hf.hamiltonian, cfg=_ground_cfg(args))
    d = cl.decomposition
    return {
        "n": hf.hamiltonian.n,
        "nc_terms": [p.label for p in d.nc_terms],
        **d.to_dict(),
        "generators": [g.label for g in cl.model.generators],
        "clique_reps": [a.label for a in cl.model.clique_reps],
    }


def cmd_ground(args) -> dict:
    hf = _load(args.file)
    cl = solve_classical(hf.hamiltonian, cfg=_ground_cfg(args))
    return {
        "generators": [g.label for g in cl.model.generators],
        "clique_reps": [a.label for a in cl.model.clique_reps],
        "state": cl.state.to_dict(),
        "nc_energy": cl.nc_energy,
        "exact_energy": _exact_or_none(hf.hamiltonian, args.dense_limit),
    }


def cmd_solve(args) -> dict:
    h = _load(args.file).hamiltonian
    cl = solve_classical(h, cfg=_ground_cfg(args))
    m = cl.model
    exact = _exact_or_none(h, args.dense_limit)
    lo = h.n - m.n_generators
    if args.retain is not None:
        try:
            retained = tuple(sorted({int(s) for s in args.retain.split(",") if s.strip()}))
        except ValueError:
            raise ParseError(f"--retain expects comma-separated integers, got {args.retain!r}") from None
    elif args.qubits is not None:
        if not lo <= args.qubits <= h.n:
            raise InvariantError(f"--qubits must lie in [{lo}, {h.n}] for this Hamiltonian")
        if args.qubits == lo:
            retained = tuple(range(m.n_generators))
        else:
            ctx = SweepContext(h, m, cl.state, exact, args.dense_limit)
            sweep = run_sweep(ctx, args.heuristic, args.weight)
            if sweep.truncated_at is not None and sweep.truncated_at <= args.qubits:
                raise ResourceError(f"sweep ran out of resources at {sweep.truncated_at} qubits")
            retained = retained_for_qubits(sweep, args.qubits)
    else:
        retained = tuple(range(m.n_generators))
    out = {
        "n": h.n,
        "retained": list(retained),
        "nc_energy": cl.nc_energy,
        "exact_energy": exact,
    }
    if args.no_correction:
        out["energy"] = cl.nc_energy
        return out
    p = build_problem(h, m, cl.state, retained)
    energy = solve(p, args.dense_limit)
    out.update({
        "quantum_qubits": p.n_free,
        "energy": energy,
        "error": None if exact is None else energy - exact,
        "restricted_term_count": p.restricted_term_count,
        "contextual_term_count": p.contextual_term_count,
        "full_term_count": len(h),
    })
    return out


def cmd_sweep(args) -> dict:
    h = _load(args.file).hamiltonian
    cl = solve_classical(h, cfg=_ground_cfg(args))
    exact = _exact_or_none(h, args.dense_limit)
    ctx = SweepContext(h, cl.model, cl.state, exact, args.dense_limit)
    sweep = run_sweep(ctx, args.heuristic, args.weight)
    hit = sweep.first_within(args.threshold)
    if args.csv:
        with open(args.csv, "w", newline="") as fh:
            w = csv.writer(fh)
            w.writerow(["qubits", "energy", "error", "terms"])
            for r in sweep:
                w.writerow([r.quantum_qubits, repr(r.energy),
                            "" if r.error_vs_exact is None else repr(r.error_vs_exact), r.restricted_term_count])
    return {
        "nc_energy": cl.nc_energy,
        "exact_energy": exact,
        "full_term_count": len(h),
        "threshold": args.threshold,
        "first_within_threshold": None if hit is None else hit.quantum_qubits,
        **sweep.to_dict(),
    }


def cmd_random_bench(args) -> dict:
    cfg = BenchConfig(count=args.count, seed=args.seed, bins=args.bins, workers=args.workers)
    report = run_bench(cfg)
    if args.csv:
        with open(args.csv, "w", newline="") as fh:
            w = csv.writer(fh)
            w.writerow(["series", "bin_lo", "bin_hi", "count"])
            for name, hist in (("nc", report.hist_nc), ("corrected", report.hist_corrected)):
                for lo, hi, c in hist.rows():
                    w.writerow([name, repr(lo), repr(hi), c])
    out = report.summary()
    out.pop("config")
    return out


def _add_common(p: argparse.ArgumentParser) -> None:
    p.add_argument("--json", action="store_true", help="print the full report as JSON")
    p.add_argument("--timing", action="store_true", help="include wall time in the report")
    p.add_argument("--seed", type=int, default=0, help="seed for the stochastic ground-state search")
    p.add_argument("--dense-limit", type=int, default=DEFAULT_DENSE_LIMIT,
                   help="largest register solved by exact linear algebra (default %(default)s)")


def _add_optimizer(p: argparse.ArgumentParser) -> None:
    p.add_argument("--restarts", type=int, default=20, help="annealing restarts (large models only)")
    p.add_argument("--steps", type=int, default=10000, help="annealing steps per generator")


def _add_file(p: argparse.ArgumentParser) -> None:
    p.add_argument("file", help="Hamiltonian JSON file, or bundled:NAME (example_3q, h2_like)")


def _add_base(p: argparse.ArgumentParser) -> None:
    _add_file(p)
    _add_common(p)
    _add_optimizer(p)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="csvqe", description="Contextual-subspace VQE, solved classically.")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("decompose", help="split into noncontextual and contextual parts")
    _add_base(p)
    p.set_defaults(func=cmd_decompose)

    p = sub.add_parser("ground", help="noncontextual ground state")
    _add_base(p)
    p.set_defaults(func=cmd_ground)

    p = sub.add_parser("solve", help="CS-VQE energy for one qubit budget")
    _add_base(p)
    size = p.add_mutually_exclusive_group()
    size.add_argument("--qubits", type=int, help="number of quantum qubits")
    size.add_argument("--retain", help="comma-separated generator indices to keep fixed")
    p.add_argument("--heuristic", choices=HEURISTICS, default="optimal",
                   help="ordering used to pick generators for --qubits (default %(default)s)")
    p.add_argument("--weight", choices=WEIGHTS, default="coefficient")
    p.add_argument("--no-correction", action="store_true", help="report the noncontextual energy only")
    p.set_defaults(func=cmd_solve)

    p = sub.add_parser("sweep", help="energy versus number of quantum qubits")
    _add_base(p)
    p.add_argument("--heuristic", choices=HEURISTICS, default="greedy-pair")
    p.add_argument("--weight", choices=WEIGHTS, default="coefficient", help="weight for the weight heuristic")
    p.add_argument("--csv", metavar="PATH", help="write qubits,energy,error,terms rows")
    p.add_argument("--threshold", type=float, default=CHEMICAL_ACCURACY,
                   help="accuracy target marked in the report (default %(default)s)")
    p.set_defaults(func=cmd_sweep)

    p = sub.add_parser("random-bench", help="fractional errors over random coefficients on the 3-qubit example")
    _add_common(p)
    p.add_argument("--count", type=int, default=10000)
    p.add_argument("--bins", type=int, default=50, help="uniform histogram bins on [0, max]")
    p.add_argument("--workers", type=int, default=1)
    p.add_argument("--csv", metavar="PATH", help="write histogram rows")
    p.set_defaults(func=cmd_random_bench)
    return parser


def _print_text(command: str, results: dict) -> None:
    if command == "sweep":
        print(f"heuristic {results['heuristic']}  nc {results['nc_energy']:.10g}  exact {results['exact_energy']}")
        print(f"{'qubits':>6} {'energy':>16} {'error':>12} {'terms':>6}")
        for r in results["records"]:
            err = "" if r["error"] is None else f"{r['error']:.3e}"
            print(f"{r['qubits']:>6} {r['energy']:>16.10f} {err:>12} {r['terms']:>6}")
        print(f"first within {results['threshold']:g}: {results['first_within_threshold']}")
        return
    if command == "random-bench":
        print(f"mean fractional error  nc {results['mean_fractional_error_nc']:.6f}"
              f"  corrected {results['mean_fractional_error_corrected']:.6f}  excluded {results['excluded']}")
        for name in ("nc", "corrected"):
            hist = results[f"histogram_{name}"]
            print(f"{name}:")
            edges, counts = hist["edges"], hist["counts"]
            for lo, hi, c in zip(edges, edges[1:], counts):
                print(f"  [{lo:.4f}, {hi:.4f})  {c:>6}  {'#' * min(c, 60)}")
        return
    for k, v in results.items():
        if isinstance(v, dict):
            v = json.dumps(v, sort_keys=True)
        print(f"{k}: {v}")


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    start = time.perf_counter()
    try:
        results = args.func(args)
    except ParseError as exc:
        print(f"parse error: {exc}", file=sys.stderr)
        return EXIT_PARSE
    except ResourceError as exc:
        print(f"resource limit: {exc}", file=sys.stderr)
        return EXIT_RESOURCE
    except InvariantError as exc:
        print(f"invariant violation: {exc}", file=sys.stderr)
        return EXIT_INVARIANT
    report = {"command": args.command, "config": _config_echo(args), "results": results}
    if args.timing:
        report["wall_time"] = time.perf_counter() - start
    if args.json:
        print(json.dumps(report, indent=2, sort_keys=True))
    else:
        _print_text(args.command, results)
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
