"""Compare the generator-removal heuristics on random Hamiltonians.

For each register size, reports the mean error above the exact ground energy
of every heuristic, and how often each one matches the best of the three.
"""
import argparse
from collections import defaultdict

import numpy as np

from csvqe.heuristics import HEURISTICS, SweepContext, run_sweep
from csvqe.io import bundled
from csvqe.oracle import exact_ground_energy
from csvqe.pauli import Hamiltonian
from csvqe.pipeline import solve_classical


def random_hamiltonian(rng: np.random.Generator, n: int, n_terms: int) -> Hamiltonian:
    labels = set()
    while len(labels) < n_terms:
        s = "".join("IXYZ"[i] for i in rng.integers(0, 4, n))
        if s != "I" * n:
            labels.add(s)
    return Hamiltonian.from_labels(dict(zip(sorted(labels), rng.uniform(-1, 1, n_terms))))


def profile(h: Hamiltonian) -> dict[str, dict[int, float]]:
    """Best corrected error per register size for each heuristic."""
    cl = solve_classical(h)
    ctx = SweepContext(h, cl.model, cl.state, exact_ground_energy(h))
    out = {}
    for name in HEURISTICS:
        errs = {}
        for r in run_sweep(ctx, name).corrected_records:
            errs[r.quantum_qubits] = min(errs.get(r.quantum_qubits, np.inf), r.error_vs_exact)
        out[name] = errs
    return out


def main() -> None:
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--count", type=int, default=200)
    ap.add_argument("--qubits", type=int, default=6)
    ap.add_argument("--terms", type=int, default=30)
    ap.add_argument("--seed", type=int, default=0)
    ap.add_argument("--bundled", help="profile one bundled Hamiltonian instead")
    args = ap.parse_args()

    if args.bundled:
        for name, errs in profile(bundled(args.bundled).hamiltonian).items():
            print(name, {k: f"{v:.3e}" for k, v in sorted(errs.items())})
        return

    rng = np.random.default_rng(args.seed)
    errors = defaultdict(lambda: defaultdict(list))
    wins = defaultdict(lambda: defaultdict(int))
    for _ in range(args.count):
        prof = profile(random_hamiltonian(rng, args.qubits, args.terms))
        sizes = set.intersection(*(set(e) for e in prof.values()))
        for q in sizes:
            best = min(prof[name][q] for name in HEURISTICS)
            for name in HEURISTICS:
                errors[q][name].append(prof[name][q])
                wins[q][name] += prof[name][q] <= best + 1e-9

    print(f"{'qubits':>6} {'n':>5} " + " ".join(f"{h:>22}" for h in HEURISTICS))
    for q in sorted(errors):
        n = len(errors[q][HEURISTICS[0]])
        cells = [f"{np.mean(errors[q][h]):.3e} ({wins[q][h] / n:4.0%})" for h in HEURISTICS]
        print(f"{q:>6} {n:>5} " + " ".join(f"{c:>22}" for c in cells))
    print("cells: mean error above exact (share of instances matching the best heuristic)")


if __name__ == "__main__":
    main()
