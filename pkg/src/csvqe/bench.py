"""Random-coefficient ensemble on the 3-qubit example term set.

Each instance draws all fourteen coefficients uniformly from [-1, 1] and
compares the noncontextual energy, with and without the quantum correction,
against exact diagonalization.
"""
from __future__ import annotations

import concurrent.futures as cf
from dataclasses import asdict, dataclass

import numpy as np

from .oracle import exact_ground_energy
from .pauli import Hamiltonian, PauliOperator
from .pipeline import solve_classical
from .rotations import apply_plan_to_pauli
from .subspace import build_problem, solve

EXAMPLE_NC = ("ZII", "IXI", "IYI", "IZX", "IZY", "IZZ", "ZXI", "ZYI", "ZZX", "ZZY", "ZZZ")
EXAMPLE_C = ("IIX", "IIY", "IIZ")
EXAMPLE_TERMS = EXAMPLE_NC + EXAMPLE_C
EXCLUDE_BELOW = 1e-8


@dataclass(frozen=True)
class BenchConfig:
    count: int = 10000
    seed: int = 0
    bins: int = 50
    workers: int = 1

    def __post_init__(self):
        if self.count < 1 or self.bins < 1 or self.workers < 1:
            raise ValueError("count, bins and workers must be positive")


@dataclass(frozen=True)
class InstanceResult:
    index: int
    exact: float
    nc_energy: float
    corrected: float
    frac_nc: float | None
    frac_corrected: float | None
    quantum_sources: int  # |S_c| plus migrated terms
    restricted_terms: int
    any_anticommuting: bool  # some quantum term anticommutes with a retained generator


def example_hamiltonian(coefficients) -> Hamiltonian:
    return Hamiltonian.from_labels(dict(zip(EXAMPLE_TERMS, (float(c) for c in coefficients))))


def instance(seed: int, index: int) -> Hamiltonian:
    """Instance ``index`` of the ensemble; its stream depends only on ``(seed, index)``."""
    rng = np.random.default_rng([seed, index])
    return example_hamiltonian(rng.uniform(-1.0, 1.0, len(EXAMPLE_TERMS)))


def evaluate(h: Hamiltonian, index: int = 0) -> InstanceResult:
    nc_ops = [PauliOperator.from_label(s) for s in EXAMPLE_NC]
    cl = solve_classical(h, nc_terms=[p for p in nc_ops if p in h])
    p = build_problem(h, cl.model, cl.state)
    corrected = solve(p)
    exact = exact_ground_energy(h)
    keep = exact if abs(exact) >= EXCLUDE_BELOW else None
    anti = False
    for q in cl.decomposition.contextual_terms:
        image = apply_plan_to_pauli(q, p.plan)
        if any(image.x >> (h.n - 1 - k) & 1 for k in p.generator_assignments):
            anti = True
    return InstanceResult(
        index=index,
        exact=exact,
        nc_energy=cl.nc_energy,
        corrected=corrected,
        frac_nc=None if keep is None else abs(cl.nc_energy - exact) / abs(exact),
        frac_corrected=None if keep is None else abs(corrected - exact) / abs(exact),
        quantum_sources=p.contextual_source_count,
        restricted_terms=p.contextual_term_count,
        any_anticommuting=anti,
    )


def _run_one(args) -> InstanceResult:
    seed, index = args
    return evaluate(instance(seed, index), index)


@dataclass(frozen=True)
class Histogram:
    edges: tuple[float, ...]
    counts: tuple[int, ...]

    @classmethod
    def of(cls, values: np.ndarray, bins: int) -> "Histogram":
        top = float(values.max()) if len(values) and values.max() > 0 else 1.0
        counts, edges = np.histogram(values, bins=bins, range=(0.0, top))
        return cls(tuple(float(e) for e in edges), tuple(int(c) for c in counts))

    def rows(self):
        for lo, hi, c in zip(self.edges, self.edges[1:], self.counts):
            yield lo, hi, c


@dataclass(frozen=True)
class BenchReport:
    config: BenchConfig
    instances: tuple[InstanceResult, ...]
    mean_nc: float
    mean_corrected: float
    excluded: int
    hist_nc: Histogram
    hist_corrected: Histogram

    def summary(self) -> dict:
        return {
            "config": asdict(self.config),
            "mean_fractional_error_nc": self.mean_nc,
            "mean_fractional_error_corrected": self.mean_corrected,
            "excluded": self.excluded,
            "histogram_nc": {"edges": list(self.hist_nc.edges), "counts": list(self.hist_nc.counts)},
            "histogram_corrected": {"edges": list(self.hist_corrected.edges),
                                    "counts": list(self.hist_corrected.counts)},
        }


def run_bench(cfg: BenchConfig | None = None) -> BenchReport:
    cfg = cfg or BenchConfig()
    jobs = [(cfg.seed, i) for i in range(cfg.count)]
    if cfg.workers > 1:
        with cf.ProcessPoolExecutor(cfg.workers) as pool:
            results = list(pool.map(_run_one, jobs, chunksize=max(1, cfg.count // (8 * cfg.workers))))
    else:
        results = [_run_one(j) for j in jobs]
    kept = [r for r in results if r.frac_nc is not None]
    nc = np.array([r.frac_nc for r in kept])
    corr = np.array([r.frac_corrected for r in kept])
    return BenchReport(
        config=cfg,
        instances=tuple(results),
        mean_nc=float(nc.mean()) if len(nc) else float("nan"),
        mean_corrected=float(corr.mean()) if len(corr) else float("nan"),
        excluded=len(results) - len(kept),
        hist_nc=Histogram.of(nc, cfg.bins),
        hist_corrected=Histogram.of(corr, cfg.bins),
    )
