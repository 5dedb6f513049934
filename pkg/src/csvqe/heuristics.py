"""Generator removal and the qubit-ordering sweeps that trade qubits for accuracy.

Every sweep opens with the noncontextual approximation (no quantum qubits),
then walks a nested chain of retained-generator sets from all generators
retained (the smallest quantum register) to none (full VQE), recording the
constrained ground energy at each visited size.
"""
from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field
from typing import Iterable, Sequence

from .errors import InvariantError, ResourceError
from .pauli import DEFAULT_DENSE_LIMIT, Hamiltonian
from .quasi_model import NoncontextualState, QuasiModel, evaluate_objective
from .rotations import apply_plan, diagonalize_generators
from .subspace import CSVQEProblem, build_problem, solve

HEURISTICS = ("greedy-pair", "optimal", "weight")
WEIGHTS = ("coefficient", "count")
_TIE_TOL = 1e-12


@dataclass(frozen=True)
class SweepRecord:
    """One point of an energy-versus-qubits curve.

    The leading record of every sweep has ``corrected=False``: it is the
    noncontextual approximation alone and uses no quantum qubits.  All other
    records satisfy ``quantum_qubits == n - len(retained_generators)``;
    ``constrained`` tells whether the clique-operator constraint was imposed.
    """

    quantum_qubits: int
    retained_generators: tuple[int, ...]
    energy: float
    error_vs_exact: float | None
    restricted_term_count: int
    contextual_term_count: int = 0
    corrected: bool = True
    constrained: bool = False

    def to_dict(self) -> dict:
        return {
            "qubits": self.quantum_qubits,
            "retained": list(self.retained_generators),
            "energy": self.energy,
            "error": self.error_vs_exact,
            "terms": self.restricted_term_count,
            "contextual_terms": self.contextual_term_count,
            "corrected": self.corrected,
            "constrained": self.constrained,
        }


@dataclass(frozen=True)
class SweepResult:
    """Records from the noncontextual approximation to full VQE.

    ``truncated_at`` names the register size that ran out of resources, if any.
    """

    heuristic: str
    records: tuple[SweepRecord, ...]
    truncated_at: int | None = None
    order: tuple[int, ...] = ()

    def __len__(self) -> int:
        return len(self.records)

    def __iter__(self):
        return iter(self.records)

    def __getitem__(self, i):
        return self.records[i]

    @property
    def energies(self) -> list[float]:
        return [r.energy for r in self.records]

    @property
    def corrected_records(self) -> tuple[SweepRecord, ...]:
        return tuple(r for r in self.records if r.corrected)

    def first_within(self, threshold: float) -> SweepRecord | None:
        """Smallest register whose error is below ``threshold`` (None without an exact reference)."""
        for r in self.records:
            if r.error_vs_exact is not None and r.error_vs_exact < threshold:
                return r
        return None

    def to_dict(self) -> dict:
        return {
            "heuristic": self.heuristic,
            "order": list(self.order),
            "truncated_at": self.truncated_at,
            "records": [r.to_dict() for r in self.records],
        }


@dataclass
class SweepContext:
    """Fixed inputs of a sweep plus a cache of solved problems keyed by retained set."""

    h: Hamiltonian
    model: QuasiModel
    state: NoncontextualState
    exact_energy: float | None = None
    dense_limit: int = DEFAULT_DENSE_LIMIT
    method: str = "auto"
    _cache: dict = field(default_factory=dict, repr=False)

    @property
    def all_generators(self) -> frozenset[int]:
        return frozenset(range(self.model.n_generators))

    def _constrained(self, retained: frozenset[int], force: bool) -> bool:
        return bool(self.model.n_cliques) and (bool(retained) or force)

    def problem(self, retained: Iterable[int], constrained: bool = False) -> CSVQEProblem:
        """Problem for ``retained``; the clique constraint is kept unless nothing is retained and not forced."""
        return build_problem(self.h, self.model, self.state, sorted(retained), constrain_at_endpoint=constrained)

    def _error(self, energy: float) -> float | None:
        return None if self.exact_energy is None else energy - self.exact_energy

    def record(self, retained: Iterable[int], constrained: bool = False) -> SweepRecord:
        key = frozenset(retained)
        flag = self._constrained(key, constrained)
        if (key, flag) not in self._cache:
            p = self.problem(key, flag)
            energy = solve(p, self.dense_limit, self.method)
            self._cache[key, flag] = SweepRecord(p.n_free, tuple(sorted(key)), energy, self._error(energy),
                                                 p.restricted_term_count, p.contextual_term_count,
                                                 constrained=flag)
        return self._cache[key, flag]

    def energy(self, retained: Iterable[int]) -> float:
        return self.record(retained).energy

    def nc_record(self) -> SweepRecord:
        """The noncontextual approximation with no quantum correction."""
        e = evaluate_objective(self.model, self.state)
        return SweepRecord(0, tuple(sorted(self.all_generators)), e, self._error(e), 0, 0,
                           corrected=False, constrained=bool(self.model.n_cliques))

    def opening(self) -> list[SweepRecord]:
        """Noncontextual record followed by the smallest-register correction."""
        return [self.nc_record(), self.record(self.all_generators, constrained=True)]

    def closing(self, records: list[SweepRecord]) -> None:
        """Append the unconstrained full-register record unless it is already last."""
        final = self.record(frozenset())
        if records[-1] != final:
            records.append(final)


def remove_generators(ctx: SweepContext, problem: CSVQEProblem, drop: Iterable[int]) -> CSVQEProblem:
    """Move the qubits of ``drop`` to the quantum side; their terms join the correction."""
    drop = set(drop)
    current = set(problem.retained)
    if not drop <= current:
        raise InvariantError(f"cannot drop {sorted(drop - current)}: not retained")
    if not drop:
        return problem
    return ctx.problem(current - drop)


def _best(ctx: SweepContext, candidates: Sequence[frozenset[int]]) -> frozenset[int]:
    """Lowest-energy candidate; candidates arrive in tie-break order and only a strict improvement replaces."""
    best, best_e = None, math.inf
    for cand in candidates:
        e = ctx.energy(cand)
        if e < best_e - _TIE_TOL:
            best, best_e = cand, e
    return best


def greedy_pair_sweep(ctx: SweepContext) -> SweepResult:
    """Drop the pair of generators that lowers the energy most, two qubits at a time."""
    retained = ctx.all_generators
    records, order = [], []
    try:
        records.extend(ctx.opening())
        while retained:
            if len(retained) >= 2:
                pairs = list(itertools.combinations(sorted(retained), 2))
                chosen = _best(ctx, [retained - set(pr) for pr in pairs])
            else:
                chosen = frozenset()
            order.extend(sorted(retained - chosen))
            retained = chosen
            records.append(ctx.record(retained))
        ctx.closing(records)
    except ResourceError:
        return SweepResult("greedy-pair", tuple(records), ctx.model.n - len(retained), tuple(order))
    return SweepResult("greedy-pair", tuple(records), None, tuple(order))


def optimal_sweep(ctx: SweepContext) -> SweepResult:
    """Start from full VQE and re-retain one generator at a time, keeping the energy as low as possible."""
    retained: frozenset[int] = frozenset()
    chain = []
    try:
        chain.append(ctx.record(retained))
        while retained != ctx.all_generators:
            rest = sorted(ctx.all_generators - retained)
            retained = _best(ctx, [retained | {j} for j in rest])
            chain.append(ctx.record(retained))
        opening = ctx.opening()
    except ResourceError:
        return SweepResult("optimal", (), ctx.model.n - len(retained))
    chain.reverse()
    order = []
    for a, b in zip(chain, chain[1:]):
        order.extend(sorted(set(a.retained_generators) - set(b.retained_generators)))
    records = opening + [r for r in chain if r != opening[-1]]
    return SweepResult("optimal", tuple(records), None, tuple(order))


def generator_weights(ctx: SweepContext, weight: str = "coefficient") -> list[float]:
    """Per-generator weight of its stabilised qubit in the fully rotated Hamiltonian."""
    if weight not in WEIGHTS:
        raise ValueError(f"unknown weight {weight!r}; choose from {WEIGHTS}")
    m = ctx.model
    if not m.n_generators:
        return []
    plan = diagonalize_generators(list(m.generators), n=m.n)
    rotated = apply_plan(ctx.h, plan)
    out = []
    for t in plan.target_map:
        total = 0.0
        for p, c in rotated.items():
            if t.qubit in p.support:
                total += abs(c) if weight == "coefficient" else 1.0
        out.append(total)
    return out


def weight_sweep(ctx: SweepContext, weight: str = "coefficient") -> SweepResult:
    """Hand qubits to the quantum side in order of descending term weight, without trial solves."""
    w = generator_weights(ctx, weight)
    order = sorted(range(len(w)), key=lambda j: (-w[j], j))
    retained = ctx.all_generators
    records = []
    try:
        records.extend(ctx.opening())
        for j in order:
            retained = retained - {j}
            records.append(ctx.record(retained))
        ctx.closing(records)
    except ResourceError:
        return SweepResult("weight", tuple(records), ctx.model.n - len(retained), tuple(order))
    return SweepResult("weight", tuple(records), None, tuple(order))


def run_sweep(ctx: SweepContext, heuristic: str, weight: str = "coefficient") -> SweepResult:
    if heuristic == "greedy-pair":
        return greedy_pair_sweep(ctx)
    if heuristic == "optimal":
        return optimal_sweep(ctx)
    if heuristic == "weight":
        return weight_sweep(ctx, weight)
    raise ValueError(f"unknown heuristic {heuristic!r}; choose from {HEURISTICS}")


def retained_for_qubits(sweep: SweepResult, qubits: int) -> tuple[int, ...]:
    """Retained set of the last corrected sweep record with exactly ``qubits`` quantum qubits."""
    for r in reversed(sweep.records):
        if r.corrected and r.quantum_qubits == qubits:
            return r.retained_generators
    sizes = [r.quantum_qubits for r in sweep.records]
    raise InvariantError(f"no record with {qubits} quantum qubits; sweep visited {sizes}")
