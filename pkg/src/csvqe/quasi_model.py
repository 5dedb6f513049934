"""Quasi-quantized model of a noncontextual Hamiltonian and its classical ground state.

The model expresses every noncontextual term as a signed product of commuting
generators ``G_j``, optionally times one clique representative ``A_i``.  A
noncontextual state assigns ``q_j = +-1`` to each generator and a unit vector
``r`` to the representatives, which makes the energy

    E(q, r) = constant + sum_B (h_B + sum_i h_Bi r_i) prod_{j in J_B} q_j.

For fixed ``q`` this is affine in ``r``, so the inner minimisation over the
unit sphere is solved in closed form and only the sign cube is searched.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from functools import cached_property

import numpy as np

from .contextuality import NoncontextualDecomposition
from .errors import DimensionError, ModelError, ResourceError
from .gf2 import SymplecticBasis, mask_indices, symplectic_int
from .pauli import PauliOperator, commutes, multiply


@dataclass(frozen=True)
class ObjectiveTerm:
    indices: tuple[int, ...]  # J_B
    h_b: float
    h_bi: tuple[float, ...]


@dataclass(frozen=True)
class NoncontextualState:
    q: tuple[int, ...]
    r: tuple[float, ...]

    def __post_init__(self):
        object.__setattr__(self, "q", tuple(int(v) for v in self.q))
        object.__setattr__(self, "r", tuple(float(v) for v in self.r))
        if any(v not in (-1, 1) for v in self.q):
            raise ValueError("generator values must be +1 or -1")
        if self.r and abs(math.fsum(v * v for v in self.r) - 1.0) > 1e-12:
            raise ValueError("clique expectation vector r must have unit norm")

    def to_dict(self) -> dict:
        return {"q": list(self.q), "r": list(self.r)}


@dataclass(frozen=True)
class QuasiModel:
    n: int
    generators: tuple[PauliOperator, ...]
    clique_reps: tuple[PauliOperator, ...]
    obj_terms: tuple[ObjectiveTerm, ...]
    constant: float = 0.0
    decomposition: NoncontextualDecomposition | None = field(default=None, compare=False, repr=False)

    @property
    def n_generators(self) -> int:
        return len(self.generators)

    @property
    def n_cliques(self) -> int:
        return len(self.clique_reps)

    @cached_property
    def _basis(self) -> SymplecticBasis:
        basis = SymplecticBasis()
        for g in self.generators:
            basis.add(symplectic_int(g))
        return basis

    @cached_property
    def arrays(self) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
        """``(masks, h_b, h_bi)`` with ``masks[b]`` the int bit mask of J_B."""
        masks = np.array([sum(1 << j for j in t.indices) for t in self.obj_terms], dtype=np.int64)
        h_b = np.array([t.h_b for t in self.obj_terms], dtype=float)
        h_bi = np.array([t.h_bi for t in self.obj_terms], dtype=float).reshape(len(self.obj_terms), self.n_cliques)
        return masks, h_b, h_bi

    def generator_product(self, indices) -> PauliOperator:
        prod = PauliOperator.identity(self.n)
        for j in indices:
            prod = multiply(prod, self.generators[j])
        return prod

    def locate(self, p: PauliOperator) -> tuple[int, tuple[int, ...], int | None] | None:
        """Write ``p`` as ``sign * prod(G_J)`` or ``sign * prod(G_J) * A_i``.

        Returns ``(sign, J, i)`` with ``i`` None in the first case, or None if
        ``p`` is neither.
        """
        if p.n != self.n:
            raise DimensionError(f"operator on {p.n} qubits, model on {self.n}")
        v = symplectic_int(p)
        combo = self._basis.decompose(v)
        rep = None
        if combo is None:
            for i, a in enumerate(self.clique_reps):
                combo = self._basis.decompose(v ^ symplectic_int(a))
                if combo is not None:
                    rep = i
                    break
            else:
                return None
        idx = mask_indices(combo)
        prod = self.generator_product(idx)
        if rep is not None:
            prod = multiply(prod, self.clique_reps[rep])
        # prod equals +-p.unsigned(); fold in p's own sign
        sign = prod.sign * p.sign
        return sign, idx, rep

    def to_dict(self) -> dict:
        return {
            "generators": [g.label for g in self.generators],
            "clique_reps": [a.label for a in self.clique_reps],
            "obj_terms": [{"J": list(t.indices), "h_B": t.h_b, "h_Bi": list(t.h_bi)} for t in self.obj_terms],
            "constant": self.constant,
        }


def build_model(d: NoncontextualDecomposition) -> QuasiModel:
    """Independent generators, clique representatives and objective coefficients for ``d``.

    Generators are the first GF(2)-independent elements of the universally
    commuting terms followed by the products ``A_i A`` over clique members,
    taken in that order.  Representatives are the first member of each clique.
    """
    if d.source is None:
        raise ModelError("decomposition needs its source Hamiltonian for coefficients")
    n = d.source.n
    reps = tuple(c[0] for c in d.cliques)
    candidates = list(d.z_set)
    for clique in d.cliques:
        for p in clique[1:]:
            candidates.append(multiply(clique[0], p).unsigned())
    basis = SymplecticBasis()
    gens = []
    for c in candidates:
        if basis.add(symplectic_int(c)):
            gens.append(c)
    for a_idx, a in enumerate(gens):
        for b in gens[a_idx + 1:]:
            if not commutes(a, b):
                raise ModelError(f"generators {a} and {b} anticommute")
        for rep in reps:
            if not commutes(a, rep):
                raise ModelError(f"generator {a} anticommutes with clique representative {rep}")
    for i, a in enumerate(reps):
        for b in reps[i + 1:]:
            if commutes(a, b):
                raise ModelError(f"clique representatives {a} and {b} commute")
    if len(gens) > n or (reps and len(gens) >= n):
        raise ModelError(f"{len(gens)} generators cannot fit on {n} qubits")

    model = QuasiModel(n, tuple(gens), reps, (), d.source.constant, d)
    n_cliques = len(reps)
    grouped: dict[tuple[int, ...], list] = {}
    for p in d.nc_terms:
        coeff = d.source.coefficient(p)
        found = model.locate(p)
        if found is None:
            raise ModelError(f"term {p} is not generated by the model")
        sign, idx, rep = found
        entry = grouped.setdefault(idx, [0.0, [0.0] * n_cliques])
        if rep is None:
            entry[0] += sign * coeff
        else:
            entry[1][rep] += sign * coeff
    terms = tuple(ObjectiveTerm(idx, hb, tuple(hbi)) for idx, (hb, hbi) in sorted(grouped.items()))
    return QuasiModel(n, tuple(gens), reps, terms, d.source.constant, d)


def _par(values) -> np.ndarray:
    return (np.bitwise_count(values) & 1).astype(float)


def _check_state(m: QuasiModel, s: NoncontextualState) -> None:
    if len(s.q) != m.n_generators or len(s.r) != m.n_cliques:
        raise DimensionError(
            f"state has |q|={len(s.q)}, |r|={len(s.r)}; model needs {m.n_generators}, {m.n_cliques}")


def _q_mask(q) -> int:
    return sum(1 << j for j, v in enumerate(q) if v < 0)


def coefficients_for_q(m: QuasiModel, q) -> tuple[float, np.ndarray]:
    """``(c0, c)`` such that the objective at ``(q, r)`` is ``c0 + c . r``."""
    masks, h_b, h_bi = m.arrays
    signs = 1.0 - 2.0 * _par(masks & _q_mask(q))
    return m.constant + float(signs @ h_b), signs @ h_bi


def optimal_r(c: np.ndarray) -> np.ndarray:
    """Unit vector minimising ``c . r``; ``(1, 0, ..., 0)`` when ``c`` vanishes."""
    norm = float(np.linalg.norm(c))
    if norm == 0.0:
        r = np.zeros(len(c))
        if len(c):
            r[0] = 1.0
        return r
    return -c / norm


def evaluate_objective(m: QuasiModel, s: NoncontextualState) -> float:
    """Expectation of the noncontextual Hamiltonian in the state ``(q, r)``."""
    _check_state(m, s)
    c0, c = coefficients_for_q(m, s.q)
    return c0 + float(c @ np.asarray(s.r, dtype=float)) if m.n_cliques else c0


def expectation_of_pauli(m: QuasiModel, s: NoncontextualState, p: PauliOperator) -> float:
    """Value the noncontextual state induces on a single Pauli (0 when unconstrained)."""
    _check_state(m, s)
    if any(not commutes(p, g) for g in m.generators):
        return 0.0
    found = m.locate(p)
    if found is None:
        return 0.0
    sign, idx, rep = found
    value = float(sign * math.prod(s.q[j] for j in idx))
    return value * s.r[rep] if rep is not None else value


@dataclass(frozen=True)
class GroundStateConfig:
    """Search settings for :func:`find_ground_state`."""

    seed: int = 0
    brute_force_limit: int = 18
    restarts: int = 20
    steps_per_generator: int = 10_000
    final_temperature_ratio: float = 1e-4


def _energy_of_mask(m: QuasiModel, mask: int) -> float:
    masks, h_b, h_bi = m.arrays
    signs = 1.0 - 2.0 * _par(masks & mask)
    return m.constant + float(signs @ h_b) - float(np.linalg.norm(signs @ h_bi))


def _state_from_mask(m: QuasiModel, mask: int) -> NoncontextualState:
    q = tuple(-1 if (mask >> j) & 1 else 1 for j in range(m.n_generators))
    _, c = coefficients_for_q(m, q)
    return NoncontextualState(q, tuple(optimal_r(c)) if m.n_cliques else ())


def _exhaustive(m: QuasiModel, chunk: int = 1 << 14) -> int:
    masks, h_b, h_bi = m.arrays
    total = 1 << m.n_generators
    best_mask, best_e = 0, math.inf
    for start in range(0, total, chunk):
        qs = np.arange(start, min(total, start + chunk), dtype=np.int64)
        signs = 1.0 - 2.0 * _par(qs[:, None] & masks[None, :])
        energy = signs @ h_b
        if m.n_cliques:
            energy = energy - np.linalg.norm(signs @ h_bi, axis=1)
        k = int(np.argmin(energy))
        if energy[k] < best_e - 1e-12:
            best_e, best_mask = float(energy[k]), int(qs[k])
    return best_mask


def _anneal(m: QuasiModel, cfg: GroundStateConfig) -> int:
    """Single-flip simulated annealing with geometric cooling, then greedy descent."""
    masks, h_b, h_bi = m.arrays
    n_gen = m.n_generators
    if n_gen > 62:
        raise ResourceError(f"{n_gen} generators exceed the 62-bit sign-mask encoding")
    member = [(masks >> j) & 1 == 1 for j in range(n_gen)]
    steps = cfg.steps_per_generator * n_gen
    best_mask, best_e = 0, math.inf
    for child in np.random.SeedSequence(cfg.seed).spawn(cfg.restarts):
        rng = np.random.default_rng(child)
        mask = int(rng.integers(0, 1 << n_gen))
        signs = 1.0 - 2.0 * _par(masks & mask)
        c0 = float(signs @ h_b)
        c = signs @ h_bi
        energy = c0 - float(np.linalg.norm(c))

        def flip_delta(j):
            sel = member[j]
            d0 = -2.0 * float(signs[sel] @ h_b[sel])
            dc = -2.0 * (signs[sel] @ h_bi[sel])
            return d0, dc

        # initial temperature from the typical size of a single-flip move
        probes = [abs(c0 + flip_delta(j)[0] - float(np.linalg.norm(c + flip_delta(j)[1])) - energy)
                  for j in rng.integers(0, n_gen, size=min(50, 5 * n_gen))]
        t0 = max(float(np.mean(probes)), 1e-9)
        decay = cfg.final_temperature_ratio ** (1.0 / max(steps - 1, 1))
        temp = t0
        run_best_mask, run_best_e = mask, energy
        flips = rng.integers(0, n_gen, size=steps)
        uniforms = rng.random(steps)
        for j, u in zip(flips, uniforms):
            d0, dc = flip_delta(j)
            new_e = c0 + d0 - float(np.linalg.norm(c + dc))
            if new_e <= energy or u < math.exp(-(new_e - energy) / temp):
                c0 += d0
                c = c + dc
                signs[member[j]] *= -1.0
                mask ^= 1 << int(j)
                energy = new_e
                if energy < run_best_e:
                    run_best_mask, run_best_e = mask, energy
            temp *= decay
        # steepest single-flip descent from the best point of the run
        mask = run_best_mask
        energy = _energy_of_mask(m, mask) - m.constant
        improved = True
        while improved:
            improved = False
            for j in range(n_gen):
                e = _energy_of_mask(m, mask ^ (1 << j)) - m.constant
                if e < energy - 1e-12:
                    mask, energy, improved = mask ^ (1 << j), e, True
        if energy < best_e - 1e-12:
            best_mask, best_e = mask, energy
    return best_mask


def find_ground_state(m: QuasiModel, cfg: GroundStateConfig | None = None) -> tuple[NoncontextualState, float]:
    """Minimise the objective: exhaustive over ``q`` up to the configured size, annealing beyond it."""
    cfg = cfg or GroundStateConfig()
    if m.n_generators <= cfg.brute_force_limit:
        mask = _exhaustive(m)
    else:
        if cfg.restarts < 1:
            raise ResourceError("annealing needs at least one restart")
        mask = _anneal(m, cfg)
    state = _state_from_mask(m, mask)
    return state, evaluate_objective(m, state)
