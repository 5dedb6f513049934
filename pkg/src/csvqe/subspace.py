"""Restriction to the contextual subspace and the exact constrained eigensolve.

The quantum correction is stood in for by exact linear algebra: the rotated
Hamiltonian is restricted to the stabilised qubits' assigned eigenvalues and
minimised over the +1 eigenspace of the restricted clique operator.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from types import MappingProxyType
from typing import Mapping, Sequence

import numpy as np
import scipy.linalg as sla
from scipy.optimize import minimize

from .errors import DimensionError, InvariantError, ResourceError
from .oracle import OracleConfig, exact_ground_energy
from .pauli import DEFAULT_DENSE_LIMIT, Hamiltonian, PauliOperator, to_dense_matrix
from .quasi_model import NoncontextualState, QuasiModel, evaluate_objective
from .rotations import (
    RotationPlan,
    apply_plan,
    apply_plan_to_pauli,
    diagonalize_generators,
    fix_generator_signs,
    unitary_partitioning,
)

# registers up to this size use dense eigensolvers; larger ones go through scipy.sparse
DENSE_EIG_MAX = 10


def _extract(mask: int, n: int, free: Sequence[int]) -> int:
    out = 0
    for k in free:
        out = (out << 1) | ((mask >> (n - 1 - k)) & 1)
    return out


def restrict_pauli(p: PauliOperator, assignments: Mapping[int, int],
                   free: Sequence[int]) -> tuple[int, PauliOperator] | None:
    """``(p1, P2)`` for a Hermitian Pauli ``p = p1 * P1 (x) P2``, or None if ``p`` flips an assigned qubit."""
    n = p.n
    sign = p.sign
    for k, v in assignments.items():
        bit = 1 << (n - 1 - k)
        if p.x & bit:
            return None
        if p.z & bit and v < 0:
            sign = -sign
    return sign, PauliOperator(len(free), _extract(p.x, n, free), _extract(p.z, n, free))


def _free_qubits(n: int, assignments: Mapping[int, int]) -> tuple[int, ...]:
    for k, v in assignments.items():
        if not 0 <= k < n:
            raise DimensionError(f"assigned qubit {k} out of range for n={n}")
        if v not in (-1, 1):
            raise InvariantError(f"qubit {k} assigned {v}; eigenvalues must be +1 or -1")
    return tuple(k for k in range(n) if k not in assignments)


def restrict(h: Hamiltonian, assignments: Mapping[int, int]) -> tuple[Hamiltonian, float]:
    """Project ``h`` onto fixed Z eigenvalues of the assigned qubits.

    Terms with X or Y on an assigned qubit are dropped; the rest contribute
    ``p1 * h_P`` to their free-qubit factor, with identity factors collected
    into the returned constant (which includes ``h.constant``).
    """
    free = _free_qubits(h.n, assignments)
    acc: dict[PauliOperator, float] = {}
    const = h.constant
    for p, c in h.items():
        found = restrict_pauli(p, assignments, free)
        if found is None:
            continue
        sign, p2 = found
        if p2.is_identity:
            const += sign * c
        else:
            acc[p2] = acc.get(p2, 0.0) + sign * c
    return Hamiltonian(len(free), acc), const


@dataclass(frozen=True)
class CSVQEProblem:
    """Everything needed to evaluate one CS-VQE energy for a chosen set of retained generators."""

    n: int
    retained: tuple[int, ...]
    plan: RotationPlan
    rotated_h: Hamiltonian
    generator_assignments: Mapping[int, int]
    free_qubits: tuple[int, ...]
    restricted_h: Hamiltonian
    a_restricted: Hamiltonian | None
    nc_energy: float
    contextual_term_count: int = 0
    contextual_source_count: int = 0
    meta: dict = field(default_factory=dict, compare=False, repr=False)

    @property
    def n_free(self) -> int:
        return len(self.free_qubits)

    @property
    def restricted_term_count(self) -> int:
        return len(self.restricted_h)

    def to_dict(self) -> dict:
        return {
            "n": self.n,
            "retained": list(self.retained),
            "plan": self.plan.to_dict(),
            "generator_assignments": {str(k): v for k, v in sorted(self.generator_assignments.items())},
            "free_qubits": list(self.free_qubits),
            "restricted_h": {"terms": self.restricted_h.to_labels(), "constant": self.restricted_h.constant},
            "a_restricted": None if self.a_restricted is None else self.a_restricted.to_labels(),
            "nc_energy": self.nc_energy,
            "restricted_term_count": self.restricted_term_count,
            "contextual_term_count": self.contextual_term_count,
        }


def clique_operator(model: QuasiModel, state: NoncontextualState) -> Hamiltonian:
    """``sum_i r_i A_i`` as a Hamiltonian."""
    return Hamiltonian(model.n, list(zip(model.clique_reps, state.r)))


def build_problem(h: Hamiltonian, model: QuasiModel, state: NoncontextualState,
                  retained: Sequence[int] | None = None, *,
                  constrain_at_endpoint: bool = False) -> CSVQEProblem:
    """Rotate, fix the retained generators' values and restrict ``h`` and the clique operator.

    ``retained`` defaults to every generator.  The clique constraint is kept
    whenever at least one generator is retained; with none retained it is
    dropped (recovering the full problem) unless ``constrain_at_endpoint``.
    """
    if h.n != model.n:
        raise DimensionError(f"Hamiltonian on {h.n} qubits, model on {model.n}")
    if retained is None:
        retained = range(model.n_generators)
    retained = tuple(sorted(set(int(j) for j in retained)))
    if any(not 0 <= j < model.n_generators for j in retained):
        raise InvariantError(f"retained indices {retained} outside 0..{model.n_generators - 1}")
    if len(state.q) != model.n_generators or len(state.r) != model.n_cliques:
        raise DimensionError("noncontextual state does not match the model")

    plan = diagonalize_generators([model.generators[j] for j in retained], n=h.n)
    rotated = apply_plan(h, plan)
    assignments = fix_generator_signs(plan, [state.q[j] for j in retained])
    free = _free_qubits(h.n, assignments)
    h2, const = restrict(rotated, assignments)
    restricted_h = Hamiltonian(len(free), h2.terms, const)

    a_restricted = None
    if model.n_cliques and (retained or constrain_at_endpoint):
        a2, a_const = restrict(apply_plan(clique_operator(model, state), plan), assignments)
        if len(a2) == 0:
            raise InvariantError("clique operator restricts to a constant")
        a_restricted = Hamiltonian(len(free), a2.terms, a_const)

    # terms outside the still-noncontextual part: contextual ones, those migrated by removal,
    # and clique terms once the constraint is dropped
    keep = set(retained)
    quantum_terms = []
    for p in h:
        found = model.locate(p) if model.decomposition is not None and p in model.decomposition.nc_terms else None
        if found is None or not set(found[1]) <= keep or (found[2] is not None and a_restricted is None):
            quantum_terms.append(p)
    surviving = set()
    for p in quantum_terms:
        image = restrict_pauli(apply_plan_to_pauli(p, plan), assignments, free)
        if image is not None and not image[1].is_identity:
            surviving.add(image[1])

    return CSVQEProblem(
        n=h.n,
        retained=retained,
        plan=plan,
        rotated_h=rotated,
        generator_assignments=MappingProxyType(dict(assignments)),
        free_qubits=free,
        restricted_h=restricted_h,
        a_restricted=a_restricted,
        nc_energy=evaluate_objective(model, state),
        contextual_term_count=len(surviving),
        contextual_source_count=len(quantum_terms),
    )


def _min_eigenvalue(h: Hamiltonian, dense_limit: int) -> float:
    return exact_ground_energy(h, OracleConfig(dense_limit=dense_limit))


def constrained_basis(a: Hamiltonian, dense_limit: int = DEFAULT_DENSE_LIMIT) -> np.ndarray:
    """Orthonormal columns spanning the +1 eigenspace of a unit clique operator."""
    am = to_dense_matrix(a, dense_limit)
    w, v = sla.eigh(am)
    if np.max(np.abs(np.abs(w) - 1.0)) > 1e-8:
        raise InvariantError("clique operator does not square to the identity")
    basis = v[:, w > 0]
    if 2 * basis.shape[1] != am.shape[0]:
        raise InvariantError(f"+1 eigenspace has dimension {basis.shape[1]}, expected {am.shape[0] // 2}")
    return basis


def _solve_projected(p: CSVQEProblem, dense_limit: int) -> float:
    hm = to_dense_matrix(p.restricted_h, dense_limit)
    basis = constrained_basis(p.a_restricted, dense_limit)
    return float(sla.eigvalsh(basis.conj().T @ hm @ basis)[0])


def _solve_rotated(p: CSVQEProblem, dense_limit: int) -> float:
    """Collapse the clique operator onto one Pauli, send it to a single Z, and fix that qubit to +1."""
    a = p.a_restricted
    ops = [op for op, _ in a.sorted_items()]
    coeffs = [a.terms[op] for op in ops]
    partition = unitary_partitioning(ops, coeffs)
    # a lone term keeps its sign through the (empty) partitioning
    lead = 1 if len(ops) > 1 or coeffs[0] > 0 else -1
    h = apply_plan(p.restricted_h, partition)
    diag = diagonalize_generators([ops[0]])
    h = apply_plan(h, diag)
    target = diag.target_map[0]
    h2, const = restrict(h, {target.qubit: lead * target.sign})
    reduced = Hamiltonian(h2.n, h2.terms, const)
    if reduced.n == 0:
        return reduced.constant
    return _min_eigenvalue(reduced, dense_limit)


def solve(p: CSVQEProblem, dense_limit: int = DEFAULT_DENSE_LIMIT, method: str = "auto") -> float:
    """Lowest energy of the restricted Hamiltonian inside the contextual subspace.

    ``method`` is ``"project"`` (eigenbasis projection), ``"rotate"`` (unitary
    partitioning followed by one more fixed qubit) or ``"auto"``.
    """
    if p.n_free > dense_limit:
        raise ResourceError(f"{p.n_free} free qubits exceeds the dense limit of {dense_limit}")
    if p.n_free == 0:
        return p.restricted_h.constant
    if p.a_restricted is None:
        return _min_eigenvalue(p.restricted_h, dense_limit)
    if method == "auto":
        method = "project" if p.n_free <= DENSE_EIG_MAX else "rotate"
    if method == "project":
        return _solve_projected(p, dense_limit)
    if method == "rotate":
        return _solve_rotated(p, dense_limit)
    raise ValueError(f"unknown solve method {method!r}")


@dataclass(frozen=True)
class Witness:
    """Subspace state with vanishing contextual expectations.

    ``restricted_state`` has shape ``(2**n_free, rank)``: column ``k`` is the
    system component paired with ancilla basis state ``k`` of a purification,
    so ``rank == 1`` is a pure state and the density matrix is ``S S^dagger``.
    """

    restricted_state: np.ndarray
    full_state: np.ndarray | None
    objective: float
    n_constrained_terms: int

    @property
    def rank(self) -> int:
        return self.restricted_state.shape[1]

    def density(self) -> np.ndarray:
        s = self.restricted_state
        return s @ s.conj().T

    def full_density(self) -> np.ndarray | None:
        if self.full_state is None:
            return None
        return self.full_state @ self.full_state.conj().T


def _embed(p: CSVQEProblem, psi2: np.ndarray) -> np.ndarray:
    """Lift free-register columns to the full register and undo the Clifford plan."""
    n = p.n
    fixed = 0
    for k, v in p.generator_assignments.items():
        if v < 0:
            fixed |= 1 << (n - 1 - k)
    full = np.zeros((1 << n, psi2.shape[1]), dtype=complex)
    for idx in range(psi2.shape[0]):
        j = fixed
        for pos, k in enumerate(p.free_qubits):
            if (idx >> (p.n_free - 1 - pos)) & 1:
                j |= 1 << (n - 1 - k)
        full[j] = psi2[idx]
    return p.plan.unitary().conj().T @ full


def contextual_operators(p: CSVQEProblem, s_c: Sequence[PauliOperator],
                         dense_limit: int = DEFAULT_DENSE_LIMIT) -> list[np.ndarray]:
    """Free-register matrices of the ``s_c`` terms that survive restriction."""
    mats = []
    for op in s_c:
        image = restrict_pauli(apply_plan_to_pauli(op, p.plan), p.generator_assignments, p.free_qubits)
        if image is None:
            continue  # anticommutes with a stabiliser: zero in every subspace state
        sign, p2 = image
        mats.append(sign * to_dense_matrix(p2, dense_limit))
    return mats


def zero_expectation_witness(p: CSVQEProblem, s_c: Sequence[PauliOperator], *, restarts: int = 10,
                             seed: int = 0, tol: float = 1e-8, pure: bool = False,
                             dense_limit: int = DEFAULT_DENSE_LIMIT) -> Witness:
    """Find a contextual-subspace state in which every operator of ``s_c`` has zero expectation.

    Minimises ``sum_P <P>^2`` with BFGS from random starts.  By default the
    search runs over purifications (system times an ancilla of the subspace's
    dimension), i.e. over all density matrices supported on the subspace; with
    ``pure=True`` it is restricted to pure states, where a joint zero need not
    exist.  Raises ``ResourceError`` if no start reaches ``tol``.
    """
    if p.n > dense_limit:
        raise ResourceError(f"{p.n} qubits exceeds the dense limit of {dense_limit}")
    dim = 1 << p.n_free
    basis = constrained_basis(p.a_restricted, dense_limit) if p.a_restricted is not None else np.eye(dim)
    mats = [basis.conj().T @ m @ basis for m in contextual_operators(p, s_c, dense_limit)]
    d = basis.shape[1]
    rank = 1 if pure else d
    size = d * rank

    def unpack(x):
        return (x[:size] + 1j * x[size:]).reshape(d, rank)

    def fun(x):
        c = unpack(x)
        norm = np.vdot(c, c).real
        f, g = 0.0, np.zeros((d, rank), dtype=complex)
        for m in mats:
            mc = m @ c
            e = np.vdot(c, mc).real / norm
            f += e * e
            g += 2.0 * e * (mc - e * c) / norm
        g = g.ravel()
        return f, 2.0 * np.concatenate([g.real, g.imag])

    rng = np.random.default_rng(seed)
    best = None
    for _ in range(max(restarts, 1)):
        x0 = rng.normal(size=2 * size)
        if not mats:
            res_x, res_f = x0, 0.0
        else:
            res = minimize(fun, x0, jac=True, method="BFGS", options={"gtol": 1e-14, "maxiter": 2000})
            res_x, res_f = res.x, float(res.fun)
        if best is None or res_f < best[1]:
            best = (res_x, res_f)
        if best[1] < tol:
            break
    c = unpack(best[0])
    c /= np.linalg.norm(c)
    if best[1] >= tol:
        raise ResourceError(f"witness search stalled at objective {best[1]:.3e} (>= {tol:g}); retry with more restarts")
    psi2 = basis @ c
    full = _embed(p, psi2) if p.n <= DENSE_EIG_MAX else None
    return Witness(psi2, full, best[1], len(mats))
