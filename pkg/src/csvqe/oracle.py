"""Brute-force reference computations used to cross-check the fast paths."""
from __future__ import annotations

import itertools
import math
from dataclasses import dataclass
from typing import Iterable

import numpy as np
import scipy.linalg as sla
import scipy.sparse.linalg as spla

from .errors import ResourceError
from .pauli import DEFAULT_DENSE_LIMIT, Hamiltonian, PauliOperator, commutes, multiply, to_dense_matrix, to_sparse_matrix
from .quasi_model import NoncontextualState, QuasiModel

_SPARSE_FROM = 11


@dataclass(frozen=True)
class OracleConfig:
    dense_limit: int = DEFAULT_DENSE_LIMIT
    assignment_limit: int = 24
    q_limit: int = 18

    def __post_init__(self):
        if min(self.dense_limit, self.assignment_limit, self.q_limit) <= 0:
            raise ValueError("oracle limits must be positive")


def exact_ground_energy(h: Hamiltonian, cfg: OracleConfig | None = None) -> float:
    """Minimum eigenvalue of ``h``; dense below 11 qubits, Lanczos (ARPACK) above."""
    cfg = cfg or OracleConfig()
    if h.n > cfg.dense_limit:
        raise ResourceError(f"{h.n} qubits exceeds the dense limit of {cfg.dense_limit}")
    if h.n == 0 or len(h) == 0:
        return h.constant
    if h.n < _SPARSE_FROM:
        return float(sla.eigvalsh(to_dense_matrix(h, cfg.dense_limit))[0])
    vals = spla.eigsh(to_sparse_matrix(h), k=1, which="SA", tol=1e-12, return_eigenvectors=False)
    return float(vals[0])


def brute_force_noncontextual(ops: Iterable[PauliOperator], cfg: OracleConfig | None = None) -> bool:
    """Exhaustive search for a +-1 assignment respecting every inference in the closure.

    Every member of the closure is reached from the input set by a chain of
    products of commuting pairs, so its value is forced once the inputs are
    assigned.  All ``2**|S|`` input assignments are processed at once: each
    closure member carries a bit set (a Python int) whose bit ``a`` is its
    value under assignment ``a`` (1 meaning -1); every commuting pair then
    prunes the assignments that violate its product relation.
    """
    cfg = cfg or OracleConfig()
    members = sorted({p.unsigned() for p in ops if not p.is_identity}, key=lambda p: p.label)
    k = len(members)
    if k > cfg.assignment_limit:
        raise ResourceError(f"{k} operators exceeds the assignment limit of {cfg.assignment_limit}")
    if k <= 2:
        return True
    n_assign = 1 << k
    everything = (1 << n_assign) - 1
    values: dict[PauliOperator, int] = {}
    for j, p in enumerate(members):
        # bit a is set iff bit j of a is set: blocks of 2**j zeros then 2**j ones
        s = 1 << j
        values[p] = (((1 << s) - 1) << s) * (everything // ((1 << (2 * s)) - 1))
    ordered = list(members)
    feasible = everything
    i = 0
    while i < len(ordered):
        a = ordered[i]
        for b in ordered[:i]:
            if not commutes(a, b):
                continue
            prod = multiply(a, b)
            c = prod.unsigned()
            implied = values[a] ^ values[b] ^ (everything if prod.phase_exp == 2 else 0)
            if c not in values:
                values[c] = implied
                ordered.append(c)
                if len(ordered) * n_assign > 8 << 30:
                    raise ResourceError("inference closure too large for exhaustive search")
            else:
                feasible &= ~(values[c] ^ implied)
                if not feasible:
                    return False
        i += 1
    return feasible != 0


def brute_force_nc_ground(m: QuasiModel, cfg: OracleConfig | None = None) -> tuple[NoncontextualState, float]:
    """Enumerate every ``q`` and take the best unit ``r`` for each, term by term."""
    cfg = cfg or OracleConfig()
    if m.n_generators > cfg.q_limit:
        raise ResourceError(f"{m.n_generators} generators exceeds the exhaustive limit of {cfg.q_limit}")
    best_q, best_r, best_e = None, None, math.inf
    for q in itertools.product((1, -1), repeat=m.n_generators):
        c0 = m.constant
        c = [0.0] * m.n_cliques
        for t in m.obj_terms:
            parity = math.prod(q[j] for j in t.indices)
            c0 += t.h_b * parity
            for i, w in enumerate(t.h_bi):
                c[i] += w * parity
        norm = math.sqrt(math.fsum(v * v for v in c))
        energy = c0 - norm
        if energy < best_e - 1e-12:
            best_e = energy
            best_q = q
            if norm > 0:
                best_r = tuple(-v / norm for v in c)
            else:
                best_r = tuple(1.0 if i == 0 else 0.0 for i in range(m.n_cliques))
    return NoncontextualState(best_q, best_r), best_e


def dense_expectation(h: Hamiltonian | PauliOperator, psi: np.ndarray) -> float:
    m = to_dense_matrix(h, dense_limit=h.n)
    return float(np.real(np.vdot(psi, m @ psi)))
