"""End-to-end classical stage: decomposition, quasi-quantized model and its ground state."""
from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable

from .contextuality import NoncontextualDecomposition, decompose, greedy_noncontextual_subset
from .pauli import Hamiltonian, PauliOperator
from .quasi_model import GroundStateConfig, NoncontextualState, QuasiModel, build_model, find_ground_state


@dataclass(frozen=True)
class ClassicalSolution:
    hamiltonian: Hamiltonian
    decomposition: NoncontextualDecomposition
    model: QuasiModel
    state: NoncontextualState
    nc_energy: float

    def to_dict(self) -> dict:
        return {
            "decomposition": self.decomposition.to_dict(),
            "model": self.model.to_dict(),
            "state": self.state.to_dict(),
            "nc_energy": self.nc_energy,
        }


def solve_classical(h: Hamiltonian, nc_terms: Iterable[PauliOperator] | None = None,
                    cfg: GroundStateConfig | None = None) -> ClassicalSolution:
    """Split ``h`` (greedily unless ``nc_terms`` is given), build the model and minimise it."""
    if nc_terms is None:
        d = greedy_noncontextual_subset(h)
    else:
        nc = {p.unsigned() for p in nc_terms}
        d = decompose(nc, source=h, contextual_terms=[p for p in h if p not in nc])
    d.check()
    m = build_model(d)
    state, energy = find_ground_state(m, cfg)
    return ClassicalSolution(h, d, m, state, energy)
