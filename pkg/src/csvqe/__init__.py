"""Contextual-subspace VQE with the quantum correction computed by exact constrained eigensolving."""
from .contextuality import (
    NoncontextualDecomposition,
    closure_under_inference,
    decompose,
    greedy_noncontextual_subset,
    is_noncontextual,
)
from .errors import ContextualityError, CSVQEError, DimensionError, InvariantError, ModelError, ParseError, ResourceError
from .heuristics import SweepContext, SweepRecord, SweepResult, greedy_pair_sweep, optimal_sweep, remove_generators, weight_sweep
from .pauli import Hamiltonian, PauliOperator, RotationStep, StepKind, commutes, multiply, to_dense_matrix
from .pipeline import ClassicalSolution, solve_classical
from .quasi_model import GroundStateConfig, NoncontextualState, QuasiModel, build_model, evaluate_objective, find_ground_state
from .rotations import RotationPlan, apply_plan, diagonalize_generators, fix_generator_signs, unitary_partitioning
from .subspace import CSVQEProblem, build_problem, restrict, solve, zero_expectation_witness

__version__ = "0.1.0"
