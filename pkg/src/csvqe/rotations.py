"""Rotation plans: Clifford diagonalisation of commuting generators and unitary partitioning."""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Mapping, Sequence

import numpy as np

from .errors import DimensionError, InvariantError
from .gf2 import SymplecticBasis, symplectic_int
from .pauli import (
    Hamiltonian,
    PauliOperator,
    RotationStep,
    StepKind,
    commutes,
    conjugate_by_rotation,
    multiply,
)


@dataclass(frozen=True)
class TargetEntry:
    source: PauliOperator
    target: PauliOperator  # signed single-qubit Z
    qubit: int

    @property
    def sign(self) -> int:
        return self.target.sign

    def to_dict(self) -> dict:
        return {"source": self.source.label, "target": str(self.target), "qubit": self.qubit}


@dataclass(frozen=True)
class RotationPlan:
    """Ordered rotations; the overall unitary is ``U = U_last ... U_first``."""

    n: int
    steps: tuple[RotationStep, ...] = ()
    target_map: tuple[TargetEntry, ...] = ()

    def __len__(self) -> int:
        return len(self.steps)

    @property
    def is_clifford(self) -> bool:
        return all(s.kind is StepKind.CLIFFORD for s in self.steps)

    @property
    def qubits(self) -> tuple[int, ...]:
        return tuple(t.qubit for t in self.target_map)

    def inverse(self) -> "RotationPlan":
        return RotationPlan(self.n, tuple(s.inverse() for s in reversed(self.steps)))

    def unitary(self) -> np.ndarray:
        u = np.eye(1 << self.n, dtype=complex)
        for s in self.steps:
            u = s.matrix() @ u
        return u

    def to_dict(self) -> dict:
        return {
            "n": self.n,
            "steps": [s.to_dict() for s in self.steps],
            "target_map": [t.to_dict() for t in self.target_map],
        }

    @classmethod
    def from_dict(cls, d: Mapping) -> "RotationPlan":
        def signed(label: str) -> PauliOperator:
            return PauliOperator.from_label(label[1:], 2) if label.startswith("-") else PauliOperator.from_label(label)

        return cls(
            int(d["n"]),
            tuple(RotationStep.from_dict(s) for s in d["steps"]),
            tuple(TargetEntry(PauliOperator.from_label(t["source"]), signed(t["target"]), int(t["qubit"]))
                  for t in d.get("target_map", ())),
        )


def conjugate_signed(p: PauliOperator, step: RotationStep) -> PauliOperator:
    """Image of a signed Hermitian Pauli under a Clifford quarter-turn."""
    if step.kind is not StepKind.CLIFFORD:
        raise InvariantError("only quarter-turns map Paulis to single Paulis")
    if commutes(p, step.generator):
        return p
    prod = multiply(step.generator, p)
    return PauliOperator(prod.n, prod.x, prod.z, (prod.phase_exp + 1) % 4)


def apply_plan(h: Hamiltonian, plan: RotationPlan) -> Hamiltonian:
    """Conjugate ``h`` by every step of ``plan`` in order."""
    if h.n != plan.n:
        raise DimensionError(f"plan acts on {plan.n} qubits, Hamiltonian on {h.n}")
    for step in plan.steps:
        h = conjugate_by_rotation(h, step)
    return h


def apply_plan_to_pauli(p: PauliOperator, plan: RotationPlan) -> PauliOperator:
    """Signed image of a single Pauli under a Clifford plan."""
    if p.n != plan.n:
        raise DimensionError(f"plan acts on {plan.n} qubits, operator on {p.n}")
    for step in plan.steps:
        p = conjugate_signed(p, step)
    return p


def _flip_xy(p: PauliOperator, qubit: int) -> PauliOperator:
    bit = 1 << (p.n - 1 - qubit)
    return PauliOperator(p.n, p.x, p.z ^ bit, 0)


def _check_commuting_independent(gens: Sequence[PauliOperator]) -> None:
    basis = SymplecticBasis()
    for i, g in enumerate(gens):
        if not g.is_hermitian or g.is_identity:
            raise InvariantError(f"generator {g} must be a non-identity Hermitian Pauli")
        for h in gens[:i]:
            if h.n != g.n:
                raise DimensionError("generators act on different qubit counts")
            if not commutes(g, h):
                raise InvariantError(f"generators {h} and {g} anticommute")
        if not basis.add(symplectic_int(g)):
            raise InvariantError(f"generator {g} depends on earlier generators")


def diagonalize_generators(gens: Sequence[PauliOperator], n: int | None = None) -> RotationPlan:
    """Quarter-turn sequence sending each generator to a distinct single-qubit Z.

    Signs are ignored: ``target_map`` records the signed image of each
    generator's phase-free form.

    Off-diagonal generators take one turn about a Pauli that differs from the
    current image only at its first X/Y position (X and Y swapped).  Diagonal
    generators that are not already a single Z first take a Y turn on the
    lowest qubit where they have Z and no earlier target sits.  Earlier targets
    commute with every later turn, so they are never disturbed.
    """
    gens = list(gens)
    if n is None:
        if not gens:
            raise DimensionError("qubit count needed for an empty generator list")
        n = gens[0].n
    if any(g.n != n for g in gens):
        raise DimensionError(f"generators must act on {n} qubits")
    _check_commuting_independent(gens)
    steps: list[RotationStep] = []
    targets: list[TargetEntry] = []
    used: set[int] = set()
    for g in gens:
        g = g.unsigned()
        image = apply_plan_to_pauli(g, RotationPlan(n, tuple(steps)))
        if image.is_diagonal and image.weight == 1:
            qubit = image.support[0]
        else:
            if image.is_diagonal:
                m = next(k for k in image.support if k not in used)
                turn = RotationStep.quarter_turn(PauliOperator.single(n, m, "Y"))
                steps.append(turn)
                image = conjugate_signed(image, turn)
            first = next(k for k in range(n) if image.letter(k) in "XY")
            turn = RotationStep.quarter_turn(_flip_xy(image.unsigned(), first))
            steps.append(turn)
            image = conjugate_signed(image, turn)
            qubit = first
        if not (image.is_diagonal and image.weight == 1 and image.support == (qubit,)) or qubit in used:
            raise InvariantError(f"failed to map {g} to a fresh single-qubit Z (got {image})")
        used.add(qubit)
        targets.append(TargetEntry(g, image, qubit))
    return RotationPlan(n, tuple(steps), tuple(targets))


def unitary_partitioning(clique_reps: Sequence[PauliOperator], r: Sequence[float]) -> RotationPlan:
    """Continuous rotations collapsing ``sum_i r_i A_i`` onto ``A_1``.

    Coefficient ``i`` (from last to second) is rotated into coefficient 1 by a
    turn generated by ``i A_i A_1``, which commutes with every other ``A_k``.
    """
    reps = list(clique_reps)
    if not reps:
        raise InvariantError("unitary partitioning needs at least one operator")
    if len(r) != len(reps):
        raise DimensionError(f"{len(r)} coefficients for {len(reps)} operators")
    if abs(math.fsum(v * v for v in r) - 1.0) > 1e-10:
        raise InvariantError("coefficient vector must have unit norm")
    n = reps[0].n
    for i, a in enumerate(reps):
        for b in reps[i + 1:]:
            if commutes(a, b):
                raise InvariantError(f"{a} and {b} commute; representatives must pairwise anticommute")
    coeffs = [float(v) for v in r]
    steps = []
    for i in range(len(reps) - 1, 0, -1):
        theta = math.atan2(coeffs[i], coeffs[0])
        prod = multiply(reps[i], reps[0])
        gen = PauliOperator(n, prod.x, prod.z, (prod.phase_exp + 1) % 4)
        steps.append(RotationStep.continuous(gen.unsigned(), theta * gen.sign))
        coeffs[0] = math.hypot(coeffs[0], coeffs[i])
        coeffs[i] = 0.0
    return RotationPlan(n, tuple(steps))


def fix_generator_signs(plan: RotationPlan, q: Sequence[int]) -> dict[int, int]:
    """Eigenvalue of each stabilised qubit's Z: rotation sign times the generator value."""
    if len(q) != len(plan.target_map):
        raise DimensionError(f"{len(q)} values for {len(plan.target_map)} generators")
    return {t.qubit: t.sign * int(v) for t, v in zip(plan.target_map, q)}
