"""Symplectic Pauli algebra and real-coefficient Pauli Hamiltonians.

A Pauli operator on ``n`` qubits is stored as two integer bit masks ``x`` and
``z`` plus a phase exponent ``k`` so that the operator equals ``i**k`` times
the tensor product of single-qubit letters, where ``(x, z) = (1, 0)`` is X,
``(1, 1)`` is Y and ``(0, 1)`` is Z.  Qubit 0 is the leftmost letter of the
string form and occupies the most significant bit, which makes the integer
masks line up with computational-basis indices of Kronecker-product matrices.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from enum import Enum
from types import MappingProxyType
from typing import Iterable, Iterator, Mapping

import numpy as np
import scipy.sparse as sp

from .errors import DimensionError, InvariantError, ParseError, ResourceError

PRUNE_TOL = 1e-12
DEFAULT_DENSE_LIMIT = 14

_LETTER_BITS = {"I": (0, 0), "X": (1, 0), "Y": (1, 1), "Z": (0, 1)}
_BITS_LETTER = {v: k for k, v in _LETTER_BITS.items()}
_PHASE_PREFIX = {0: "", 1: "i", 2: "-", 3: "-i"}


def _popcount(v: int) -> int:
    return bin(v).count("1")


@dataclass(frozen=True, slots=True)
class PauliOperator:
    """``i**phase_exp`` times a tensor product of I, X, Y, Z letters."""

    n: int
    x: int
    z: int
    phase_exp: int = 0

    def __post_init__(self):
        for name in ("n", "x", "z", "phase_exp"):
            value = getattr(self, name)
            if type(value) is not int:
                object.__setattr__(self, name, int(value))
        if self.n < 0:
            raise DimensionError("qubit count must be non-negative")
        limit = 1 << self.n
        if not (0 <= self.x < limit and 0 <= self.z < limit):
            raise DimensionError(f"bit masks do not fit in {self.n} qubits")
        if not 0 <= self.phase_exp < 4:
            object.__setattr__(self, "phase_exp", self.phase_exp % 4)

    @classmethod
    def from_label(cls, label: str, phase_exp: int = 0) -> "PauliOperator":
        """Parse a string such as ``"IZX"``.  Only the letters I, X, Y, Z are accepted."""
        x = z = 0
        for ch in label:
            try:
                bx, bz = _LETTER_BITS[ch]
            except KeyError:
                raise ParseError(f"invalid Pauli letter {ch!r} in {label!r}") from None
            x = (x << 1) | bx
            z = (z << 1) | bz
        return cls(len(label), x, z, phase_exp)

    @classmethod
    def identity(cls, n: int) -> "PauliOperator":
        return cls(n, 0, 0, 0)

    @classmethod
    def single(cls, n: int, qubit: int, letter: str) -> "PauliOperator":
        """The operator with ``letter`` on ``qubit`` and identity elsewhere."""
        if not 0 <= qubit < n:
            raise DimensionError(f"qubit {qubit} out of range for n={n}")
        bx, bz = _LETTER_BITS[letter]
        bit = 1 << (n - 1 - qubit)
        return cls(n, bit * bx, bit * bz)

    def _bit(self, qubit: int) -> int:
        return 1 << (self.n - 1 - qubit)

    def letter(self, qubit: int) -> str:
        b = self._bit(qubit)
        return _BITS_LETTER[(int(bool(self.x & b)), int(bool(self.z & b)))]

    @property
    def label(self) -> str:
        """String form without the phase prefix."""
        return "".join(self.letter(k) for k in range(self.n))

    @property
    def x_bits(self) -> tuple[int, ...]:
        return tuple(int(bool(self.x & self._bit(k))) for k in range(self.n))

    @property
    def z_bits(self) -> tuple[int, ...]:
        return tuple(int(bool(self.z & self._bit(k))) for k in range(self.n))

    @property
    def is_hermitian(self) -> bool:
        return self.phase_exp in (0, 2)

    @property
    def is_identity(self) -> bool:
        return self.x == 0 and self.z == 0

    @property
    def is_diagonal(self) -> bool:
        return self.x == 0

    @property
    def sign(self) -> int:
        """+1 or -1 for a Hermitian operator."""
        if not self.is_hermitian:
            raise InvariantError(f"{self} is not Hermitian")
        return 1 if self.phase_exp == 0 else -1

    @property
    def support(self) -> tuple[int, ...]:
        return tuple(k for k in range(self.n) if (self.x | self.z) & self._bit(k))

    @property
    def weight(self) -> int:
        return _popcount(self.x | self.z)

    def unsigned(self) -> "PauliOperator":
        """The same letters with phase exponent 0."""
        if self.phase_exp == 0:
            return self
        return PauliOperator(self.n, self.x, self.z, 0)

    def symplectic(self) -> np.ndarray:
        """Length-2n 0/1 vector ``(x_0..x_{n-1}, z_0..z_{n-1})``."""
        return np.array(self.x_bits + self.z_bits, dtype=np.uint8)

    def __mul__(self, other: "PauliOperator") -> "PauliOperator":
        return multiply(self, other)

    def __neg__(self) -> "PauliOperator":
        return PauliOperator(self.n, self.x, self.z, (self.phase_exp + 2) % 4)

    def __str__(self) -> str:
        return _PHASE_PREFIX[self.phase_exp] + self.label

    def __repr__(self) -> str:
        return f"PauliOperator({str(self)!r})"


def _check_same_n(a: PauliOperator, b: PauliOperator) -> None:
    if a.n != b.n:
        raise DimensionError(f"qubit counts differ: {a.n} vs {b.n}")


def multiply(a: PauliOperator, b: PauliOperator) -> PauliOperator:
    """Exact product ``a @ b`` including the global phase."""
    _check_same_n(a, b)
    x, z = a.x ^ b.x, a.z ^ b.z
    # Y = i X Z, and Z^z1 X^x2 = (-1)^{z1.x2} X^x2 Z^z1.
    k = (a.phase_exp + b.phase_exp + _popcount(a.x & a.z) + _popcount(b.x & b.z)
         + 2 * _popcount(a.z & b.x) - _popcount(x & z))
    return PauliOperator(a.n, x, z, k % 4)


def commutes(a: PauliOperator, b: PauliOperator) -> bool:
    """True iff the symplectic inner product of ``a`` and ``b`` vanishes mod 2."""
    _check_same_n(a, b)
    return _popcount((a.x & b.z) ^ (a.z & b.x)) % 2 == 0


def _as_operator(key, n: int | None) -> PauliOperator:
    if isinstance(key, PauliOperator):
        op = key
    elif isinstance(key, str):
        op = PauliOperator.from_label(key)
    else:
        raise TypeError(f"cannot interpret {key!r} as a Pauli operator")
    if n is not None and op.n != n:
        raise DimensionError(f"term {op} acts on {op.n} qubits, expected {n}")
    return op


class Hamiltonian:
    """Real linear combination of phase-free Pauli operators plus a constant.

    Signed keys are normalised on construction: a key with phase ``-1`` has its
    coefficient negated, identity keys are folded into :attr:`constant`, and
    coefficients with magnitude below ``1e-12`` are dropped.  Instances are
    treated as immutable.
    """

    __slots__ = ("n", "_terms", "constant")

    def __init__(self, n: int, terms: Mapping | Iterable | None = None, constant: float = 0.0):
        self.n = int(n)
        acc: dict[PauliOperator, float] = {}
        const = float(constant)
        items = terms.items() if isinstance(terms, Mapping) else (terms or ())
        for key, coeff in items:
            op = _as_operator(key, self.n)
            coeff = float(coeff)
            if not op.is_hermitian:
                raise InvariantError(f"term {op} is not Hermitian; coefficients must be real")
            coeff *= op.sign
            if op.is_identity:
                const += coeff
                continue
            op = op.unsigned()
            acc[op] = acc.get(op, 0.0) + coeff
        self._terms = MappingProxyType({p: c for p, c in acc.items() if abs(c) > PRUNE_TOL})
        self.constant = const

    @classmethod
    def from_labels(cls, terms: Mapping[str, float], constant: float = 0.0, n: int | None = None) -> "Hamiltonian":
        if n is None:
            if not terms:
                raise DimensionError("cannot infer qubit count from an empty term map")
            n = len(next(iter(terms)))
        return cls(n, terms, constant)

    @property
    def terms(self) -> Mapping[PauliOperator, float]:
        return self._terms

    def __len__(self) -> int:
        return len(self._terms)

    def __iter__(self) -> Iterator[PauliOperator]:
        return iter(self._terms)

    def __contains__(self, op: PauliOperator) -> bool:
        return op in self._terms

    def items(self):
        return self._terms.items()

    def coefficient(self, op: PauliOperator | str) -> float:
        return self._terms.get(_as_operator(op, self.n).unsigned(), 0.0)

    def sorted_items(self) -> list[tuple[PauliOperator, float]]:
        """Terms ordered lexicographically by Pauli string."""
        return sorted(self._terms.items(), key=lambda kv: kv[0].label)

    def to_labels(self) -> dict[str, float]:
        return {p.label: c for p, c in self.sorted_items()}

    def subset(self, ops: Iterable[PauliOperator], with_constant: bool = False) -> "Hamiltonian":
        """The sub-Hamiltonian made of the given (phase-free) terms."""
        return Hamiltonian(self.n, {p: self._terms[p] for p in ops if p in self._terms},
                           self.constant if with_constant else 0.0)

    def __add__(self, other: "Hamiltonian") -> "Hamiltonian":
        if other.n != self.n:
            raise DimensionError(f"qubit counts differ: {self.n} vs {other.n}")
        return Hamiltonian(self.n, list(self.items()) + list(other.items()), self.constant + other.constant)

    def __mul__(self, scalar: float) -> "Hamiltonian":
        return Hamiltonian(self.n, {p: c * scalar for p, c in self.items()}, self.constant * scalar)

    __rmul__ = __mul__

    def __sub__(self, other: "Hamiltonian") -> "Hamiltonian":
        return self + other * -1.0

    def allclose(self, other: "Hamiltonian", atol: float = 1e-10) -> bool:
        if other.n != self.n or abs(self.constant - other.constant) > atol:
            return False
        keys = set(self._terms) | set(other._terms)
        return all(abs(self.coefficient(k) - other.coefficient(k)) <= atol for k in keys)

    def __eq__(self, other) -> bool:
        if not isinstance(other, Hamiltonian):
            return NotImplemented
        return self.n == other.n and self.constant == other.constant and dict(self._terms) == dict(other._terms)

    def __hash__(self):
        return hash((self.n, self.constant, frozenset(self._terms.items())))

    def __repr__(self) -> str:
        body = ", ".join(f"{p.label}: {c:.6g}" for p, c in self.sorted_items())
        return f"Hamiltonian(n={self.n}, {{{body}}}, constant={self.constant:.6g})"


class StepKind(Enum):
    CLIFFORD = "clifford"
    CONTINUOUS = "continuous"


@dataclass(frozen=True)
class RotationStep:
    """Conjugation by ``exp(i * angle/2 * generator)``.

    A Clifford quarter-turn has angle pi/2 and maps an anticommuting Pauli ``Q``
    to ``i * generator * Q`` exactly; a continuous step maps it to
    ``cos(angle) Q + sin(angle) i generator Q``.
    """

    generator: PauliOperator
    kind: StepKind = StepKind.CLIFFORD
    angle: float = math.pi / 2

    def __post_init__(self):
        if self.generator.phase_exp != 0:
            raise InvariantError("rotation generators must be phase-free Paulis")
        if self.kind is StepKind.CLIFFORD and self.angle != math.pi / 2:
            raise InvariantError("Clifford quarter-turns have a fixed angle of pi/2")

    @classmethod
    def quarter_turn(cls, generator: PauliOperator) -> "RotationStep":
        return cls(generator, StepKind.CLIFFORD, math.pi / 2)

    @classmethod
    def continuous(cls, generator: PauliOperator, angle: float) -> "RotationStep":
        return cls(generator, StepKind.CONTINUOUS, float(angle))

    def inverse(self) -> "RotationStep":
        return RotationStep(self.generator, StepKind.CONTINUOUS, -self.angle)

    def matrix(self) -> np.ndarray:
        """Dense unitary ``cos(angle/2) I + i sin(angle/2) P``."""
        dim = 1 << self.generator.n
        half = self.angle / 2
        return math.cos(half) * np.eye(dim) + 1j * math.sin(half) * pauli_matrix(self.generator)

    def to_dict(self) -> dict:
        return {"generator": self.generator.label, "kind": self.kind.value, "angle": self.angle}

    @classmethod
    def from_dict(cls, d: Mapping) -> "RotationStep":
        return cls(PauliOperator.from_label(d["generator"]), StepKind(d["kind"]), float(d["angle"]))


def conjugate_pauli(op: PauliOperator, step: RotationStep) -> list[tuple[PauliOperator, float]]:
    """Image of a Hermitian Pauli under ``U op U^dagger`` as (phase-free Pauli, real coefficient) pairs."""
    _check_same_n(op, step.generator)
    s = op.sign
    base = op.unsigned()
    if commutes(base, step.generator):
        return [(base, float(s))]
    prod = multiply(step.generator, base)
    rotated = PauliOperator(prod.n, prod.x, prod.z, (prod.phase_exp + 1) % 4)
    if step.kind is StepKind.CLIFFORD:
        return [(rotated.unsigned(), float(s * rotated.sign))]
    return [(base, s * math.cos(step.angle)), (rotated.unsigned(), s * rotated.sign * math.sin(step.angle))]


def conjugate_by_rotation(h: Hamiltonian, step: RotationStep) -> Hamiltonian:
    """Return ``U h U^dagger`` for the rotation described by ``step``."""
    if step.generator.n != h.n:
        raise DimensionError(f"generator acts on {step.generator.n} qubits, Hamiltonian on {h.n}")
    acc: dict[PauliOperator, float] = {}
    for p, c in h.items():
        for q, w in conjugate_pauli(p, step):
            acc[q] = acc.get(q, 0.0) + c * w
    return Hamiltonian(h.n, acc, h.constant)


def _parity(values: np.ndarray) -> np.ndarray:
    return (np.bitwise_count(values) & 1).astype(np.int64)


def pauli_matrix(op: PauliOperator) -> np.ndarray:
    """Dense ``2**n x 2**n`` matrix of a single Pauli operator, phase included."""
    dim = 1 << op.n
    cols = np.arange(dim, dtype=np.int64)
    rows = cols ^ op.x
    vals = (1j) ** ((op.phase_exp + _popcount(op.x & op.z)) % 4) * (1 - 2 * _parity(cols & op.z))
    m = np.zeros((dim, dim), dtype=complex)
    m[rows, cols] = vals
    return m


def _check_dense(n: int, dense_limit: int) -> None:
    if n > dense_limit:
        raise ResourceError(f"{n} qubits exceeds the dense-matrix limit of {dense_limit}")


def to_dense_matrix(h: Hamiltonian | PauliOperator, dense_limit: int = DEFAULT_DENSE_LIMIT) -> np.ndarray:
    """Dense Hermitian matrix ``sum_P h_P P + constant * I``."""
    if isinstance(h, PauliOperator):
        _check_dense(h.n, dense_limit)
        return pauli_matrix(h)
    _check_dense(h.n, dense_limit)
    dim = 1 << h.n
    cols = np.arange(dim, dtype=np.int64)
    m = np.zeros((dim, dim), dtype=complex)
    m[cols, cols] = h.constant
    for p, c in h.items():
        vals = c * (1j) ** (_popcount(p.x & p.z) % 4) * (1 - 2 * _parity(cols & p.z))
        m[cols ^ p.x, cols] += vals
    return m


def to_sparse_matrix(h: Hamiltonian) -> sp.csr_matrix:
    """Sparse CSR form of :func:`to_dense_matrix`, for registers beyond the dense limit."""
    dim = 1 << h.n
    cols = np.arange(dim, dtype=np.int64)
    rows_all, cols_all, vals_all = [cols], [cols], [np.full(dim, h.constant, dtype=complex)]
    for p, c in h.items():
        rows_all.append(cols ^ p.x)
        cols_all.append(cols)
        vals_all.append(c * (1j) ** (_popcount(p.x & p.z) % 4) * (1 - 2 * _parity(cols & p.z)))
    return sp.coo_matrix(
        (np.concatenate(vals_all), (np.concatenate(rows_all), np.concatenate(cols_all))),
        shape=(dim, dim),
    ).tocsr()


def expectation(h: Hamiltonian | PauliOperator, psi: np.ndarray) -> float:
    """Real expectation value of a Hermitian operator in a normalised state vector."""
    m = to_dense_matrix(h, dense_limit=max(h.n, 1))
    return float(np.real(np.vdot(psi, m @ psi)))
