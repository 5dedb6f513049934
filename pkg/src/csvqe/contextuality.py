"""Noncontextuality tests, closure under inference, and noncontextual subset selection."""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterable, Sequence

from .errors import ContextualityError, DimensionError, InvariantError, ResourceError
from .gf2 import SymplecticBasis, symplectic_int
from .pauli import Hamiltonian, PauliOperator, commutes, multiply


def _normalise(ops: Iterable[PauliOperator]) -> list[PauliOperator]:
    """Deduplicate to phase-free operators on a common qubit count, sorted by label."""
    seen: dict[PauliOperator, None] = {}
    n = None
    for p in ops:
        if not p.is_hermitian:
            raise InvariantError(f"{p} is not Hermitian")
        if n is None:
            n = p.n
        elif p.n != n:
            raise DimensionError(f"mixed qubit counts {n} and {p.n} in operator set")
        seen[p.unsigned()] = None
    return sorted(seen, key=lambda p: p.label)


def universally_commuting(ops: Sequence[PauliOperator]) -> list[PauliOperator]:
    """Members of ``ops`` that commute with every other member."""
    return [a for a in ops if all(commutes(a, b) for b in ops)]


def _partition(ops: list[PauliOperator]):
    """Split a sorted, deduplicated set into (z_set, cliques) or report a witness.

    Returns ``(z_set, cliques, None)`` when commutation is an equivalence
    relation off the universally-commuting subset, else
    ``(None, None, (a, b, c))`` with ``a~b``, ``b~c`` commuting but ``a, c``
    anticommuting.
    """
    z_set = universally_commuting(ops)
    zs = set(z_set)
    cliques: list[list[PauliOperator]] = []
    for p in ops:
        if p in zs:
            continue
        for clique in cliques:
            if commutes(clique[0], p):
                clique.append(p)
                break
        else:
            cliques.append([p])
    for ci, clique in enumerate(cliques):
        head = clique[0]
        for a_idx, a in enumerate(clique):
            for b in clique[a_idx + 1:]:
                if not commutes(a, b):
                    return None, None, (a, head, b)
        for other in cliques[ci + 1:]:
            for a in clique:
                for b in other:
                    if commutes(a, b):
                        # b was not placed in this earlier clique, so it anticommutes with head
                        return None, None, (b, a, head)
    return z_set, cliques, None


def is_noncontextual(ops: Iterable[PauliOperator]) -> bool:
    """True iff commutation is transitive on the set minus its universally-commuting part."""
    z_set, _, _ = _partition(_normalise(ops))
    return z_set is not None


def closure_under_inference(ops: Iterable[PauliOperator], max_size: int | None = None) -> set[PauliOperator]:
    """Smallest phase-free superset closed under products of distinct commuting pairs.

    The identity is never added (it is the product of an operator with itself).
    Raises ``ResourceError`` when ``max_size`` is given and exceeded.
    """
    members = _normalise(ops)
    closure = set(members)
    ordered = list(members)
    i = 0
    while i < len(ordered):
        a = ordered[i]
        for b in ordered[:i]:
            if commutes(a, b):
                c = multiply(a, b).unsigned()
                if not c.is_identity and c not in closure:
                    closure.add(c)
                    ordered.append(c)
                    if max_size is not None and len(closure) > max_size:
                        raise ResourceError(f"inference closure exceeds {max_size} operators")
        i += 1
    return closure


@dataclass(frozen=True)
class NoncontextualDecomposition:
    """Partition of a term set into ``z_set``, ``cliques`` (together S_nc) and the contextual rest."""

    z_set: tuple[PauliOperator, ...]
    cliques: tuple[tuple[PauliOperator, ...], ...]
    contextual_terms: tuple[PauliOperator, ...] = ()
    source: Hamiltonian | None = field(default=None, compare=False, repr=False)

    @property
    def n(self) -> int:
        for p in self.nc_terms + self.contextual_terms:
            return p.n
        return self.source.n if self.source is not None else 0

    @property
    def nc_terms(self) -> tuple[PauliOperator, ...]:
        return self.z_set + tuple(p for c in self.cliques for p in c)

    @property
    def n_cliques(self) -> int:
        return len(self.cliques)

    def nc_hamiltonian(self) -> Hamiltonian:
        """Noncontextual part of the source Hamiltonian, constant included."""
        if self.source is None:
            raise InvariantError("decomposition has no source Hamiltonian")
        return self.source.subset(self.nc_terms, with_constant=True)

    def contextual_hamiltonian(self) -> Hamiltonian:
        if self.source is None:
            raise InvariantError("decomposition has no source Hamiltonian")
        return self.source.subset(self.contextual_terms)

    def check(self) -> None:
        """Raise ``InvariantError`` unless every structural invariant holds."""
        nc = self.nc_terms
        for z in self.z_set:
            bad = [p for p in nc if not commutes(z, p)]
            if bad:
                raise InvariantError(f"z_set member {z} anticommutes with {bad[0]}")
        for i, ci in enumerate(self.cliques):
            if not ci:
                raise InvariantError("empty clique")
            for a in ci:
                for b in ci:
                    if not commutes(a, b):
                        raise InvariantError(f"{a} and {b} anticommute inside a clique")
            for cj in self.cliques[i + 1:]:
                for a in ci:
                    for b in cj:
                        if commutes(a, b):
                            raise InvariantError(f"{a} and {b} commute across cliques")
        everything = list(nc) + list(self.contextual_terms)
        if len(set(everything)) != len(everything):
            raise InvariantError("decomposition parts overlap")
        if self.source is not None:
            if set(everything) != set(self.source.terms):
                raise InvariantError("decomposition does not partition the source terms")
            inferred = inferable_terms(self, self.source.terms)
            if inferred - set(nc):
                raise InvariantError(
                    f"S_nc is not closed under inference within S: {sorted(p.label for p in inferred - set(nc))}"
                )

    def to_dict(self) -> dict:
        return {
            "z_set": [p.label for p in self.z_set],
            "cliques": [[p.label for p in c] for c in self.cliques],
            "contextual_terms": [p.label for p in self.contextual_terms],
        }


def decompose(ops: Iterable[PauliOperator], source: Hamiltonian | None = None,
              contextual_terms: Iterable[PauliOperator] = ()) -> NoncontextualDecomposition:
    """Split a noncontextual set into its universally-commuting part and cliques.

    Cliques are listed in lexicographic order of their first member, and
    members within a clique lexicographically.
    """
    members = _normalise(ops)
    z_set, cliques, witness = _partition(members)
    if z_set is None:
        raise ContextualityError(
            "set is contextual: commutation is not transitive on "
            + ", ".join(str(w) for w in witness), witness)
    rest = tuple(sorted({p.unsigned() for p in contextual_terms}, key=lambda p: p.label))
    return NoncontextualDecomposition(
        z_set=tuple(z_set),
        cliques=tuple(tuple(c) for c in sorted(cliques, key=lambda c: c[0].label)),
        contextual_terms=rest,
        source=source,
    )


def _group_basis(z_set, cliques) -> SymplecticBasis:
    basis = SymplecticBasis()
    for p in z_set:
        basis.add(symplectic_int(p))
    for clique in cliques:
        head = symplectic_int(clique[0])
        for p in clique[1:]:
            basis.add(head ^ symplectic_int(p))
    return basis


def inferable_terms(d: NoncontextualDecomposition, candidates: Iterable[PauliOperator]) -> set[PauliOperator]:
    """Candidates whose value follows by inference from the noncontextual set of ``d``.

    The inference closure of a noncontextual set is the (non-identity part of
    the) group generated by the universally-commuting terms and same-clique
    products, together with that group times each clique representative, so
    membership is a GF(2) span test.
    """
    basis = _group_basis(d.z_set, d.cliques)
    heads = [symplectic_int(c[0]) for c in d.cliques]
    out = set()
    for p in candidates:
        if p.is_identity:
            continue
        v = symplectic_int(p)
        if v in basis or any((v ^ h) in basis for h in heads):
            out.add(p.unsigned())
    return out


def greedy_noncontextual_subset(h: Hamiltonian) -> NoncontextualDecomposition:
    """Grow a noncontextual subset of ``h`` term by term, largest |coefficient| first.

    A candidate is admitted when the enlarged set stays noncontextual; terms of
    ``h`` that become inferable are admitted with it, so the result is closed
    under inference within the term set.
    """
    if len(h) == 0:
        return NoncontextualDecomposition((), (), (), source=h)
    order = sorted(h.items(), key=lambda kv: (-abs(kv[1]), kv[0].label))
    all_terms = [p for p, _ in order]
    chosen: set[PauliOperator] = set()
    for p in all_terms:
        if p in chosen:
            continue
        trial = _normalise(chosen | {p})
        z_set, cliques, _ = _partition(trial)
        if z_set is None:
            continue
        probe = NoncontextualDecomposition(tuple(z_set), tuple(tuple(c) for c in cliques))
        grown = set(trial) | inferable_terms(probe, all_terms)
        if len(grown) > len(trial) and _partition(_normalise(grown))[0] is None:
            continue
        chosen = grown
    rest = [p for p in all_terms if p not in chosen]
    return decompose(chosen, source=h, contextual_terms=rest)
