"""Reading and writing Hamiltonian files.

A Hamiltonian file is a JSON object::

    {"n": 3, "terms": {"ZII": 0.5, "IXI": -0.25}, "constant": 0.1, "metadata": {...}}

``constant`` and ``metadata`` are optional.  An all-identity key is folded
into the constant.
"""
from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from importlib import resources
from pathlib import Path
from typing import Any

from .errors import ParseError
from .pauli import Hamiltonian, PauliOperator

_ALPHABET = frozenset("IXYZ")


@dataclass(frozen=True)
class HamiltonianFile:
    hamiltonian: Hamiltonian
    metadata: dict = field(default_factory=dict)
    source: str = "<memory>"


def _number(value: Any, where: str) -> float:
    if isinstance(value, bool) or not isinstance(value, (int, float)):
        raise ParseError(f"{where}: expected a real number, got {value!r}")
    v = float(value)
    if not math.isfinite(v):
        raise ParseError(f"{where}: coefficient must be finite, got {value!r}")
    return v


def parse_hamiltonian(doc: Any, source: str = "<memory>") -> HamiltonianFile:
    """Validate a decoded JSON document and build the Hamiltonian it describes."""
    if not isinstance(doc, dict):
        raise ParseError(f"{source}: top level must be a JSON object")
    unknown = set(doc) - {"n", "terms", "constant", "metadata"}
    if unknown:
        raise ParseError(f"{source}: unknown key(s) {sorted(unknown)}")
    if "n" not in doc:
        raise ParseError(f"{source}: missing key 'n'")
    n = doc["n"]
    if isinstance(n, bool) or not isinstance(n, int) or n < 1:
        raise ParseError(f"{source}: key 'n' must be a positive integer, got {n!r}")
    terms = doc.get("terms")
    if not isinstance(terms, dict):
        raise ParseError(f"{source}: key 'terms' must be an object mapping Pauli strings to coefficients")
    constant = _number(doc.get("constant", 0.0), f"{source}: key 'constant'")
    metadata = doc.get("metadata", {})
    if not isinstance(metadata, dict):
        raise ParseError(f"{source}: key 'metadata' must be an object")
    pairs = []
    for label, coef in terms.items():
        where = f"{source}: term {label!r}"
        if len(label) != n:
            raise ParseError(f"{where}: length {len(label)} does not match n={n}")
        bad = set(label) - _ALPHABET
        if bad:
            raise ParseError(f"{where}: invalid character(s) {''.join(sorted(bad))!r}; use I, X, Y, Z")
        c = _number(coef, where)
        if set(label) == {"I"}:
            constant += c
        else:
            pairs.append((PauliOperator.from_label(label), c))
    return HamiltonianFile(Hamiltonian(n, pairs, constant), dict(metadata), source)


def loads(text: str, source: str = "<string>") -> HamiltonianFile:
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ParseError(f"{source}: line {exc.lineno} column {exc.colno}: {exc.msg}") from None
    return parse_hamiltonian(doc, source)


def load(path: str | Path) -> HamiltonianFile:
    path = Path(path)
    try:
        text = path.read_text()
    except OSError as exc:
        raise ParseError(f"{path}: cannot read file ({exc.strerror})") from None
    return loads(text, str(path))


def to_document(h: Hamiltonian, metadata: dict | None = None) -> dict:
    doc: dict[str, Any] = {"n": h.n, "terms": h.to_labels()}
    if h.constant:
        doc["constant"] = h.constant
    if metadata:
        doc["metadata"] = metadata
    return doc


def dumps(h: Hamiltonian, metadata: dict | None = None) -> str:
    return json.dumps(to_document(h, metadata), indent=2, sort_keys=True) + "\n"


def save(h: Hamiltonian, path: str | Path, metadata: dict | None = None) -> None:
    Path(path).write_text(dumps(h, metadata))


def bundled(name: str) -> HamiltonianFile:
    """Load a Hamiltonian shipped in the package data directory (``example_3q`` or ``h2_like``)."""
    ref = resources.files("csvqe") / "data" / f"{name}.json"
    if not ref.is_file():
        raise ParseError(f"no bundled Hamiltonian named {name!r}")
    return loads(ref.read_text(), f"bundled:{name}")
