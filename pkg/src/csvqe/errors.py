"""Exception hierarchy shared across the package."""


class CSVQEError(Exception):
    """Base class for all package errors."""


class DimensionError(CSVQEError, ValueError):
    """Operands act on different numbers of qubits, or vectors have the wrong length."""


class ParseError(CSVQEError, ValueError):
    """Malformed Pauli string or Hamiltonian file."""


class ResourceError(CSVQEError):
    """A configured size limit (dense matrices, exhaustive search) was exceeded."""


class InvariantError(CSVQEError):
    """An input violates a structural precondition (commutation, independence, ...)."""


class ContextualityError(InvariantError):
    """A set expected to be noncontextual is contextual."""

    def __init__(self, message, witnesses=()):
        super().__init__(message)
        self.witnesses = tuple(witnesses)


class ModelError(InvariantError):
    """A quasi-quantized model could not be built from a decomposition."""
