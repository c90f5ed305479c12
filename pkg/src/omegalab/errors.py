"""Exception hierarchy shared by all omegalab modules."""


class OmegaLabError(Exception):
    """Base class for every error raised by this package."""


class TruncatedStream(OmegaLabError, ValueError):
    """Bit stream ended in the middle of a codeword."""


class ContainerError(OmegaLabError, ValueError):
    """Malformed container file (bad magic, version, codec or padding)."""


class ResourceLimit(OmegaLabError):
    """Requested computation exceeds a configured size cap."""


class DomainError(OmegaLabError, ValueError):
    """A codelength function was evaluated outside its domain."""


class QuadratureFailure(OmegaLabError, ArithmeticError):
    """Numerical integration could not reach the requested tolerance."""


class ZeroMassRegion(OmegaLabError, ValueError):
    """Density vanishes inside a declared segment where a length is needed."""


class EmptyCell(OmegaLabError, ValueError):
    """Quantization cell carries zero probability mass."""


class CoverageError(OmegaLabError, ValueError):
    """Quantization does not cover the full law."""


class LawValidationError(OmegaLabError, ValueError):
    """Law or quantization specification violates its invariants.

    ``violations`` is a list of ``(field_path, message)`` pairs.
    """

    def __init__(self, violations):
        self.violations = list(violations)
        lines = [f"{path}: {msg}" for path, msg in self.violations]
        super().__init__("; ".join(lines) if lines else "invalid specification")
