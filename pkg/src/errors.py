"""Exception hierarchy shared by all zernq modules."""


class ZernqError(Exception):
    """Base class for every error raised by zernq."""


class InvalidMode(ZernqError, ValueError):
    """(n, m) is not a Zernike mode index."""


class InvalidTriple(ZernqError, ValueError):
    """Malformed angular-momentum triple (half-integer bookkeeping broken)."""


class DomainError(ZernqError, ValueError):
    """Argument outside the supported range of a special function or polynomial."""


class CapacityError(ZernqError, ValueError):
    """Quadrature rule too coarse for the requested fit."""


class GridCoverageError(ZernqError, ValueError):
    """Sampled field does not cover the unit disc."""


class FormatError(ZernqError, ValueError):
    """On-disk payload does not match the expected format."""


class DegenerateInput(ZernqError, ValueError):
    """Input carries (numerically) no weight on the requested modes."""


class EmptyState(ZernqError, ValueError):
    """Every two-photon coefficient vanished inside the cutoff."""


class ConvergenceError(ZernqError, ArithmeticError):
    """Series truncation tail exceeds the requested tolerance."""

    def __init__(self, message: str, diagnostic: dict | None = None):
        super().__init__(message)
        self.diagnostic = diagnostic or {}


class EigensolverFailure(ZernqError, RuntimeError):
    """Jacobi sweeps did not converge inside the iteration budget."""


class InvariantViolation(ZernqError, ArithmeticError):
    """A constructed object broke one of its mathematical invariants."""
