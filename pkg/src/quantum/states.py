"""Photon states in the Zernike basis.

Two-photon coefficients are stored as a dense matrix indexed by the single
index of the signal mode (rows) and the idler mode (columns), over every mode
with n <= n_max.
"""

import logging
import math
from dataclasses import dataclass, field

import numpy as np

from ..core.mode_index import ModeIndex, enumerate_up_to, mode_count, to_single_index
from ..errors import DegenerateInput, DomainError, EmptyState, InvariantViolation

log = logging.getLogger(__name__)

NORM_TOLERANCE = 1e-10
HERMITIAN_TOLERANCE = 1e-12
TRACE_TOLERANCE = 1e-10
DIAGONAL_FLOOR = -1e-12


@dataclass
class SinglePhotonState:
    """Normalised single-photon amplitudes zeta_n^m."""

    zeta: dict[ModeIndex, complex]
    n_max: int
    captured_fraction: float = 1.0

    def __post_init__(self):
        for idx in self.zeta:
            if idx.n > self.n_max:
                raise DomainError(f"mode {idx} exceeds n_max={self.n_max}")
        norm = math.fsum(abs(v) ** 2 for v in self.zeta.values())
        if abs(norm - 1.0) > NORM_TOLERANCE:
            raise InvariantViolation(f"single-photon state not normalised: sum |zeta|^2 = {norm!r}")

    def modes(self) -> list[ModeIndex]:
        return sorted(self.zeta, key=to_single_index)

    def vector(self) -> np.ndarray:
        """Dense amplitudes over ``enumerate_up_to(n_max)``."""
        out = np.zeros(mode_count(self.n_max), dtype=complex)
        for idx, value in self.zeta.items():
            out[to_single_index(idx)] = value
        return out


@dataclass(eq=False)
class TwoPhotonState:
    zeta: np.ndarray
    n_max: int
    normalized: bool = True
    raw_norm: float = 1.0
    modes: list[ModeIndex] = field(init=False, repr=False)

    def __post_init__(self):
        d = mode_count(self.n_max)
        if self.zeta.shape != (d, d):
            raise DomainError(f"zeta must be {d}x{d} for n_max={self.n_max}, got {self.zeta.shape}")
        self.modes = enumerate_up_to(self.n_max)
        if self.normalized:
            norm = float(np.sum(np.abs(self.zeta) ** 2))
            if abs(norm - 1.0) > NORM_TOLERANCE:
                raise InvariantViolation(f"two-photon state not normalised: sum |zeta|^2 = {norm!r}")

    @property
    def dimension(self) -> int:
        return len(self.modes)

    def is_symmetric(self) -> bool:
        return bool(np.array_equal(self.zeta, self.zeta.T))

    def nonzero_entries(self) -> list[tuple[ModeIndex, ModeIndex, complex]]:
        """(signal, idler, zeta) for every non-zero entry, row-major."""
        rows, cols = np.nonzero(self.zeta)
        return [(self.modes[r], self.modes[c], complex(self.zeta[r, c])) for r, c in zip(rows, cols)]


def normalize(state: TwoPhotonState) -> TwoPhotonState:
    """Rescale to unit norm inside the cutoff; the pre-scaling norm is kept as ``raw_norm``."""
    raw = float(np.linalg.norm(state.zeta))
    if raw == 0.0:
        raise EmptyState(f"every two-photon coefficient vanished for n_max={state.n_max}")
    return TwoPhotonState(state.zeta / raw, state.n_max, normalized=True, raw_norm=raw)


def product_state(u: np.ndarray, v: np.ndarray, n_max: int) -> TwoPhotonState:
    """zeta = u (x) v for dense single-photon vectors."""
    zeta = np.outer(u, v)
    return normalize(TwoPhotonState(zeta, n_max, normalized=False))


@dataclass(eq=False)
class ReducedDensityMatrix:
    """Signal-photon density matrix Xi after tracing out the idler."""

    xi: np.ndarray
    modes: list[ModeIndex]

    def __post_init__(self):
        if not np.allclose(self.xi, self.xi.conj().T, rtol=0.0, atol=HERMITIAN_TOLERANCE):
            raise InvariantViolation("reduced density matrix is not Hermitian")
        if abs(self.trace - 1.0) > TRACE_TOLERANCE:
            raise InvariantViolation(f"reduced density matrix trace {self.trace!r} != 1")
        low = float(np.min(self.xi.diagonal().real)) if self.xi.size else 0.0
        if low < DIAGONAL_FLOOR:
            raise InvariantViolation(f"negative population {low!r} on the diagonal")

    @property
    def trace(self) -> float:
        return float(np.trace(self.xi).real)

    @property
    def dimension(self) -> int:
        return self.xi.shape[0]


def check_degenerate(captured: float, threshold: float = 1e-6):
    if not captured >= threshold:
        raise DegenerateInput(f"captured fraction {captured:.3e} below {threshold:g}")
