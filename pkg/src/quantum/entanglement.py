"""Reduced density matrix, Schmidt spectrum and the entanglement verdict."""

import logging
import math
from dataclasses import dataclass, field

import numpy as np

from ..errors import EigensolverFailure, InvariantViolation
from .states import ReducedDensityMatrix, TwoPhotonState

log = logging.getLogger(__name__)

JACOBI_TOLERANCE = 1e-13
JACOBI_MAX_SWEEPS = 100
EIGENVALUE_FLOOR = -1e-10
DEFAULT_EPSILON = 1e-6
WITNESS_COUNT = 10
SPECTRUM_REPORTED = 20

ENTANGLED = "entangled"
PRODUCT = "product"
INCONCLUSIVE = "inconclusive"


def _off_diagonal_norm(a: np.ndarray) -> float:
    off = a[~np.eye(a.shape[0], dtype=bool)]
    return math.sqrt(float(np.sum(off * off)))


def jacobi_eigh(matrix: np.ndarray, tol: float = JACOBI_TOLERANCE, max_sweeps: int = JACOBI_MAX_SWEEPS) -> np.ndarray:
    """Eigenvalues of a complex Hermitian matrix, sorted descending.

    Cyclic Jacobi rotations on the real symmetric embedding [[A, -B], [B, A]] of
    H = A + iB; every eigenvalue of H appears twice in the embedding.
    """
    h = np.asarray(matrix, dtype=complex)
    d = h.shape[0]
    if d == 0:
        return np.zeros(0)
    a = np.block([[h.real, -h.imag], [h.imag, h.real]])
    size = 2 * d

    for sweep in range(max_sweeps):
        off = _off_diagonal_norm(a)
        if off < tol:
            log.debug("jacobi_eigh: dim=%d converged after %d sweeps (off=%.2e)", d, sweep, off)
            break
        for p in range(size - 1):
            for q in range(p + 1, size):
                apq = a[p, q]
                if apq == 0.0:
                    continue
                theta = (a[q, q] - a[p, p]) / (2.0 * apq)
                t = math.copysign(1.0, theta) / (abs(theta) + math.sqrt(theta * theta + 1.0))
                c = 1.0 / math.sqrt(t * t + 1.0)
                s = t * c
                col_p, col_q = a[:, p].copy(), a[:, q].copy()
                a[:, p] = c * col_p - s * col_q
                a[:, q] = s * col_p + c * col_q
                row_p, row_q = a[p, :].copy(), a[q, :].copy()
                a[p, :] = c * row_p - s * row_q
                a[q, :] = s * row_p + c * row_q
                a[p, q] = a[q, p] = 0.0
    else:
        off = _off_diagonal_norm(a)
        if off >= tol:
            raise EigensolverFailure(f"Jacobi did not converge in {max_sweeps} sweeps (off-diagonal {off:.3e})")

    values = np.sort(np.diag(a))[::-1]
    return values[::2].copy()


def reduce(state: TwoPhotonState) -> ReducedDensityMatrix:
    """Xi = zeta zeta^H: trace over the idler (columns)."""
    xi = state.zeta @ state.zeta.conj().T
    xi = 0.5 * (xi + xi.conj().T)
    return ReducedDensityMatrix(xi, state.modes)


def purity(rho: ReducedDensityMatrix) -> float:
    """Tr Xi^2 = sum |Xi_ab|^2 for Hermitian Xi."""
    return float(np.sum(np.abs(rho.xi) ** 2))


@dataclass
class SchmidtSpectrum:
    values: np.ndarray

    @property
    def number(self) -> float:
        """Schmidt number K = 1 / sum lambda^2."""
        return 1.0 / float(np.sum(self.values**2))

    @property
    def entropy(self) -> float:
        """Von Neumann entropy -sum lambda ln lambda (natural log)."""
        lam = self.values[self.values > 0.0]
        return float(-np.sum(lam * np.log(lam)))


def schmidt_spectrum(state: TwoPhotonState) -> SchmidtSpectrum:
    values = jacobi_eigh(reduce(state).xi)
    if values.size and values[-1] < EIGENVALUE_FLOOR:
        raise InvariantViolation(f"reduced density matrix has eigenvalue {values[-1]!r} < 0")
    return SchmidtSpectrum(values)


def csb_defects(rho: ReducedDensityMatrix) -> np.ndarray:
    """D_ab = |Xi_ab|^2 - Xi_aa Xi_bb; non-positive for any density matrix."""
    diag = rho.xi.diagonal().real
    return np.abs(rho.xi) ** 2 - np.outer(diag, diag)


@dataclass
class Verdict:
    verdict: str
    purity: float
    epsilon: float
    witnesses: list[dict] = field(default_factory=list)


def entanglement_verdict(state: TwoPhotonState, epsilon: float = DEFAULT_EPSILON) -> Verdict:
    """Classify the state from the purity of its reduction and the CSB defects.

    ``entangled`` when Tr Xi^2 < 1 - epsilon, ``product`` when Tr Xi^2 > 1 - epsilon
    and no off-diagonal defect drops below -epsilon, else ``inconclusive``. Witnesses are
    the most negative off-diagonal defects, a < b.
    """
    rho = reduce(state)
    p = purity(rho)
    defects = csb_defects(rho)
    upper = np.triu_indices(rho.dimension, k=1)
    values = defects[upper]
    order = np.argsort(values, kind="stable")[:WITNESS_COUNT]
    witnesses = [
        {"a": str(rho.modes[upper[0][i]]), "b": str(rho.modes[upper[1][i]]), "defect": float(values[i])}
        for i in order
    ]

    if p < 1.0 - epsilon:
        verdict = ENTANGLED
    elif p > 1.0 - epsilon and (values.size == 0 or bool(np.all(values > -epsilon))):
        verdict = PRODUCT
    else:
        verdict = INCONCLUSIVE
    log.debug("verdict=%s purity=%.12g", verdict, p)
    return Verdict(verdict, p, epsilon, witnesses)


def entanglement_report(state: TwoPhotonState, epsilon: float = DEFAULT_EPSILON) -> dict:
    """JSON-ready summary: purity, Schmidt data, verdict and CSB witnesses."""
    result = entanglement_verdict(state, epsilon)
    spectrum = schmidt_spectrum(state)
    return {
        "n_max": state.n_max,
        "raw_norm": state.raw_norm,
        "purity": result.purity,
        "schmidt_spectrum": [float(v) for v in spectrum.values[:SPECTRUM_REPORTED]],
        "schmidt_number": spectrum.number,
        "entropy": spectrum.entropy,
        "verdict": result.verdict,
        "epsilon": epsilon,
        "witnesses": result.witnesses,
    }
