"""Zernike circle polynomials Z_n^m = sqrt(n+1) R_n^|m|(rho) e^{i m theta}.

Radial polynomials are evaluated through their Jacobi form
R_n^m(rho) = (-1)^k rho^m P_k^(m,0)(1 - 2 rho^2), k = (n - m)/2, using the
three-term Jacobi recurrence, which stays accurate far beyond the order where the
factorial sum cancels catastrophically.
"""

import logging
import math
from dataclasses import dataclass, field
from typing import Callable

import numpy as np
from scipy.interpolate import RegularGridInterpolator
from scipy.ndimage import distance_transform_edt

from ..errors import CapacityError, DomainError, GridCoverageError
from .grid import PUPIL, FieldGrid, GridSpec, disc_mask, sample_polar
from .mode_index import ModeIndex, enumerate_up_to, to_single_index
from .quadrature import DiscQuadrature

log = logging.getLogger(__name__)

PupilFunction = Callable[[np.ndarray, np.ndarray], np.ndarray]


def _check_rho(rho: np.ndarray):
    if rho.size and (np.any(rho < 0.0) or np.any(rho > 1.0) or not np.all(np.isfinite(rho))):
        raise DomainError("rho must lie in [0, 1]")


def radial(n: int, m_abs: int, rho):
    """R_n^{|m|}(rho)."""
    ModeIndex(n, m_abs)
    r = np.asarray(rho, dtype=float)
    _check_rho(r)
    m = abs(m_abs)
    k = (n - m) // 2
    x = 1.0 - 2.0 * r * r

    prev = np.ones_like(x)
    if k == 0:
        jac = prev
    else:
        cur = (m + 1.0) + (m + 2.0) * (x - 1.0) / 2.0
        for i in range(1, k):
            a = 2.0 * i + m
            nxt = ((a + 1.0) * ((a + 2.0) * a * x + m * m) * cur - 2.0 * (i + m) * i * (a + 2.0) * prev) / (
                2.0 * (i + 1.0) * (i + m + 1.0) * a
            )
            prev, cur = cur, nxt
        jac = cur
    out = (-1.0) ** k * np.power(r, m) * jac
    return float(out) if out.ndim == 0 else out


def zernike(idx: ModeIndex, rho, theta):
    """Z_n^m(rho, theta) as a complex value (or array)."""
    r = np.asarray(rho, dtype=float)
    t = np.asarray(theta, dtype=float)
    out = math.sqrt(idx.n + 1) * np.asarray(radial(idx.n, abs(idx.m), r)) * np.exp(1j * idx.m * t)
    return complex(out) if out.ndim == 0 else out


@dataclass
class ZernikeExpansion:
    """Coefficients a_{mn} of a pupil function, keyed by mode."""

    coefficients: dict[ModeIndex, complex] = field(default_factory=dict)
    n_max: int = 0

    def __post_init__(self):
        for idx in self.coefficients:
            if idx.n > self.n_max:
                raise DomainError(f"mode {idx} exceeds n_max={self.n_max}")

    @classmethod
    def single(cls, idx: ModeIndex, value: complex = 1.0) -> "ZernikeExpansion":
        return cls({idx: complex(value)}, idx.n)

    def modes(self) -> list[ModeIndex]:
        """Keys in single-index order (the fixed summation order)."""
        return sorted(self.coefficients, key=to_single_index)

    def items(self) -> list[tuple[ModeIndex, complex]]:
        return [(idx, self.coefficients[idx]) for idx in self.modes()]

    def get(self, idx: ModeIndex) -> complex:
        return self.coefficients.get(idx, 0.0j)

    def azimuthal_orders(self) -> set[int]:
        return {idx.m for idx in self.coefficients}

    def __len__(self) -> int:
        return len(self.coefficients)


def _mode_matrix(modes: list[ModeIndex], rho: np.ndarray, theta: np.ndarray) -> np.ndarray:
    """Rows Z_mode evaluated at the given points (radials shared between +-m)."""
    radials: dict[tuple[int, int], np.ndarray] = {}
    out = np.empty((len(modes), rho.size), dtype=complex)
    for row, idx in enumerate(modes):
        key = (idx.n, abs(idx.m))
        if key not in radials:
            radials[key] = math.sqrt(idx.n + 1) * radial(idx.n, abs(idx.m), rho)
        out[row] = radials[key] * np.exp(1j * idx.m * theta)
    return out


def pupil_gram(n_max: int, quad: DiscQuadrature) -> np.ndarray:
    """<Z_a, Z_b> over the quadrature for all modes n <= n_max (pi I when exact)."""
    rho, theta, weight = quad.mesh
    basis = _mode_matrix(enumerate_up_to(n_max), rho, theta)
    return (np.conj(basis) * weight) @ basis.T


def fit(field: PupilFunction, n_max: int, quad: DiscQuadrature) -> ZernikeExpansion:
    """Project a pupil function: a_{mn} = (1/pi) <Z_n^m, P> over the disc quadrature."""
    if quad.capacity < n_max:
        raise CapacityError(f"quadrature capacity {quad.capacity} < n_max {n_max}")
    rho, theta, weight = quad.mesh
    values = np.asarray(field(rho, theta), dtype=complex)
    modes = enumerate_up_to(n_max)
    basis = _mode_matrix(modes, rho, theta)
    coeffs = (np.conj(basis) @ (weight * values)) / math.pi
    log.debug("fit: %d modes over %d nodes", len(modes), quad.size)
    return ZernikeExpansion({idx: complex(c) for idx, c in zip(modes, coeffs)}, n_max)


def reconstruct(exp: ZernikeExpansion, rho, theta):
    """Sum a_{mn} Z_n^m(rho, theta)."""
    r = np.asarray(rho, dtype=float)
    t = np.asarray(theta, dtype=float)
    total = np.zeros(np.broadcast(r, t).shape, dtype=complex)
    for idx, a in exp.items():
        total = total + a * zernike(idx, r, t)
    return complex(total) if total.ndim == 0 else total


def rotate_expansion(exp: ZernikeExpansion, alpha: float) -> ZernikeExpansion:
    """Multiply each a_{mn} by e^{i m alpha}; the pattern becomes P(rho, theta + alpha)."""
    return ZernikeExpansion(
        {idx: a * complex(np.exp(1j * idx.m * alpha)) for idx, a in exp.items()}, exp.n_max
    )


def conjugate_expansion(exp: ZernikeExpansion) -> ZernikeExpansion:
    """Expansion of conj(P): a_{n,m} -> conj(a_{n,-m})."""
    return ZernikeExpansion(
        {ModeIndex(idx.n, -idx.m): complex(np.conj(a)) for idx, a in exp.items()}, exp.n_max
    )


def prune(exp: ZernikeExpansion, threshold: float) -> ZernikeExpansion:
    return ZernikeExpansion(
        {idx: a for idx, a in exp.items() if abs(a) >= threshold}, exp.n_max
    )


# ── Sampled pupils ──


def zernike_grid(idx: ModeIndex, spec: GridSpec, threads: int = 1) -> FieldGrid:
    """Z_n^m on the grid, zero outside the unit disc."""

    def _eval(r, phi):
        inside = r <= 1.0
        out = np.zeros(r.shape, dtype=complex)
        out[inside] = zernike(idx, r[inside], phi[inside])
        return out

    return FieldGrid(spec, sample_polar(spec, _eval, threads), PUPIL)


def _extend_outside_disc(values: np.ndarray, inside: np.ndarray) -> np.ndarray:
    """Copy each out-of-disc pixel from its nearest in-disc pixel."""
    if inside.all() or not inside.any():
        return values
    _, (iy, ix) = distance_transform_edt(~inside, return_indices=True)
    return values[iy, ix]


def fit_grid(grid: FieldGrid, n_max: int, quad: DiscQuadrature) -> ZernikeExpansion:
    """Fit a sampled pupil: interpolate in-disc samples onto the quadrature nodes."""
    if not grid.covers_unit_disc():
        raise GridCoverageError(
            f"grid extent ({grid.spec.extent_x}, {grid.spec.extent_y}) does not cover the unit disc"
        )
    x, y = grid.spec.axes()
    values = _extend_outside_disc(grid.samples.astype(complex), disc_mask(grid.spec))
    method = "cubic" if min(grid.width, grid.height) >= 4 else "linear"
    re = RegularGridInterpolator((y, x), values.real, method=method, bounds_error=False, fill_value=None)
    im = RegularGridInterpolator((y, x), values.imag, method=method, bounds_error=False, fill_value=None)

    def _pupil(rho, theta):
        pts = np.column_stack((rho * np.sin(theta), rho * np.cos(theta)))
        return re(pts) + 1j * im(pts)

    return fit(_pupil, n_max, quad)


def residual_rms(exp: ZernikeExpansion, grid: FieldGrid) -> float:
    """RMS of samples minus reconstruction over in-disc pixels."""
    inside = disc_mask(grid.spec)
    if not inside.any():
        return 0.0
    r, phi = grid.spec.polar()
    diff = grid.samples[inside] - reconstruct(exp, r[inside], phi[inside])
    return float(np.sqrt(np.mean(np.abs(diff) ** 2)))
