"""Single- and two-photon amplitudes: projections, correlation functions, SPDC.

Correlation functions are computed in the Fraunhofer convention and omit the
global field-operator prefactor, i.e. G1 = |sum zeta Z~|^2 and
G2 = 4 |sum zeta_{ab} Z~_a(r1) Z~_b(r2)|^2.
"""

import logging
import math
from typing import Callable

import numpy as np

from ..core.coupling import coupling_coefficients
from ..core.grid import IMAGE, FieldGrid, GridSpec, sample_polar
from ..core.mode_index import ModeIndex, enumerate_up_to
from ..core.quadrature import line_rule
from ..core.special import bessel_j_over_x
from ..core.zernike import ZernikeExpansion
from ..errors import DegenerateInput, DomainError, InvariantViolation
from ..optics.propagation import pupil_spectrum, zernike_ft
from .states import SinglePhotonState, TwoPhotonState, check_degenerate, normalize

log = logging.getLogger(__name__)

Spectrum = Callable[[np.ndarray, np.ndarray], np.ndarray]

LOW_CAPTURE = 0.5


# ── Single photon ──


def project_single_photon(
    spectrum: Spectrum,
    n_max: int,
    q_max: float = 8.0,
    n_phi: int = 128,
    panel_width: float = 0.25,
) -> SinglePhotonState:
    """zeta_n^m = int C(q, phi) Z~_n^m(q, phi)^* d^2q, normalised over n <= n_max.

    ``spectrum`` takes polar transverse coordinates (q, phi). The disc |q| <= q_max
    is integrated with composite Gauss-Legendre in q and an equispaced phi rule;
    the phi sums are done once per azimuthal order.
    """
    if q_max <= 0 or n_phi < 1:
        raise DomainError("project_single_photon needs q_max > 0 and n_phi >= 1")
    q, wq = line_rule(q_max, panel_width)
    phi = 2.0 * math.pi * np.arange(n_phi) / n_phi
    values = np.asarray(spectrum(q[:, None], phi[None, :]), dtype=complex)
    values = np.broadcast_to(values, (q.size, n_phi))
    radial_weight = q * wq

    modes = enumerate_up_to(n_max)
    azimuthal: dict[int, np.ndarray] = {}
    radial: dict[int, np.ndarray] = {}
    zeta = np.zeros(len(modes), dtype=complex)
    for row, idx in enumerate(modes):
        if idx.m not in azimuthal:
            azimuthal[idx.m] = values @ np.exp(-1j * idx.m * phi) * (2.0 * math.pi / n_phi)
        if idx.n not in radial:
            radial[idx.n] = np.asarray(bessel_j_over_x(idx.n + 1, 2.0 * math.pi * q))
        conj_prefactor = 2.0 * math.pi * (1j ** (-idx.n % 4)) * math.sqrt(idx.n + 1)
        zeta[row] = conj_prefactor * np.dot(radial_weight, radial[idx.n] * azimuthal[idx.m])

    total = float(np.dot(radial_weight, np.sum(np.abs(values) ** 2, axis=1))) * (2.0 * math.pi / n_phi)
    if total == 0.0:
        raise DegenerateInput("spectrum has zero norm on the integration disc")
    captured_raw = float(np.sum(np.abs(zeta) ** 2))
    captured = captured_raw / (math.pi * total)
    check_degenerate(captured)
    if captured < LOW_CAPTURE:
        log.warning("project_single_photon: only %.3f of the spectrum lies in modes n <= %d", captured, n_max)
    log.debug("project_single_photon: n_max=%d captured=%.6f", n_max, captured)
    zeta = zeta / math.sqrt(captured_raw)
    return SinglePhotonState({idx: complex(z) for idx, z in zip(modes, zeta)}, n_max, captured)


def single_photon_from_expansion(coefficients: dict[ModeIndex, complex] | ZernikeExpansion) -> SinglePhotonState:
    """State with amplitudes proportional to the given coefficients."""
    if isinstance(coefficients, ZernikeExpansion):
        items, n_max = coefficients.coefficients, coefficients.n_max
    else:
        items, n_max = coefficients, max((idx.n for idx in coefficients), default=0)
    norm = math.sqrt(math.fsum(abs(v) ** 2 for v in items.values()))
    if norm == 0.0:
        raise DegenerateInput("single-photon state has no amplitude")
    return SinglePhotonState({idx: complex(v) / norm for idx, v in items.items()}, n_max)


def _ft_vector(modes: list[ModeIndex], q: float, phi: float) -> np.ndarray:
    return np.array([zernike_ft(idx, q, phi) for idx in modes], dtype=complex)


def _polar_point(r) -> tuple[float, float]:
    x, y = (float(v) for v in r)
    return math.hypot(x, y), math.atan2(y, x)


def g1_fraunhofer(state: SinglePhotonState, spec: GridSpec, threads: int = 1) -> FieldGrid:
    """First-order correlation |sum zeta Z~(r)|^2 sampled on the image-plane grid."""
    amplitude = ZernikeExpansion(dict(state.zeta), state.n_max)

    def _eval(r, phi):
        return np.abs(pupil_spectrum(amplitude, r, phi)) ** 2

    return FieldGrid(spec, sample_polar(spec, _eval, threads, dtype=float), IMAGE)


# ── Two photons ──


def spdc_amplitude(q1, q2, pump: ZernikeExpansion, L: float, K: float):
    """Biphoton amplitude sqrt(2L/(pi^2 K)) v(q1+q2) sinc(L|q1-q2|^2 / 4K).

    ``q1`` and ``q2`` are transverse vectors (..., 2); v is the pump angular
    spectrum, i.e. the Fourier transform of the pump expansion.
    """
    if not (L > 0 and K > 0):
        raise DomainError(f"spdc_amplitude needs L > 0 and K > 0, got L={L}, K={K}")
    a = np.asarray(q1, dtype=float)
    b = np.asarray(q2, dtype=float)
    s = a + b
    d = a - b
    v = pupil_spectrum(pump, np.hypot(s[..., 0], s[..., 1]), np.arctan2(s[..., 1], s[..., 0]))
    x = L * (d[..., 0] ** 2 + d[..., 1] ** 2) / (4.0 * K)
    out = math.sqrt(2.0 * L / (math.pi**2 * K)) * v * np.sinc(x / math.pi)
    return complex(out) if np.ndim(out) == 0 else out


def spdc_zeta(pump: ZernikeExpansion, n_max: int) -> TwoPhotonState:
    """Thin-crystal coefficients zeta_{ab} = sum_n a_n A_{n_a n_b n}^{m_a m_b (m_a+m_b)}, normalised.

    Entries whose m_a + m_b is absent from the pump are never touched and stay
    exactly zero.
    """
    modes = enumerate_up_to(n_max)
    orders = pump.azimuthal_orders()
    zeta = np.zeros((len(modes), len(modes)), dtype=complex)
    for i, a in enumerate(modes):
        for j in range(i, len(modes)):
            b = modes[j]
            if a.m + b.m not in orders:
                continue
            table = coupling_coefficients(a, b)
            value = 0.0j
            for n3, coefficient in table.items():
                key = ModeIndex(n3, table.m3)
                if key in pump.coefficients:
                    value += pump.coefficients[key] * coefficient
            zeta[i, j] = value
            zeta[j, i] = value
    state = normalize(TwoPhotonState(zeta, n_max, normalized=False))
    if not state.is_symmetric():
        raise InvariantViolation("SPDC coefficients lost exchange symmetry")
    log.info("spdc_zeta: n_max=%d modes=%d raw_norm=%.6g", n_max, len(modes), state.raw_norm)
    return state


def g2_fraunhofer(state: TwoPhotonState, r1, r2) -> float:
    """Second-order correlation 4 |z(r1)^T zeta z(r2)|^2 at two image-plane points (x, y)."""
    z1 = _ft_vector(state.modes, *_polar_point(r1))
    z2 = _ft_vector(state.modes, *_polar_point(r2))
    return 4.0 * abs(complex(z1 @ state.zeta @ z2)) ** 2

