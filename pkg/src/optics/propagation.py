"""Image-plane (Fraunhofer) and Fresnel-plane fields of Zernike expansions.

Units: the pupil radius is the length unit. Transverse coordinates in the image
and Fresnel planes are diffraction units, i.e. the Bessel kernel is J(2 pi rho q).
For Fresnel propagation the physical radius is rho_phys = 2 pi z rho / k, so the
pupil chirp e^{i u rho'^2} has u = k / (2z) and the series argument is
beta = k / (4z).

V_n^m(rho; z) is defined by the direct radial integral

    V = sqrt(n+1) i^m int_0^1 rho' R_n^|m|(rho') J_m(-2 pi rho rho') e^{i u rho'^2} d rho'

and evaluated as the Bessel-Bessel series

    V = e^{i beta} sum_h sum_l (-1)^m i^{l+h} sqrt((2l+1)(h+1)) A_{2l,n,h}^{0,m,m} j_l(beta) J_{h+1}(2 pi rho)/(2 pi rho)

obtained from e^{i u rho^2} = e^{i beta} sum_l (2l+1) i^l j_l(beta) R_{2l}^0(rho) and the
Zernike product linearisation. The Fresnel kernel e^{-i k rho.rho'/z} runs opposite to
the Fourier kernel, so the far field of ``fresnel_field`` matches ``fraunhofer_field``
at the point-inverted position q -> -q.
"""

import logging
import math
from dataclasses import dataclass, replace

import numpy as np

from ..core.coupling import coupling_coefficients
from ..core.grid import IMAGE, FieldGrid, GridSpec, fresnel_plane, sample_polar
from ..core.mode_index import ModeIndex, enumerate_up_to
from ..core.quadrature import line_rule
from ..core.special import MAX_BESSEL_ORDER, bessel_j, bessel_j_over_x, spherical_bessel_j
from ..core.zernike import ZernikeExpansion
from ..errors import ConvergenceError, DomainError

log = logging.getLogger(__name__)

_AUTO_GUARD = 1e-3


# ── Fourier transform / image plane ──


def zernike_ft(idx: ModeIndex, q, phi):
    """Z~_n^m(q, phi) = 2 pi i^n sqrt(n+1) J_{n+1}(2 pi q)/(2 pi q) e^{i m phi}."""
    qa = np.asarray(q, dtype=float)
    if qa.size and np.any(qa < 0):
        raise DomainError("q must be non-negative")
    radial_part = 2.0 * math.pi * (1j**idx.n) * math.sqrt(idx.n + 1) * np.asarray(
        bessel_j_over_x(idx.n + 1, 2.0 * math.pi * qa)
    )
    out = radial_part * np.exp(1j * idx.m * np.asarray(phi, dtype=float))
    return complex(out) if np.ndim(out) == 0 else out


def pupil_spectrum(exp: ZernikeExpansion, q, phi):
    """P~(q) = sum a_{mn} Z~_n^m(q): the same coefficients in the image plane."""
    qa = np.asarray(q, dtype=float)
    total = np.zeros(np.broadcast(qa, np.asarray(phi)).shape, dtype=complex)
    for idx, a in exp.items():
        total = total + a * zernike_ft(idx, qa, phi)
    return complex(total) if total.ndim == 0 else total


def fraunhofer_field(exp: ZernikeExpansion, spec: GridSpec, threads: int = 1) -> FieldGrid:
    return FieldGrid(spec, sample_polar(spec, lambda r, phi: pupil_spectrum(exp, r, phi), threads), IMAGE)


def image_gram(n_max: int, q_max: float = 200.0, tail_correction: bool = True) -> np.ndarray:
    """Gram matrix int Z~_a* Z~_b d^2q for all modes n <= n_max, pi I in the limit.

    The angular integral is exact (2 pi delta_{m m'}); the radial one runs in
    x = 2 pi q over [0, 2 pi q_max] with a composite Gauss-Legendre rule. The
    truncated J_a J_b / x tail is (-1)^((b-a)/2) / (pi x_max) + O(x_max^-2); without
    ``tail_correction`` the diagonal falls short of pi by about 2(n+1) / x_max.
    """
    modes = enumerate_up_to(n_max)
    x_max = 2.0 * math.pi * q_max
    x, w = line_rule(x_max, math.pi)
    ratios = {n: np.asarray(bessel_j(n + 1, x)) for n in {idx.n for idx in modes}}
    gram = np.zeros((len(modes), len(modes)), dtype=complex)
    for i, a in enumerate(modes):
        for j, b in enumerate(modes):
            if a.m != b.m or j < i:
                continue
            integral = float(np.dot(w, ratios[a.n] * ratios[b.n] / x))
            if tail_correction:
                integral += (-1.0) ** ((b.n - a.n) // 2) / (math.pi * x_max)
            value = 2.0 * math.pi * (1j ** (b.n - a.n)) * math.sqrt((a.n + 1) * (b.n + 1)) * integral
            gram[i, j] = value
            gram[j, i] = np.conj(value)
    return gram


# ── Fresnel propagation ──


@dataclass(frozen=True)
class FresnelParams:
    z: float
    k: float

    def __post_init__(self):
        if not (self.z > 0 and self.k > 0):
            raise DomainError(f"Fresnel parameters need z > 0 and k > 0, got z={self.z}, k={self.k}")

    @property
    def beta(self) -> float:
        return self.k / (4.0 * self.z)


@dataclass(frozen=True)
class TruncationRule:
    """Series limits; ``None`` means automatic.

    Automatic limits start at h ~ pi e rho_max and l ~ e k / (8 z), plus ``margin``,
    and keep growing while the first neglected kernel J_{h+1}(2 pi rho_max) / (2 pi rho_max)
    or j_l(beta) is still above ``tolerance`` times a guard factor.
    """

    h_max: int | None = None
    l_max: int | None = None
    margin: int = 12
    tolerance: float = 1e-12

    def resolve(self, params: FresnelParams, rho_max: float) -> tuple[int, int]:
        floor = self.tolerance * _AUTO_GUARD
        h_max = self.h_max
        if h_max is None:
            h_max = math.ceil(math.pi * math.e * rho_max) + self.margin
            x = 2.0 * math.pi * rho_max
            while x > 0 and h_max < MAX_BESSEL_ORDER - 1 and abs(bessel_j(h_max + 1, x)) / x > floor:
                h_max += 1
        l_max = self.l_max
        if l_max is None:
            l_max = math.ceil(math.e * params.beta / 2.0) + self.margin
            while l_max < MAX_BESSEL_ORDER and abs(spherical_bessel_j(l_max, params.beta)) > floor:
                l_max += 1
        return h_max, min(l_max, MAX_BESSEL_ORDER)


@dataclass(frozen=True)
class _FresnelSeries:
    """b_h weights: V(rho) = e^{i beta} sum_h b_h J_{h+1}(2 pi rho)/(2 pi rho)."""

    orders: tuple[int, ...]
    weights: np.ndarray
    last_shell: np.ndarray
    h_truncated: bool
    h_max: int
    l_max: int


def _series(idx: ModeIndex, params: FresnelParams, h_max: int, l_max: int) -> _FresnelSeries:
    beta = params.beta
    sign = -1.0 if idx.m % 2 else 1.0
    weights: dict[int, complex] = {}
    last: dict[int, complex] = {}
    truncated = False
    for l in range(l_max + 1):
        jl = float(spherical_bessel_j(l, beta))
        table = coupling_coefficients(ModeIndex(2 * l, 0), idx)
        for h, value in table.items():
            if h > h_max:
                truncated = True
                continue
            term = sign * (1j ** ((l + h) % 4)) * math.sqrt((2 * l + 1) * (h + 1)) * value * jl
            weights[h] = weights.get(h, 0.0j) + term
            if l == l_max:
                last[h] = last.get(h, 0.0j) + term
    orders = tuple(sorted(weights))
    return _FresnelSeries(
        orders=orders,
        weights=np.array([weights[h] for h in orders], dtype=complex),
        last_shell=np.array([last.get(h, 0.0j) for h in orders], dtype=complex),
        h_truncated=truncated,
        h_max=h_max,
        l_max=l_max,
    )


def fresnel_v(idx: ModeIndex, rho, params: FresnelParams, truncation: TruncationRule | None = None):
    """V_n^m(rho; z) by the Bessel-Bessel series, with a tail check."""
    rule = truncation or TruncationRule()
    r = np.asarray(rho, dtype=float)
    if r.size and np.any(r < 0):
        raise DomainError("rho must be non-negative")
    rho_max = float(r.max()) if r.size else 0.0
    h_max, l_max = rule.resolve(params, rho_max)
    series = _series(idx, params, h_max, l_max)

    x = (2.0 * math.pi * r).reshape(-1)
    total = np.zeros(x.shape, dtype=complex)
    shell = np.zeros(x.shape, dtype=complex)
    kernel = np.zeros(x.shape)
    # h-sum in a fixed order, element by element
    for weight, last, h in zip(series.weights, series.last_shell, series.orders):
        kernel = np.asarray(bessel_j_over_x(h + 1, x))
        total = total + weight * kernel
        shell = shell + last * kernel
    value = complex(np.exp(1j * params.beta)) * total

    tail = np.abs(shell)
    if series.h_truncated and series.orders:
        tail = tail + np.abs(series.weights[-1] * kernel)
    excess = tail / np.maximum(1.0, np.abs(value))
    worst = float(np.max(tail)) if tail.size else 0.0
    log.debug("fresnel_v %s: h_max=%d l_max=%d tail=%.3e", idx, h_max, l_max, worst)
    if excess.size and float(np.max(excess)) > rule.tolerance:
        raise ConvergenceError(
            f"Fresnel series for {idx} not converged: tail {worst:.3e} > {rule.tolerance:.1e}",
            {"mode": str(idx), "h_max": h_max, "l_max": l_max, "tail": worst, "beta": params.beta},
        )
    value = value.reshape(r.shape)
    return complex(value) if value.ndim == 0 else value


def fresnel_field(
    exp: ZernikeExpansion,
    params: FresnelParams,
    spec: GridSpec,
    truncation: TruncationRule | None = None,
    threads: int = 1,
) -> FieldGrid:
    """-(ik/z) e^{ikz + i k rho_phys^2 / 2z} sum a_{mn} e^{i m theta} V_n^m(rho; z)."""
    prefactor = -1j * params.k / params.z * complex(np.exp(1j * math.fmod(params.k * params.z, 2.0 * math.pi)))
    chirp = 2.0 * math.pi**2 * params.z / params.k
    # limits fixed from the whole grid so every row block sums the same series
    rule = truncation or TruncationRule()
    h_max, l_max = rule.resolve(params, float(np.max(spec.polar()[0])))
    rule = replace(rule, h_max=h_max, l_max=l_max)

    def _eval(r, phi):
        total = np.zeros(r.shape, dtype=complex)
        for idx, a in exp.items():
            total = total + a * np.exp(1j * idx.m * phi) * fresnel_v(idx, r, params, rule)
        return prefactor * np.exp(1j * chirp * r * r) * total

    return FieldGrid(spec, sample_polar(spec, _eval, threads), fresnel_plane(params.z))
