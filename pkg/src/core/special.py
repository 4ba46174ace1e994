"""Special functions: Bessel J_n, spherical Bessel j_l, Clebsch-Gordan coefficients.

All evaluators accept scalars or numpy arrays and return the same shape
(a Python float for scalar input).

Regimes for J_n(x), |x| = a:
    a**2 <= 4(n+1)      ascending series (terms decrease monotonically)
    a >= max(50, n**2)  Hankel asymptotic expansion
    otherwise           Miller downward recurrence, normalised by J_0 + 2*sum J_2k = 1
"""

import logging
import math
from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from ..errors import DomainError, InvalidTriple

log = logging.getLogger(__name__)

MAX_BESSEL_ORDER = 200
MAX_BESSEL_ARG = 1.0e5

_ASYMPTOTIC_MIN = 50.0
_RESCALE_AT = 1.0e200
_SERIES_EPS = 1.0e-17
_SMALL_X = 1.0e-6


def _as_array(x) -> tuple[np.ndarray, bool]:
    arr = np.asarray(x, dtype=float)
    return arr, arr.ndim == 0


def _finish(out: np.ndarray, scalar: bool):
    return float(out) if scalar else out


def _check_range(order: int, ax: np.ndarray, name: str):
    if order < 0 or order > MAX_BESSEL_ORDER:
        raise DomainError(f"{name}: order {order} outside [0, {MAX_BESSEL_ORDER}]")
    if ax.size and (not np.all(np.isfinite(ax)) or ax.max() > MAX_BESSEL_ARG):
        raise DomainError(f"{name}: |x| must be finite and <= {MAX_BESSEL_ARG:g}")


# ── Bessel J_n ──


def _j_series(order: int, ax: np.ndarray) -> np.ndarray:
    with np.errstate(divide="ignore"):
        lead = np.exp(order * np.log(ax / 2.0) - math.lgamma(order + 1.0))
    if order == 0:
        lead = np.where(ax == 0.0, 1.0, lead)
    y = -0.25 * ax * ax
    term = np.ones_like(ax)
    total = np.ones_like(ax)
    active = np.ones(ax.shape, dtype=bool)
    for k in range(1, 200):
        term = term * y / (k * (k + order))
        total = np.where(active, total + term, total)
        active &= np.abs(term) > _SERIES_EPS * np.abs(total)
        if not np.any(active):
            break
    return lead * total


def _j_hankel(order: int, ax: np.ndarray) -> np.ndarray:
    mu = 4.0 * order * order
    p = np.ones_like(ax)
    q = np.zeros_like(ax)
    term = np.ones_like(ax)
    active = np.ones(ax.shape, dtype=bool)
    for k in range(1, 120):
        nxt = term * (mu - (2 * k - 1) ** 2) / (8.0 * k * ax)
        # asymptotic series: stop each element once terms start to grow
        active &= np.abs(nxt) <= np.abs(term)
        sign = -1.0 if (k // 2) % 2 else 1.0
        if k % 2:
            q = np.where(active, q + sign * nxt, q)
        else:
            p = np.where(active, p + sign * nxt, p)
        term = nxt
        active &= np.abs(term) > _SERIES_EPS
        if not np.any(active):
            break
    chi = ax - (0.5 * order + 0.25) * math.pi
    return np.sqrt(2.0 / (math.pi * ax)) * (p * np.cos(chi) - q * np.sin(chi))


def _miller_starts(order: int, ax: np.ndarray) -> np.ndarray:
    """Starting index of the downward recurrence, from each element's own argument."""
    top = np.maximum(float(order), ax)
    return (top + 25.0 + 10.0 * np.cbrt(top)).astype(np.int64)


def _j_miller(order: int, ax: np.ndarray) -> np.ndarray:
    starts = _miller_starts(order, ax)
    starts += starts % 2
    # an element stays at zero until the sweep reaches its own start
    upper = np.zeros_like(ax)
    current = np.zeros_like(ax)
    norm = np.zeros_like(ax)
    result = np.zeros_like(ax)
    for k in range(int(starts.max()), 0, -1):
        seed = starts == k
        if np.any(seed):
            current = np.where(seed, 1.0, current)
            norm = np.where(seed, 2.0, norm)
        lower = (2.0 * k / ax) * current - upper
        upper, current = current, lower
        index = k - 1
        if index == order:
            result = current.copy()
        if index == 0:
            norm = norm + current
        elif index % 2 == 0:
            norm = norm + 2.0 * current
        big = np.abs(current) > _RESCALE_AT
        if np.any(big):
            scale = np.where(big, 1.0 / _RESCALE_AT, 1.0)
            current, upper, norm, result = current * scale, upper * scale, norm * scale, result * scale
    return result / norm


def bessel_j(order: int, x):
    """Bessel function of the first kind J_order(x) for integer order."""
    order = int(order)
    xa, scalar = _as_array(x)
    ax = np.abs(xa)
    _check_range(order, ax, "bessel_j")

    out = np.empty_like(ax)
    series = ax * ax <= 4.0 * (order + 1)
    asymptotic = ~series & (ax >= max(_ASYMPTOTIC_MIN, float(order * order)))
    miller = ~series & ~asymptotic
    if np.any(series):
        out[series] = _j_series(order, ax[series])
    if np.any(asymptotic):
        out[asymptotic] = _j_hankel(order, ax[asymptotic])
    if np.any(miller):
        out[miller] = _j_miller(order, ax[miller])
    if order % 2:
        out = np.where(xa < 0, -out, out)
    return _finish(out, scalar)


def bessel_j_over_x(order: int, x):
    """J_order(x)/x with the x -> 0 limit taken analytically (order >= 1)."""
    order = int(order)
    if order < 1:
        raise DomainError("bessel_j_over_x: order must be >= 1 (J_0(x)/x is singular)")
    xa, scalar = _as_array(x)
    ax = np.abs(xa)
    small = ax < _SMALL_X
    out = np.empty_like(ax)
    if np.any(small):
        s = ax[small]
        lead = 0.5 * np.power(0.5 * s, order - 1) / math.factorial(order)
        out[small] = lead * (1.0 - s * s / (4.0 * (order + 1)))
    if np.any(~small):
        big = ax[~small]
        out[~small] = np.asarray(bessel_j(order, big)) / big
    # J_n(x)/x is even in x for odd n and odd for even n
    if order % 2 == 0:
        out = np.where(xa < 0, -out, out)
    return _finish(out, scalar)


# ── Spherical Bessel j_l ──


def _sj_series(l: int, ax: np.ndarray) -> np.ndarray:
    log_double_fact = math.lgamma(2 * l + 2.0) - l * math.log(2.0) - math.lgamma(l + 1.0)
    with np.errstate(divide="ignore"):
        lead = np.exp(l * np.log(ax) - log_double_fact)
    if l == 0:
        lead = np.where(ax == 0.0, 1.0, lead)
    y = -0.5 * ax * ax
    term = np.ones_like(ax)
    total = np.ones_like(ax)
    active = np.ones(ax.shape, dtype=bool)
    for k in range(1, 60):
        term = term * y / (k * (2 * l + 2 * k + 1))
        total = np.where(active, total + term, total)
        active &= np.abs(term) > _SERIES_EPS * np.abs(total)
        if not np.any(active):
            break
    return lead * total


def _sj_upward(l: int, ax: np.ndarray) -> np.ndarray:
    j0 = np.sin(ax) / ax
    if l == 0:
        return j0
    j1 = np.sin(ax) / (ax * ax) - np.cos(ax) / ax
    for k in range(1, l):
        j0, j1 = j1, (2 * k + 1) / ax * j1 - j0
    return j1


def _sj_miller(l: int, ax: np.ndarray) -> np.ndarray:
    starts = _miller_starts(l, ax)
    upper = np.zeros_like(ax)
    current = np.zeros_like(ax)
    result = np.zeros_like(ax)
    first = np.zeros_like(ax)
    for k in range(int(starts.max()), 0, -1):
        current = np.where(starts == k, 1.0e-30, current)
        lower = (2 * k + 1) / ax * current - upper
        upper, current = current, lower
        if k - 1 == l:
            result = current.copy()
        if k - 1 == 1:
            first = current.copy()
        big = np.abs(current) > _RESCALE_AT
        if np.any(big):
            scale = np.where(big, 1.0 / _RESCALE_AT, 1.0)
            current, upper, result, first = current * scale, upper * scale, result * scale, first * scale
    zeroth = current
    exact0 = np.sin(ax) / ax
    exact1 = np.sin(ax) / (ax * ax) - np.cos(ax) / ax
    # normalise on whichever of j_0, j_1 is further from a zero
    use0 = np.abs(exact0) >= np.abs(exact1)
    ratio = np.where(use0, exact0 / np.where(use0, zeroth, 1.0), exact1 / np.where(use0, 1.0, first))
    return result * ratio


def spherical_bessel_j(l: int, x):
    """Spherical Bessel function j_l(x)."""
    l = int(l)
    xa, scalar = _as_array(x)
    ax = np.abs(xa)
    _check_range(l, ax, "spherical_bessel_j")

    out = np.empty_like(ax)
    series = ax < 1.0
    upward = ~series & (ax > l)
    miller = ~series & ~upward
    if np.any(series):
        out[series] = _sj_series(l, ax[series])
    if np.any(upward):
        out[upward] = _sj_upward(l, ax[upward])
    if np.any(miller):
        out[miller] = _sj_miller(l, ax[miller])
    if l % 2:
        out = np.where(xa < 0, -out, out)
    return _finish(out, scalar)


# ── Clebsch-Gordan coefficients ──


@dataclass(frozen=True, slots=True)
class AngularMomentumTriple:
    """<j1 m1; j2 m2 | j3 m3> arguments, every value stored doubled (2j, 2m)."""

    j1: int
    m1: int
    j2: int
    m2: int
    j3: int
    m3: int

    def __post_init__(self):
        for j, m in ((self.j1, self.m1), (self.j2, self.m2), (self.j3, self.m3)):
            if j < 0:
                raise InvalidTriple(f"negative angular momentum 2j={j}")
            if abs(m) > j:
                raise InvalidTriple(f"|m| exceeds j (2j={j}, 2m={m})")
            if (j - m) % 2:
                raise InvalidTriple(f"j - m is not an integer (2j={j}, 2m={m})")
        if (self.j1 + self.j2 + self.j3) % 2:
            raise InvalidTriple("j1 + j2 + j3 is not an integer")

    @classmethod
    def from_zernike(cls, n1: int, m1: int, n2: int, m2: int, n3: int, m3: int) -> "AngularMomentumTriple":
        """Zernike (n, m) enter the coupling as (n/2, m/2); doubled, that is (n, m)."""
        return cls(n1, m1, n2, m2, n3, m3)


def clebsch_gordan(t: AngularMomentumTriple) -> float:
    """Condon-Shortley Clebsch-Gordan coefficient via the Racah sum.

    The sum and the squared prefactor are exact rationals; only the final
    square root is taken in floating point.
    """
    if t.m1 + t.m2 != t.m3:
        return 0.0
    if not abs(t.j1 - t.j2) <= t.j3 <= t.j1 + t.j2:
        return 0.0

    fact = math.factorial
    a = (t.j1 + t.j2 - t.j3) // 2
    b = (t.j1 - t.j2 + t.j3) // 2
    c = (-t.j1 + t.j2 + t.j3) // 2
    s = (t.j1 + t.j2 + t.j3) // 2 + 1
    j1_minus = (t.j1 - t.m1) // 2
    j2_plus = (t.j2 + t.m2) // 2
    shift1 = (t.j3 - t.j2 + t.m1) // 2
    shift2 = (t.j3 - t.j1 - t.m2) // 2

    k_min = max(0, -shift1, -shift2)
    k_max = min(a, j1_minus, j2_plus)
    racah = Fraction(0)
    for k in range(k_min, k_max + 1):
        denominator = (
            fact(k) * fact(a - k) * fact(j1_minus - k) * fact(j2_plus - k) * fact(shift1 + k) * fact(shift2 + k)
        )
        racah += Fraction(-1 if k % 2 else 1, denominator)
    if racah == 0:
        return 0.0

    squared_prefactor = Fraction(
        (t.j3 + 1) * fact(a) * fact(b) * fact(c)
        * fact((t.j1 + t.m1) // 2) * fact(j1_minus) * fact(j2_plus) * fact((t.j2 - t.m2) // 2)
        * fact((t.j3 + t.m3) // 2) * fact((t.j3 - t.m3) // 2),
        fact(s),
    )
    return math.copysign(math.sqrt(squared_prefactor * racah * racah), racah)
