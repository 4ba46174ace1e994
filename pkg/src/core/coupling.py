"""Linearisation of Zernike products: Z_a Z_b = sum_{n3} A_{n1 n2 n3}^{m1 m2 m3} Z_{n3}^{m1+m2}.

On unnormalised radials the product is R_{n1}^{|m1|} R_{n2}^{|m2|} = sum |C|^2 R_{n3}^{|m3|}
with C = <n1/2 m1/2; n2/2 m2/2 | n3/2 m3/2>, hence

    A = sqrt((n1+1)(n2+1)/(n3+1)) |C|^2.

The printed alternative sqrt((n3+1)/((n1+1)(n2+1))) |C|^2 fails direct projection;
``prefactor_residuals`` reports both so the choice stays auditable.
"""

import logging
import math
from dataclasses import dataclass
from functools import cache, lru_cache
from types import MappingProxyType
from typing import Mapping

import numpy as np

from ..errors import ZernqError
from .mode_index import ModeIndex, to_single_index
from .quadrature import build_quadrature
from .special import AngularMomentumTriple, clebsch_gordan
from .zernike import ZernikeExpansion, zernike

log = logging.getLogger(__name__)

CACHE_SIZE = 100_000

_SEED_PAIRS = (
    ((1, 1), (1, -1)),
    ((1, 1), (1, 1)),
    ((2, 0), (2, 0)),
    ((3, 1), (2, -2)),
    ((4, 2), (3, -1)),
)


@dataclass(frozen=True)
class CouplingTable:
    a: ModeIndex
    b: ModeIndex
    entries: Mapping[int, float]

    @property
    def m3(self) -> int:
        return self.a.m + self.b.m

    def items(self) -> list[tuple[int, float]]:
        return sorted(self.entries.items())

    def __len__(self) -> int:
        return len(self.entries)


def coupling_window(a: ModeIndex, b: ModeIndex) -> range:
    """Admissible n3: parity of m1+m2, max(|m3|, |n1-n2|) <= n3 <= n1+n2."""
    m3 = a.m + b.m
    return range(max(abs(m3), abs(a.n - b.n)), a.n + b.n + 1, 2)


def radial_product_coefficient(a: ModeIndex, b: ModeIndex, n3: int) -> float:
    """|C|^2 for the unnormalised radial product."""
    c = clebsch_gordan(AngularMomentumTriple.from_zernike(a.n, a.m, b.n, b.m, n3, a.m + b.m))
    return c * c


def _printed_prefactor(n1: int, n2: int, n3: int) -> float:
    return math.sqrt((n3 + 1) / ((n1 + 1) * (n2 + 1)))


def _projection_prefactor(n1: int, n2: int, n3: int) -> float:
    return math.sqrt((n1 + 1) * (n2 + 1) / (n3 + 1))


@lru_cache(maxsize=CACHE_SIZE)
def _table(n1: int, m1: int, n2: int, m2: int) -> tuple[tuple[int, float], ...]:
    a, b = ModeIndex(n1, m1), ModeIndex(n2, m2)
    rows = []
    for n3 in coupling_window(a, b):
        # all-zero m with odd j1+j2+j3 vanishes identically
        if m1 == 0 and m2 == 0 and ((n1 + n2 + n3) // 2) % 2:
            continue
        rows.append((n3, _projection_prefactor(n1, n2, n3) * radial_product_coefficient(a, b, n3)))
    return tuple(rows)


def coupling_coefficients(a: ModeIndex, b: ModeIndex) -> CouplingTable:
    check_normalization()
    # (a, b) and (b, a) share one cache entry, so the table is exactly symmetric
    first, second = sorted((a, b), key=lambda idx: (idx.n, idx.m))
    rows = _table(first.n, first.m, second.n, second.m)
    return CouplingTable(a, b, MappingProxyType(dict(rows)))


def prefactor_residuals(quad_capacity: int = 16) -> dict[str, float]:
    """Max projection mismatch over the seed pairs for both prefactor candidates."""
    quad = build_quadrature(quad_capacity)
    rho, theta, weight = quad.mesh
    worst = {"projection": 0.0, "printed": 0.0}
    for (n1, m1), (n2, m2) in _SEED_PAIRS:
        a, b = ModeIndex(n1, m1), ModeIndex(n2, m2)
        product = zernike(a, rho, theta) * zernike(b, rho, theta)
        for n3 in coupling_window(a, b):
            target = ModeIndex(n3, a.m + b.m)
            projected = np.dot(weight, product * np.conj(zernike(target, rho, theta))) / math.pi
            c2 = radial_product_coefficient(a, b, n3)
            worst["projection"] = max(
                worst["projection"], abs(projected - _projection_prefactor(n1, n2, n3) * c2)
            )
            worst["printed"] = max(worst["printed"], abs(projected - _printed_prefactor(n1, n2, n3) * c2))
    return worst


@cache
def check_normalization() -> dict[str, float]:
    """Run once per process: the closed form must reproduce direct projection."""
    residuals = prefactor_residuals()
    log.debug("coupling prefactor residuals: %s", residuals)
    if residuals["projection"] > 1e-12:
        raise ZernqError(f"coupling normalisation self-check failed: {residuals}")
    return residuals


def product_expansion(e1: ZernikeExpansion, e2: ZernikeExpansion) -> ZernikeExpansion:
    """Expansion of the pointwise product of two expansions."""
    acc: dict[ModeIndex, complex] = {}
    for a, ca in e1.items():
        for b, cb in e2.items():
            table = coupling_coefficients(a, b)
            for n3, value in table.items():
                key = ModeIndex(n3, table.m3)
                acc[key] = acc.get(key, 0.0j) + ca * cb * value
    ordered = {idx: acc[idx] for idx in sorted(acc, key=to_single_index)}
    return ZernikeExpansion(ordered, e1.n_max + e2.n_max)


def coupling_records(table: CouplingTable) -> list[dict]:
    """Rows of the CLI dump: {n1, m1, n2, m2, n3, m3, A}."""
    return [
        {"n1": table.a.n, "m1": table.a.m, "n2": table.b.n, "m2": table.b.m, "n3": n3, "m3": table.m3, "A": value}
        for n3, value in table.items()
    ]
