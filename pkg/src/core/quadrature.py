"""Quadrature rules: the unit disc (pupil) and composite Gauss-Legendre lines."""

import math
from dataclasses import dataclass
from functools import cached_property

import numpy as np
from numpy.polynomial.legendre import leggauss


@dataclass(frozen=True, eq=False)
class DiscQuadrature:
    """Product rule on the unit disc for the measure rho d(rho) d(theta).

    Radial nodes are Gauss-Legendre in s = rho**2, so the weights already carry
    rho d(rho) = ds / 2. The azimuthal rule is the equispaced trapezoid, exact for
    e^{i b theta} with |b| < n_theta.
    """

    radial_nodes: np.ndarray
    radial_weights: np.ndarray
    n_theta: int
    capacity: int

    @cached_property
    def theta_nodes(self) -> np.ndarray:
        return 2.0 * math.pi * np.arange(self.n_theta) / self.n_theta

    @cached_property
    def mesh(self) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
        """Flattened (rho, theta, weight) over all nodes, radial index slowest."""
        rho, theta = np.meshgrid(self.radial_nodes, self.theta_nodes, indexing="ij")
        weight = np.repeat(self.radial_weights * (2.0 * math.pi / self.n_theta), self.n_theta)
        return rho.ravel(), theta.ravel(), weight

    @property
    def size(self) -> int:
        return self.radial_nodes.size * self.n_theta

    def integrate(self, values: np.ndarray) -> complex:
        """Integrate samples laid out like ``mesh``."""
        return complex(np.dot(self.mesh[2], values))


def build_quadrature(degree_capacity: int) -> DiscQuadrature:
    """Rule integrating any product of two Zernike polynomials of order <= capacity."""
    if degree_capacity < 0:
        raise ValueError(f"degree_capacity must be non-negative, got {degree_capacity}")
    x, w = leggauss(degree_capacity + 1)
    s = 0.5 * (x + 1.0)
    return DiscQuadrature(
        radial_nodes=np.sqrt(s),
        # [-1, 1] -> [0, 1] gives 1/2, rho d(rho) = ds/2 gives another 1/2
        radial_weights=0.25 * w,
        n_theta=2 * degree_capacity + 2,
        capacity=degree_capacity,
    )


def line_rule(upper: float, panel_width: float, order: int = 16) -> tuple[np.ndarray, np.ndarray]:
    """Composite Gauss-Legendre nodes/weights on [0, upper]."""
    panels = max(1, math.ceil(upper / panel_width))
    x, w = leggauss(order)
    edges = np.linspace(0.0, upper, panels + 1)
    half = 0.5 * np.diff(edges)
    mid = 0.5 * (edges[:-1] + edges[1:])
    nodes = (mid[:, None] + half[:, None] * x[None, :]).ravel()
    weights = (half[:, None] * w[None, :]).ravel()
    return nodes, weights
