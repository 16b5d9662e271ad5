"""Ground-state averages over the auxiliary oscillators.

In the oscillator ground state both ``a`` and ``pb`` are distributed with
density ``pi**-1.5 * exp(-|u|**2)`` (so ``<u_i u_j> = delta_ij / 2``).  The
averages are taken with a tensor-product Gauss-Hermite rule, which is exact
for the low-degree polynomial integrands that appear here.  Each error
estimate is the change when the node count is doubled.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache
from typing import Callable

import numpy as np

from .algebra import CanonicalState, NCCouplings
from .errors import DomainError, ValidationError

DEFAULT_NODES = 20


@dataclass(frozen=True)
class GroundStateMeasure:
    nodes: int = DEFAULT_NODES

    def __post_init__(self):
        if self.nodes < 1:
            raise ValidationError("quadrature order must be >= 1")

    def expectation(self, integrand: Callable[[np.ndarray], np.ndarray]) -> "MomentResult":
        """Average of ``integrand(u)`` where ``u`` has shape (n_points, 3)."""
        value = _quadrature(integrand, self.nodes)
        refined = _quadrature(integrand, 2 * self.nodes)
        return MomentResult(value, abs(refined - value))


@dataclass(frozen=True)
class MomentResult:
    value: float
    error: float

    def __float__(self):
        return float(self.value)


@lru_cache(maxsize=8)
def _gauss_hermite_3d(nodes: int):
    x, w = np.polynomial.hermite.hermgauss(nodes)
    grid = np.stack(np.meshgrid(x, x, x, indexing="ij"), axis=-1).reshape(-1, 3)
    weights = np.einsum("i,j,k->ijk", w, w, w).reshape(-1) * np.pi ** -1.5
    grid.setflags(write=False)
    weights.setflags(write=False)
    return grid, weights


def _quadrature(integrand, nodes: int) -> float:
    grid, weights = _gauss_hermite_3d(nodes)
    return float(weights @ integrand(grid))


def _coupling(kind: str, c: NCCouplings) -> float:
    if kind == "theta":
        return c.c_theta
    if kind == "eta":
        return c.c_eta
    raise ValidationError(f"kind must be 'theta' or 'eta', got {kind!r}")


def tensor_second_moment(kind: str, i: int, j: int, c: NCCouplings,
                         nodes: int = DEFAULT_NODES) -> MomentResult:
    """``<theta_i theta_j>`` or ``<eta_i eta_j>`` with 0-based vector indices."""
    if not (0 <= i < 3 and 0 <= j < 3):
        raise ValidationError(f"indices must be in 0..2, got ({i}, {j})")
    coupling = _coupling(kind, c)
    return GroundStateMeasure(nodes).expectation(
        lambda u: coupling ** 2 * u[:, i] * u[:, j])


def mean_square(kind: str, c: NCCouplings, nodes: int = DEFAULT_NODES) -> float:
    """``<theta^2>`` or ``<eta^2>``; isotropy makes this three diagonal moments."""
    return 3.0 * tensor_second_moment(kind, 0, 0, c, nodes).value


def _combine(*parts: MomentResult) -> MomentResult:
    return MomentResult(sum(p.value for p in parts), sum(p.error for p in parts))


def _eta_part(state: CanonicalState, m: float, c: NCCouplings, measure: GroundStateMeasure) -> MomentResult:
    # -(eta.L)/2m + [eta x x]^2/8m - <eta^2> x^2/12m
    x, p = state.x, state.p
    L = np.cross(x, p)
    eta2 = mean_square("eta", c, measure.nodes)

    def integrand(u):
        eta = c.c_eta * u
        cross = np.cross(eta, x)
        return (-(eta @ L) / (2 * m) + np.einsum("ni,ni->n", cross, cross) / (8 * m)
                - eta2 * (x @ x) / (12 * m))

    return measure.expectation(integrand)


def average_delta_h_uniform(state: CanonicalState, m: float, g: float, c: NCCouplings,
                            nodes: int = DEFAULT_NODES) -> MomentResult:
    """Ground-state average of the noncommutative remainder of the uniform-field Hamiltonian."""
    if m <= 0:
        raise ValidationError("mass must be positive")
    measure = GroundStateMeasure(nodes)
    p = state.p

    def theta_integrand(u):
        theta = c.c_theta * u
        return m * g / 2 * np.cross(theta, p)[:, 0]

    return _combine(_eta_part(state, m, c, measure), measure.expectation(theta_integrand))


def average_delta_h_kepler(state: CanonicalState, m: float, GM: float, c: NCCouplings,
                           nodes: int = DEFAULT_NODES) -> MomentResult:
    """Ground-state average of the classical remainder of the Kepler Hamiltonian.

    Operator orderings collapse to the commuting form and terms of order
    hbar**2 are dropped.
    """
    if m <= 0:
        raise ValidationError("mass must be positive")
    x, p = state.x, state.p
    r = float(np.linalg.norm(x))
    if r == 0.0:
        raise DomainError("Kepler remainder is singular at x = 0")
    measure = GroundStateMeasure(nodes)
    L = np.cross(x, p)
    L2 = L @ L
    p2 = p @ p
    theta2 = mean_square("theta", c, nodes)
    k = GM * m

    def theta_integrand(u):
        theta = c.c_theta * u
        theta_l = theta @ L
        cross = np.cross(theta, p)
        cross2 = np.einsum("ni,ni->n", cross, cross)
        return (-k / (2 * r ** 3) * theta_l
                + k * L2 * theta2 / (8 * r ** 5)
                + k / (8 * r ** 3) * cross2
                - 3 * k / (8 * r ** 5) * theta_l ** 2
                - k * theta2 * p2 / (12 * r ** 3))

    return _combine(_eta_part(state, m, c, measure), measure.expectation(theta_integrand))
