"""Free-fall comparisons between bodies of different mass and composition."""

from __future__ import annotations

from dataclasses import dataclass, field
from itertools import combinations
from typing import Sequence, Union

import numpy as np

from .algebra import NCCouplings
from .averaging import mean_square
from .composite import CompositeBody, effective_couplings
from .dynamics import (DEFAULT_R_MIN, EffectiveNC, KeplerField, KinematicState, Trajectory,
                       UniformField, hamiltonian_kepler, hamiltonian_uniform_b, integrate,
                       kepler_rhs, output_grid, trajectory_from_states, uniform_analytic,
                       uniform_closed_form, uniform_parabola, uniform_rhs_b)
from .errors import ValidationError


def body_effective_dynamics(body: CompositeBody) -> tuple[float, EffectiveNC]:
    """Total mass and the ``(A, B)`` constants governing the body's center of mass."""
    M = body.total_mass
    eff = effective_couplings(body)
    return M, EffectiveNC(A=M * M * mean_square("theta", eff), B=mean_square("eta", eff) / (M * M))


@dataclass(frozen=True)
class FallingBody:
    """A body reduced to what its center-of-mass motion depends on."""

    mass: float
    nc: EffectiveNC
    label: str = ""

    def __post_init__(self):
        if not (np.isfinite(self.mass) and self.mass > 0):
            raise ValidationError(f"body mass must be positive, got {self.mass}")

    @classmethod
    def from_composite(cls, body: CompositeBody, label: str = "") -> "FallingBody":
        M, nc = body_effective_dynamics(body)
        return cls(M, nc, label)


Field = Union[UniformField, KeplerField]


@dataclass
class FreeFallScenario:
    field: Field
    init: KinematicState
    bodies: Sequence[Union[CompositeBody, FallingBody]]
    t_end: float
    dt_out: float
    rel_tol: float = 1e-10
    abs_tol: float = 1e-12
    r_min: float = DEFAULT_R_MIN
    method: str = "auto"  # "analytic" (uniform only), "integrate", or "auto"

    def __post_init__(self):
        if len(self.bodies) < 2:
            raise ValidationError("a comparison needs at least two bodies")
        if not self.t_end > 0:
            raise ValidationError("t_end must be positive")
        if self.method not in ("auto", "analytic", "integrate"):
            raise ValidationError(f"unknown method {self.method!r}")
        if self.method == "analytic" and isinstance(self.field, KeplerField):
            raise ValidationError("no closed form exists for the Kepler field; use method='integrate'")

    def falling_bodies(self) -> list[FallingBody]:
        out = []
        for k, b in enumerate(self.bodies):
            if isinstance(b, CompositeBody):
                b = FallingBody.from_composite(b, f"body{k}")
            out.append(b if b.label else FallingBody(b.mass, b.nc, f"body{k}"))
        return out


@dataclass
class DeviationSeries:
    t: np.ndarray
    deviation: np.ndarray
    trajectories: list[Trajectory] = field(default_factory=list)
    labels: list[str] = field(default_factory=list)
    eotvos: float | None = None

    @property
    def max_deviation(self) -> float:
        return float(np.max(self.deviation))


def fall(body: FallingBody, field: Field, init: KinematicState, t_end: float, dt_out: float,
         method: str = "auto", rel_tol: float = 1e-10, abs_tol: float = 1e-12,
         r_min: float = DEFAULT_R_MIN) -> Trajectory:
    """Center-of-mass trajectory of one body on a uniform output grid."""
    M, nc = body.mass, body.nc
    if isinstance(field, UniformField):
        energy = lambda s: hamiltonian_uniform_b(s, M, field.g, nc.B)
        if method in ("auto", "analytic"):
            t = output_grid(t_end, dt_out)
            if nc.B > 0:
                s = uniform_closed_form(t, init, field.g, nc.B)
            else:
                s = uniform_parabola(t, init, field.g)
            return trajectory_from_states(t, s.x, s.v, energy)
        rhs = lambda s: uniform_rhs_b(s, field.g, nc.B)
    else:
        if method == "analytic":
            raise ValidationError("no closed form exists for the Kepler field")
        energy = lambda s: hamiltonian_kepler(s, field, nc, M)
        rhs = lambda s: kepler_rhs(s, field, nc, r_min)
    return integrate(rhs, init, (0.0, t_end), rel_tol, abs_tol, dt_out, energy)


def pairwise_deviation(trajectories: Sequence[Trajectory]) -> np.ndarray:
    """Max over body pairs of the Euclidean position distance, per sample."""
    dev = np.zeros(len(trajectories[0]))
    for a, b in combinations(trajectories, 2):
        if not np.array_equal(a.t, b.t):
            raise ValidationError("trajectories must share a time grid")
        dev = np.maximum(dev, np.linalg.norm(a.x - b.x, axis=1))
    return dev


def free_fall_compare(scenario: FreeFallScenario) -> DeviationSeries:
    """Drop every body from the same initial state and measure how far they drift apart."""
    bodies = scenario.falling_bodies()
    trajs = [fall(b, scenario.field, scenario.init, scenario.t_end, scenario.dt_out,
                  scenario.method, scenario.rel_tol, scenario.abs_tol, scenario.r_min)
             for b in bodies]
    ratios = [eotvos_ratio(a, b) for a, b in combinations(trajs, 2)]
    ratios = [r for r in ratios if r is not None]
    return DeviationSeries(trajs[0].t, pairwise_deviation(trajs), trajs, [b.label for b in bodies],
                           max(ratios) if ratios else None)


def mean_acceleration(traj: Trajectory) -> np.ndarray:
    """Time average of dv/dt over the run."""
    return (traj.v[-1] - traj.v[0]) / (traj.t[-1] - traj.t[0])


def eotvos_ratio(traj_a: Trajectory, traj_b: Trajectory) -> float | None:
    """``2|<a1> - <a2>| / |<a1> + <a2>|``; ``None`` when the denominator vanishes."""
    if not np.array_equal(traj_a.t, traj_b.t):
        raise ValidationError("trajectories must share a time grid")
    a1, a2 = mean_acceleration(traj_a), mean_acceleration(traj_b)
    denom = float(np.linalg.norm(a1 + a2))
    if denom == 0.0:
        return None
    return 2.0 * float(np.linalg.norm(a1 - a2)) / denom


def independent_particles_com(body: CompositeBody, inits: Sequence[KinematicState],
                              field: UniformField, t) -> np.ndarray:
    """Mass-weighted mean position of non-interacting particles, each on its own closed form."""
    if len(inits) != len(body):
        raise ValidationError(f"got {len(inits)} initial states for {len(body)} particles")
    mu = body.mass_fractions
    total = 0.0
    for frac, particle, init in zip(mu, body.particles, inits):
        eta2 = mean_square("eta", NCCouplings(0.0, particle.c_eta))
        total = total + frac * uniform_analytic(t, init, particle.mass, field.g, eta2).x
    return total


def com_uniform_closed_form(body: CompositeBody, init: KinematicState, field: UniformField, t) -> np.ndarray:
    """Center-of-mass position from the body's total mass and effective momentum coupling."""
    eta2 = mean_square("eta", effective_couplings(body))
    return uniform_analytic(t, init, body.total_mass, field.g, eta2).x
