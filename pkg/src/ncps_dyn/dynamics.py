"""Classical (hbar -> 0) motion in uniform and Kepler-type fields.

States are kinematic: position ``x`` and ``v = p/m``.  In the Kepler system
``v`` is the scaled canonical momentum, which differs from ``dx/dt`` once
coordinate noncommutativity is switched on.

Every right-hand side is written in terms of the mass-invariant constants
``A = m**2 <theta^2>`` and ``B = <eta^2> / m**2``.  The mass-dependent entry
points only convert to ``(A, B)`` and delegate.

The uniform field points along ``-x1``: ``H = p^2/2m + m g x1``, so free fall
is ``x1 = x01 + v01 t - g t^2 / 2``.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable

import numpy as np

from .errors import DomainError, SingularityError, ValidationError
from .integrator import IntegratorStats, dopri5

E1 = np.array([1.0, 0.0, 0.0])
DEFAULT_R_MIN = 1e-6


@dataclass(frozen=True)
class UniformField:
    g: float

    def __post_init__(self):
        if not np.isfinite(self.g) or self.g < 0:
            raise ValidationError(f"field strength g must be finite and >= 0, got {self.g}")


@dataclass(frozen=True)
class KeplerField:
    GM: float

    def __post_init__(self):
        if not np.isfinite(self.GM) or self.GM <= 0:
            raise ValidationError(f"GM must be positive, got {self.GM}")


@dataclass(frozen=True)
class EffectiveNC:
    """Mass-invariant noncommutativity constants: ``A = m^2 <theta^2>``, ``B = <eta^2>/m^2``."""

    A: float = 0.0
    B: float = 0.0

    def __post_init__(self):
        for name in ("A", "B"):
            value = getattr(self, name)
            if not np.isfinite(value) or value < 0:
                raise ValidationError(f"{name} must be finite and >= 0, got {value}")

    @classmethod
    def from_moments(cls, m: float, theta2: float, eta2: float) -> "EffectiveNC":
        return cls(A=m * m * theta2, B=eta2 / (m * m))


@dataclass
class KinematicState:
    """Position and velocity; arrays may carry a leading time axis."""

    x: np.ndarray
    v: np.ndarray

    def __post_init__(self):
        self.x = np.asarray(self.x, dtype=float)
        self.v = np.asarray(self.v, dtype=float)

    def to_vector(self) -> np.ndarray:
        return np.concatenate([self.x, self.v])

    @classmethod
    def from_vector(cls, y) -> "KinematicState":
        return cls(y[:3], y[3:6])


@dataclass
class Trajectory:
    """Sampled solution with per-sample energy and specific angular momentum ``x cross v``."""

    t: np.ndarray
    x: np.ndarray
    v: np.ndarray
    energy: np.ndarray
    angular_momentum: np.ndarray
    stats: IntegratorStats = field(default_factory=IntegratorStats)

    def __post_init__(self):
        if self.t.size < 2 or np.any(np.diff(self.t) <= 0):
            raise ValidationError("trajectory needs >= 2 samples with strictly increasing t")

    def __len__(self):
        return self.t.size

    def state(self, k: int) -> KinematicState:
        return KinematicState(self.x[k], self.v[k])


def _require_mass(m: float):
    if not (np.isfinite(m) and m > 0):
        raise ValidationError(f"mass must be positive, got {m}")


# -- uniform field ---------------------------------------------------------

def uniform_closed_form(t, init: KinematicState, g: float, B: float) -> KinematicState:
    """Harmonic free fall with frequency ``sqrt(B/6)``, independent of mass.

    Written as ``x0 cos wt + v0 sin(wt)/w - e1 2g sin^2(wt/2)/w^2``, which is
    algebraically the shifted-oscillator form but keeps full precision as
    ``B -> 0``.
    """
    if not B > 0:
        raise ValidationError("B must be positive; use uniform_parabola for the commutative limit")
    t = np.asarray(t, dtype=float)
    w = np.sqrt(B / 6.0)
    tt = t[..., None]
    cos, sin = np.cos(w * tt), np.sin(w * tt)
    half = np.sin(w * tt / 2)
    x = init.x * cos + init.v * sin / w - E1 * (2 * g * half ** 2 / w ** 2)
    v = -init.x * w * sin + init.v * cos - E1 * (g * sin / w)
    return KinematicState(x, v)


def uniform_analytic(t, init: KinematicState, m: float, g: float, eta2: float) -> KinematicState:
    """Closed-form trajectory of a particle of mass ``m`` given ``<eta^2>``."""
    _require_mass(m)
    if not eta2 > 0:
        raise ValidationError("eta2 must be positive; use uniform_parabola for eta2 = 0")
    return uniform_closed_form(t, init, g, eta2 / (m * m))


def uniform_parabola(t, init: KinematicState, g: float) -> KinematicState:
    t = np.asarray(t, dtype=float)[..., None]
    x = init.x + init.v * t - E1 * (g * t ** 2 / 2)
    v = init.v - E1 * (g * t)
    return KinematicState(x, v)


def uniform_rhs_b(state: KinematicState, g: float, B: float) -> KinematicState:
    return KinematicState(state.v.copy(), -g * E1 - (B / 6.0) * state.x)


def uniform_rhs(state: KinematicState, m: float, g: float, eta2: float) -> KinematicState:
    _require_mass(m)
    return uniform_rhs_b(state, g, eta2 / (m * m))


def hamiltonian_uniform(state: KinematicState, m: float, g: float, eta2: float) -> float:
    _require_mass(m)
    x, v = state.x, state.v
    return m * (v @ v) / 2 + m * g * x[..., 0] + eta2 * (x @ x) / (12 * m)


def hamiltonian_uniform_b(state: KinematicState, m: float, g: float, B: float):
    """Vectorized over a leading time axis."""
    x, v = state.x, state.v
    return m * (0.5 * np.sum(v * v, -1) + g * x[..., 0] + B * np.sum(x * x, -1) / 12)


# -- Kepler field ----------------------------------------------------------

def kepler_rhs(state: KinematicState, field: KeplerField, nc: EffectiveNC,
               r_min: float = DEFAULT_R_MIN) -> KinematicState:
    x, v = state.x, state.v
    r2 = x @ x
    r = np.sqrt(r2)
    if not r > r_min:
        raise SingularityError(f"|x| = {r:.3e} within guard radius {r_min:.1e}")
    GM, A, B = field.GM, nc.A, nc.B
    r3 = r2 * r
    r5 = r3 * r2
    r7 = r5 * r2
    xv = x @ v
    v2 = v @ v
    L = np.cross(x, v)
    L2 = L @ L
    xdot = v - (GM * A / 12) * (v / r3 - 3 * x * xv / r5)
    vdot = (-GM * x / r3 - B * x / 6
            - (GM * A / 4) * (xv * v / r5 - 2 * x * v2 / r5 + 5 * x * L2 / (2 * r7)))
    return KinematicState(xdot, vdot)


def kepler_rhs_mass(state: KinematicState, field: KeplerField, m: float, theta2: float,
                    eta2: float, r_min: float = DEFAULT_R_MIN) -> KinematicState:
    """Equations of motion for a particle of mass ``m`` with given tensor mean squares."""
    _require_mass(m)
    return kepler_rhs(state, field, EffectiveNC.from_moments(m, theta2, eta2), r_min)


def hamiltonian_kepler(state: KinematicState, field: KeplerField, nc: EffectiveNC, m: float):
    """Averaged classical Hamiltonian; vectorized over a leading time axis."""
    _require_mass(m)
    x, v = state.x, state.v
    r2 = np.sum(x * x, -1)
    r = np.sqrt(r2)
    if np.any(r == 0):
        raise DomainError("Kepler Hamiltonian is singular at x = 0")
    v2 = np.sum(v * v, -1)
    L = np.cross(x, v)
    L2 = np.sum(L * L, -1)
    GM, A, B = field.GM, nc.A, nc.B
    per_mass = (v2 / 2 - GM / r + B * r2 / 12
                - GM * A * L2 / (8 * r ** 5) + GM * A * v2 / (12 * r ** 3))
    return m * per_mass


# -- integration -----------------------------------------------------------

def output_grid(t_end: float, dt_out: float, t0: float = 0.0) -> np.ndarray:
    """Uniform grid from ``t0`` to ``t_end`` inclusive; the last interval may be shorter."""
    if not (np.isfinite(t_end) and t_end > t0):
        raise ValidationError("t_end must be finite and greater than the start time")
    if not (np.isfinite(dt_out) and dt_out > 0):
        raise ValidationError("dt_out must be positive")
    n = int(np.floor((t_end - t0) / dt_out * (1 + 1e-12)))
    grid = t0 + dt_out * np.arange(n + 1)
    if t_end - grid[-1] > 1e-9 * dt_out:
        grid = np.append(grid, t_end)
    else:
        grid[-1] = t_end
    return grid


def integrate(rhs: Callable[[KinematicState], KinematicState], init: KinematicState, t_span,
              rel_tol: float = 1e-10, abs_tol: float = 1e-12, dt_out: float | None = None,
              energy: Callable[[KinematicState], np.ndarray] | None = None) -> Trajectory:
    """Adaptive 5(4) solution of an autonomous system sampled every ``dt_out``.

    ``energy`` is evaluated on the sampled states (vectorized over time);
    without it the energy column is NaN.
    """
    t0, t1 = (float(s) for s in t_span)
    grid = output_grid(t1, dt_out if dt_out is not None else (t1 - t0) / 100, t0)

    def f(_t, y):
        return rhs(KinematicState(y[:3], y[3:])).to_vector()

    Y, stats = dopri5(f, init.to_vector(), grid, rel_tol, abs_tol)
    return trajectory_from_states(grid, Y[:, :3], Y[:, 3:], energy, stats)


def trajectory_from_states(t, x, v, energy=None, stats: IntegratorStats | None = None) -> Trajectory:
    states = KinematicState(x, v)
    e = np.asarray(energy(states), dtype=float) if energy is not None else np.full(len(t), np.nan)
    return Trajectory(np.asarray(t, dtype=float), states.x, states.v, e,
                      np.cross(states.x, states.v), stats or IntegratorStats())
