"""Composite bodies: center-of-mass variables and effective noncommutativity.

All particles share one set of auxiliary oscillator variables; their tensors
differ only through the per-particle couplings.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .algebra import (AlgebraReport, CanonicalState, ExtendedPoint, NCCouplings, bracket_matrix,
                      ResidualTracker, canonical_pairs, eta_tensor, represent, represent_functions,
                      theta_tensor)
from .errors import ValidationError

CONDITION_TOL = 1e-12


@dataclass(frozen=True)
class ParticleSpec:
    mass: float
    c_theta: float = 0.0
    c_eta: float = 0.0

    def __post_init__(self):
        if not (np.isfinite(self.mass) and self.mass > 0):
            raise ValidationError(f"particle mass must be positive, got {self.mass}")
        NCCouplings(self.c_theta, self.c_eta)

    @property
    def couplings(self) -> NCCouplings:
        return NCCouplings(self.c_theta, self.c_eta)

    @classmethod
    def from_constants(cls, mass: float, gamma: float, alpha: float) -> "ParticleSpec":
        """Particle whose couplings obey ``c_theta m = gamma`` and ``c_eta / m = alpha``."""
        return cls(mass, gamma / mass, alpha * mass)


@dataclass(frozen=True)
class CompositeBody:
    particles: tuple[ParticleSpec, ...]

    def __init__(self, particles: Sequence[ParticleSpec]):
        particles = tuple(particles)
        if not particles:
            raise ValidationError("a body needs at least one particle")
        object.__setattr__(self, "particles", particles)

    def __len__(self):
        return len(self.particles)

    @property
    def masses(self) -> np.ndarray:
        return np.array([p.mass for p in self.particles])

    @property
    def total_mass(self) -> float:
        return float(np.sum(self.masses))

    @property
    def mass_fractions(self) -> np.ndarray:
        return self.masses / self.total_mass

    @property
    def c_theta(self) -> np.ndarray:
        return np.array([p.c_theta for p in self.particles])

    @property
    def c_eta(self) -> np.ndarray:
        return np.array([p.c_eta for p in self.particles])

    def merged(self, other: "CompositeBody") -> "CompositeBody":
        return CompositeBody(self.particles + other.particles)


@dataclass(frozen=True)
class WepConditionReport:
    gamma: float
    alpha: float
    gamma_residual: float
    alpha_residual: float
    tol: float = CONDITION_TOL

    @property
    def satisfied(self) -> bool:
        return self.gamma_residual <= self.tol and self.alpha_residual <= self.tol

    def lines(self) -> list[str]:
        return [f"gamma (c_theta*m) = {self.gamma:.17g}  residual = {self.gamma_residual:.3e}",
                f"alpha (c_eta/m)   = {self.alpha:.17g}  residual = {self.alpha_residual:.3e}",
                f"mass conditions satisfied: {'yes' if self.satisfied else 'no'} (tol {self.tol:.0e})"]


def effective_couplings(body: CompositeBody) -> NCCouplings:
    mu = body.mass_fractions
    return NCCouplings(float(np.sum(mu ** 2 * body.c_theta)), float(np.sum(body.c_eta)))


def check_wep_conditions(body: CompositeBody, tol: float = CONDITION_TOL) -> WepConditionReport:
    gammas = body.c_theta * body.masses
    alphas = body.c_eta / body.masses
    gamma, alpha = float(np.mean(gammas)), float(np.mean(alphas))
    return WepConditionReport(gamma, alpha, float(np.max(np.abs(gammas - gamma))),
                              float(np.max(np.abs(alphas - alpha))), tol)


def com_split(body: CompositeBody, states: Sequence[CanonicalState]):
    """Center-of-mass and relative variables ``(xc, pc, dx, dp)``; ``dx``/``dp`` have shape (N, 3)."""
    if len(states) != len(body):
        raise ValidationError(f"got {len(states)} states for {len(body)} particles")
    mu = body.mass_fractions
    x = np.array([s.x for s in states])
    p = np.array([s.p for s in states])
    xc = mu @ x
    pc = p.sum(axis=0)
    return xc, pc, x - xc, p - mu[:, None] * pc


def _com_functions(body: CompositeBody):
    n = len(body)
    mu = body.mass_fractions
    per_particle = [represent_functions(p.couplings, n, k) for k, p in enumerate(body.particles)]
    Xc = [sum((mu[k] * per_particle[k][0][i] for k in range(n)), 0.0) for i in range(3)]
    Pc = [sum((per_particle[k][1][i] for k in range(n)), 0.0) for i in range(3)]
    dX = [[per_particle[k][0][i] - Xc[i] for i in range(3)] for k in range(n)]
    dP = [[per_particle[k][1][i] - mu[k] * Pc[i] for i in range(3)] for k in range(n)]
    return Xc, Pc, dX, dP


def verify_com_algebra(body: CompositeBody, samples: int = 100, tol: float = 1e-12,
                       seed: int | np.random.Generator | None = 0) -> AlgebraReport:
    """Compare center-of-mass brackets with their closed forms at random points.

    The ``decoupling`` row holds ``max |{Xc, dX}|, |{Pc, dP}|``; it is
    required to vanish only when the mass conditions hold.
    """
    if samples < 1 or tol <= 0:
        raise ValidationError("samples must be >= 1 and tol > 0")
    rng = np.random.default_rng(seed)
    n = len(body)
    mu = body.mass_fractions
    couplings = [p.couplings for p in body.particles]
    Xc, Pc, dX, dP = _com_functions(body)
    pairs = canonical_pairs(n)
    conditions = check_wep_conditions(body)

    track = ResidualTracker()
    for _ in range(samples):
        point = ExtendedPoint.random(n, rng)
        z = point.to_vector()
        thetas = np.array([theta_tensor(c, point.aux) for c in couplings])
        etas = np.array([eta_tensor(c, point.aux) for c in couplings])
        theta_c = np.einsum("n,nij->ij", mu ** 2, thetas)
        eta_c = etas.sum(axis=0)
        track.record("XcXc", np.max(np.abs(bracket_matrix(Xc, Xc, z, pairs) - theta_c)))
        track.record("PcPc", np.max(np.abs(bracket_matrix(Pc, Pc, z, pairs) - eta_c)))
        mixed = np.eye(3) + np.einsum("n,nik,njk->ij", mu, thetas, etas) / 4
        track.record("XcPc", np.max(np.abs(bracket_matrix(Xc, Pc, z, pairs) - mixed)))
        decoupling = 0.0
        for k in range(n):
            xd = bracket_matrix(Xc, dX[k], z, pairs)
            pd = bracket_matrix(Pc, dP[k], z, pairs)
            track.record("XcdX closed form", np.max(np.abs(xd - (mu[k] * thetas[k] - theta_c))))
            track.record("PcdP closed form", np.max(np.abs(pd - (etas[k] - mu[k] * eta_c))))
            decoupling = max(decoupling, np.max(np.abs(xd)), np.max(np.abs(pd)))
        track.record("decoupling", decoupling, required=conditions.satisfied)

    report = AlgebraReport()
    track.into(report, samples, tol)
    if not conditions.satisfied:
        report.notes.append("mass conditions violated: center of mass does not decouple")
    return report


def com_representation_check(body: CompositeBody, samples: int = 100, tol: float = 1e-12,
                             seed: int | np.random.Generator | None = 0) -> AlgebraReport:
    """Check ``Xc = xc - theta_c pc / 2`` and ``Pc = pc + eta_c xc / 2``.

    These hold only under the mass conditions.  For a violating body the
    residuals are still computed and the report carries a note.
    """
    rng = np.random.default_rng(seed)
    n = len(body)
    mu = body.mass_fractions
    couplings = [p.couplings for p in body.particles]
    eff = effective_couplings(body)
    conditions = check_wep_conditions(body)
    track = ResidualTracker()
    for _ in range(samples):
        point = ExtendedPoint.random(n, rng)
        reps = [represent(s, c, point.aux) for s, c in zip(point.canon, couplings)]
        Xc = mu @ np.array([r[0] for r in reps])
        Pc = np.sum([r[1] for r in reps], axis=0)
        xc, pc, _, _ = com_split(body, point.canon)
        theta_c = theta_tensor(eff, point.aux)
        eta_c = eta_tensor(eff, point.aux)
        track.record("Xc representation", np.max(np.abs(Xc - (xc - 0.5 * theta_c @ pc))))
        track.record("Pc representation", np.max(np.abs(Pc - (pc + 0.5 * eta_c @ xc))))
    report = AlgebraReport()
    track.into(report, samples, tol)
    if not conditions.satisfied:
        report.notes.append("precondition violated: mass conditions do not hold for this body")
    return report
