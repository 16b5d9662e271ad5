"""Noncommutative coordinates and momenta built from canonical variables.

The tensors of noncommutativity are assembled from auxiliary oscillator
variables, and the noncommutative ``X``, ``P`` are represented through
commuting ``x``, ``p``.  Units are fixed to hbar = l_P = 1, and the quantum
commutator ``[A, B]`` is checked through its classical analog ``i {A, B}``.

Phase functions are sparse polynomials over a flat phase-space vector, so
gradients and brackets are exact rather than finite-difference estimates.

Flat layout for ``N`` particles::

    [x(0), p(0), x(1), p(1), ..., x(N-1), p(N-1), a, pa, b, pb]

each block holding three components.
"""

from __future__ import annotations

from collections import defaultdict
from dataclasses import dataclass, field
from typing import Callable, Iterable, Sequence

import numpy as np

from .errors import ValidationError

LEVI_CIVITA = np.zeros((3, 3, 3))
for _i, _j, _k in ((0, 1, 2), (1, 2, 0), (2, 0, 1)):
    LEVI_CIVITA[_i, _j, _k] = 1.0
    LEVI_CIVITA[_i, _k, _j] = -1.0

SAMPLE_RANGE = 2.0


def _vec3(value, name: str) -> np.ndarray:
    arr = np.asarray(value, dtype=float).reshape(-1)
    if arr.shape != (3,):
        raise ValidationError(f"{name} must have 3 components, got {arr.shape}")
    if not np.all(np.isfinite(arr)):
        raise ValidationError(f"{name} must be finite")
    return arr


@dataclass(frozen=True)
class NCCouplings:
    """Dimensionless coupling constants of coordinate and momentum noncommutativity."""

    c_theta: float = 0.0
    c_eta: float = 0.0

    def __post_init__(self):
        for name in ("c_theta", "c_eta"):
            value = getattr(self, name)
            if not np.isfinite(value) or value < 0:
                raise ValidationError(f"{name} must be finite and >= 0, got {value}")


@dataclass
class AuxOscillatorState:
    a: np.ndarray = field(default_factory=lambda: np.zeros(3))
    pa: np.ndarray = field(default_factory=lambda: np.zeros(3))
    b: np.ndarray = field(default_factory=lambda: np.zeros(3))
    pb: np.ndarray = field(default_factory=lambda: np.zeros(3))

    def __post_init__(self):
        for name in ("a", "pa", "b", "pb"):
            setattr(self, name, _vec3(getattr(self, name), name))

    @classmethod
    def random(cls, rng: np.random.Generator, scale: float = SAMPLE_RANGE):
        return cls(*rng.uniform(-scale, scale, size=(4, 3)))

    def to_vector(self) -> np.ndarray:
        return np.concatenate([self.a, self.pa, self.b, self.pb])


@dataclass
class CanonicalState:
    x: np.ndarray = field(default_factory=lambda: np.zeros(3))
    p: np.ndarray = field(default_factory=lambda: np.zeros(3))

    def __post_init__(self):
        self.x = _vec3(self.x, "x")
        self.p = _vec3(self.p, "p")


@dataclass
class ExtendedPoint:
    """Joint evaluation point: canonical variables of every particle plus the oscillators."""

    canon: list[CanonicalState]
    aux: AuxOscillatorState

    def __post_init__(self):
        if len(self.canon) < 1:
            raise ValidationError("ExtendedPoint needs at least one particle")

    @property
    def n_particles(self) -> int:
        return len(self.canon)

    def to_vector(self) -> np.ndarray:
        parts = [np.concatenate([s.x, s.p]) for s in self.canon]
        parts.append(self.aux.to_vector())
        return np.concatenate(parts)

    @classmethod
    def from_vector(cls, z: np.ndarray, n_particles: int) -> "ExtendedPoint":
        z = np.asarray(z, dtype=float)
        canon = [CanonicalState(z[6 * n:6 * n + 3], z[6 * n + 3:6 * n + 6])
                 for n in range(n_particles)]
        base = 6 * n_particles
        aux = AuxOscillatorState(*z[base:base + 12].reshape(4, 3))
        return cls(canon, aux)

    @classmethod
    def random(cls, n_particles: int, rng: np.random.Generator,
               scale: float = SAMPLE_RANGE) -> "ExtendedPoint":
        z = rng.uniform(-scale, scale, size=n_variables(n_particles))
        return cls.from_vector(z, n_particles)


# -- flat layout -----------------------------------------------------------

def n_variables(n_particles: int) -> int:
    return 6 * n_particles + 12


def x_index(n: int, i: int) -> int:
    return 6 * n + i


def p_index(n: int, i: int) -> int:
    return 6 * n + 3 + i


def a_index(n_particles: int, i: int) -> int:
    return 6 * n_particles + i


def pa_index(n_particles: int, i: int) -> int:
    return 6 * n_particles + 3 + i


def b_index(n_particles: int, i: int) -> int:
    return 6 * n_particles + 6 + i


def pb_index(n_particles: int, i: int) -> int:
    return 6 * n_particles + 9 + i


def canonical_pairs(n_particles: int) -> list[tuple[int, int]]:
    """(coordinate, conjugate momentum) index pairs, each with unit bracket."""
    pairs = [(x_index(n, i), p_index(n, i)) for n in range(n_particles) for i in range(3)]
    pairs += [(a_index(n_particles, i), pa_index(n_particles, i)) for i in range(3)]
    pairs += [(b_index(n_particles, i), pb_index(n_particles, i)) for i in range(3)]
    return pairs


# -- phase functions -------------------------------------------------------

def _as_vector(at) -> np.ndarray:
    if isinstance(at, ExtendedPoint):
        return at.to_vector()
    return np.asarray(at, dtype=float)


class PhaseFunction:
    """Sparse polynomial in the flat phase-space variables.

    Monomials are sorted tuples of variable indices (repeated for powers),
    mapped to their coefficients.  Both the value and the gradient are
    evaluated in closed form.
    """

    __slots__ = ("terms",)

    def __init__(self, terms: dict[tuple[int, ...], float] | None = None):
        self.terms = {m: c for m, c in (terms or {}).items() if c != 0.0}

    @classmethod
    def constant(cls, value: float) -> "PhaseFunction":
        return cls({(): float(value)})

    @classmethod
    def variable(cls, index: int) -> "PhaseFunction":
        return cls({(index,): 1.0})

    def __call__(self, at) -> float:
        z = _as_vector(at)
        total = 0.0
        for mono, coef in self.terms.items():
            term = coef
            for k in mono:
                term *= z[k]
            total += term
        return total

    evaluate = __call__

    def gradient(self, at) -> np.ndarray:
        z = _as_vector(at)
        grad = np.zeros_like(z)
        for mono, coef in self.terms.items():
            for pos, k in enumerate(mono):
                if pos > 0 and mono[pos - 1] == k:
                    continue
                rest = mono[:pos] + mono[pos + 1:]
                term = coef * mono.count(k)
                for r in rest:
                    term *= z[r]
                grad[k] += term
        return grad

    def diff(self, index: int) -> "PhaseFunction":
        out: dict[tuple[int, ...], float] = defaultdict(float)
        for mono, coef in self.terms.items():
            count = mono.count(index)
            if count:
                pos = mono.index(index)
                out[mono[:pos] + mono[pos + 1:]] += coef * count
        return PhaseFunction(out)

    def __add__(self, other):
        if not isinstance(other, PhaseFunction):
            other = PhaseFunction.constant(other)
        out = defaultdict(float, self.terms)
        for mono, coef in other.terms.items():
            out[mono] += coef
        return PhaseFunction(out)

    __radd__ = __add__

    def __neg__(self):
        return PhaseFunction({m: -c for m, c in self.terms.items()})

    def __sub__(self, other):
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        if not isinstance(other, PhaseFunction):
            return PhaseFunction({m: c * float(other) for m, c in self.terms.items()})
        out: dict[tuple[int, ...], float] = defaultdict(float)
        for m1, c1 in self.terms.items():
            for m2, c2 in other.terms.items():
                out[tuple(sorted(m1 + m2))] += c1 * c2
        return PhaseFunction(out)

    __rmul__ = __mul__

    def __repr__(self):
        return f"PhaseFunction({len(self.terms)} terms)"


def poisson_bracket(f, g, at) -> float:
    """Classical bracket sum_k (df/dq_k dg/dp_k - df/dp_k dg/dq_k) at a point.

    ``f`` and ``g`` need only a ``gradient(at)`` method.  A flat vector is
    accepted for ``at``; its length fixes the particle count.
    """
    z = _as_vector(at)
    n_particles = (z.size - 12) // 6
    gf, gg = f.gradient(z), g.gradient(z)
    q, p = np.array(canonical_pairs(n_particles)).T
    return float(gf[q] @ gg[p] - gf[p] @ gg[q])


def bracket_function(f: PhaseFunction, g: PhaseFunction, n_particles: int) -> PhaseFunction:
    """The bracket ``{f, g}`` as a polynomial (used for nested brackets)."""
    out = PhaseFunction()
    for q, p in canonical_pairs(n_particles):
        out = out + f.diff(q) * g.diff(p) - f.diff(p) * g.diff(q)
    return out


def finite_difference_gradient(fn: Callable[[np.ndarray], float], z, step: float = 1e-5) -> np.ndarray:
    """Central differences with one Richardson extrapolation step."""
    z = np.asarray(z, dtype=float)
    grad = np.empty_like(z)
    for k in range(z.size):
        e = np.zeros_like(z)
        e[k] = 1.0

        def central(h):
            return (fn(z + h * e) - fn(z - h * e)) / (2 * h)

        grad[k] = (4 * central(step / 2) - central(step)) / 3
    return grad


# -- tensors and representation --------------------------------------------

def theta_tensor(c: NCCouplings, aux: AuxOscillatorState) -> np.ndarray:
    return c.c_theta * np.einsum("ijk,k->ij", LEVI_CIVITA, aux.a)


def eta_tensor(c: NCCouplings, aux: AuxOscillatorState) -> np.ndarray:
    return c.c_eta * np.einsum("ijk,k->ij", LEVI_CIVITA, aux.pb)


def represent(state: CanonicalState, c: NCCouplings, aux: AuxOscillatorState):
    """Noncommutative ``(X, P)`` for one particle from its canonical ``(x, p)``."""
    theta = theta_tensor(c, aux)
    eta = eta_tensor(c, aux)
    X = state.x - 0.5 * theta @ state.p
    P = state.p + 0.5 * eta @ state.x
    return X, P


def represent_functions(c: NCCouplings, n_particles: int = 1, particle: int = 0):
    """Polynomial forms of ``X_i`` and ``P_i`` for one particle of an ``n_particles`` system."""
    a = [PhaseFunction.variable(a_index(n_particles, k)) for k in range(3)]
    pb = [PhaseFunction.variable(pb_index(n_particles, k)) for k in range(3)]
    x = [PhaseFunction.variable(x_index(particle, k)) for k in range(3)]
    p = [PhaseFunction.variable(p_index(particle, k)) for k in range(3)]
    X, P = [], []
    for i in range(3):
        Xi, Pi = x[i], p[i]
        for j in range(3):
            for k in range(3):
                eps = LEVI_CIVITA[i, j, k]
                if eps == 0.0:
                    continue
                if c.c_theta:
                    Xi = Xi - (0.5 * c.c_theta * eps) * a[k] * p[j]
                if c.c_eta:
                    Pi = Pi + (0.5 * c.c_eta * eps) * pb[k] * x[j]
        X.append(Xi)
        P.append(Pi)
    return X, P


# -- reports ---------------------------------------------------------------

@dataclass
class RelationResult:
    relation: str
    max_residual: float
    samples: int
    tol: float
    required: bool = True

    @property
    def passed(self) -> bool:
        return bool(self.max_residual <= self.tol)


@dataclass
class AlgebraReport:
    """Max residuals of each checked bracket relation over the sampled points."""

    relations: list[RelationResult] = field(default_factory=list)
    notes: list[str] = field(default_factory=list)

    def add(self, relation: str, residuals: Iterable[float], samples: int, tol: float,
            required: bool = True) -> RelationResult:
        res = list(residuals)
        result = RelationResult(relation, float(max(res)) if res else 0.0, samples, tol, required)
        self.relations.append(result)
        return result

    def __getitem__(self, relation: str) -> RelationResult:
        for r in self.relations:
            if r.relation == relation:
                return r
        raise KeyError(relation)

    def __contains__(self, relation: str) -> bool:
        return any(r.relation == relation for r in self.relations)

    @property
    def passed(self) -> bool:
        return all(r.passed for r in self.relations if r.required)

    def lines(self) -> list[str]:
        out = []
        for r in self.relations:
            status = "PASS" if r.passed else "FAIL"
            if not r.required:
                status += " (informational)"
            out.append(f"{r.relation:<28s} max_residual={r.max_residual:.3e} "
                       f"tol={r.tol:.1e} samples={r.samples} {status}")
        out.extend(f"note: {n}" for n in self.notes)
        return out


class ResidualTracker:
    """Accumulates per-relation residuals across sample points."""

    def __init__(self):
        self.residuals: dict[str, list[float]] = defaultdict(list)
        self.required: dict[str, bool] = {}

    def record(self, relation: str, value: float, required: bool = True):
        self.residuals[relation].append(abs(value))
        self.required.setdefault(relation, required)

    def into(self, report: AlgebraReport, samples: int, tol: float):
        for relation, res in self.residuals.items():
            report.add(relation, res, samples, tol, self.required[relation])


def bracket_matrix(fs: Sequence[PhaseFunction], gs: Sequence[PhaseFunction], z, pairs) -> np.ndarray:
    q, p = np.array(pairs).T
    F = np.array([f.gradient(z) for f in fs])
    G = np.array([g.gradient(z) for g in gs])
    return F[:, q] @ G[:, p].T - F[:, p] @ G[:, q].T


def verify_single_particle_algebra(c: NCCouplings, samples: int = 100, tol: float = 1e-12,
                                   seed: int | np.random.Generator | None = 0) -> AlgebraReport:
    """Check every bracket relation of the rotationally invariant algebra at random points.

    Relations whose residual exceeds ``tol`` mark the report as failed; no
    exception is raised.  ``{pa_i, X_j}`` is recorded against its closed form
    ``c_theta/2 * eps_jli p_l`` as an informational row, since it does not
    vanish in this representation.
    """
    if samples < 1 or tol <= 0:
        raise ValidationError("samples must be >= 1 and tol > 0")
    rng = np.random.default_rng(seed)
    X, P = represent_functions(c)
    pairs = canonical_pairs(1)
    a = [PhaseFunction.variable(a_index(1, i)) for i in range(3)]
    pa = [PhaseFunction.variable(pa_index(1, i)) for i in range(3)]
    pb = [PhaseFunction.variable(pb_index(1, i)) for i in range(3)]
    jacobi_x = _jacobi(X, 1)
    jacobi_p = _jacobi(P, 1)

    track = ResidualTracker()
    for _ in range(samples):
        point = ExtendedPoint.random(1, rng)
        z = point.to_vector()
        theta = theta_tensor(c, point.aux)
        eta = eta_tensor(c, point.aux)
        xx = bracket_matrix(X, X, z, pairs)
        pp = bracket_matrix(P, P, z, pairs)
        xp = bracket_matrix(X, P, z, pairs)
        track.record("XX=theta", np.max(np.abs(xx - theta)))
        track.record("PP=eta", np.max(np.abs(pp - eta)))
        track.record("XP=delta+theta.eta/4", np.max(np.abs(xp - np.eye(3) - theta @ eta.T / 4)))
        track.record("a,X=0", np.max(np.abs(bracket_matrix(a, X, z, pairs))))
        track.record("a,P=0", np.max(np.abs(bracket_matrix(a, P, z, pairs))))
        track.record("pb,X=0", np.max(np.abs(bracket_matrix(pb, X, z, pairs))))
        track.record("pb,P=0", np.max(np.abs(bracket_matrix(pb, P, z, pairs))))
        expected_pa_x = 0.5 * c.c_theta * np.einsum("jli,l->ij", LEVI_CIVITA, point.canon[0].p)
        track.record("pa,X (closed form)", np.max(np.abs(bracket_matrix(pa, X, z, pairs) - expected_pa_x)),
                     required=False)
        track.record("jacobi XXX", jacobi_x(z))
        track.record("jacobi PPP", jacobi_p(z))

    report = AlgebraReport()
    track.into(report, samples, tol)
    return report


def _jacobi(fs: Sequence[PhaseFunction], n_particles: int) -> Callable[[np.ndarray], float]:
    f1, f2, f3 = fs
    br = lambda u, v: bracket_function(u, v, n_particles)
    total = br(f1, br(f2, f3)) + br(f2, br(f3, f1)) + br(f3, br(f1, f2))
    return total
