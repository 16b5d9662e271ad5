"""Classical dynamics in rotationally invariant noncommutative phase space.

The subpackages follow the chain from algebra to observable motion:
``algebra`` (brackets and the canonical representation), ``averaging``
(ground-state moments of the tensors), ``dynamics`` (equations of motion and
the integrator front end), ``composite`` (center of mass of many particles)
and ``wep`` (free-fall comparisons).  ``cli`` wires them to scenario files.
"""

from .algebra import NCCouplings, verify_single_particle_algebra
from .composite import CompositeBody, ParticleSpec, check_wep_conditions, verify_com_algebra
from .dynamics import EffectiveNC, KeplerField, KinematicState, UniformField
from .errors import DomainError, NCPSError, NumericalError, ValidationError
from .wep import FallingBody, FreeFallScenario, free_fall_compare

__version__ = "0.1.0"

__all__ = [
    "CompositeBody",
    "DomainError",
    "EffectiveNC",
    "FallingBody",
    "FreeFallScenario",
    "KeplerField",
    "KinematicState",
    "NCCouplings",
    "NCPSError",
    "NumericalError",
    "ParticleSpec",
    "UniformField",
    "ValidationError",
    "check_wep_conditions",
    "free_fall_compare",
    "verify_com_algebra",
    "verify_single_particle_algebra",
]
