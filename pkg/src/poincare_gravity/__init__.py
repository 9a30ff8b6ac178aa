"""Retarded Poincare gauge fields of point particles, their motion and radiation.

Internal units are geometrized (G = c = 1); see :mod:`poincare_gravity.units`
for conversion at the boundary.
"""
__version__ = "0.1.0"

from .algebra import (AntisymTensor, FieldStrengths, FourVector, GaugeFieldConfiguration,  # noqa: E402
                      PoincareGaugeField, PoincareParameter, commutator, field_strengths,
                      gauge_transform_fields, gauge_transform_strengths, reconstruct_full_strength)
from .constants import DEFAULT, ETA, Constants  # noqa: E402
from .dynamics import (IntegratorConfig, ParticleState, coupling_bracket, four_force,  # noqa: E402
                       integrate, newton_accel, step)
from .geometry import clock_rate, line_element, static_metric_factor  # noqa: E402
from .radiation import (AngularGrid, Emitter, angular_power, circular_orbit_power,  # noqa: E402
                        flux_integral, integrate_angular_power, stress_tensor, total_power)
from .retarded import (FieldProvider, SourceParticle, field_strengths_at, lienard_wiechert,  # noqa: E402
                       retarded_time)
from .units import SI, UnitSystem, convert_units  # noqa: E402
from .worldline import Worldline  # noqa: E402

__all__ = [
    "AngularGrid", "AntisymTensor", "Constants", "DEFAULT", "ETA", "Emitter", "FieldProvider",
    "FieldStrengths", "FourVector", "GaugeFieldConfiguration", "IntegratorConfig", "ParticleState",
    "PoincareGaugeField", "PoincareParameter", "SI", "SourceParticle", "UnitSystem", "Worldline",
    "angular_power", "circular_orbit_power", "clock_rate", "commutator", "convert_units",
    "coupling_bracket", "field_strengths", "field_strengths_at", "flux_integral", "four_force",
    "gauge_transform_fields", "gauge_transform_strengths", "integrate", "integrate_angular_power",
    "lienard_wiechert", "line_element", "newton_accel", "reconstruct_full_strength", "retarded_time",
    "static_metric_factor", "step", "stress_tensor", "total_power",
]
