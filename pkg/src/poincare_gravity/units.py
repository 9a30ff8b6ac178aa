"""SI <-> geometrized (G = c = 1, lengths in metres) conversion."""
from __future__ import annotations

from dataclasses import dataclass


class UnknownDimension(KeyError):
    pass


@dataclass(frozen=True)
class UnitSystem:
    G_si: float = 6.67430e-11
    c_si: float = 299_792_458.0

    def factor(self, dimension: str) -> float:
        """Multiplier taking an SI value of ``dimension`` to geometrized units."""
        G, c = self.G_si, self.c_si
        table = {
            "dimensionless": 1.0,
            "length": 1.0,
            "time": c,
            "mass": G / c ** 2,
            "velocity": 1.0 / c,
            "acceleration": 1.0 / c ** 2,
            "energy": G / c ** 4,
            "power": G / c ** 5,
            "momentum": G / c ** 3,
            "angular_momentum": G / c ** 3,
            "frequency": 1.0 / c,
        }
        try:
            return table[dimension]
        except KeyError:
            raise UnknownDimension(dimension) from None


SI = UnitSystem()
SOLAR_MASS_KG = 1.98847e30
EARTH_MASS_KG = 5.972e24
AU_M = 1.495978707e11


def convert_units(value, dimension: str, direction: str = "to_geometrized", units: UnitSystem = SI):
    f = units.factor(dimension)
    if direction == "to_geometrized":
        return value * f
    if direction == "to_si":
        return value / f
    raise ValueError(f"direction must be 'to_geometrized' or 'to_si', not {direction!r}")
