"""Ground states and Berry phases of the adiabatic Dicke model."""

from .model import (
    InvalidParameterError,
    ModelParams,
    adiabatic_energy,
    adiabatic_potential,
    from_physical,
    thermo_berry,
    thermo_sx,
    well_minima,
)

__version__ = "0.1.0"

__all__ = [
    "InvalidParameterError",
    "ModelParams",
    "adiabatic_energy",
    "adiabatic_potential",
    "from_physical",
    "thermo_berry",
    "thermo_sx",
    "well_minima",
]
