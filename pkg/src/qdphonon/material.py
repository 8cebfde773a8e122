"""GaAs deformation-potential phonon environment and its spectral density.

The super-ohmic form used throughout is

    j(omega) = prefactor * omega**3 * exp(-(omega / cutoff)**2)

with omega in rad/ps and j in rad/ps. One power of hbar is folded into
``prefactor`` so that the bath correlation function built from j comes out
directly in 1/ps**2.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from . import units
from .errors import DomainError, InvalidParameterError


@dataclass(frozen=True)
class MaterialParams:
    """Bulk material constants of the dot and the lattice temperature.

    Attributes
    ----------
    deformation_potential_diff : float
        sigma_e - sigma_h in eV. Zero decouples the phonons.
    mass_density : float
        kg/m**3.
    sound_speed : float
        Longitudinal sound velocity in m/s.
    localization_length : float
        Electron/hole ground-state localization length in nm.
    temperature : float
        Lattice temperature in K.
    """

    deformation_potential_diff: float = 9.0
    mass_density: float = 5350.0
    sound_speed: float = 5150.0
    localization_length: float = 4.5
    temperature: float = 30.0

    def __post_init__(self):
        self.validate()

    def validate(self) -> None:
        checks = {
            "deformation_potential_diff": (self.deformation_potential_diff, False),
            "mass_density": (self.mass_density, True),
            "sound_speed": (self.sound_speed, True),
            "localization_length": (self.localization_length, True),
            "temperature": (self.temperature, False),
        }
        for name, (value, strict) in checks.items():
            if not math.isfinite(value):
                raise InvalidParameterError(f"MaterialParams.{name}", "must be finite")
            if strict and value <= 0:
                raise InvalidParameterError(f"MaterialParams.{name}", f"must be > 0, got {value}")
            if not strict and value < 0:
                raise InvalidParameterError(f"MaterialParams.{name}", f"must be >= 0, got {value}")


@dataclass(frozen=True)
class SpectralModel:
    """Reduced super-ohmic spectral density.

    ``prefactor`` is in ps**2 and ``cutoff`` in rad/ps.
    """

    prefactor: float
    cutoff: float

    def __post_init__(self):
        if not (math.isfinite(self.prefactor) and self.prefactor >= 0):
            raise InvalidParameterError("SpectralModel.prefactor", f"must be >= 0, got {self.prefactor}")
        if not (math.isfinite(self.cutoff) and self.cutoff > 0):
            raise InvalidParameterError("SpectralModel.cutoff", f"must be > 0, got {self.cutoff}")

    @property
    def peak_frequency(self) -> float:
        return math.sqrt(1.5) * self.cutoff

    def decoupled(self) -> "SpectralModel":
        return SpectralModel(0.0, self.cutoff)


def derive_spectral_model(m: MaterialParams) -> SpectralModel:
    """Map material constants onto (prefactor [ps^2], cutoff [rad/ps])."""
    m.validate()
    # SI: J^2 / (kg m^-3 * m^5 s^-5 * J s) = s^2
    coupling_j = m.deformation_potential_diff * units.EV_SI
    prefactor_s2 = coupling_j**2 / (
        4.0 * math.pi**2 * m.mass_density * m.sound_speed**5 * units.HBAR_SI
    )
    cutoff_per_s = math.sqrt(2.0 / 3.0) * m.sound_speed / (m.localization_length * units.NM)
    return SpectralModel(prefactor=prefactor_s2 / units.PS**2, cutoff=cutoff_per_s * units.PS)


def spectral_density(s: SpectralModel, omega):
    """Evaluate j(omega) for scalar or array omega >= 0."""
    w = np.asarray(omega, dtype=float)
    if np.any(w < 0) or np.any(np.isnan(w)):
        raise DomainError("spectral_density requires omega >= 0")
    out = s.prefactor * w**3 * np.exp(-((w / s.cutoff) ** 2))
    return float(out) if out.ndim == 0 else out
