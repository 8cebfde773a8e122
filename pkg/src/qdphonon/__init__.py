"""Quantum-dot exciton, cavity and acoustic-phonon dynamics.

A driven two-level exciton, optionally coupled to a single cavity mode, is
propagated under a time-local non-Markovian pure-dephasing master equation
whose rate follows from a super-ohmic deformation-potential spectral
density. Photon statistics (Mandel parameter, g2) are derived per snapshot.
"""

from ._accel import backend_name
from .drive import PulseParams
from .dynamics import (
    ExcitonState,
    QDCavityState,
    SystemParams,
    Trajectory,
    closure_integrate,
    exciton_only_integrate,
    integrate,
)
from .errors import (
    ConfigError,
    DomainError,
    IntegrationDivergedError,
    InvalidParameterError,
    QDPhononError,
    QuadratureError,
    ShapeError,
)
from .kernel import KernelTable, build_table, kernel_at
from .material import MaterialParams, SpectralModel, derive_spectral_model, spectral_density

__version__ = "0.1.0"

__all__ = [
    "ConfigError",
    "DomainError",
    "ExcitonState",
    "IntegrationDivergedError",
    "InvalidParameterError",
    "KernelTable",
    "MaterialParams",
    "PulseParams",
    "QDCavityState",
    "QDPhononError",
    "QuadratureError",
    "ShapeError",
    "SpectralModel",
    "SystemParams",
    "Trajectory",
    "backend_name",
    "build_table",
    "closure_integrate",
    "derive_spectral_model",
    "exciton_only_integrate",
    "integrate",
    "kernel_at",
    "spectral_density",
    "__version__",
]
