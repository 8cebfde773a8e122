"""Bath correlation kernel K(t) and its running integral Gamma(t).

    K(t) = int_0^inf dw j(w) [coth(w / 2 theta) cos(w t) - i sin(w t)]

with theta = k_B T / hbar in rad/ps. Gamma(t) = int_0^t K(s) ds is the
time-local dephasing coefficient multiplying the e-g coherences.
"""

from __future__ import annotations

import csv
import hashlib
import io
import math
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from . import units
from ._backend import kernels
from .errors import DomainError, InvalidParameterError, QuadratureError
from .material import SpectralModel
from .quadrature import adaptive_gk15, panel_nodes

#: integration window in units of the cutoff
WINDOW_CUTOFFS = 20.0
#: below this the window is resolved by phase-limited panels
BODY_CUTOFFS = 8.0
DEFAULT_TOL = 1e-10
_COTH_SERIES = 1e-4
_RESEED = 256
_TAIL_PANELS = 12


def coth_weight(omega, temperature):
    """coth(omega / 2 theta), with coth == 1 at T = 0.

    Only valid for omega > 0; callers multiply by j(omega) ~ omega^3 first
    via :func:`thermal_spectral_weight` to handle omega = 0.
    """
    omega = np.asarray(omega, dtype=float)
    if temperature == 0:
        return np.ones_like(omega)
    x = omega / (2.0 * units.thermal_frequency(temperature))
    small = x < _COTH_SERIES
    xs = np.where(small, 1.0, x)
    return np.where(small, 1.0 / np.where(small, x, 1.0) + x / 3.0, 1.0 / np.tanh(xs))


def thermal_spectral_weight(s: SpectralModel, temperature, omega):
    """j(omega) coth(omega / 2 theta), finite (zero) at omega = 0."""
    w = np.asarray(omega, dtype=float)
    gauss = np.exp(-((w / s.cutoff) ** 2))
    if temperature == 0:
        return s.prefactor * w**3 * gauss
    two_theta = 2.0 * units.thermal_frequency(temperature)
    x = w / two_theta
    small = x < _COTH_SERIES
    xs = np.where(small, 1.0, x)
    # j coth = a w^3 (1/x + x/3) = a w^2 two_theta (1 + x^2/3) for small x
    series = s.prefactor * w**2 * two_theta * (1.0 + x * x / 3.0)
    exact = s.prefactor * w**3 / np.tanh(xs)
    return np.where(small, series, exact) * gauss


def _check_temperature(temperature):
    if not (math.isfinite(temperature) and temperature >= 0):
        raise DomainError(f"temperature must be >= 0, got {temperature}")


def kernel_at(s: SpectralModel, temperature: float, t: float, tol: float = DEFAULT_TOL,
              full_output: bool = False):
    """K(t) by adaptive Gauss-Kronrod on [0, 20 cutoff].

    Negative ``t`` is accepted: Re K is even and Im K odd in t.

    Returns
    -------
    complex, or (complex, error_estimate) when ``full_output`` is set.

    Raises
    ------
    QuadratureError
        If the bisection does not reach ``tol``.
    """
    _check_temperature(temperature)
    if not math.isfinite(t):
        raise DomainError("t must be finite")
    upper = WINDOW_CUTOFFS * s.cutoff

    def integrand(w):
        return thermal_spectral_weight(s, temperature, w) * np.cos(w * t) \
            - 1j * s.prefactor * w**3 * np.exp(-((w / s.cutoff) ** 2)) * np.sin(w * t)

    # seed panels at ~one oscillation each so bisection starts near the answer
    seed = max(1, int(math.ceil(upper * abs(t) / (2.0 * math.pi))))
    value, err, _ = adaptive_gk15(integrand, 0.0, upper, tol, initial_panels=min(seed, 4096))
    value = complex(value)
    return (value, err) if full_output else value


@dataclass(frozen=True)
class KernelTable:
    """K and Gamma on the uniform grid t_k = k dt, k = 0..n."""

    times: np.ndarray
    kernel: np.ndarray
    gamma: np.ndarray
    temperature: float
    spectral: SpectralModel
    dt: float
    error_estimate: float = 0.0
    tol: float = DEFAULT_TOL
    meta: dict = field(default_factory=dict, compare=False)

    def __post_init__(self):
        for arr in (self.times, self.kernel, self.gamma):
            arr.setflags(write=False)

    @property
    def t_max(self) -> float:
        return float(self.times[-1])

    def gamma_at(self, t: float) -> complex:
        return gamma_at(self, t)

    def cache_key(self) -> str:
        return table_cache_key(self.spectral, self.temperature, self.t_max, self.dt, self.tol)

    def to_csv(self, path) -> None:
        Path(path).write_text(self.to_csv_text(), encoding="utf-8")

    def to_csv_text(self) -> str:
        buf = io.StringIO()
        buf.write(f"# prefactor={self.spectral.prefactor!r}\n")
        buf.write(f"# cutoff={self.spectral.cutoff!r}\n")
        buf.write(f"# temperature={self.temperature!r}\n")
        buf.write(f"# dt={self.dt!r}\n")
        buf.write(f"# tol={self.tol!r}\n")
        buf.write(f"# error_estimate={self.error_estimate!r}\n")
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["t", "ReK", "ImK", "ReGamma", "ImGamma"])
        for t, k, g in zip(self.times.tolist(), self.kernel.tolist(), self.gamma.tolist()):
            w.writerow([repr(t), repr(k.real), repr(k.imag), repr(g.real), repr(g.imag)])
        return buf.getvalue()

    @classmethod
    def from_csv(cls, path) -> "KernelTable":
        meta = {}
        rows = []
        with open(path, encoding="utf-8") as fh:
            for line in fh:
                if line.startswith("#"):
                    key, _, val = line[1:].strip().partition("=")
                    meta[key] = float(val)
                    continue
                rows.append(line)
        reader = csv.reader(rows)
        header = next(reader)
        if header != ["t", "ReK", "ImK", "ReGamma", "ImGamma"]:
            raise ValueError(f"unexpected kernel table header {header}")
        data = np.array([[float(v) for v in r] for r in reader])
        return cls(
            times=data[:, 0].copy(),
            kernel=data[:, 1] + 1j * data[:, 2],
            gamma=data[:, 3] + 1j * data[:, 4],
            temperature=meta["temperature"],
            spectral=SpectralModel(meta["prefactor"], meta["cutoff"]),
            dt=meta["dt"],
            error_estimate=meta.get("error_estimate", 0.0),
            tol=meta.get("tol", DEFAULT_TOL),
        )


def table_cache_key(s: SpectralModel, temperature, t_max, dt, tol=DEFAULT_TOL) -> str:
    text = repr((s.prefactor, s.cutoff, float(temperature), float(t_max), float(dt), float(tol)))
    return hashlib.sha256(text.encode()).hexdigest()[:16]


def cumulative_simpson(y, dx):
    """Running integral of samples ``y`` on a uniform grid, starting at 0.

    Even nodes use composite Simpson; odd nodes add a three-point
    single-interval rule to the preceding even node.
    """
    y = np.asarray(y)
    n = y.shape[0]
    out = np.zeros(n, dtype=np.result_type(y, float))
    if n == 1:
        return out
    if n == 2:
        out[1] = 0.5 * dx * (y[0] + y[1])
        return out
    pairs = dx / 3.0 * (y[0:-2:2] + 4.0 * y[1:-1:2] + y[2::2])
    out[2::2] = np.cumsum(pairs)
    out[1] = dx / 12.0 * (5.0 * y[0] + 8.0 * y[1] - y[2])
    if n > 3:
        odd = np.arange(3, n, 2)
        out[odd] = out[odd - 1] + dx / 12.0 * (-y[odd - 2] + 8.0 * y[odd - 1] + 5.0 * y[odd])
    return out


def _table_panels(s: SpectralModel, t_max: float, phase_width: float):
    body = BODY_CUTOFFS * s.cutoff
    upper = WINDOW_CUTOFFS * s.cutoff
    n_body = max(64, int(math.ceil(body * t_max / phase_width)))
    edges = np.concatenate([
        np.linspace(0.0, body, n_body + 1),
        np.linspace(body, upper, _TAIL_PANELS + 1)[1:],
    ])
    return edges[:-1], edges[1:]


def build_table(s: SpectralModel, temperature: float, t_max: float, dt: float,
                tol: float = DEFAULT_TOL, max_refinements: int = 6) -> KernelTable:
    """Tabulate K on [0, t_max] and integrate it into Gamma.

    All grid times share one Gauss-Kronrod panel layout sized so a panel
    spans at most ``pi`` radians of phase at ``t_max``. The per-time
    Kronrod/Gauss discrepancy is checked against ``tol``; any failure halves
    the panel width and retabulates.
    """
    _check_temperature(temperature)
    if not (math.isfinite(dt) and dt > 0):
        raise InvalidParameterError("dt", f"must be > 0, got {dt}")
    if not (math.isfinite(t_max) and t_max >= dt):
        raise InvalidParameterError("t_max", f"must be >= dt, got {t_max}")
    n = int(math.ceil(t_max / dt - 1e-9))
    n_points = n + 1
    phase_width = math.pi
    for _ in range(max_refinements + 1):
        lo, hi = _table_panels(s, n * dt, phase_width)
        omega, wk, wg = panel_nodes(lo, hi)
        wre = thermal_spectral_weight(s, temperature, omega)
        wim = s.prefactor * omega**3 * np.exp(-((omega / s.cutoff) ** 2))
        kern, err = kernels.tabulate_kernel(omega, wre, wim, wk, wg, float(dt), n_points, _RESEED)
        worst = float(np.max(err))
        if worst <= tol:
            break
        phase_width *= 0.5
    else:
        raise QuadratureError("kernel tabulation did not reach tolerance", worst)
    # K(0) has no sine part
    kern[0] = complex(kern[0].real, 0.0)
    times = np.arange(n_points) * dt
    gamma = cumulative_simpson(kern, dt)
    gamma[0] = 0.0
    return KernelTable(times=times, kernel=kern, gamma=gamma, temperature=float(temperature),
                       spectral=s, dt=float(dt), error_estimate=worst, tol=tol,
                       meta={"panels": int(lo.size), "phase_width": phase_width})


def zero_table(s: SpectralModel, temperature: float, t_max: float, dt: float) -> KernelTable:
    """Table for a decoupled bath; skips the quadrature."""
    n = int(math.ceil(t_max / dt - 1e-9))
    z = np.zeros(n + 1, dtype=np.complex128)
    return KernelTable(times=np.arange(n + 1) * dt, kernel=z, gamma=z.copy(),
                       temperature=float(temperature), spectral=s.decoupled(), dt=float(dt))


def gamma_at(table: KernelTable, t: float) -> complex:
    """Linear interpolation of Gamma; exact at grid nodes."""
    fuzz = 1e-12 * max(1.0, table.t_max)
    if not (-fuzz <= t <= table.t_max + fuzz):
        raise DomainError(f"t = {t} outside kernel table range [0, {table.t_max}]")
    return complex(kernels.gamma_interp(table.gamma, table.dt, float(t)))
