"""Exciton / cavity / phonon master-equation propagation.

Basis ordering of the dot-cavity density matrix is
|g,0>, |e,0>, |g,1>, |e,1>, ..., i.e. index 2 n + (1 if excited). In this
ordering the rotating-frame Hamiltonian

    H0(t) = g (s_eg a e^{i Delta t} + h.c.) + f(t) (s_eg e^{i dL t} + h.c.)

is tridiagonal with zero diagonal, which the kernels exploit.

Three propagators share one fixed-step RK4 scheme:

* :func:`integrate` - the full Liouvillian on the truncated space,
* :func:`exciton_only_integrate` - the bare two-level (P, N_e) equations,
* :func:`closure_integrate` - only the element families kept by the
  photon-coherence closure (populations, rho_{e n-1, g n}, rho_{e n, g n}).
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from . import _kernels_numpy as npk
from ._backend import kernels
from .drive import PulseParams
from .errors import DomainError, IntegrationDivergedError, InvalidParameterError, ShapeError
from .kernel import KernelTable

TRACE_TOL = 1e-9
HERMITICITY_TOL = 1e-10
POPULATION_FLOOR = -1e-8


@dataclass(frozen=True)
class SystemParams:
    """Cavity coupling ``g`` and detuning ``delta`` in rad/ps, Fock cutoff ``n_trunc``."""

    g: float = 0.1
    delta: float = 0.0
    n_trunc: int = 90

    def __post_init__(self):
        if int(self.n_trunc) != self.n_trunc or self.n_trunc < 1:
            raise InvalidParameterError("SystemParams.n_trunc", f"must be an integer >= 1, got {self.n_trunc}")
        object.__setattr__(self, "n_trunc", int(self.n_trunc))
        if not (math.isfinite(self.g) and self.g >= 0):
            raise InvalidParameterError("SystemParams.g", f"must be >= 0, got {self.g}")
        if not math.isfinite(self.delta):
            raise InvalidParameterError("SystemParams.delta", "must be finite")

    @property
    def dim(self) -> int:
        return 2 * (self.n_trunc + 1)


def basis_index(qd: str, n: int) -> int:
    if qd not in ("g", "e"):
        raise ValueError(f"qd must be 'g' or 'e', got {qd!r}")
    return 2 * n + (1 if qd == "e" else 0)


@dataclass
class QDCavityState:
    """Dense density matrix on the exciton x truncated Fock space."""

    rho: np.ndarray
    t: float = 0.0

    def __post_init__(self):
        self.rho = np.asarray(self.rho, dtype=np.complex128)
        d = self.rho.shape
        if len(d) != 2 or d[0] != d[1] or d[0] % 2 or d[0] < 2:
            raise ShapeError(f"density matrix must be square with even dimension, got {d}")

    @property
    def n_trunc(self) -> int:
        return self.rho.shape[0] // 2 - 1

    @classmethod
    def product(cls, n_trunc: int, qd: str = "g", n: int = 0, t: float = 0.0) -> "QDCavityState":
        if not 0 <= n <= n_trunc:
            raise DomainError(f"photon number {n} outside 0..{n_trunc}")
        d = 2 * (n_trunc + 1)
        rho = np.zeros((d, d), dtype=np.complex128)
        k = basis_index(qd, n)
        rho[k, k] = 1.0
        return cls(rho, t)

    @classmethod
    def ground(cls, n_trunc: int) -> "QDCavityState":
        return cls.product(n_trunc, "g", 0)

    @classmethod
    def pure(cls, n_trunc: int, amplitudes: dict, t: float = 0.0) -> "QDCavityState":
        """Pure state from ``{("e", 0): amp, ("g", 1): amp, ...}`` (normalised here)."""
        d = 2 * (n_trunc + 1)
        psi = np.zeros(d, dtype=np.complex128)
        for (qd, n), amp in amplitudes.items():
            psi[basis_index(qd, n)] = amp
        psi /= np.linalg.norm(psi)
        return cls(np.outer(psi, psi.conj()), t)

    def element(self, qd_i: str, n: int, qd_j: str, m: int) -> complex:
        return complex(self.rho[basis_index(qd_i, n), basis_index(qd_j, m)])

    def check(self) -> dict:
        diag = np.diagonal(self.rho)
        return {
            "trace_drift": float(abs(np.trace(self.rho) - 1.0)),
            "hermiticity_drift": float(np.max(np.abs(self.rho - self.rho.conj().T))),
            "min_population": float(np.min(diag.real)),
        }


@dataclass
class ExcitonState:
    """Two-level exciton: polarization P = <e|rho|g> and population N_e."""

    p: complex = 0j
    n_e: float = 0.0
    t: float = 0.0

    def positivity_violation(self) -> float:
        return float(abs(self.p) ** 2 - self.n_e * (1.0 - self.n_e))


@dataclass
class Trajectory:
    """Snapshots of one propagation.

    ``coherence`` is <e0|rho|g1> for the cavity modes and <e|rho|g> for the
    exciton-only mode; ``drive_coherence`` is <e0|rho|g0> in both.
    ``states`` is filled only when requested: dense matrices for
    ``cavity-full``, packed closure vectors for ``cavity-closure``.
    """

    mode: str
    times: np.ndarray
    exciton_population: np.ndarray
    coherence: np.ndarray
    drive_coherence: np.ndarray
    photon_distribution: np.ndarray | None = None
    trace: np.ndarray | None = None
    hermiticity: np.ndarray | None = None
    min_population: np.ndarray | None = None
    excitation: np.ndarray | None = None
    states: np.ndarray | None = None
    metadata: dict = field(default_factory=dict)

    def __post_init__(self):
        if self.times.size > 1 and not np.all(np.diff(self.times) > 0):
            raise ValueError("trajectory times must be strictly increasing")

    @property
    def n_trunc(self) -> int | None:
        if self.photon_distribution is None:
            return None
        return self.photon_distribution.shape[1] - 1

    def invariant_report(self) -> dict:
        rep = {
            "max_trace_drift": float(np.max(np.abs(self.trace - 1.0))) if self.trace is not None else 0.0,
            "max_hermiticity_drift": float(np.max(self.hermiticity)) if self.hermiticity is not None else 0.0,
            "most_negative_population": float(np.min(self.min_population)) if self.min_population is not None
            else float(min(0.0, np.min(self.exciton_population))),
        }
        if self.excitation is not None:
            rep["max_excitation_drift"] = float(np.max(np.abs(self.excitation - self.excitation[0])))
            if self.photon_distribution is not None:
                rep["max_top_fock_population"] = float(np.max(np.abs(self.photon_distribution[:, -1])))
        if self.mode == "exciton-only":
            viol = np.abs(self.coherence) ** 2 - self.exciton_population * (1.0 - self.exciton_population)
            rep["max_positivity_violation"] = float(np.max(viol))
            rep["max_trace_drift"] = 0.0
        return rep

    def dense_states(self) -> np.ndarray:
        """Snapshots as dense matrices (closure elements scattered, dropped ones 0)."""
        if self.states is None:
            raise ValueError("trajectory was integrated without keep_states")
        if self.mode == "cavity-closure":
            return np.array([closure_to_dense(s) for s in self.states])
        if self.mode == "exciton-only":
            out = np.zeros((self.times.size, 2, 2), dtype=np.complex128)
            out[:, 1, 1] = self.exciton_population
            out[:, 0, 0] = 1.0 - self.exciton_population
            out[:, 1, 0] = self.coherence
            out[:, 0, 1] = np.conj(self.coherence)
            return out
        return self.states


# ---------------------------------------------------------------- generators


def _as_matrix(rho) -> np.ndarray:
    return rho.rho if isinstance(rho, QDCavityState) else np.asarray(rho, dtype=np.complex128)


def hamiltonian_apply(sys: SystemParams, pulse: PulseParams, t: float, rho) -> np.ndarray:
    """i [rho, H0(t)]."""
    r = _as_matrix(rho)
    if r.shape != (sys.dim, sys.dim):
        raise ShapeError(f"rho has shape {r.shape}, expected {(sys.dim, sys.dim)} for n_trunc={sys.n_trunc}")
    c = npk.drive_value(pulse.amplitude, pulse.width, pulse.center, pulse.detuning, t)
    gc = sys.g * complex(math.cos(sys.delta * t), math.sin(sys.delta * t))
    return npk.coherent_rhs(r, npk.subdiagonal(sys.n_trunc, c, gc))


def dissipator_apply(gamma_t: complex, rho) -> np.ndarray:
    """-G [s_ee, s_ee rho] + G* [s_ee, rho s_ee]."""
    r = _as_matrix(rho)
    if r.ndim != 2 or r.shape[0] != r.shape[1] or r.shape[0] % 2:
        raise ShapeError(f"rho has shape {r.shape}")
    return npk.dephasing_rhs(r, complex(gamma_t))


def hamiltonian_matrix(sys: SystemParams, pulse: PulseParams, t: float) -> np.ndarray:
    """Dense H0(t); used for diagnostics and cross-checks."""
    c = npk.drive_value(pulse.amplitude, pulse.width, pulse.center, pulse.detuning, t)
    gc = sys.g * complex(math.cos(sys.delta * t), math.sin(sys.delta * t))
    sub = npk.subdiagonal(sys.n_trunc, c, gc)
    return np.diag(sub, -1) + np.diag(np.conj(sub), 1)


def excitation_number(rho) -> float:
    """Tr[rho (a^dag a + s_ee)]."""
    r = _as_matrix(rho)
    k = np.arange(r.shape[0])
    return float(np.sum((k // 2 + k % 2) * np.diagonal(r).real))


# ---------------------------------------------------------------- propagation


def _steps(t_span, dt, table: KernelTable):
    t0, t1 = float(t_span[0]), float(t_span[1])
    if not (math.isfinite(dt) and dt > 0):
        raise InvalidParameterError("dt", f"must be > 0, got {dt}")
    if t1 < t0:
        raise DomainError("t_span must be increasing")
    n = int(round((t1 - t0) / dt))
    if abs(n * dt - (t1 - t0)) > 1e-9 * max(1.0, abs(t1 - t0)):
        raise DomainError(f"t_span length {t1 - t0} is not a multiple of dt = {dt}")
    fuzz = 1e-12 * max(1.0, table.t_max)
    if t0 < -fuzz or t1 > table.t_max + fuzz:
        raise DomainError(f"t_span {t_span} outside kernel table range [0, {table.t_max}]")
    return t0, n


def _stride(stride, n):
    stride = int(stride) if stride else max(1, n)
    if stride < 1:
        raise InvalidParameterError("stride", "must be >= 1")
    return stride


def _check_divergence(traj: Trajectory):
    bad = np.zeros(traj.times.size, dtype=bool)
    if traj.trace is not None:
        bad |= ~(np.abs(traj.trace - 1.0) <= TRACE_TOL)
    if traj.hermiticity is not None:
        bad |= ~(traj.hermiticity <= HERMITICITY_TOL)
    if traj.mode == "exciton-only":
        bad |= ~np.isfinite(traj.coherence) | ~np.isfinite(traj.exciton_population)
    if bad.any():
        i = int(np.argmax(bad))
        raise IntegrationDivergedError(f"{traj.mode} propagation left the trace/hermiticity tolerances",
                                       float(traj.times[i]))


def _pack(mode, out, keep_states, meta) -> Trajectory:
    times, pn, ne, p_drive, p_cav, trace, herm, minpop, exc, states = out
    traj = Trajectory(mode=mode, times=times, exciton_population=ne, coherence=p_cav,
                      drive_coherence=p_drive, photon_distribution=pn, trace=trace,
                      hermiticity=herm, min_population=minpop, excitation=exc,
                      states=states if keep_states else None, metadata=meta)
    _check_divergence(traj)
    return traj


def integrate(sys: SystemParams, pulse: PulseParams, table: KernelTable, rho0, t_span,
              dt: float = 1e-3, stride: int | None = None, keep_states: bool = False,
              check: bool = True) -> Trajectory:
    """Fixed-step RK4 of the full Liouvillian (coherent part + time-local dephasing).

    Snapshots are recorded every ``stride`` steps and at the final step.
    Entries below 1e-250 are flushed to zero after each step and only the
    occupied photon-number window is updated. The compiled backend evolves
    the lower triangle and mirrors it, so its hermiticity drift is zero by
    construction; the numpy backend evolves the full matrix.

    Raises
    ------
    DomainError
        If ``rho0`` is not Hermitian or ``t_span`` leaves the kernel table.
    IntegrationDivergedError
        At the first snapshot whose trace or hermiticity leaves tolerance.
    """
    r0 = _as_matrix(rho0)
    if r0.shape != (sys.dim, sys.dim):
        raise ShapeError(f"rho0 has shape {r0.shape}, expected {(sys.dim, sys.dim)}")
    herm = float(np.max(np.abs(r0 - r0.conj().T)))
    if herm > HERMITICITY_TOL:
        raise DomainError(f"rho0 is not Hermitian (max |rho - rho^dag| = {herm:.3e})")
    t0, n = _steps(t_span, dt, table)
    stride = _stride(stride, n)
    out = kernels.propagate_full(np.ascontiguousarray(r0), t0, float(dt), n, stride,
                                 float(pulse.amplitude), float(pulse.width), float(pulse.center),
                                 float(pulse.detuning), float(sys.g), float(sys.delta),
                                 table.gamma, table.dt, bool(keep_states))
    meta = {"dt": dt, "stride": stride, "n_steps": n}
    if not check:
        times, pn, ne, p_drive, p_cav, trace, herm, minpop, exc, states = out
        return Trajectory("cavity-full", times, ne, p_cav, p_drive, pn, trace, herm, minpop, exc,
                          states if keep_states else None, meta)
    return _pack("cavity-full", out, keep_states, meta)


def exciton_only_integrate(pulse: PulseParams, table: KernelTable, x0: ExcitonState | None, t_span,
                           dt: float = 1e-3, stride: int | None = None) -> Trajectory:
    """RK4 of dP/dt = i a (2 N_e - 1) - Gamma P, dN_e/dt = -2 Im(a* P)."""
    x0 = x0 or ExcitonState()
    t0, n = _steps(t_span, dt, table)
    stride = _stride(stride, n)
    times, pol, pop = kernels.propagate_exciton(complex(x0.p), float(x0.n_e), t0, float(dt), n, stride,
                                                float(pulse.amplitude), float(pulse.width),
                                                float(pulse.center), float(pulse.detuning),
                                                table.gamma, table.dt)
    traj = Trajectory(mode="exciton-only", times=times, exciton_population=pop, coherence=pol,
                      drive_coherence=pol, metadata={"dt": dt, "stride": stride, "n_steps": n})
    _check_divergence(traj)
    return traj


# ---------------------------------------------------------------- closure


def closure_layout(n_trunc: int):
    """Slices of the packed closure vector: pe, pg, x (rho_{e n-1, g n}), y (rho_{e n, g n})."""
    m = n_trunc + 1
    return slice(0, m), slice(m, 2 * m), slice(2 * m, 3 * m), slice(3 * m, 4 * m)


def dense_to_closure(rho) -> np.ndarray:
    r = _as_matrix(rho)
    m = r.shape[0] // 2
    n = np.arange(m)
    s = np.zeros(4 * m, dtype=np.complex128)
    s[:m] = r[2 * n + 1, 2 * n + 1].real
    s[m:2 * m] = r[2 * n, 2 * n].real
    s[2 * m + 1:3 * m] = r[2 * (n[1:] - 1) + 1, 2 * n[1:]]
    s[3 * m:] = r[2 * n + 1, 2 * n]
    return s


def closure_to_dense(s) -> np.ndarray:
    m = s.shape[0] // 4
    d = 2 * m
    r = np.zeros((d, d), dtype=np.complex128)
    n = np.arange(m)
    r[2 * n + 1, 2 * n + 1] = s[:m]
    r[2 * n, 2 * n] = s[m:2 * m]
    e_rows, g_cols = 2 * (n[1:] - 1) + 1, 2 * n[1:]
    r[e_rows, g_cols] = s[2 * m + 1:3 * m]
    r[g_cols, e_rows] = np.conj(s[2 * m + 1:3 * m])
    r[2 * n + 1, 2 * n] = s[3 * m:]
    r[2 * n, 2 * n + 1] = np.conj(s[3 * m:])
    return r


def closure_integrate(sys: SystemParams, pulse: PulseParams, table: KernelTable, rho0, t_span,
                      dt: float = 1e-3, stride: int | None = None, keep_states: bool = False) -> Trajectory:
    """RK4 of the closure equations; dropped photon coherences are never stored.

    Raises
    ------
    DomainError
        If ``rho0`` carries weight on elements outside the closure families.
    """
    r0 = _as_matrix(rho0)
    if r0.shape != (sys.dim, sys.dim):
        raise ShapeError(f"rho0 has shape {r0.shape}, expected {(sys.dim, sys.dim)}")
    s0 = dense_to_closure(r0)
    leftover = float(np.max(np.abs(r0 - closure_to_dense(s0))))
    if leftover > 1e-14:
        raise DomainError(f"initial state has weight {leftover:.3e} on elements dropped by the closure")
    t0, n = _steps(t_span, dt, table)
    stride = _stride(stride, n)
    out = kernels.propagate_closure(s0, t0, float(dt), n, stride,
                                    float(pulse.amplitude), float(pulse.width), float(pulse.center),
                                    float(pulse.detuning), float(sys.g), float(sys.delta),
                                    table.gamma, table.dt, bool(keep_states))
    return _pack("cavity-closure", out, keep_states, {"dt": dt, "stride": stride, "n_steps": n})
