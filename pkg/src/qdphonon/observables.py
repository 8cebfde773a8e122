"""Reported quantities derived from trajectory snapshots.

Photon statistics use the cavity photon-number distribution
p(n) = rho_{en,en} + rho_{gn,gn}:

    M  = (<n^2> - <n>^2) / <n> - 1
    g2 = sum n (n - 1) p(n) / (sum n p(n))^2

Both are 0/0 for an (almost) empty cavity. Below ``EPS_M`` photons they
are reported as undefined (``None`` in records, an empty CSV field).
"""

from __future__ import annotations

import csv
import io
from dataclasses import dataclass

import numpy as np

from .dynamics import QDCavityState, Trajectory, basis_index
from .errors import DomainError, ShapeError

#: mean photon number below which M and g2 are undefined
EPS_M = 1e-12

EXCITON_COLUMNS = ("t", "N_e", "inversion", "ReP", "ImP")
CAVITY_COLUMNS = EXCITON_COLUMNS + ("n_mean", "n2_mean", "M", "g2")


def _matrix(rho) -> np.ndarray:
    r = rho.rho if isinstance(rho, QDCavityState) else np.asarray(rho, dtype=np.complex128)
    if r.ndim != 2 or r.shape[0] != r.shape[1] or r.shape[0] % 2 or r.shape[0] < 2:
        raise ShapeError(f"density matrix must be square with even dimension, got {r.shape}")
    return r


def photon_distribution(rho) -> np.ndarray:
    """p(n) = rho_{en,en} + rho_{gn,gn} for n = 0..N_trunc."""
    d = np.diagonal(_matrix(rho)).real
    return d[0::2] + d[1::2]


def moments(p) -> tuple[float, float]:
    """(<n>, <n^2>) of a photon distribution."""
    p = np.asarray(p, dtype=float)
    n = np.arange(p.shape[-1], dtype=float)
    return float(np.dot(n, p)), float(np.dot(n * n, p))


def mandel(p, eps: float = EPS_M) -> float | None:
    """Mandel parameter, or ``None`` when <n> <= eps."""
    n1, n2 = moments(p)
    if not n1 > eps:
        return None
    return (n2 - n1 * n1) / n1 - 1.0


def g2_zero(p, eps: float = EPS_M) -> float | None:
    """Equal-time second-order correlation, or ``None`` when <n> <= eps."""
    p = np.asarray(p, dtype=float)
    n = np.arange(p.shape[-1], dtype=float)
    n1 = float(np.dot(n, p))
    if not n1 > eps:
        return None
    return float(np.dot(n * (n - 1.0), p)) / (n1 * n1)


def g2_mandel_consistency(p, eps: float = EPS_M) -> float | None:
    """|M - <n>(g2 - 1)|; zero up to rounding for any distribution."""
    m = mandel(p, eps)
    if m is None:
        return None
    n1, _ = moments(p)
    return abs(m - n1 * (g2_zero(p, eps) - 1.0))


def polarization_one_photon(rho) -> complex:
    """<e,0|rho|g,1>."""
    r = _matrix(rho)
    if r.shape[0] < 4:
        raise DomainError("one-photon polarization needs N_trunc >= 1")
    return complex(r[basis_index("e", 0), basis_index("g", 1)])


@dataclass(frozen=True)
class ObservableRecord:
    """One CSV row. Photon fields are ``None`` for exciton-only runs."""

    t: float
    N_e: float
    inversion: float
    ReP: float
    ImP: float
    n_mean: float | None = None
    n2_mean: float | None = None
    M: float | None = None
    g2: float | None = None
    p: tuple | None = None

    def values(self) -> list:
        row = [self.t, self.N_e, self.inversion, self.ReP, self.ImP]
        if self.p is not None:
            row += [self.n_mean, self.n2_mean, self.M, self.g2, *self.p]
        return row


def record_from_state(t: float, rho) -> ObservableRecord:
    r = _matrix(rho)
    p = photon_distribution(r)
    n1, n2 = moments(p)
    ne = float(np.sum(np.diagonal(r).real[1::2]))
    pol = polarization_one_photon(r)
    return ObservableRecord(t=float(t), N_e=ne, inversion=2.0 * ne - 1.0, ReP=pol.real, ImP=pol.imag,
                            n_mean=n1, n2_mean=n2, M=mandel(p), g2=g2_zero(p), p=tuple(p.tolist()))


def series(traj: Trajectory, eps: float = EPS_M) -> dict:
    """Column arrays for a whole trajectory; undefined M/g2 entries are NaN here."""
    out = {
        "t": traj.times,
        "N_e": traj.exciton_population,
        "inversion": 2.0 * traj.exciton_population - 1.0,
        "ReP": traj.coherence.real,
        "ImP": traj.coherence.imag,
    }
    if traj.photon_distribution is None:
        return out
    p = traj.photon_distribution
    n = np.arange(p.shape[1], dtype=float)
    n1 = p @ n
    n2 = p @ (n * n)
    fact = p @ (n * (n - 1.0))
    ok = n1 > eps
    safe = np.where(ok, n1, 1.0)
    out["n_mean"] = n1
    out["n2_mean"] = n2
    out["M"] = np.where(ok, (n2 - n1 * n1) / safe - 1.0, np.nan)
    out["g2"] = np.where(ok, fact / (safe * safe), np.nan)
    out["p"] = p
    return out


def records(traj: Trajectory, eps: float = EPS_M) -> list[ObservableRecord]:
    s = series(traj, eps)
    out = []
    for i in range(traj.times.size):
        common = dict(t=float(s["t"][i]), N_e=float(s["N_e"][i]), inversion=float(s["inversion"][i]),
                      ReP=float(s["ReP"][i]), ImP=float(s["ImP"][i]))
        if "p" not in s:
            out.append(ObservableRecord(**common))
            continue
        m, g = float(s["M"][i]), float(s["g2"][i])
        out.append(ObservableRecord(
            **common, n_mean=float(s["n_mean"][i]), n2_mean=float(s["n2_mean"][i]),
            M=None if np.isnan(m) else m, g2=None if np.isnan(g) else g,
            p=tuple(s["p"][i].tolist()),
        ))
    return out


def format_value(v) -> str:
    """Shortest round-trip decimal; ``None`` becomes an empty field."""
    if v is None:
        return ""
    return repr(float(v))


def header(n_trunc: int | None) -> list[str]:
    if n_trunc is None:
        return list(EXCITON_COLUMNS)
    return list(CAVITY_COLUMNS) + [f"p_{n}" for n in range(n_trunc + 1)]


def to_csv_text(recs: list[ObservableRecord]) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    n_trunc = None
    if recs and recs[0].p is not None:
        n_trunc = len(recs[0].p) - 1
    w.writerow(header(n_trunc))
    for r in recs:
        w.writerow([format_value(v) for v in r.values()])
    return buf.getvalue()
