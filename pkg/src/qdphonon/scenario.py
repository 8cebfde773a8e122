"""Scenario configuration, preset runs, sweeps and run manifests.

A scenario is one JSON document::

    {
      "name": "fig3",
      "mode": "cavity-full",
      "phonons": true,
      "material": {"temperature": 30.0},
      "pulse": {"amplitude": 10.0, "width": 10.0, "center": 0.0},
      "system": {"g": 0.1, "delta": 0.0, "n_trunc": 90},
      "grid": {"t_max": 100.0, "dt": 0.001, "stride": 100},
      "initial": "g0",
      "output": "out",
      "variants": [{"label": "delta1", "system": {"delta": 1.0}}],
      "paper_unspecified": ["pulse.amplitude", "system.g"]
    }

Missing sections fall back to the library defaults. Every run writes a CSV
and a JSON manifest; the manifest is written to a temporary file and then
renamed into place.
"""

from __future__ import annotations

import dataclasses
import hashlib
import json
import math
import os
import tempfile
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from importlib import resources
from pathlib import Path

import numpy as np

from . import __version__, observables, units
from ._accel import backend_name
from .drive import PulseParams
from .dynamics import (
    HERMITICITY_TOL,
    POPULATION_FLOOR,
    TRACE_TOL,
    ExcitonState,
    QDCavityState,
    SystemParams,
    closure_integrate,
    exciton_only_integrate,
    integrate,
)
from .errors import ConfigError, InvalidParameterError
from .kernel import DEFAULT_TOL, KernelTable, build_table, table_cache_key, zero_table
from .material import MaterialParams, derive_spectral_model

MODES = ("exciton-only", "cavity-full", "cavity-closure", "kernel-only")
OUTPUT_ENV = "QDPHONON_OUTPUT_DIR"
EXCITATION_TOL = 1e-9

#: sweepable scalars -> (section, field)
SWEEP_AXES = {
    "A": ("pulse", "amplitude"),
    "a": ("pulse", "width"),
    "delta": ("system", "delta"),
    "g": ("system", "g"),
    "T": ("material", "temperature"),
    "N_trunc": ("system", "n_trunc"),
}
_AXIS_ALIASES = {"Delta": "delta", "Δ": "delta", "n_trunc": "N_trunc", "amplitude": "A", "width": "a",
                 "temperature": "T"}

NOTES = (
    "Delta and detuning are in rad/ps (the figure captions give Delta = 1.0 without a unit).",
    "Simulation runs in the rotating frame; the laser carrier enters only through pulse.detuning.",
)

_SECTIONS = {"material": MaterialParams, "pulse": PulseParams, "system": SystemParams}
_TOP_KEYS = {"name", "mode", "phonons", "material", "pulse", "system", "grid", "initial", "output",
             "variants", "paper_unspecified", "kernel_tol", "description"}


@dataclass(frozen=True)
class Grid:
    """Time grid: integrate on [0, t_max] with step dt, snapshot every ``stride`` steps."""

    t_max: float = 100.0
    dt: float = 1e-3
    stride: int = 100

    def __post_init__(self):
        if not (math.isfinite(self.dt) and self.dt > 0):
            raise InvalidParameterError("grid.dt", f"must be > 0, got {self.dt}")
        if not (math.isfinite(self.t_max) and self.t_max >= self.dt):
            raise InvalidParameterError("grid.t_max", f"must be >= dt, got {self.t_max}")
        n = self.t_max / self.dt
        if abs(n - round(n)) > 1e-9 * n:
            raise InvalidParameterError("grid.t_max", f"{self.t_max} is not a multiple of dt = {self.dt}")
        if isinstance(self.stride, bool) or int(self.stride) != self.stride or self.stride < 1:
            raise InvalidParameterError("grid.stride", f"must be an integer number of steps >= 1, got {self.stride}")
        object.__setattr__(self, "stride", int(self.stride))

    @property
    def n_steps(self) -> int:
        return int(round(self.t_max / self.dt))


@dataclass(frozen=True)
class ScenarioConfig:
    mode: str = "cavity-full"
    material: MaterialParams = field(default_factory=MaterialParams)
    pulse: PulseParams = field(default_factory=PulseParams)
    system: SystemParams = field(default_factory=SystemParams)
    grid: Grid = field(default_factory=Grid)
    phonons: bool = True
    initial: object = "g0"
    output: str = "out"
    name: str = "scenario"
    variants: tuple = ()
    paper_unspecified: tuple = ()
    kernel_tol: float = DEFAULT_TOL
    label: str | None = None

    # -- construction ---------------------------------------------------

    @classmethod
    def from_dict(cls, d: dict) -> "ScenarioConfig":
        if not isinstance(d, dict):
            raise ConfigError("<root>", "scenario must be a JSON object")
        unknown = set(d) - _TOP_KEYS
        if unknown:
            raise ConfigError(sorted(unknown)[0], "unknown key")
        mode = d.get("mode", "cavity-full")
        if mode not in MODES:
            raise ConfigError("mode", f"must be one of {', '.join(MODES)}, got {mode!r}")
        kw = {"mode": mode}
        for key, typ in _SECTIONS.items():
            kw[key] = _build(typ, d.get(key, {}), key)
        kw["grid"] = _build(Grid, d.get("grid", {}), "grid")
        phonons = d.get("phonons", True)
        if not isinstance(phonons, bool):
            raise ConfigError("phonons", "must be true or false")
        kw["phonons"] = phonons
        kw["initial"] = _freeze(d.get("initial", "g0"))
        kw["output"] = str(d.get("output", "out"))
        kw["name"] = str(d.get("name", "scenario"))
        variants = d.get("variants", [])
        if not isinstance(variants, list):
            raise ConfigError("variants", "must be a list")
        labels = []
        for i, v in enumerate(variants):
            if not isinstance(v, dict) or "label" not in v:
                raise ConfigError(f"variants[{i}]", "each variant needs a 'label'")
            bad = set(v) - {"label", *_SECTIONS, "grid", "phonons", "initial"}
            if bad:
                raise ConfigError(f"variants[{i}].{sorted(bad)[0]}", "unknown key")
            labels.append(v["label"])
        if len(set(labels)) != len(labels):
            raise ConfigError("variants", "labels must be unique")
        kw["variants"] = tuple(_freeze(v) for v in variants)
        kw["paper_unspecified"] = tuple(str(x) for x in d.get("paper_unspecified", []))
        tol = d.get("kernel_tol", DEFAULT_TOL)
        if not (isinstance(tol, (int, float)) and tol > 0):
            raise ConfigError("kernel_tol", "must be > 0")
        kw["kernel_tol"] = float(tol)
        cfg = cls(**kw)
        cfg.validate()
        for v in cfg.variants:
            cfg.variant(v["label"]).validate()
        return cfg

    def to_dict(self) -> dict:
        d = {
            "name": self.name,
            "mode": self.mode,
            "phonons": self.phonons,
            "material": dataclasses.asdict(self.material),
            "pulse": dataclasses.asdict(self.pulse),
            "system": dataclasses.asdict(self.system),
            "grid": dataclasses.asdict(self.grid),
            "initial": _thaw(self.initial),
            "output": self.output,
            "variants": [_thaw(v) for v in self.variants],
            "paper_unspecified": list(self.paper_unspecified),
            "kernel_tol": self.kernel_tol,
        }
        if self.label is not None:
            d["label"] = self.label
        return d

    def validate(self) -> None:
        if self.mode in ("cavity-full", "cavity-closure", "kernel-only"):
            _initial_cavity(self.initial, self.system.n_trunc)
        if self.mode == "exciton-only":
            _initial_exciton(self.initial)

    def replace(self, **changes) -> "ScenarioConfig":
        return dataclasses.replace(self, **changes)

    def with_overrides(self, overrides: dict) -> "ScenarioConfig":
        """Apply nested section overrides such as ``{"system": {"delta": 1.0}}``."""
        changes = {}
        for key, val in overrides.items():
            if key in _SECTIONS or key == "grid":
                if not isinstance(val, dict):
                    raise ConfigError(key, "override must be an object")
                typ = Grid if key == "grid" else _SECTIONS[key]
                base = dataclasses.asdict(getattr(self, key))
                base.update(val)
                changes[key] = _build(typ, base, key)
            elif key == "phonons":
                changes[key] = bool(val)
            elif key == "initial":
                changes[key] = _freeze(val)
            elif key != "label":
                raise ConfigError(key, "cannot be overridden")
        return self.replace(**changes)

    def variant(self, label: str) -> "ScenarioConfig":
        for v in self.variants:
            if v["label"] == label:
                cfg = self.with_overrides(_thaw(v)).replace(variants=(), label=label)
                cfg.validate()
                return cfg
        raise ConfigError("variants", f"no variant labelled {label!r}")

    def expand(self) -> list["ScenarioConfig"]:
        """One resolved config per variant (or just this one)."""
        if not self.variants:
            return [self]
        return [self.variant(v["label"]) for v in self.variants]

    @property
    def run_name(self) -> str:
        return self.name if self.label is None else f"{self.name}_{self.label}"

    def config_hash(self) -> str:
        d = self.to_dict()
        d.pop("output", None)
        text = json.dumps(d, sort_keys=True, separators=(",", ":"))
        return hashlib.sha256(text.encode()).hexdigest()[:16]

    def warnings(self) -> list[str]:
        out = []
        p = self.pulse
        if self.mode != "kernel-only" and p.amplitude > 0 and self.grid.t_max < p.center + 4.0 * p.width:
            out.append(f"grid.t_max = {self.grid.t_max} ps ends before the pulse tail "
                       f"(center + 4 width = {p.center + 4.0 * p.width} ps)")
        return out


def _build(typ, values, section):
    if not isinstance(values, dict):
        raise ConfigError(section, "must be an object")
    if typ is PulseParams and "area" in values:
        if "amplitude" in values:
            raise ConfigError("pulse.area", "give either amplitude or area, not both")
        values = dict(values)
        area = values.pop("area")
        if isinstance(area, bool) or not isinstance(area, (int, float)):
            raise ConfigError("pulse.area", f"must be a number, got {area!r}")
        values["amplitude"] = area * math.sqrt(2.0)
    names = {f.name for f in dataclasses.fields(typ)}
    unknown = set(values) - names
    if unknown:
        raise ConfigError(f"{section}.{sorted(unknown)[0]}", "unknown key")
    for k, v in values.items():
        if isinstance(v, bool) or not (isinstance(v, (int, float)) or (v is None and k == "center")):
            raise ConfigError(f"{section}.{k}", f"must be a number, got {v!r}")
    try:
        return typ(**values)
    except InvalidParameterError as exc:
        raise ConfigError(exc.field, str(exc).split(": ", 1)[-1]) from exc
    except (TypeError, ValueError) as exc:
        raise ConfigError(section, str(exc)) from exc


def _freeze(v):
    """Nested dict/list -> hashable tuples so the config stays immutable."""
    if isinstance(v, dict):
        return _FrozenDict((k, _freeze(x)) for k, x in v.items())
    if isinstance(v, list):
        return tuple(_freeze(x) for x in v)
    return v


def _thaw(v):
    if isinstance(v, _FrozenDict):
        return {k: _thaw(x) for k, x in v.items()}
    if isinstance(v, tuple):
        return [_thaw(x) for x in v]
    return v


class _FrozenDict(dict):
    def __hash__(self):
        return hash(tuple(sorted(self.items())))

    def __reduce__(self):
        return (_FrozenDict, (list(self.items()),))

    def _ro(self, *a, **k):
        raise TypeError("config values are read-only")

    __setitem__ = __delitem__ = update = pop = clear = setdefault = _ro


def _initial_cavity(initial, n_trunc) -> QDCavityState:
    if initial in ("g0", "ground"):
        return QDCavityState.ground(n_trunc)
    if isinstance(initial, str) and len(initial) >= 2 and initial[0] in "ge" and initial[1:].isdigit():
        qd, n = initial[0], int(initial[1:])
    elif isinstance(initial, dict) and set(initial) == {"qd", "n"}:
        qd, n = initial["qd"], initial["n"]
    else:
        raise ConfigError("initial", f"expected 'g0', 'e0', ... or {{'qd': ..., 'n': ...}}, got {_thaw(initial)!r}")
    if qd not in ("g", "e") or not isinstance(n, int) or not 0 <= n <= n_trunc:
        raise ConfigError("initial", f"state {qd}{n} is outside the basis (n_trunc = {n_trunc})")
    return QDCavityState.product(n_trunc, qd, n)


def _initial_exciton(initial) -> ExcitonState:
    if initial in ("g0", "g", "ground"):
        return ExcitonState()
    if initial in ("e0", "e"):
        return ExcitonState(p=0j, n_e=1.0)
    if isinstance(initial, dict) and set(initial) <= {"P", "N_e"}:
        p = initial.get("P", [0.0, 0.0])
        ne = initial.get("N_e", 0.0)
        try:
            x = ExcitonState(p=complex(float(p[0]), float(p[1])), n_e=float(ne))
        except (TypeError, ValueError, IndexError) as exc:
            raise ConfigError("initial", "expected {'P': [re, im], 'N_e': value}") from exc
        if not -1e-8 <= x.n_e <= 1 + 1e-8 or x.positivity_violation() > 1e-8:
            raise ConfigError("initial", "exciton state is not a valid density matrix")
        return x
    raise ConfigError("initial", f"unsupported exciton-only initial state {_thaw(initial)!r}")


# ---------------------------------------------------------------- loading


def preset_names() -> list[str]:
    files = resources.files("qdphonon").joinpath("presets").iterdir()
    return sorted(f.name[:-5] for f in files if f.name.endswith(".json"))


def load_preset(name: str) -> dict:
    path = resources.files("qdphonon").joinpath("presets", f"{name}.json")
    if not path.is_file():
        raise ConfigError("preset", f"unknown preset {name!r}; available: {', '.join(preset_names())}")
    return json.loads(path.read_text(encoding="utf-8"))


def load_config(source) -> ScenarioConfig:
    """Build a config from a dict, a JSON file path, or a preset name."""
    if isinstance(source, ScenarioConfig):
        return source
    if isinstance(source, dict):
        return ScenarioConfig.from_dict(source)
    path = Path(source)
    if path.is_file():
        try:
            data = json.loads(path.read_text(encoding="utf-8"))
        except json.JSONDecodeError as exc:
            raise ConfigError(str(path), f"invalid JSON: {exc}") from exc
        return ScenarioConfig.from_dict(data)
    return ScenarioConfig.from_dict(load_preset(str(source)))


def output_dir(cfg: ScenarioConfig) -> Path:
    return Path(os.environ.get(OUTPUT_ENV) or cfg.output)


# ---------------------------------------------------------------- kernel cache

_TABLES: dict[str, KernelTable] = {}


def kernel_table(cfg: ScenarioConfig, cache_dir: Path | None = None) -> KernelTable:
    """Build or fetch the K/Gamma table for ``cfg``.

    Tables are memoised per process and, when ``cache_dir`` is given, stored
    there as CSV keyed by a hash of the spectral and grid parameters.
    """
    s = derive_spectral_model(cfg.material)
    temp = cfg.material.temperature
    if not cfg.phonons:
        return zero_table(s, temp, cfg.grid.t_max, cfg.grid.dt)
    key = table_cache_key(s, temp, cfg.grid.t_max, cfg.grid.dt, cfg.kernel_tol)
    path = cache_dir / f"kernel_{key}.csv" if cache_dir is not None else None
    table = _TABLES.get(key)
    if table is None and path is not None and path.is_file():
        table = KernelTable.from_csv(path)
    if table is None:
        table = build_table(s, temp, cfg.grid.t_max, cfg.grid.dt, cfg.kernel_tol)
    if path is not None and not path.is_file():
        _atomic_write(path, table.to_csv_text())
    _TABLES[key] = table
    return table


# ---------------------------------------------------------------- manifests


@dataclass
class RunManifest:
    name: str
    config: dict
    config_hash: str
    tool_version: str
    backend: str
    wall_time_s: float
    invariants: dict
    status: str
    outputs: dict
    warnings: list = field(default_factory=list)
    convergence: dict = field(default_factory=dict)
    paper_unspecified: list = field(default_factory=list)
    notes: list = field(default_factory=list)
    extra: dict = field(default_factory=dict)

    def to_dict(self) -> dict:
        return dataclasses.asdict(self)

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2, sort_keys=True) + "\n"

    def write(self, path) -> None:
        _atomic_write(Path(path), self.to_json())


def _atomic_write(path: Path, text: str) -> None:
    path.parent.mkdir(parents=True, exist_ok=True)
    fd, tmp = tempfile.mkstemp(dir=path.parent, prefix=f".{path.name}.", suffix=".tmp")
    try:
        with os.fdopen(fd, "w", encoding="utf-8", newline="") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def _sha256(text: str) -> str:
    return hashlib.sha256(text.encode()).hexdigest()


def evaluate_invariants(report: dict, driven: bool) -> list[str]:
    """Names of dynamics tolerances exceeded by an invariant report."""
    bad = []
    if report.get("max_trace_drift", 0.0) > TRACE_TOL:
        bad.append("trace")
    if report.get("max_hermiticity_drift", 0.0) > HERMITICITY_TOL:
        bad.append("hermiticity")
    if report.get("most_negative_population", 0.0) < POPULATION_FLOOR:
        bad.append("population")
    if not driven and report.get("max_excitation_drift", 0.0) > EXCITATION_TOL:
        bad.append("excitation")
    return bad


# ---------------------------------------------------------------- running


@dataclass
class RunResult:
    manifest: RunManifest
    trajectory: object
    csv_text: str
    table: KernelTable


def simulate(cfg: ScenarioConfig, table: KernelTable | None = None):
    """Integrate one resolved config; returns (trajectory, table)."""
    if cfg.variants:
        raise ConfigError("variants", "expand variants before simulating")
    table = table if table is not None else kernel_table(cfg)
    span = (0.0, cfg.grid.t_max)
    kw = dict(dt=cfg.grid.dt, stride=cfg.grid.stride)
    if cfg.mode == "exciton-only":
        traj = exciton_only_integrate(cfg.pulse, table, _initial_exciton(cfg.initial), span, **kw)
    elif cfg.mode == "cavity-full":
        traj = integrate(cfg.system, cfg.pulse, table, _initial_cavity(cfg.initial, cfg.system.n_trunc), span, **kw)
    elif cfg.mode == "cavity-closure":
        traj = closure_integrate(cfg.system, cfg.pulse, table, _initial_cavity(cfg.initial, cfg.system.n_trunc),
                                 span, **kw)
    else:
        raise ConfigError("mode", "kernel-only has no trajectory")
    return traj, table


def run_single(cfg: ScenarioConfig, out: Path | None = None, write: bool = True) -> RunResult:
    """Run one resolved config and write ``<run_name>.csv`` plus its manifest."""
    out = output_dir(cfg) if out is None else Path(out)
    start = time.perf_counter()
    table = kernel_table(cfg, out / ".kernel_cache" if write else None)
    if cfg.mode == "kernel-only":
        traj = None
        text = table.to_csv_text()
        invariants, bad = {}, []
        extra = {"kernel_error_estimate": table.error_estimate}
        csv_name = f"{cfg.run_name}_kernel.csv"
    else:
        traj, _ = simulate(cfg, table)
        text = observables.to_csv_text(observables.records(traj))
        invariants = traj.invariant_report()
        bad = evaluate_invariants(invariants, driven=cfg.pulse.amplitude > 0)
        extra = {"kernel_error_estimate": table.error_estimate}
        csv_name = f"{cfg.run_name}.csv"
    elapsed = time.perf_counter() - start
    manifest = RunManifest(
        name=cfg.run_name, config=cfg.to_dict(), config_hash=cfg.config_hash(), tool_version=__version__,
        backend=backend_name(), wall_time_s=elapsed, invariants=invariants,
        status="ok" if not bad else "failed: " + ",".join(bad),
        outputs={"csv": csv_name, "csv_sha256": _sha256(text)},
        warnings=cfg.warnings(), paper_unspecified=list(cfg.paper_unspecified), notes=list(NOTES), extra=extra,
    )
    if write:
        _atomic_write(out / csv_name, text)
        manifest.write(out / f"{cfg.run_name}.manifest.json")
    return RunResult(manifest, traj, text, table)


def run(source, out: Path | None = None, write: bool = True) -> list[RunResult]:
    """Run a scenario (every variant) and return one result per run."""
    cfg = load_config(source)
    return [run_single(c, out, write) for c in cfg.expand()]


def kernel_only(source, out: Path | None = None) -> RunResult:
    cfg = load_config(source).replace(mode="kernel-only", variants=())
    return run_single(cfg, out)


# ---------------------------------------------------------------- sweeps


def normalize_axis(axis: str) -> str:
    axis = _AXIS_ALIASES.get(axis, axis)
    if axis not in SWEEP_AXES:
        raise ConfigError("axis", f"unknown sweep axis {axis!r}; choose from {', '.join(SWEEP_AXES)}")
    return axis


def sweep_configs(base: ScenarioConfig, axis: str, values) -> list[ScenarioConfig]:
    axis = normalize_axis(axis)
    section, name = SWEEP_AXES[axis]
    out = []
    for v in values:
        v = int(v) if axis == "N_trunc" else float(v)
        cfg = base.replace(variants=(), label=None).with_overrides({section: {name: v}})
        cfg = cfg.replace(label=f"{axis}={v!r}")
        cfg.validate()
        out.append(cfg)
    return out


SUMMARY_COLUMNS = ["run", "axis", "value", "status", "max_N_e", "final_N_e", "max_abs_ImP",
                   "max_n_mean", "final_n_mean", "min_M", "max_M", "min_g2",
                   "max_trace_drift", "max_hermiticity_drift", "most_negative_population",
                   "delta_vs_previous_n_mean", "delta_vs_previous_N_e"]


def _reductions(traj) -> dict:
    s = observables.series(traj)
    red = {
        "max_N_e": float(np.max(s["N_e"])),
        "final_N_e": float(s["N_e"][-1]),
        "max_abs_ImP": float(np.max(np.abs(s["ImP"]))),
    }
    if "n_mean" in s:
        m, g = s["M"], s["g2"]
        red.update({
            "max_n_mean": float(np.max(s["n_mean"])),
            "final_n_mean": float(s["n_mean"][-1]),
            "min_M": float(np.nanmin(m)) if np.isfinite(m).any() else None,
            "max_M": float(np.nanmax(m)) if np.isfinite(m).any() else None,
            "min_g2": float(np.nanmin(g)) if np.isfinite(g).any() else None,
        })
    return red


def _delta(a, b, key) -> float | None:
    """Max |a - b| of a series over the times both trajectories share."""
    sa, sb = observables.series(a), observables.series(b)
    if key not in sa or key not in sb:
        return None
    ta = np.round(sa["t"], 9)
    tb = np.round(sb["t"], 9)
    common, ia, ib = np.intersect1d(ta, tb, return_indices=True)
    if common.size == 0:
        return None
    return float(np.max(np.abs(sa[key][ia] - sb[key][ib])))


def _run_worker(args):
    cfg, out = args
    res = run_single(cfg, out)
    return res.manifest, res.trajectory


def sweep(source, axis: str, values, out: Path | None = None, jobs: int = 1) -> list[RunManifest]:
    """Independent runs over one axis plus ``sweep_<axis>.csv`` with per-run reductions.

    Convergence deltas compare each run with the previous value on the
    shared snapshot times (max |<n>| and |N_e| differences).
    """
    base = load_config(source)
    axis = normalize_axis(axis)
    cfgs = sweep_configs(base, axis, values)
    out = output_dir(base) if out is None else Path(out)
    sweep_dir = out / f"sweep_{base.name}_{axis}"
    if jobs > 1 and len(cfgs) > 1:
        # build shared tables first so the workers only read the cache
        for c in cfgs:
            kernel_table(c, sweep_dir / ".kernel_cache")
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            results = list(pool.map(_run_worker, [(c, sweep_dir) for c in cfgs]))
    else:
        results = [_run_worker((c, sweep_dir)) for c in cfgs]
    rows = []
    manifests = []
    prev = None
    for cfg, (manifest, traj) in zip(cfgs, results):
        red = _reductions(traj) if traj is not None else {}
        conv = {}
        if prev is not None:
            conv = {"reference": prev[0].label,
                    "max_abs_delta_n_mean": _delta(traj, prev[1], "n_mean"),
                    "max_abs_delta_N_e": _delta(traj, prev[1], "N_e")}
            manifest.convergence = conv
            manifest.write(sweep_dir / f"{cfg.run_name}.manifest.json")
        value = cfg.system.n_trunc if axis == "N_trunc" else _axis_value(cfg, axis)
        rows.append({
            "run": cfg.run_name, "axis": axis, "value": value, "status": manifest.status, **red,
            **{k: manifest.invariants.get(k) for k in ("max_trace_drift", "max_hermiticity_drift",
                                                        "most_negative_population")},
            "delta_vs_previous_n_mean": conv.get("max_abs_delta_n_mean"),
            "delta_vs_previous_N_e": conv.get("max_abs_delta_N_e"),
        })
        manifests.append(manifest)
        prev = (cfg, traj)
    _atomic_write(sweep_dir / f"sweep_{axis}.csv", _summary_csv(rows))
    return manifests


def _axis_value(cfg, axis):
    section, name = SWEEP_AXES[axis]
    return getattr(getattr(cfg, section), name)


def _summary_csv(rows) -> str:
    import csv
    import io

    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(SUMMARY_COLUMNS)
    for r in rows:
        cells = []
        for c in SUMMARY_COLUMNS:
            v = r.get(c)
            if v is None:
                cells.append("")
            elif isinstance(v, float):
                cells.append(repr(v))
            else:
                cells.append(str(v))
        w.writerow(cells)
    return buf.getvalue()


# ---------------------------------------------------------------- check


def check(source) -> dict:
    """Validate without running and resolve the unit conversions."""
    report = {"valid": True, "errors": [], "warnings": [], "resolved": {}}
    try:
        cfg = load_config(source)
    except ConfigError as exc:
        report["valid"] = False
        report["errors"].append({"field": exc.field, "message": str(exc)})
        return report
    s = derive_spectral_model(cfg.material)
    theta = units.thermal_frequency(cfg.material.temperature)
    ev = units.rad_per_ps_to_ev
    runs = cfg.expand()
    report["warnings"] = sorted({w for c in runs for w in c.warnings()})
    report["resolved"] = {
        "mode": cfg.mode,
        "runs": [c.run_name for c in runs],
        "spectral_prefactor_ps2": s.prefactor,
        "cutoff_rad_per_ps": s.cutoff,
        "cutoff_meV": 1e3 * ev(s.cutoff),
        "thermal_frequency_rad_per_ps": theta,
        "thermal_energy_meV": 1e3 * ev(theta),
        "g_rad_per_ps": cfg.system.g,
        "g_micro_eV": 1e6 * ev(cfg.system.g),
        "delta_rad_per_ps": [c.system.delta for c in runs],
        "delta_meV": [1e3 * ev(c.system.delta) for c in runs],
        "pulse_peak_rad_per_ps": cfg.pulse.peak,
        "pulse_area": cfg.pulse.area,
        "pulse_center_ps": cfg.pulse.center,
        "n_steps": cfg.grid.n_steps,
        "hilbert_dimension": cfg.system.dim if cfg.mode.startswith("cavity") else 2,
        "paper_unspecified": list(cfg.paper_unspecified),
        "backend": backend_name(),
    }
    return report
