"""Time the numba kernels against their numpy twins.

    python3 benchmarks/bench_backends.py [--n-trunc 20] [--t-max 5]

Both backends are imported directly, so the env flag is not needed. The
first numba call is excluded (compilation) by a short warm-up.
"""

from __future__ import annotations

import argparse
import time

import numpy as np

from qdphonon import _kernels_numpy as knp
from qdphonon._accel import NUMBA_AVAILABLE
from qdphonon.dynamics import QDCavityState, dense_to_closure
from qdphonon.kernel import _table_panels, build_table, thermal_spectral_weight
from qdphonon.material import MaterialParams, derive_spectral_model
from qdphonon.quadrature import panel_nodes

DRIVE = (10.0, 10.0, 0.0, 0.0)


def _time(fn, repeat):
    best = np.inf
    for _ in range(repeat):
        start = time.perf_counter()
        fn()
        best = min(best, time.perf_counter() - start)
    return best


def cases(n_trunc, t_max, dt):
    s = derive_spectral_model(MaterialParams())
    table = build_table(s, 30.0, t_max, dt)
    n_steps = int(round(t_max / dt))
    rho0 = QDCavityState.ground(n_trunc).rho
    lo, hi = _table_panels(s, 2.0, np.pi)
    w, wk, wg = panel_nodes(lo, hi)
    wre = thermal_spectral_weight(s, 30.0, w)
    wim = s.prefactor * w**3 * np.exp(-((w / s.cutoff) ** 2))
    common = (*DRIVE, 0.1, 0.0, table.gamma, dt)
    return {
        f"propagate_full N={n_trunc}": lambda k: k.propagate_full(rho0, 0.0, dt, n_steps, 100, *common, False),
        f"propagate_closure N={n_trunc}": lambda k: k.propagate_closure(dense_to_closure(rho0), 0.0, dt, n_steps,
                                                                         100, *common, False),
        "propagate_exciton": lambda k: k.propagate_exciton(0j, 0.0, 0.0, dt, n_steps, 100, *DRIVE, table.gamma, dt),
        "tabulate_kernel 2001 points": lambda k: k.tabulate_kernel(w, wre, wim, wk, wg, dt, 2001, 256),
    }


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--n-trunc", type=int, default=20)
    ap.add_argument("--t-max", type=float, default=5.0)
    ap.add_argument("--dt", type=float, default=1e-3)
    ap.add_argument("--repeat", type=int, default=3)
    args = ap.parse_args(argv)
    if not NUMBA_AVAILABLE:
        raise SystemExit("numba is not installed")
    from qdphonon import _kernels_numba as knb

    print(f"{'kernel':34s} {'numba [s]':>10s} {'numpy [s]':>10s} {'speed-up':>9s}")
    for name, fn in cases(args.n_trunc, args.t_max, args.dt).items():
        fn(knb)  # compile
        t_nb = _time(lambda: fn(knb), args.repeat)
        t_np = _time(lambda: fn(knp), 1)
        print(f"{name:34s} {t_nb:10.4f} {t_np:10.4f} {t_np / t_nb:9.1f}")


if __name__ == "__main__":
    main()
