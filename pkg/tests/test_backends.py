"""The compiled kernels and their numpy twins must agree."""

from __future__ import annotations

import numpy as np
import pytest

from qdphonon import _kernels_numpy as knp
from qdphonon._accel import NUMBA_AVAILABLE
from qdphonon.dynamics import QDCavityState, dense_to_closure
from qdphonon.kernel import _table_panels, thermal_spectral_weight
from qdphonon.quadrature import panel_nodes

pytestmark = pytest.mark.skipif(not NUMBA_AVAILABLE, reason="numba not installed")


@pytest.fixture(scope="module")
def knb():
    from qdphonon import _kernels_numba

    return _kernels_numba


DRIVE = (10.0, 3.0, 0.0, 0.1)  # amplitude, width, center, laser detuning


def test_tabulate_kernel_parity(knb, gaas):
    lo, hi = _table_panels(gaas, 2.0, np.pi)
    w, wk, wg = panel_nodes(lo, hi)
    wre = thermal_spectral_weight(gaas, 30.0, w)
    wim = gaas.prefactor * w**3 * np.exp(-((w / gaas.cutoff) ** 2))
    a = knb.tabulate_kernel(w, wre, wim, wk, wg, 1e-3, 2001, 256)
    b = knp.tabulate_kernel(w, wre, wim, wk, wg, 1e-3, 2001, 256)
    np.testing.assert_allclose(a[0], b[0], rtol=0, atol=1e-15)
    # error estimates are rounding-level; compare against the kernel scale
    np.testing.assert_allclose(a[1], b[1], rtol=0, atol=1e-12 * np.abs(a[0]).max())


def test_gamma_interp_parity(knb, table_short):
    g = table_short.gamma
    for t in (0.0, 1e-3, 0.0015, 3.14159, 9.9995, 10.0):
        assert knb.gamma_interp(g, 1e-3, t) == knp.gamma_interp(g, 1e-3, t)


def test_full_propagator_parity(knb, table_short):
    rho0 = QDCavityState.pure(6, {("g", 0): 1.0, ("e", 1): 0.3}).rho
    args = (0.0, 1e-3, 4000, 500, *DRIVE, 0.1, 0.3, table_short.gamma, 1e-3, True)
    a = knb.propagate_full(rho0, *args)
    b = knp.propagate_full(rho0, *args)
    np.testing.assert_allclose(a[-1], b[-1], atol=1e-13)
    for x, y in zip(a[:-1], b[:-1]):
        np.testing.assert_allclose(x, y, atol=1e-12)


def test_closure_propagator_parity(knb, table_short):
    s0 = dense_to_closure(QDCavityState.ground(6).rho)
    args = (0.0, 1e-3, 4000, 500, *DRIVE, 0.1, 0.3, table_short.gamma, 1e-3, True)
    a = knb.propagate_closure(s0, *args)
    b = knp.propagate_closure(s0, *args)
    for x, y in zip(a, b):
        np.testing.assert_allclose(x, y, atol=1e-13)


def test_exciton_propagator_parity(knb, table_short):
    args = (0.0, 0.0, 0.0, 1e-3, 5000, 100, *DRIVE, table_short.gamma, 1e-3)
    a = knb.propagate_exciton(*args)
    b = knp.propagate_exciton(*args)
    for x, y in zip(a, b):
        np.testing.assert_allclose(x, y, atol=1e-14)


def test_backend_flag_selects_numpy(tmp_path):
    import os
    import subprocess
    import sys

    env = dict(os.environ, QDPHONON_DISABLE_NUMBA="1")
    code = "from qdphonon import backend_name; from qdphonon._backend import kernels; print(backend_name(), kernels.__name__)"
    out = subprocess.run([sys.executable, "-c", code], env=env, capture_output=True, text=True, check=True).stdout
    assert out.split() == ["numpy", "qdphonon._kernels_numpy"]
