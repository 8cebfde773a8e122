from __future__ import annotations

import csv
import io
import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st
from hypothesis.extra.numpy import arrays
from scipy.stats import poisson

from qdphonon import observables as ob
from qdphonon.drive import PulseParams
from qdphonon.dynamics import QDCavityState, SystemParams, integrate

OFF = PulseParams(amplitude=0.0, width=10.0, center=0.0)


def fock(n, size=12):
    p = np.zeros(size)
    p[n] = 1.0
    return p


POISSON2 = poisson.pmf(np.arange(80), 2.0)


def test_distribution_ground():
    np.testing.assert_array_equal(ob.photon_distribution(QDCavityState.ground(4)), [1, 0, 0, 0, 0])


def test_distribution_mixture():
    rho = 0.5 * QDCavityState.product(3, "g", 0).rho + 0.5 * QDCavityState.product(3, "e", 1).rho
    np.testing.assert_array_equal(ob.photon_distribution(rho), [0.5, 0.5, 0, 0])


def test_distribution_sums_to_trace():
    rng = np.random.default_rng(11)
    for _ in range(10):
        x = rng.normal(size=(10, 10)) + 1j * rng.normal(size=(10, 10))
        rho = x @ x.conj().T
        rho /= np.trace(rho)
        p = ob.photon_distribution(rho)
        assert abs(p.sum() - np.trace(rho).real) < 1e-12
        assert np.all(p >= 0)


def test_mandel_poisson():
    assert abs(ob.mandel(POISSON2)) < 1e-10


def test_mandel_fock_one():
    assert ob.mandel(fock(1)) == -1.0


def test_mandel_thermal():
    n = np.arange(1000)
    p = 0.5 ** (n + 1)  # geometric with mean 1
    assert ob.mandel(p) == pytest.approx(1.0, abs=1e-12)


def test_g2_examples():
    assert ob.g2_zero(fock(1)) == 0.0
    assert ob.g2_zero(POISSON2) == pytest.approx(1.0, abs=1e-10)
    assert ob.g2_zero(fock(2)) == 0.5


def test_undefined_in_vacuum():
    assert ob.mandel(fock(0)) is None
    assert ob.g2_zero(fock(0)) is None
    assert ob.g2_mandel_consistency(fock(0)) is None
    tiny = fock(0)
    tiny[1] = 1e-13
    assert ob.mandel(tiny) is None


def test_consistency_examples():
    assert ob.g2_mandel_consistency(POISSON2) < 1e-10
    assert ob.mandel(fock(2)) == -1.0
    assert 2.0 * (ob.g2_zero(fock(2)) - 1.0) == -1.0
    assert ob.g2_mandel_consistency(fock(2)) == 0.0


@given(arrays(np.float64, st.integers(2, 40), elements=st.floats(0, 1)))
def test_consistency_identity(p):
    if p.sum() == 0:
        return
    p = p / p.sum()
    r = ob.g2_mandel_consistency(p)
    if r is None:
        return
    n1, _ = ob.moments(p)
    assert r < 1e-10 * max(1.0, abs(ob.mandel(p)), n1)
    assert ob.mandel(p) >= -1 - 1e-8
    assert ob.g2_zero(p) >= 0.0


@given(arrays(np.float64, st.integers(1, 30), elements=st.floats(0, 1)))
def test_second_moment_bound(p):
    if p.sum() == 0:
        return
    p = p / p.sum()
    n1, n2 = ob.moments(p)
    assert n2 >= n1 * n1 - 1e-10


def test_polarization_examples():
    assert ob.polarization_one_photon(QDCavityState.ground(2)) == 0j
    bell = QDCavityState.pure(2, {("e", 0): 1.0, ("g", 1): 1.0})
    assert ob.polarization_one_photon(bell) == pytest.approx(0.5, abs=1e-15)


def test_polarization_jaynes_cummings(no_phonons):
    g = 0.1
    tr = integrate(SystemParams(g=g, n_trunc=3), OFF, no_phonons, QDCavityState.product(3, "e", 0),
                   (0.0, 100.0), dt=1e-3, stride=100, keep_states=True)
    im = np.array([ob.polarization_one_photon(s).imag for s in tr.states])
    np.testing.assert_allclose(im, 0.5 * np.sin(2 * g * tr.times), atol=1e-6)
    np.testing.assert_array_equal(im, tr.coherence.imag)


def test_records_match_state_records(table100):
    sysp = SystemParams(g=0.1, n_trunc=10)
    p = PulseParams(amplitude=10.0, width=10.0, center=0.0)
    tr = integrate(sysp, p, table100, QDCavityState.ground(10), (0.0, 30.0), stride=2000, keep_states=True)
    recs = ob.records(tr)
    for r, s, t in zip(recs, tr.states, tr.times):
        ref = ob.record_from_state(t, s)
        assert r.t == ref.t
        if ref.M is None:
            assert r.M is None
        else:
            assert r.M == pytest.approx(ref.M, rel=1e-12)
        assert r.N_e == pytest.approx(ref.N_e, abs=1e-15)
        assert r.inversion == pytest.approx(2 * r.N_e - 1)
        np.testing.assert_allclose(r.p, ref.p, atol=1e-15)


def test_trajectory_statistics_bounds(table100):
    sysp = SystemParams(g=0.1, n_trunc=12)
    p = PulseParams(amplitude=10.0, width=10.0, center=0.0)
    tr = integrate(sysp, p, table100, QDCavityState.ground(12), (0.0, 50.0), stride=100)
    s = ob.series(tr)
    ok = ~np.isnan(s["M"])
    assert np.all(s["M"][ok] >= -1 - 1e-8)
    assert np.all(s["g2"][ok] >= -1e-8)
    resid = np.abs(s["M"][ok] - s["n_mean"][ok] * (s["g2"][ok] - 1))
    assert resid.max() < 1e-9
    assert np.all(np.abs(s["p"].sum(axis=1) - 1.0) < 1e-8)


def test_decoupled_statistics_constant(table100):
    rho = 0.3 * QDCavityState.product(4, "g", 2).rho + 0.7 * QDCavityState.product(4, "e", 3).rho
    rho[basis_index_e(3), 2 * 2] = rho[2 * 2, basis_index_e(3)] = 0.1
    tr = integrate(SystemParams(g=0.0, n_trunc=4), OFF, table100, rho, (0.0, 50.0), stride=1000)
    s = ob.series(tr)
    for key in ("n_mean", "M", "g2"):
        assert np.ptp(s[key]) < 1e-13


def basis_index_e(n):
    return 2 * n + 1


def test_csv_undefined_fields_empty(no_phonons):
    tr = integrate(SystemParams(g=0.1, n_trunc=2), OFF, no_phonons, QDCavityState.product(2, "e", 0),
                   (0.0, 1.0), stride=500)
    text = ob.to_csv_text(ob.records(tr))
    rows = list(csv.reader(io.StringIO(text)))
    assert rows[0] == ["t", "N_e", "inversion", "ReP", "ImP", "n_mean", "n2_mean", "M", "g2", "p_0", "p_1", "p_2"]
    assert rows[1][7] == "" and rows[1][8] == ""
    assert rows[2][7] != "" and math.isfinite(float(rows[2][7]))
    assert "nan" not in text.lower()


def test_format_value_round_trip():
    for v in (0.1, 1 / 3, 1e-300, -2.5e17):
        assert float(ob.format_value(v)) == v
    assert ob.format_value(None) == ""
