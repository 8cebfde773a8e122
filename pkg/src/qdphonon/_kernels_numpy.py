"""Pure-numpy hot kernels.

Same signatures and arithmetic as :mod:`qdphonon._kernels_numba`; selected
when numba is absent or disabled.
"""

import math

import numpy as np

_SQRT_2PI = math.sqrt(2.0 * math.pi)
_SNAP = 1e-9
#: entries below this magnitude are set to zero after every step
FLUSH = 1e-250
#: basis-index margin kept beyond the last nonzero row (RK4 spreads <= 4 per step)
WINDOW_MARGIN = 8


def gamma_interp(gam, gam_dt, t):
    x = t / gam_dt
    r = math.floor(x + 0.5)
    n = gam.shape[0]
    if abs(x - r) <= _SNAP:
        return gam[min(max(r, 0), n - 1)]
    i = math.floor(x)
    if i < 0:
        return gam[0]
    if i >= n - 1:
        return gam[n - 1]
    fr = x - i
    return gam[i] * (1.0 - fr) + gam[i + 1] * fr


def drive_value(amp, width, center, det_l, t):
    u = (t - center) / width
    return amp * math.exp(-u * u) / (_SQRT_2PI * width) * complex(math.cos(det_l * t), math.sin(det_l * t))


def tabulate_kernel(omega, wre, wim, wk, wg, dt, n_points, reseed):
    """K(t_k) and the summed per-panel |K15 - G7| for t_k = k dt."""
    rot = np.exp(-1j * omega * dt)
    kern = np.empty(n_points, dtype=np.complex128)
    err = np.empty(n_points)
    z = None
    for k in range(n_points):
        if k % reseed == 0:
            z = np.exp(-1j * omega * (k * dt))
        else:
            z = z * rot
        vals = wre * z.real + 1j * (wim * z.imag)
        pk = np.sum(wk * vals, axis=1)
        pg = np.sum(wg * vals, axis=1)
        kern[k] = np.sum(pk)
        err[k] = np.sum(np.abs(pk - pg))
    return kern, err


def subdiagonal(n_trunc, c, gc):
    """H[k+1, k] of the tridiagonal rotating-frame Hamiltonian."""
    d = 2 * (n_trunc + 1)
    sub = np.empty(d - 1, dtype=np.complex128)
    sub[0::2] = c
    sub[1::2] = np.conj(gc) * np.sqrt(np.arange(1, n_trunc + 1))
    return sub


def coherent_rhs(rho, sub):
    """-i [H, rho] for tridiagonal Hermitian H with zero diagonal."""
    hr = np.zeros_like(rho)
    hr[1:] = sub[:, None] * rho[:-1]
    hr[:-1] += np.conj(sub)[:, None] * rho[1:]
    rh = np.zeros_like(rho)
    rh[:, 1:] = rho[:, :-1] * np.conj(sub)[None, :]
    rh[:, :-1] += rho[:, 1:] * sub[None, :]
    return -1j * (hr - rh)


def dephasing_rhs(rho, gam):
    out = np.zeros_like(rho)
    out[1::2, 0::2] = -gam * rho[1::2, 0::2]
    out[0::2, 1::2] = -np.conj(gam) * rho[0::2, 1::2]
    return out


def full_rhs(rho, n_trunc, c, gc, gam, sub=None):
    if sub is None:
        sub = subdiagonal(n_trunc, c, gc)
    out = coherent_rhs(rho, sub)
    out[1::2, 0::2] -= gam * rho[1::2, 0::2]
    out[0::2, 1::2] -= np.conj(gam) * rho[0::2, 1::2]
    return out


def _n_snapshots(n_steps, stride):
    return n_steps // stride + 1 + (1 if n_steps % stride else 0)


def _stage_coefficients(t, amp, width, center, det_l, g, delta, gam, gam_dt):
    c = drive_value(amp, width, center, det_l, t)
    gc = g * complex(math.cos(delta * t), math.sin(delta * t))
    return c, gc, gamma_interp(gam, gam_dt, t)


def _flush_and_extent(rho):
    """Zero sub-FLUSH parts in place; return 1 + last basis index in use."""
    rho.real[np.abs(rho.real) < FLUSH] = 0.0
    rho.imag[np.abs(rho.imag) < FLUSH] = 0.0
    used = np.flatnonzero(np.any(rho != 0, axis=1) | np.any(rho != 0, axis=0))
    return int(used[-1]) + 1 if used.size else 0


def _full_diagnostics(rho, n_trunc):
    d = rho.shape[0]
    diag = np.diagonal(rho)
    pn = (diag[0::2] + diag[1::2]).real
    n = np.arange(n_trunc + 1)
    ne = float(np.sum(diag[1::2].real))
    tr = np.sum(diag)
    herm = float(np.max(np.abs(rho - rho.conj().T)))
    minpop = float(np.min(diag.real))
    exc = float(np.sum(n * pn) + ne)
    p_cav = rho[1, 2] if d > 2 else 0j
    return pn, ne, rho[1, 0], p_cav, tr, herm, minpop, exc


def propagate_full(rho0, t0, dt, n_steps, stride, amp, width, center, det_l,
                   g, delta, gam, gam_dt, keep_states):
    d = rho0.shape[0]
    n_trunc = d // 2 - 1
    ns = _n_snapshots(n_steps, stride)
    times = np.empty(ns)
    pn = np.empty((ns, n_trunc + 1))
    ne = np.empty(ns)
    p_drive = np.empty(ns, dtype=np.complex128)
    p_cav = np.empty(ns, dtype=np.complex128)
    trace = np.empty(ns, dtype=np.complex128)
    herm = np.empty(ns)
    minpop = np.empty(ns)
    exc = np.empty(ns)
    states = np.empty((ns if keep_states else 0, d, d), dtype=np.complex128)
    rho = rho0.astype(np.complex128, copy=True)
    w = min(d, _flush_and_extent(rho) + WINDOW_MARGIN)
    j = 0
    for k in range(n_steps + 1):
        if k % stride == 0 or k == n_steps:
            t = t0 + k * dt
            times[j] = t
            pn[j], ne[j], p_drive[j], p_cav[j], trace[j], herm[j], minpop[j], exc[j] = \
                _full_diagnostics(rho, n_trunc)
            if keep_states:
                states[j] = rho
            j += 1
        if k == n_steps:
            break
        t = t0 + k * dt
        c1, gc1, g1 = _stage_coefficients(t, amp, width, center, det_l, g, delta, gam, gam_dt)
        c2, gc2, g2 = _stage_coefficients(t + 0.5 * dt, amp, width, center, det_l, g, delta, gam, gam_dt)
        c4, gc4, g4 = _stage_coefficients(t + dt, amp, width, center, det_l, g, delta, gam, gam_dt)
        s1 = subdiagonal(n_trunc, c1, gc1)[:w - 1]
        s2 = subdiagonal(n_trunc, c2, gc2)[:w - 1]
        s4 = subdiagonal(n_trunc, c4, gc4)[:w - 1]
        r = rho[:w, :w]
        k1 = full_rhs(r, n_trunc, c1, gc1, g1, s1)
        k2 = full_rhs(r + (0.5 * dt) * k1, n_trunc, c2, gc2, g2, s2)
        k3 = full_rhs(r + (0.5 * dt) * k2, n_trunc, c2, gc2, g2, s2)
        k4 = full_rhs(r + dt * k3, n_trunc, c4, gc4, g4, s4)
        rho[:w, :w] = r + (dt / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4)
        w = min(d, _flush_and_extent(rho) + WINDOW_MARGIN)
    return times, pn, ne, p_drive, p_cav, trace, herm, minpop, exc, states


def closure_rhs(s, n_trunc, c, gc, gam):
    m = n_trunc + 1
    pe, pg, x, y = s[:m], s[m:2 * m], s[2 * m:3 * m], s[3 * m:]
    sq = np.sqrt(np.arange(m, dtype=float))
    out = np.zeros_like(s)
    a = c * np.conj(y)
    a[:-1] += gc * sq[1:] * np.conj(x[1:])
    out[:m] = 2.0 * a.imag
    b = np.conj(c) * y
    b[1:] += np.conj(gc) * sq[1:] * x[1:]
    out[m:2 * m] = 2.0 * b.imag
    out[2 * m + 1:3 * m] = 1j * gc * sq[1:] * (pe[:-1] - pg[1:]) - gam * x[1:]
    out[3 * m:] = 1j * c * (pe - pg) - gam * y
    return out


def _closure_diagnostics(s, n_trunc):
    m = n_trunc + 1
    pe, pg = s[:m].real, s[m:2 * m].real
    pn = pe + pg
    ne = float(np.sum(pe))
    tr = complex(np.sum(s[:2 * m]))
    minpop = float(min(pe.min(), pg.min()))
    exc = float(np.sum(np.arange(m) * pn) + ne)
    p_cav = s[2 * m + 1] if m > 1 else 0j
    return pn, ne, s[3 * m], p_cav, tr, 0.0, minpop, exc


def propagate_closure(s0, t0, dt, n_steps, stride, amp, width, center, det_l,
                      g, delta, gam, gam_dt, keep_states):
    m = s0.shape[0] // 4
    n_trunc = m - 1
    ns = _n_snapshots(n_steps, stride)
    times = np.empty(ns)
    pn = np.empty((ns, m))
    ne = np.empty(ns)
    p_drive = np.empty(ns, dtype=np.complex128)
    p_cav = np.empty(ns, dtype=np.complex128)
    trace = np.empty(ns, dtype=np.complex128)
    herm = np.empty(ns)
    minpop = np.empty(ns)
    exc = np.empty(ns)
    states = np.empty((ns if keep_states else 0, 4 * m), dtype=np.complex128)
    s = s0.astype(np.complex128, copy=True)
    j = 0
    for k in range(n_steps + 1):
        if k % stride == 0 or k == n_steps:
            times[j] = t0 + k * dt
            pn[j], ne[j], p_drive[j], p_cav[j], trace[j], herm[j], minpop[j], exc[j] = \
                _closure_diagnostics(s, n_trunc)
            if keep_states:
                states[j] = s
            j += 1
        if k == n_steps:
            break
        t = t0 + k * dt
        c1, gc1, g1 = _stage_coefficients(t, amp, width, center, det_l, g, delta, gam, gam_dt)
        c2, gc2, g2 = _stage_coefficients(t + 0.5 * dt, amp, width, center, det_l, g, delta, gam, gam_dt)
        c4, gc4, g4 = _stage_coefficients(t + dt, amp, width, center, det_l, g, delta, gam, gam_dt)
        k1 = closure_rhs(s, n_trunc, c1, gc1, g1)
        k2 = closure_rhs(s + (0.5 * dt) * k1, n_trunc, c2, gc2, g2)
        k3 = closure_rhs(s + (0.5 * dt) * k2, n_trunc, c2, gc2, g2)
        k4 = closure_rhs(s + dt * k3, n_trunc, c4, gc4, g4)
        s = s + (dt / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4)
    return times, pn, ne, p_drive, p_cav, trace, herm, minpop, exc, states


def _exciton_rhs(p, ne, a, gam):
    return 1j * a * (2.0 * ne - 1.0) - gam * p, -2.0 * (np.conj(a) * p).imag


def propagate_exciton(p0, n0, t0, dt, n_steps, stride, amp, width, center, det_l, gam, gam_dt):
    ns = _n_snapshots(n_steps, stride)
    times = np.empty(ns)
    pol = np.empty(ns, dtype=np.complex128)
    pop = np.empty(ns)
    p, ne = complex(p0), float(n0)
    j = 0
    for k in range(n_steps + 1):
        if k % stride == 0 or k == n_steps:
            times[j] = t0 + k * dt
            pol[j] = p
            pop[j] = ne
            j += 1
        if k == n_steps:
            break
        t = t0 + k * dt
        a1 = drive_value(amp, width, center, det_l, t)
        a2 = drive_value(amp, width, center, det_l, t + 0.5 * dt)
        a4 = drive_value(amp, width, center, det_l, t + dt)
        g1 = gamma_interp(gam, gam_dt, t)
        g2 = gamma_interp(gam, gam_dt, t + 0.5 * dt)
        g4 = gamma_interp(gam, gam_dt, t + dt)
        kp1, kn1 = _exciton_rhs(p, ne, a1, g1)
        kp2, kn2 = _exciton_rhs(p + 0.5 * dt * kp1, ne + 0.5 * dt * kn1, a2, g2)
        kp3, kn3 = _exciton_rhs(p + 0.5 * dt * kp2, ne + 0.5 * dt * kn2, a2, g2)
        kp4, kn4 = _exciton_rhs(p + dt * kp3, ne + dt * kn3, a4, g4)
        p = p + dt / 6.0 * (kp1 + 2.0 * kp2 + 2.0 * kp3 + kp4)
        ne = ne + dt / 6.0 * (kn1 + 2.0 * kn2 + 2.0 * kn3 + kn4)
    return times, pol, pop
