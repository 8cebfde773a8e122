"""Numba-compiled hot kernels.

Loop-level twins of :mod:`qdphonon._kernels_numpy`; results agree with the
numpy path up to floating-point summation order.
"""

import math

import numpy as np
from numba import njit

_SQRT_2PI = math.sqrt(2.0 * math.pi)
_SNAP = 1e-9


@njit(cache=True)
def gamma_interp(gam, gam_dt, t):
    x = t / gam_dt
    r = math.floor(x + 0.5)
    n = gam.shape[0]
    if abs(x - r) <= _SNAP:
        i = int(r)
        if i < 0:
            i = 0
        if i > n - 1:
            i = n - 1
        return gam[i]
    i = int(math.floor(x))
    if i < 0:
        return gam[0]
    if i >= n - 1:
        return gam[n - 1]
    fr = x - i
    return gam[i] * (1.0 - fr) + gam[i + 1] * fr


@njit(cache=True)
def drive_value(amp, width, center, det_l, t):
    u = (t - center) / width
    return amp * math.exp(-u * u) / (_SQRT_2PI * width) * complex(math.cos(det_l * t), math.sin(det_l * t))


@njit(cache=True)
def tabulate_kernel(omega, wre, wim, wk, wg, dt, n_points, reseed):
    n_panels, n_nodes = omega.shape
    zr = np.empty((n_panels, n_nodes))
    zi = np.empty((n_panels, n_nodes))
    rr = np.cos(omega * dt)
    ri = -np.sin(omega * dt)
    kern = np.empty(n_points, dtype=np.complex128)
    err = np.empty(n_points)
    for k in range(n_points):
        if k % reseed == 0:
            t = k * dt
            for p in range(n_panels):
                for q in range(n_nodes):
                    zr[p, q] = math.cos(omega[p, q] * t)
                    zi[p, q] = -math.sin(omega[p, q] * t)
        else:
            for p in range(n_panels):
                for q in range(n_nodes):
                    a = zr[p, q]
                    b = zi[p, q]
                    zr[p, q] = a * rr[p, q] - b * ri[p, q]
                    zi[p, q] = a * ri[p, q] + b * rr[p, q]
        tot_re = 0.0
        tot_im = 0.0
        e = 0.0
        for p in range(n_panels):
            kre = 0.0
            kim = 0.0
            gre = 0.0
            gim = 0.0
            for q in range(n_nodes):
                vre = wre[p, q] * zr[p, q]
                vim = wim[p, q] * zi[p, q]
                kre += wk[p, q] * vre
                kim += wk[p, q] * vim
                gre += wg[p, q] * vre
                gim += wg[p, q] * vim
            tot_re += kre
            tot_im += kim
            e += math.hypot(kre - gre, kim - gim)
        kern[k] = complex(tot_re, tot_im)
        err[k] = e
    return kern, err


#: entries below this magnitude are set to zero after every step (keeps the
#: far Fock tail out of the denormal range and bounds the active window)
FLUSH = 1e-250
#: basis-index margin kept beyond the last nonzero row (RK4 spreads <= 4 per step)
WINDOW_MARGIN = 8


@njit(cache=True)
def _fill_subdiagonal(sub, subc, n_trunc, c, gc):
    # sub[k] = H[k+1, k]; trailing entries stay zero and act as the halo
    gcc = gc.conjugate()
    for n in range(n_trunc + 1):
        sub[2 * n] = c
        subc[2 * n] = c.conjugate()
        if n < n_trunc:
            sub[2 * n + 1] = gcc * math.sqrt(n + 1.0)
            subc[2 * n + 1] = gc * math.sqrt(n + 1.0)


@njit(cache=True)
def _full_rhs_lower(R, out, sub, subc, dco, w):
    """Lower triangle (l <= k < w) of -i[H, R] + dephasing.

    R carries a zero halo at index D, reached through index -1 and w <= D;
    only the superdiagonal of its upper triangle is read.
    """
    for k in range(w):
        a = sub[k - 1]
        b = subc[k]
        par = k & 1
        for l in range(k + 1):
            hr = a * R[k - 1, l] + b * R[k + 1, l]
            rh = R[k, l - 1] * subc[l - 1] + R[k, l + 1] * sub[l]
            out[k, l] = -1j * (hr - rh) + dco[par, l] * R[k, l]


@njit(cache=True)
def _mirror_superdiagonal(R, w):
    for k in range(w - 1):
        R[k, k + 1] = R[k + 1, k].conjugate()
    R[w - 1, w] = 0j


@njit(cache=True)
def _mirror_full(R, d):
    for k in range(d):
        for l in range(k):
            R[l, k] = R[k, l].conjugate()


@njit(cache=True)
def _flush_and_extent(R, w):
    hi = 0
    for k in range(w):
        nz = False
        for l in range(k + 1):
            v = R[k, l]
            re = v.real
            im = v.imag
            if abs(re) < FLUSH:
                re = 0.0
            if abs(im) < FLUSH:
                im = 0.0
            if re != 0.0 or im != 0.0:
                nz = True
            R[k, l] = complex(re, im)
        if nz:
            hi = k + 1
    return hi


@njit(cache=True)
def _full_diag(rho, n_trunc, pn_row):
    d = 2 * (n_trunc + 1)
    ne = 0.0
    tr = 0j
    minpop = np.inf
    exc = 0.0
    for n in range(n_trunc + 1):
        g = rho[2 * n, 2 * n]
        e = rho[2 * n + 1, 2 * n + 1]
        pn_row[n] = g.real + e.real
        ne += e.real
        tr += g + e
        exc += n * (g.real + e.real) + e.real
        if g.real < minpop:
            minpop = g.real
        if e.real < minpop:
            minpop = e.real
    herm = 0.0
    for k in range(d):
        for l in range(k, d):
            h = abs(rho[k, l] - rho[l, k].conjugate())
            if h > herm:
                herm = h
    p_cav = rho[1, 2] if d > 2 else 0j
    return ne, rho[1, 0], p_cav, tr, herm, minpop, exc


@njit(cache=True)
def propagate_full(rho0, t0, dt, n_steps, stride, amp, width, center, det_l,
                   g, delta, gam, gam_dt, keep_states):
    d = rho0.shape[0]
    n_trunc = d // 2 - 1
    ns = n_steps // stride + 1
    if n_steps % stride:
        ns += 1
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
    # working arrays carry one zero halo row/column at index d
    rho = np.zeros((d + 1, d + 1), dtype=np.complex128)
    for a in range(d):
        for b in range(d):
            rho[a, b] = rho0[a, b]
    tmp = np.zeros_like(rho)
    k1 = np.zeros_like(rho)
    k2 = np.zeros_like(rho)
    k3 = np.zeros_like(rho)
    k4 = np.zeros_like(rho)
    sub = np.zeros(d + 1, dtype=np.complex128)
    subc = np.zeros(d + 1, dtype=np.complex128)
    dco = np.zeros((2, d + 1), dtype=np.complex128)
    h2 = 0.5 * dt
    w6 = dt / 6.0
    hi = _flush_and_extent(rho, d)
    w = min(d, hi + WINDOW_MARGIN)
    _mirror_superdiagonal(rho, w)
    j = 0
    for k in range(n_steps + 1):
        if k % stride == 0 or k == n_steps:
            _mirror_full(rho, d)
            times[j] = t0 + k * dt
            ne[j], p_drive[j], p_cav[j], trace[j], herm[j], minpop[j], exc[j] = _full_diag(rho, n_trunc, pn[j])
            if keep_states:
                for a in range(d):
                    for b in range(d):
                        states[j, a, b] = rho[a, b]
            j += 1
        if k == n_steps:
            break
        t = t0 + k * dt
        for stage in range(4):
            if stage == 0:
                ts = t
            elif stage == 3:
                ts = t + dt
            else:
                ts = t + h2
            if stage != 2:
                c = drive_value(amp, width, center, det_l, ts)
                gc = g * complex(math.cos(delta * ts), math.sin(delta * ts))
                gm = gamma_interp(gam, gam_dt, ts)
                _fill_subdiagonal(sub, subc, n_trunc, c, gc)
                for l in range(0, d, 2):
                    dco[1, l] = -gm
                    dco[0, l + 1] = -gm.conjugate()
            if stage == 0:
                _full_rhs_lower(rho, k1, sub, subc, dco, w)
                for a in range(w):
                    for b in range(a + 1):
                        tmp[a, b] = rho[a, b] + h2 * k1[a, b]
            elif stage == 1:
                _full_rhs_lower(tmp, k2, sub, subc, dco, w)
                for a in range(w):
                    for b in range(a + 1):
                        tmp[a, b] = rho[a, b] + h2 * k2[a, b]
            elif stage == 2:
                _full_rhs_lower(tmp, k3, sub, subc, dco, w)
                for a in range(w):
                    for b in range(a + 1):
                        tmp[a, b] = rho[a, b] + dt * k3[a, b]
            else:
                _full_rhs_lower(tmp, k4, sub, subc, dco, w)
            if stage != 3:
                _mirror_superdiagonal(tmp, w)
        for a in range(w):
            for b in range(a + 1):
                rho[a, b] = rho[a, b] + w6 * (k1[a, b] + 2.0 * k2[a, b] + 2.0 * k3[a, b] + k4[a, b])
        hi = _flush_and_extent(rho, w)
        w_new = min(d, hi + WINDOW_MARGIN)
        if w_new < w:
            for a in range(w_new, w):
                for b in range(a + 1):
                    tmp[a, b] = 0j
        w = w_new
        _mirror_superdiagonal(rho, w)
    return times, pn, ne, p_drive, p_cav, trace, herm, minpop, exc, states


@njit(cache=True)
def _closure_rhs(s, out, n_trunc, c, gc, gam):
    m = n_trunc + 1
    cc = c.conjugate()
    gcc = gc.conjugate()
    for n in range(m):
        pe = s[n]
        pg = s[m + n]
        y = s[3 * m + n]
        a = c * y.conjugate()
        if n < n_trunc:
            a += gc * math.sqrt(n + 1.0) * s[2 * m + n + 1].conjugate()
        out[n] = 2.0 * a.imag
        b = cc * y
        if n >= 1:
            b += gcc * math.sqrt(float(n)) * s[2 * m + n]
        out[m + n] = 2.0 * b.imag
        if n >= 1:
            out[2 * m + n] = 1j * gc * math.sqrt(float(n)) * (s[n - 1] - pg) - gam * s[2 * m + n]
        else:
            out[2 * m] = 0j
        out[3 * m + n] = 1j * c * (pe - pg) - gam * y


@njit(cache=True)
def _closure_diag(s, n_trunc, pn_row):
    m = n_trunc + 1
    ne = 0.0
    tr = 0j
    minpop = np.inf
    exc = 0.0
    for n in range(m):
        pe = s[n].real
        pg = s[m + n].real
        pn_row[n] = pe + pg
        ne += pe
        tr += s[n] + s[m + n]
        exc += n * (pe + pg) + pe
        if pe < minpop:
            minpop = pe
        if pg < minpop:
            minpop = pg
    p_cav = s[2 * m + 1] if m > 1 else 0j
    return ne, s[3 * m], p_cav, tr, 0.0, minpop, exc


@njit(cache=True)
def propagate_closure(s0, t0, dt, n_steps, stride, amp, width, center, det_l,
                      g, delta, gam, gam_dt, keep_states):
    size = s0.shape[0]
    m = size // 4
    n_trunc = m - 1
    ns = n_steps // stride + 1
    if n_steps % stride:
        ns += 1
    times = np.empty(ns)
    pn = np.empty((ns, m))
    ne = np.empty(ns)
    p_drive = np.empty(ns, dtype=np.complex128)
    p_cav = np.empty(ns, dtype=np.complex128)
    trace = np.empty(ns, dtype=np.complex128)
    herm = np.empty(ns)
    minpop = np.empty(ns)
    exc = np.empty(ns)
    states = np.empty((ns if keep_states else 0, size), dtype=np.complex128)
    s = s0.astype(np.complex128)
    tmp = np.empty_like(s)
    k1 = np.empty_like(s)
    k2 = np.empty_like(s)
    k3 = np.empty_like(s)
    k4 = np.empty_like(s)
    h2 = 0.5 * dt
    w6 = dt / 6.0
    j = 0
    for k in range(n_steps + 1):
        if k % stride == 0 or k == n_steps:
            times[j] = t0 + k * dt
            ne[j], p_drive[j], p_cav[j], trace[j], herm[j], minpop[j], exc[j] = _closure_diag(s, n_trunc, pn[j])
            if keep_states:
                states[j] = s
            j += 1
        if k == n_steps:
            break
        t = t0 + k * dt
        c1 = drive_value(amp, width, center, det_l, t)
        c2 = drive_value(amp, width, center, det_l, t + h2)
        c4 = drive_value(amp, width, center, det_l, t + dt)
        gc1 = g * complex(math.cos(delta * t), math.sin(delta * t))
        gc2 = g * complex(math.cos(delta * (t + h2)), math.sin(delta * (t + h2)))
        gc4 = g * complex(math.cos(delta * (t + dt)), math.sin(delta * (t + dt)))
        g1 = gamma_interp(gam, gam_dt, t)
        g2 = gamma_interp(gam, gam_dt, t + h2)
        g4 = gamma_interp(gam, gam_dt, t + dt)
        _closure_rhs(s, k1, n_trunc, c1, gc1, g1)
        for a in range(size):
            tmp[a] = s[a] + h2 * k1[a]
        _closure_rhs(tmp, k2, n_trunc, c2, gc2, g2)
        for a in range(size):
            tmp[a] = s[a] + h2 * k2[a]
        _closure_rhs(tmp, k3, n_trunc, c2, gc2, g2)
        for a in range(size):
            tmp[a] = s[a] + dt * k3[a]
        _closure_rhs(tmp, k4, n_trunc, c4, gc4, g4)
        for a in range(size):
            s[a] = s[a] + w6 * (k1[a] + 2.0 * k2[a] + 2.0 * k3[a] + k4[a])
    return times, pn, ne, p_drive, p_cav, trace, herm, minpop, exc, states


@njit(cache=True)
def propagate_exciton(p0, n0, t0, dt, n_steps, stride, amp, width, center, det_l, gam, gam_dt):
    ns = n_steps // stride + 1
    if n_steps % stride:
        ns += 1
    times = np.empty(ns)
    pol = np.empty(ns, dtype=np.complex128)
    pop = np.empty(ns)
    p = complex(p0)
    ne = float(n0)
    h2 = 0.5 * dt
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
        a2 = drive_value(amp, width, center, det_l, t + h2)
        a4 = drive_value(amp, width, center, det_l, t + dt)
        g1 = gamma_interp(gam, gam_dt, t)
        g2 = gamma_interp(gam, gam_dt, t + h2)
        g4 = gamma_interp(gam, gam_dt, t + dt)
        kp1 = 1j * a1 * (2.0 * ne - 1.0) - g1 * p
        kn1 = -2.0 * (a1.conjugate() * p).imag
        pp = p + h2 * kp1
        nn = ne + h2 * kn1
        kp2 = 1j * a2 * (2.0 * nn - 1.0) - g2 * pp
        kn2 = -2.0 * (a2.conjugate() * pp).imag
        pp = p + h2 * kp2
        nn = ne + h2 * kn2
        kp3 = 1j * a2 * (2.0 * nn - 1.0) - g2 * pp
        kn3 = -2.0 * (a2.conjugate() * pp).imag
        pp = p + dt * kp3
        nn = ne + dt * kn3
        kp4 = 1j * a4 * (2.0 * nn - 1.0) - g4 * pp
        kn4 = -2.0 * (a4.conjugate() * pp).imag
        p = p + dt / 6.0 * (kp1 + 2.0 * kp2 + 2.0 * kp3 + kp4)
        ne = ne + dt / 6.0 * (kn1 + 2.0 * kn2 + 2.0 * kn3 + kn4)
    return times, pol, pop
