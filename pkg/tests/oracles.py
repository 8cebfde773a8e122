"""Reference computations that share no code path with the package kernels."""

from __future__ import annotations

import math

import numpy as np
import warnings

from scipy.integrate import IntegrationWarning, quad

warnings.filterwarnings("ignore", category=IntegrationWarning)

KB_EV = 8.617333262e-5
HBAR_EV_PS = 6.582119569e-4


def theta(temperature):
    return KB_EV * temperature / HBAR_EV_PS


def riemann_kernel(prefactor, cutoff, temperature, t, panels=1_000_000):
    """Midpoint Riemann sum of K(t) over [0, 20 cutoff]."""
    upper = 20.0 * cutoff
    h = upper / panels
    w = (np.arange(panels) + 0.5) * h
    j = prefactor * w**3 * np.exp(-((w / cutoff) ** 2))
    coth = 1.0 / np.tanh(w / (2.0 * theta(temperature))) if temperature > 0 else 1.0
    return h * np.sum(j * coth * np.cos(w * t)) - 1j * h * np.sum(j * np.sin(w * t))


def _jcoth_over(prefactor, cutoff, temperature, power):
    """w -> j(w) coth(w / 2 theta) / w**power for power <= 1, smooth at w = 0."""
    th2 = 2.0 * theta(temperature)

    def f(w):
        if w == 0.0:
            # j coth / w ~ a w (2 theta) -> 0
            return 0.0
        x = w / th2
        c = 1.0 / math.tanh(x) if temperature > 0 else 1.0
        return prefactor * w ** (3 - power) * math.exp(-((w / cutoff) ** 2)) * c

    return f


def gamma_closed_form(prefactor, cutoff, temperature, t):
    """Gamma(t) = int dw j(w) [coth sin(wt) - i (1 - cos wt)] / w, by QAWO."""
    upper = 20.0 * cutoff
    f1 = _jcoth_over(prefactor, cutoff, temperature, 1)
    g = lambda w: prefactor * w**2 * math.exp(-((w / cutoff) ** 2))  # noqa: E731
    if t == 0:
        return 0j
    re = quad(f1, 0.0, upper, weight="sin", wvar=t, epsabs=1e-14, epsrel=1e-13, limit=2000)[0]
    im_cos = quad(g, 0.0, upper, weight="cos", wvar=t, epsabs=1e-14, epsrel=1e-13, limit=2000)[0]
    im_one = quad(g, 0.0, upper, epsabs=1e-15, epsrel=1e-14)[0]
    return complex(re, -(im_one - im_cos))


def decoherence_exponent(prefactor, cutoff, temperature, t):
    """int_0^t Gamma(s) ds = int dw j(w) [coth (1 - cos wt) - i (wt - sin wt)] / w^2."""
    upper = 20.0 * cutoff
    th2 = 2.0 * theta(temperature)

    def jc2(w):
        # j coth / w^2 = a w exp(-(w/wc)^2) coth(w / 2 theta), -> a * 2 theta at w = 0
        if w == 0.0:
            return prefactor * th2
        return prefactor * w * math.exp(-((w / cutoff) ** 2)) / math.tanh(w / th2)

    j2 = lambda w: prefactor * w * math.exp(-((w / cutoff) ** 2))  # noqa: E731
    re_one = quad(jc2, 0.0, upper, epsabs=1e-15, epsrel=1e-14, limit=500)[0]
    re_cos = quad(jc2, 0.0, upper, weight="cos", wvar=t, epsabs=1e-15, epsrel=1e-13, limit=2000)[0]
    im_lin = t * quad(lambda w: prefactor * w**2 * math.exp(-((w / cutoff) ** 2)), 0.0, upper,
                      epsabs=1e-15, epsrel=1e-14)[0]
    im_sin = quad(j2, 0.0, upper, weight="sin", wvar=t, epsabs=1e-15, epsrel=1e-13, limit=2000)[0]
    return complex(re_one - re_cos, -(im_lin - im_sin))
