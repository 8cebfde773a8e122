"""Unit system: time in ps, angular frequency in rad/ps, hbar = 1.

Every eV <-> rad/ps conversion in the package goes through the constants
defined here.
"""

from scipy import constants as _c

#: hbar in eV ps
HBAR_EV_PS = _c.hbar / _c.e * 1e12
#: Boltzmann constant in eV/K
KB_EV_PER_K = _c.k / _c.e
#: hbar in J s
HBAR_SI = _c.hbar
#: elementary charge in C (J per eV)
EV_SI = _c.e

PS = 1e-12
NM = 1e-9


def ev_to_rad_per_ps(energy_ev):
    return energy_ev / HBAR_EV_PS


def rad_per_ps_to_ev(omega):
    return omega * HBAR_EV_PS


def thermal_frequency(temperature):
    """k_B T / hbar in rad/ps."""
    return KB_EV_PER_K * temperature / HBAR_EV_PS
