"""Unit conversions used at the API boundary.

Internally every spectral quantity is an angular-frequency detuning in rad/s
and every power or loss is linear. Wavelength widths (pm, nm), powers (dBm)
and losses (dB) are converted once, here.
"""

import math

import numpy as np

SPEED_OF_LIGHT = 299_792_458.0  # m/s


def pm_to_rad_s(delta_lambda_pm, center_nm):
    """Convert a wavelength width in pm at ``center_nm`` to angular frequency.

    Uses ``Δν = c Δλ / λ0²``; 50 pm at 1536.5 nm is about 6.35 GHz.
    """
    lam0 = center_nm * 1e-9
    return 2.0 * math.pi * SPEED_OF_LIGHT * (np.asarray(delta_lambda_pm) * 1e-12) / lam0**2


def rad_s_to_pm(delta_omega, center_nm):
    """Inverse of :func:`pm_to_rad_s`."""
    lam0 = center_nm * 1e-9
    return np.asarray(delta_omega) * lam0**2 / (2.0 * math.pi * SPEED_OF_LIGHT) * 1e12


def pm_to_hz(delta_lambda_pm, center_nm):
    return pm_to_rad_s(delta_lambda_pm, center_nm) / (2.0 * math.pi)


def wavelength_nm_to_omega(wavelength_nm):
    """Absolute angular frequency of light at ``wavelength_nm``."""
    return 2.0 * math.pi * SPEED_OF_LIGHT / (np.asarray(wavelength_nm) * 1e-9)


def omega_to_wavelength_nm(omega):
    return 2.0 * math.pi * SPEED_OF_LIGHT / np.asarray(omega) * 1e9


def detuning_pm_to_rad_s(detuning_pm, center_nm):
    """Map a wavelength detuning (pm, positive = redder) to an angular detuning.

    Linearized about ``center_nm``; longer wavelength means lower frequency,
    hence the sign flip.
    """
    return -pm_to_rad_s(detuning_pm, center_nm)


def dbm_to_mw(p_dbm):
    return 10.0 ** (np.asarray(p_dbm, dtype=float) / 10.0)


def mw_to_dbm(p_mw):
    return 10.0 * np.log10(np.asarray(p_mw, dtype=float))


def db_to_linear(loss_db):
    """Transmission factor for a loss given in dB (positive = attenuation)."""
    return 10.0 ** (-np.asarray(loss_db, dtype=float) / 10.0)


def linear_to_db(transmission):
    return -10.0 * np.log10(np.asarray(transmission, dtype=float))
