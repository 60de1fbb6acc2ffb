"""Physical constants (SI) and unit conversions used across the package."""

import numpy as np

C_M_S = 2.99792458e8          # speed of light [m/s]
C_CM_S = 2.99792458e10        # speed of light [cm/s]
Q_E = 1.602176634e-19         # elementary charge [C]
EPS0 = 8.8541878128e-12       # vacuum permittivity [F/m]
M_E = 9.1093837015e-31        # electron mass [kg]


def omega_from_wavenumber(nu_cm: float) -> float:
    """Angular frequency [rad/s] from wavenumber [cm^-1]."""
    return 2.0 * np.pi * C_CM_S * nu_cm


def k0_um(nu_cm: float) -> float:
    """Vacuum wavevector [rad/um] from wavenumber [cm^-1]."""
    return 2.0 * np.pi * nu_cm * 1e-4


def wavelength_um(nu_cm: float) -> float:
    """Vacuum wavelength [um] from wavenumber [cm^-1]."""
    return 1e4 / nu_cm


def ghz_to_wavenumber(f_ghz: float) -> float:
    """Frequency [GHz] to wavenumber [cm^-1] (f/c)."""
    return f_ghz * 1e9 / C_CM_S
