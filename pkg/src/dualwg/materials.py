"""Material database: background indices, free-carrier (Drude) corrections,
and the effective-medium model of the superlattice active region.

Background indices are tabulated in ``data/nk_materials.csv`` (wavenumber in
cm^-1 vs real index, undoped).  Doping adds a Drude term to the permittivity,

    eps(w) = eps_bg - wp^2 / (w^2 + i*gamma*w),   wp^2 = N e^2 / (eps0 m*),

with the loss convention Im(n) = kappa >= 0 for exp(+i beta z) propagation.
"""

from __future__ import annotations

import csv
from dataclasses import dataclass
from importlib import resources

import numpy as np

from .constants import EPS0, M_E, Q_E, omega_from_wavenumber

MATERIALS = ("InP", "InGaAs", "AlInAs", "ActiveRegion", "Gold", "Air", "Al2O3")

# Drude parameters: effective mass (units of m_e) and damping rate [1/s].
# Semiconductor masses are documented defaults, not fitted values.
DEFAULT_EFFECTIVE_MASS = {
    "InP": 0.077,
    "InGaAs": 0.041,
    "AlInAs": 0.075,
    "ActiveRegion": 0.050,
    "Gold": 1.0,
    "Al2O3": 1.0,
    "Air": 1.0,
}
DEFAULT_DAMPING_RATE = {mat: 1e13 for mat in MATERIALS}
DEFAULT_DAMPING_RATE["Gold"] = 1.05e14

# The gold contact is kept as an inert eps = 1 cap: the guided modes of
# interest do not reach it and a metallic boundary layer is not modeled.
INTRINSIC_CARRIERS_CM3 = {}


class MaterialError(ValueError):
    """Unknown material or wavenumber outside the tabulated range."""


@dataclass(frozen=True)
class OpticalConstant:
    """Optical model of one material: tabulated background index plus Drude
    parameters for free-carrier corrections."""

    name: str
    wavenumbers: np.ndarray        # cm^-1, ascending
    background_index: np.ndarray   # real index at zero doping
    effective_mass: float          # units of m_e
    damping_rate: float            # 1/s

    def __post_init__(self):
        if self.effective_mass <= 0:
            raise MaterialError(f"{self.name}: effective mass must be > 0")
        if np.any(np.diff(self.wavenumbers) <= 0):
            raise MaterialError(f"{self.name}: wavenumber table not ascending")
        if np.any(self.background_index < 1.0):
            raise MaterialError(f"{self.name}: background index below 1")

    def n_background(self, nu_cm):
        nu = np.asarray(nu_cm, dtype=float)
        lo, hi = self.wavenumbers[0], self.wavenumbers[-1]
        if np.any(nu < lo) or np.any(nu > hi):
            raise MaterialError(
                f"{self.name}: wavenumber {nu_cm} outside tabulated range "
                f"[{lo}, {hi}] cm^-1"
            )
        return np.interp(nu, self.wavenumbers, self.background_index)


def _load_table(path=None) -> dict[str, OpticalConstant]:
    if path is None:
        src = resources.files("dualwg.data").joinpath("nk_materials.csv")
        text = src.read_text()
    else:
        with open(path) as f:
            text = f.read()
    rows = [r for r in text.splitlines() if r and not r.startswith("#")]
    reader = csv.DictReader(rows)
    data: dict[str, list[tuple[float, float]]] = {}
    for rec in reader:
        data.setdefault(rec["material"], []).append(
            (float(rec["wavenumber_cm1"]), float(rec["n"]))
        )
    out = {}
    for mat, pts in data.items():
        pts.sort()
        nu = np.array([p[0] for p in pts])
        n = np.array([p[1] for p in pts])
        out[mat] = OpticalConstant(
            name=mat,
            wavenumbers=nu,
            background_index=n,
            effective_mass=DEFAULT_EFFECTIVE_MASS.get(mat, 1.0),
            damping_rate=DEFAULT_DAMPING_RATE.get(mat, 1e13),
        )
    return out


class MaterialDB:
    """Lookup of complex refractive index / permittivity per material.

    The active region is registered separately (see
    :meth:`register_active_region`) because its permittivity comes from an
    effective-medium average over the superlattice period.
    """

    def __init__(self, table_path=None, damping_overrides=None, mass_overrides=None):
        self._table = _load_table(table_path)
        if damping_overrides or mass_overrides:
            for mat, oc in list(self._table.items()):
                g = (damping_overrides or {}).get(mat, oc.damping_rate)
                m = (mass_overrides or {}).get(mat, oc.effective_mass)
                self._table[mat] = OpticalConstant(
                    oc.name, oc.wavenumbers, oc.background_index, m, g
                )
        self._active_period = None

    def optical_constant(self, material: str) -> OpticalConstant:
        if material not in self._table:
            raise MaterialError(f"unknown material {material!r}")
        return self._table[material]

    def register_active_region(self, period) -> None:
        """Attach a superlattice period; 'ActiveRegion' then resolves through
        the TM effective-medium rule over the period's constituents."""
        self._active_period = period

    def permittivity(self, material: str, nu_cm: float, doping_cm3: float = 0.0) -> complex:
        """Complex relative permittivity at wavenumber nu_cm [cm^-1]."""
        if doping_cm3 < 0:
            raise MaterialError("doping must be >= 0")
        if material == "ActiveRegion" and self._active_period is not None:
            eps = self.effective_medium_permittivity(self._active_period, nu_cm)
            if doping_cm3 > 0:
                oc = self._drude_constant("ActiveRegion")
                eps += self._drude_term(oc, nu_cm, doping_cm3)
            return eps
        oc = self.optical_constant(material)
        n_bg = float(oc.n_background(nu_cm))
        eps = complex(n_bg * n_bg)
        n_total = doping_cm3 + INTRINSIC_CARRIERS_CM3.get(material, 0.0)
        if n_total > 0:
            eps += self._drude_term(oc, nu_cm, n_total)
        return eps

    def refractive_index(self, material: str, nu_cm: float, doping_cm3: float = 0.0) -> complex:
        """Complex index n + i*kappa with kappa >= 0."""
        eps = self.permittivity(material, nu_cm, doping_cm3)
        n = np.sqrt(complex(eps))
        if n.imag < 0:
            n = -n
        return complex(n)

    def effective_medium_permittivity(self, period, nu_cm: float) -> complex:
        """TM (growth-axis field) effective medium: 1/eps = sum f_i / eps_i.

        Wells are InGaAs, barriers AlInAs; the period's sheet doping is
        spread uniformly over the period thickness.
        """
        thick = np.array([t for _, t in period.sublayers], dtype=float)
        total = thick.sum()
        f_barrier = thick[::2].sum() / total
        f_well = thick[1::2].sum() / total
        n_volume = period.sheet_doping / (total * 1e-8)  # cm^-2 / cm -> cm^-3
        eps_w = self.permittivity("InGaAs", nu_cm, 0.0)
        eps_b = self.permittivity("AlInAs", nu_cm, 0.0)
        inv = f_well / eps_w + f_barrier / eps_b
        eps = 1.0 / inv
        if n_volume > 0:
            oc = self._drude_constant("ActiveRegion")
            eps += self._drude_term(oc, nu_cm, n_volume)
        return eps

    def _drude_constant(self, material):
        return OpticalConstant(
            name=material,
            wavenumbers=np.array([0.0, 1e9]),
            background_index=np.array([1.0, 1.0]),
            effective_mass=DEFAULT_EFFECTIVE_MASS.get(material, 1.0),
            damping_rate=DEFAULT_DAMPING_RATE.get(material, 1e13),
        )

    @staticmethod
    def _drude_term(oc: OpticalConstant, nu_cm: float, n_cm3: float) -> complex:
        w = omega_from_wavenumber(nu_cm)
        n_m3 = n_cm3 * 1e6
        wp2 = n_m3 * Q_E**2 / (EPS0 * oc.effective_mass * M_E)
        # minus-sign convention so that Im(eps) >= 0 (absorbing)
        return -wp2 / (w * w + 1j * oc.damping_rate * w)


_default_db = None


def default_db() -> MaterialDB:
    """Shared database with the shipped index table, default Drude values and
    the reference superlattice period registered as the active region."""
    global _default_db
    if _default_db is None:
        _default_db = MaterialDB()
        from .stacks import EV3032  # deferred: stacks imports this module
        _default_db.register_active_region(EV3032)
    return _default_db


def refractive_index(material: str, nu_cm: float, doping_cm3: float = 0.0) -> complex:
    """Module-level convenience wrapper over :func:`default_db`."""
    return default_db().refractive_index(material, nu_cm, doping_cm3)


def effective_medium_index(period, nu_cm: float, db: MaterialDB | None = None) -> complex:
    """Complex index of the superlattice active region via the TM rule."""
    db = db or default_db()
    eps = db.effective_medium_permittivity(period, nu_cm)
    n = np.sqrt(complex(eps))
    return complex(n if n.imag >= 0 else -n)
