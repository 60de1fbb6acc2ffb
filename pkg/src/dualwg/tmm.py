"""Facet power reflectivity at normal incidence, bare or with thin-film
coatings (2x2 characteristic-matrix method)."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .constants import k0_um


@dataclass(frozen=True)
class CoatingStack:
    """Films between the facet medium and air, facet side first."""

    films: tuple = ()   # ((index, thickness_um), ...)

    def __post_init__(self):
        for n, t in self.films:
            if np.real(n) < 1.0:
                raise ValueError(f"film index {n} below 1")
            if t <= 0:
                raise ValueError(f"film thickness {t} must be > 0")


def facet_reflectivity(n_facet: float, coating: CoatingStack | None,
                       nu_cm: float, n_out: float = 1.0) -> float:
    """Power reflectivity seen from inside the facet medium.

    With no coating this reduces to the Fresnel form ((n-1)/(n+1))^2.
    """
    if n_facet <= 0:
        raise ValueError("facet index must be > 0")
    films = coating.films if coating is not None else ()
    k0 = k0_um(nu_cm)
    # characteristic matrix of the film stack
    m = np.eye(2, dtype=complex)
    for n_f, t in films:
        delta = k0 * n_f * t
        c, s = np.cos(delta), np.sin(delta)
        layer = np.array([[c, 1j * s / n_f], [1j * n_f * s, c]])
        m = m @ layer
    b, c = m @ np.array([1.0, n_out], dtype=complex)
    r = (n_facet * b - c) / (n_facet * b + c)
    return float(np.abs(r) ** 2)


def quarter_wave_coating(n_facet: float, nu_cm: float) -> CoatingStack:
    """Ideal single-layer antireflection coating for the given facet index."""
    n_f = float(np.sqrt(n_facet))
    t = 0.25 / (nu_cm * 1e-4 * n_f)  # quarter of the in-film wavelength, um
    return CoatingStack(((n_f, t),))
