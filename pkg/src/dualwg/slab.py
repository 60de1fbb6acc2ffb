"""Analytic TM multilayer slab solver (transfer-matrix dispersion relation).

Serves as the 1D oracle for the 2D finite-difference solver.  The first and
last entries of the layer list are treated as semi-infinite claddings.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from numpy.lib import scimath
from scipy.optimize import brentq

from .constants import k0_um


@dataclass(frozen=True)
class SlabSolution:
    n_eff: float
    mode_order: int
    residual: float
    y_um: np.ndarray | None = None
    field: np.ndarray | None = None  # H_x profile (TM)


def _tm_mismatch(n_eff, eps, thick, k0):
    """Boundary-condition mismatch of the TM transfer matrix at the top
    cladding; zero at a guided mode."""
    beta2 = (k0 * n_eff) ** 2
    g_b = scimath.sqrt(beta2 - k0 * k0 * eps[0])
    g_t = scimath.sqrt(beta2 - k0 * k0 * eps[-1])
    # state (H, H'/eps); decaying solution in the bottom cladding
    h, phi = 1.0 + 0.0j, g_b / eps[0]
    for e, t in zip(eps[1:-1], thick[1:-1]):
        kappa = scimath.sqrt(k0 * k0 * e - beta2)
        kt = kappa * t
        c, s = np.cos(kt), np.sin(kt)
        if abs(kappa) < 1e-12:
            h, phi = h + e * phi * t, phi
            continue
        h_new = h * c + (e / kappa) * phi * s
        phi_new = -(kappa / e) * h * s + phi * c
        h, phi = h_new, phi_new
    # decay in the top cladding requires phi = -g_t h / eps_t
    return (phi + g_t * h / eps[-1]).real


def solve_slab(layers, nu_cm: float, n_points: int = 4000,
               with_fields: bool = False) -> list[SlabSolution]:
    """All guided TM modes of a 1D stack, sorted by descending n_eff.

    ``layers`` is a sequence of (refractive_index, thickness_um); the first
    and last thicknesses are ignored (semi-infinite claddings).  Returns an
    empty list when nothing is guided.
    """
    if len(layers) < 3:
        raise ValueError("need at least cladding / core / cladding")
    n_arr = np.array([float(np.real(n)) for n, _ in layers])
    thick = np.array([t for _, t in layers], dtype=float)
    eps = n_arr**2
    k0 = k0_um(nu_cm)
    n_clad = max(n_arr[0], n_arr[-1])
    n_core = n_arr[1:-1].max() if len(n_arr) > 2 else n_clad
    if n_core <= n_clad + 1e-12:
        return []

    lo, hi = n_clad + 1e-9, n_core - 1e-9
    grid = np.linspace(lo, hi, n_points)
    vals = np.array([_tm_mismatch(n, eps, thick, k0) for n in grid])
    roots = []
    for i in range(len(grid) - 1):
        a, b = vals[i], vals[i + 1]
        if np.isfinite(a) and np.isfinite(b) and a * b < 0:
            r = brentq(_tm_mismatch, grid[i], grid[i + 1],
                       args=(eps, thick, k0), xtol=1e-14, rtol=8.9e-16)
            roots.append(r)
    roots.sort(reverse=True)
    out = []
    for order, r in enumerate(roots):
        res = abs(_tm_mismatch(r, eps, thick, k0))
        y, f = (None, None)
        if with_fields:
            y, f = _field_profile(r, eps, thick, k0)
        out.append(SlabSolution(n_eff=r, mode_order=order, residual=res,
                                y_um=y, field=f))
    return out


def _field_profile(n_eff, eps, thick, k0, pad_um=6.0, dy=0.01):
    beta2 = (k0 * n_eff) ** 2
    g_b = scimath.sqrt(beta2 - k0 * k0 * eps[0])
    edges = np.concatenate([[0.0], np.cumsum(thick[1:-1])])
    total = edges[-1]
    y = np.arange(-pad_um, total + pad_um, dy)
    h = np.empty_like(y, dtype=complex)
    # state at each interface
    states = [(1.0 + 0.0j, g_b / eps[0])]
    for e, t in zip(eps[1:-1], thick[1:-1]):
        kappa = scimath.sqrt(k0 * k0 * e - beta2)
        h0, p0 = states[-1]
        kt = kappa * t
        c, s = np.cos(kt), np.sin(kt)
        states.append((h0 * c + (e / kappa) * p0 * s,
                       -(kappa / e) * h0 * s + p0 * c))
    g_t = scimath.sqrt(beta2 - k0 * k0 * eps[-1])
    for m, yy in enumerate(y):
        if yy < 0:
            h[m] = states[0][0] * np.exp(g_b * yy)
        elif yy >= total:
            h[m] = states[-1][0] * np.exp(-g_t * (yy - total))
        else:
            k = np.searchsorted(edges, yy, side="right") - 1
            e = eps[1 + k]
            kappa = scimath.sqrt(k0 * k0 * e - beta2)
            h0, p0 = states[k]
            d = yy - edges[k]
            h[m] = h0 * np.cos(kappa * d) + (e / kappa) * p0 * np.sin(kappa * d)
    f = h.real
    f /= np.sqrt(np.sum(f * f) * dy)
    return y, f


def slab_from_cross_section(cs, nu_cm, db=None, lateral=False):
    """Vertical (or, with ``lateral=True``, horizontal) 1D index profile of a
    cross-section for the slab oracle, using each layer's real index."""
    from .materials import default_db
    db = db or default_db()
    layers = []
    for layer in cs.stack:
        n = db.refractive_index(layer.material, nu_cm, layer.doping_cm3).real
        layers.append((n, layer.thickness_um))
    return layers
