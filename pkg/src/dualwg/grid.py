"""Discretization of a device cross-section onto a 2D permittivity map.

The grid is cell-centered: eps[i, j] is the permittivity of the cell with
center (x[j], y[i]).  y runs along the growth axis (bottom of the clipped
stack at y = 0), x is the lateral axis centered on the waveguides.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .constants import wavelength_um
from .materials import MATERIALS, MaterialDB, default_db
from .stacks import CrossSection

# Patterned layers: material -> cross-section width attribute
_PATTERNED = {"ActiveRegion": "ar_width_um", "InGaAs": "top_wg_width_um"}


class GridError(ValueError):
    pass


@dataclass(frozen=True)
class PermittivityGrid:
    """Complex relative permittivity map at a single wavenumber."""

    eps: np.ndarray           # (ny, nx) complex
    labels: np.ndarray        # (ny, nx) int, index into MATERIALS (cell-center material)
    x_um: np.ndarray          # (nx,) cell-center lateral coordinates
    y_um: np.ndarray          # (ny,) cell-center growth-axis coordinates
    dx_um: float
    dy_um: float
    nu_cm: float
    ar_rect: tuple            # (x0, x1, y0, y1) of the active region
    wg_rect: tuple            # (x0, x1, y0, y1) of the InGaAs waveguide

    @property
    def shape(self):
        return self.eps.shape

    @property
    def cell_area_um2(self) -> float:
        return self.dx_um * self.dy_um

    def material_mask(self, material: str) -> np.ndarray:
        return self.labels == MATERIALS.index(material)

    def rect_mask(self, rect) -> np.ndarray:
        x0, x1, y0, y1 = rect
        if (x0 < self.x_um[0] - self.dx_um or x1 > self.x_um[-1] + self.dx_um
                or y0 < self.y_um[0] - self.dy_um or y1 > self.y_um[-1] + self.dy_um):
            raise GridError(f"region {rect} outside grid window")
        mx = (self.x_um >= x0) & (self.x_um <= x1)
        my = (self.y_um >= y0) & (self.y_um <= y1)
        return np.outer(my, mx)

    def n_max(self) -> float:
        return float(np.sqrt(self.eps.real.max()))

    def n_min_clad(self) -> float:
        """Smallest dielectric index on the window boundary (metal excluded)."""
        border = np.concatenate([
            self.eps[0, :], self.eps[-1, :], self.eps[:, 0], self.eps[:, -1]])
        diel = border.real[border.real >= 1.0 - 1e-9]
        return float(np.sqrt(diel.min())) if diel.size else 1.0


def _segments(cs: CrossSection, pad_bottom_um: float):
    """Clipped vertical stack as (material, doping, y0, y1), bottom to top."""
    segs = []
    y = 0.0
    for k, layer in enumerate(cs.stack):
        t = layer.thickness_um
        if k == 0:
            t = min(t, pad_bottom_um)  # substrate truncated by the window
        segs.append((layer.material, layer.doping_cm3, y, y + t))
        y += t
    return segs, y


def build_permittivity_grid(
    cs: CrossSection,
    nu_cm: float,
    dx_um: float = 0.1,
    dy_um: float = 0.05,
    pad_x_um: float = 6.0,
    pad_y_um: float = 6.0,
    pad_top_um: float = 3.0,
    interface_averaging: bool = True,
    db: MaterialDB | None = None,
) -> PermittivityGrid:
    """Discretize the cross-section at one wavenumber.

    Interface cells straddling a boundary are averaged arithmetically in x and
    harmonically in y (TM convention); with ``interface_averaging=False``
    every cell takes the permittivity of the material at its center.
    """
    db = db or default_db()
    if pad_x_um < 2.0 or pad_y_um < 2.0:
        raise GridError("domain too small: padding below 2 um cannot contain "
                        "the guided-field decay")
    lam = wavelength_um(nu_cm)
    segs, stack_top = _segments(cs, pad_y_um)
    # the stack ends in the gold contact; nothing is guided above it, so the
    # air pad on top can be shorter than the cladding pads
    segs.append(("Air", 0.0, stack_top, stack_top + pad_top_um))
    y_top = stack_top + pad_top_um

    # resolution guard needs n_max; probe the constituent materials
    n_vals = [abs(db.refractive_index(m, nu_cm, 0.0).real)
              for m, _, _, _ in segs if m != "Gold"]
    n_max = max(n_vals)
    if max(dx_um, dy_um) > lam / (10.0 * n_max):
        raise GridError(
            f"resolution too coarse: need spacing <= {lam / (10 * n_max):.3f} um "
            f"at {nu_cm} cm^-1")

    half_w = max(cs.ar_width_um, cs.top_wg_width_um) / 2.0 + pad_x_um
    nx = int(round(2.0 * half_w / dx_um))
    ny = int(round(y_top / dy_um))
    x = (np.arange(nx) + 0.5) * dx_um - half_w
    y = (np.arange(ny) + 0.5) * dy_um

    eps_of = {}

    def mat_eps(material, doping):
        key = (material, doping)
        if key not in eps_of:
            eps_of[key] = db.permittivity(material, nu_cm, doping)
        return eps_of[key]

    clad = cs.lateral_cladding
    clad_dop = cs.lateral_cladding_doping_cm3

    def column_eps(material, doping, j):
        """Permittivity of one layer within column j (arithmetic x-average
        for patterned layers)."""
        if material not in _PATTERNED:
            return mat_eps(material, doping)
        w2 = getattr(cs, _PATTERNED[material]) / 2.0
        x0, x1 = x[j] - dx_um / 2.0, x[j] + dx_um / 2.0
        overlap = max(0.0, min(x1, w2) - max(x0, -w2))
        fx = overlap / dx_um
        if not interface_averaging:
            fx = 1.0 if abs(x[j]) < w2 else 0.0
        if fx >= 1.0:
            return mat_eps(material, doping)
        if fx <= 0.0:
            return mat_eps(clad, clad_dop)
        return fx * mat_eps(material, doping) + (1.0 - fx) * mat_eps(clad, clad_dop)

    def column_label(material, j):
        if material in _PATTERNED and abs(x[j]) >= getattr(cs, _PATTERNED[material]) / 2.0:
            return MATERIALS.index(clad)
        return MATERIALS.index(material)

    eps = np.empty((ny, nx), dtype=complex)
    labels = np.empty((ny, nx), dtype=np.int8)

    # fill the left half and mirror: the geometry is x-symmetric by
    # construction, and mirroring keeps eps(x, y) == eps(-x, y) exact
    half_cols = (nx + 1) // 2
    for j in range(half_cols):
        col_eps = np.empty(ny, dtype=complex)
        col_lab = np.empty(ny, dtype=np.int8)
        for i in range(ny):
            y0, y1 = y[i] - dy_um / 2.0, y[i] + dy_um / 2.0
            parts = []  # (fraction, eps)
            center_mat = None
            for material, doping, s0, s1 in segs:
                ov = max(0.0, min(y1, s1) - max(y0, s0))
                if ov > 1e-12:
                    parts.append((ov / dy_um, column_eps(material, doping, j)))
                if s0 <= y[i] < s1:
                    center_mat = material
            if center_mat is None:
                center_mat = segs[-1][0]
            if interface_averaging and len(parts) > 1:
                inv = sum(f / e for f, e in parts)
                col_eps[i] = 1.0 / inv  # harmonic mean along the growth axis
            elif interface_averaging:
                col_eps[i] = parts[0][1]
            else:
                dop = next(d for m, d, s0, s1 in segs
                           if m == center_mat and s0 <= y[i] < s1)
                col_eps[i] = column_eps(center_mat, dop, j)
            col_lab[i] = column_label(center_mat, j)
        eps[:, j] = col_eps
        labels[:, j] = col_lab
        eps[:, nx - 1 - j] = col_eps
        labels[:, nx - 1 - j] = col_lab

    ar_y = _layer_span(segs, "ActiveRegion")
    wg_y = _layer_span(segs, "InGaAs")
    ar_rect = (-cs.ar_width_um / 2, cs.ar_width_um / 2, ar_y[0], ar_y[1])
    wg_rect = (-cs.top_wg_width_um / 2, cs.top_wg_width_um / 2, wg_y[0], wg_y[1])
    return PermittivityGrid(eps=eps, labels=labels, x_um=x, y_um=y,
                            dx_um=dx_um, dy_um=dy_um, nu_cm=nu_cm,
                            ar_rect=ar_rect, wg_rect=wg_rect)


def grid_from_profile(layers, nu_cm: float, dx_um: float = 0.1,
                      dy_um: float = 0.05, pad_y_um: float = 6.0,
                      nx: int = 7, interface_averaging: bool = True) -> PermittivityGrid:
    """x-uniform grid from a 1D profile of (refractive_index, thickness_um).

    The first and last layers act as claddings and are extended over
    ``pad_y_um``.  Used for slab-oracle comparisons of the 2D solver (solve
    with Neumann lateral boundaries)."""
    n_arr = [complex(n) for n, _ in layers]
    thick = [float(t) for _, t in layers]
    thick[0] = pad_y_um
    thick[-1] = pad_y_um
    y_top = sum(thick)
    ny = int(round(y_top / dy_um))
    y = (np.arange(ny) + 0.5) * dy_um
    x = (np.arange(nx) + 0.5) * dx_um - nx * dx_um / 2.0
    edges = np.concatenate([[0.0], np.cumsum(thick)])
    col = np.empty(ny, dtype=complex)
    for i in range(ny):
        y0, y1 = y[i] - dy_um / 2.0, y[i] + dy_um / 2.0
        parts = []
        for k in range(len(layers)):
            ov = max(0.0, min(y1, edges[k + 1]) - max(y0, edges[k]))
            if ov > 1e-12:
                parts.append((ov / dy_um, n_arr[k] ** 2))
        if interface_averaging and len(parts) > 1:
            col[i] = 1.0 / sum(f / e for f, e in parts)
        else:
            k = np.searchsorted(edges, y[i], side="right") - 1
            k = min(k, len(layers) - 1)
            col[i] = n_arr[k] ** 2
    eps = np.tile(col[:, None], (1, nx))
    labels = np.zeros((ny, nx), dtype=np.int8)
    empty = (0.0, 0.0, 0.0, 0.0)
    return PermittivityGrid(eps=eps, labels=labels, x_um=x, y_um=y,
                            dx_um=dx_um, dy_um=dy_um, nu_cm=nu_cm,
                            ar_rect=empty, wg_rect=empty)


def _layer_span(segs, material):
    for m, _, s0, s1 in segs:
        if m == material:
            return (s0, s1)
    return (0.0, 0.0)
