"""Spectral sweeps of the coupled-waveguide supermodes: effective and group
index, GVD/TOD, width-design tables and the resonant-width estimate.

Conventions: beta(omega) = n_eff * omega / c; GVD = d^2 beta / d omega^2 in
fs^2/mm, TOD = d^3 beta / d omega^3 in fs^3/mm.
"""

from __future__ import annotations

from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from .constants import C_M_S, C_CM_S
from .fdiff import derivative_uniform
from .grid import build_permittivity_grid
from .modes import solve_modes_2d, vertical_parity
from .stacks import CrossSection

# unit conversions for derivatives of beta [1/m] vs omega [rad/s]
S2_PER_M_TO_FS2_PER_MM = 1e27
S3_PER_M_TO_FS3_PER_MM = 1e42

TRACK_OVERLAP_MIN = 0.8


@dataclass
class Branch:
    label: str                      # 'symmetric' / 'antisymmetric' (+ index)
    n_eff: np.ndarray               # real part per sweep point (nan past cutoff)
    gamma: np.ndarray
    loss_cm: np.ndarray
    flags: list = field(default_factory=list)   # (nu, message)


@dataclass
class DispersionCurve:
    nu_cm: np.ndarray
    branches: dict                  # label -> Branch

    def group_index(self, label: str) -> np.ndarray:
        return group_index(self.nu_cm, self.branches[label].n_eff)

    def gvd_tod(self, label: str):
        return gvd_tod(self.nu_cm, self.branches[label].n_eff)


def group_index(nu_cm: np.ndarray, n_eff: np.ndarray) -> np.ndarray:
    """n_g = n_eff + nu * dn_eff/dnu (order-4 stencils, >= 5 points)."""
    nu_cm = np.asarray(nu_cm, dtype=float)
    if len(nu_cm) < 5:
        raise ValueError("need at least 5 sweep points for the group index")
    _check_uniform(nu_cm)
    h = nu_cm[1] - nu_cm[0]
    dn = derivative_uniform(n_eff, h, 1, accuracy=4)
    return n_eff + nu_cm * dn


def gvd_tod(nu_cm: np.ndarray, n_eff: np.ndarray):
    """(gvd [fs^2/mm], tod [fs^3/mm]) from n_eff(nu)."""
    nu_cm = np.asarray(nu_cm, dtype=float)
    if len(nu_cm) < 7:
        raise ValueError("need at least 7 sweep points for GVD/TOD")
    _check_uniform(nu_cm)
    omega = 2.0 * np.pi * C_CM_S * nu_cm  # rad/s, uniform since nu is
    beta = n_eff * omega / C_M_S          # 1/m
    h = omega[1] - omega[0]
    gvd = derivative_uniform(beta, h, 2, accuracy=4) * S2_PER_M_TO_FS2_PER_MM
    tod = derivative_uniform(beta, h, 3, accuracy=4) * S3_PER_M_TO_FS3_PER_MM
    return gvd, tod


def _check_uniform(nu):
    steps = np.diff(nu)
    if steps.size == 0 or np.any(steps <= 0):
        raise ValueError("wavenumber grid must be strictly increasing")
    if not np.allclose(steps, steps[0], rtol=1e-9, atol=1e-9):
        raise ValueError("wavenumber grid must be uniformly spaced")


def _solve_point(args):
    cs, nu, k, guess, grid_opts = args
    grid = build_permittivity_grid(cs, nu, **grid_opts)
    modes = solve_modes_2d(grid, count=k, guess=guess)
    pars = [vertical_parity(m, grid) for m in modes]
    return grid, modes, pars


def sweep_neff(cs: CrossSection, nu_start: float, nu_stop: float,
               step: float, count: int = 2, guess: float | None = None,
               workers: int = 1, grid_opts: dict | None = None) -> DispersionCurve:
    """Branch-tracked n_eff sweep.

    ``count`` branches are followed by maximal field overlap with the
    previous sweep point (eigenvalue order swaps at avoided crossings).
    Extra eigenpairs are solved at each point so the tracked branches stay
    inside the computed window.  A lost branch is flagged, never relabeled.
    """
    grid_opts = grid_opts or {}
    nu = np.round(np.arange(nu_start, nu_stop + step / 2, step), 9)
    k = count + 2

    first_grid, first_modes, first_pars = _solve_point(
        (cs, nu[0], k, guess, grid_opts))
    if guess is None:
        guess = float(np.mean([m.n_eff.real for m in first_modes[:count]]))

    labels = []
    for m, p in zip(first_modes[:count], first_pars[:count]):
        label = p if p != "none" else "branch"
        if label in labels:
            label = f"{label}-{labels.count(label) + 1}"
        labels.append(label)
    branches = {
        lab: Branch(lab, np.full(len(nu), np.nan), np.full(len(nu), np.nan),
                    np.full(len(nu), np.nan))
        for lab in labels
    }
    prev_fields = {}
    area = first_grid.cell_area_um2
    for lab, m in zip(labels, first_modes[:count]):
        b = branches[lab]
        b.n_eff[0], b.gamma[0], b.loss_cm[0] = m.n_eff.real, m.gamma, m.loss_cm
        prev_fields[lab] = m.field

    points = ((cs, v, k, guess, grid_opts) for v in nu[1:])
    if workers > 1:
        executor = ProcessPoolExecutor(max_workers=workers)
        results = executor.map(_solve_point, points, chunksize=1)
    else:
        executor = None
        results = map(_solve_point, points)

    try:
        for i, (grid, modes, pars) in enumerate(results, start=1):
            taken = set()
            for lab in labels:
                b = branches[lab]
                if prev_fields[lab] is None:
                    continue  # branch lost earlier
                ovl = [
                    abs(np.sum(prev_fields[lab] * m.field) * area)
                    if j not in taken else -1.0
                    for j, m in enumerate(modes)
                ]
                j = int(np.argmax(ovl))
                if ovl[j] < TRACK_OVERLAP_MIN:
                    b.flags.append((float(nu[i]),
                                    f"tracking overlap {ovl[j]:.3f} below "
                                    f"{TRACK_OVERLAP_MIN}"))
                    if ovl[j] < 0.2:
                        b.flags.append((float(nu[i]), "branch truncated"))
                        prev_fields[lab] = None
                        continue
                taken.add(j)
                m = modes[j]
                b.n_eff[i], b.gamma[i], b.loss_cm[i] = (
                    m.n_eff.real, m.gamma, m.loss_cm)
                prev_fields[lab] = m.field
    finally:
        if executor is not None:
            executor.shutdown()

    return DispersionCurve(nu_cm=nu, branches=branches)


@dataclass
class DesignRow:
    width_um: float
    parity: str
    gamma_band: float          # band-averaged confinement
    gvd_center: float          # fs^2/mm at band center
    gvd_zero_crossings: int
    tod_center: float          # fs^3/mm at band center
    lasing: bool


@dataclass
class DesignTable:
    band: tuple
    rows: list
    resonant_width_um: float
    recommended_widths: list

    def lasing_parity(self, width_um: float) -> str:
        for r in self.rows:
            if r.width_um == width_um and r.lasing:
                return r.parity
        raise KeyError(f"no lasing row for width {width_um}")


GAMMA_TIE = 0.005  # below this Gamma difference the lower-loss parity wins


def width_design_sweep(base_cs: CrossSection, widths, band=(2140.0, 2260.0),
                       step: float = 8.0, workers: int = 1,
                       grid_opts: dict | None = None) -> DesignTable:
    """One supermode-dispersion row per (top-waveguide width, parity)."""
    rows = []
    min_split = {}
    for w in widths:
        if w <= 0:
            raise ValueError("widths must be > 0")
        cs = base_cs.with_top_width(w)
        curve = sweep_neff(cs, band[0], band[1], step, count=2,
                           workers=workers, grid_opts=grid_opts)
        labels = list(curve.branches)
        n_all = np.array([curve.branches[l].n_eff for l in labels])
        min_split[w] = float(np.nanmin(np.abs(n_all[0] - n_all[1])))
        center = len(curve.nu_cm) // 2
        stats = {}
        for lab in labels:
            b = curve.branches[lab]
            gvd, tod = curve.gvd_tod(lab)
            crossings = int(np.sum(np.diff(np.sign(gvd[~np.isnan(gvd)])) != 0))
            stats[lab] = (float(np.nanmean(b.gamma)), float(gvd[center]),
                          crossings, float(tod[center]),
                          float(np.nanmean(b.loss_cm)))
        g0 = stats[labels[0]][0]
        g1 = stats[labels[1]][0]
        if abs(g0 - g1) < GAMMA_TIE:
            lasing = labels[0] if stats[labels[0]][4] <= stats[labels[1]][4] \
                else labels[1]
        else:
            lasing = labels[0] if g0 > g1 else labels[1]
        for lab in labels:
            gm, gv, cr, td, _ = stats[lab]
            rows.append(DesignRow(w, _parity_of(lab), gm, gv, cr, td,
                                  lab == lasing))
    resonant = min(min_split, key=min_split.get)
    split_floor = 2.0 * min_split[resonant]
    recommended = [w for w in widths
                   if w != resonant and min_split[w] >= split_floor]
    return DesignTable(band=tuple(band), rows=rows,
                       resonant_width_um=float(resonant),
                       recommended_widths=recommended)


def _parity_of(label: str) -> str:
    return label.split("-")[0]
