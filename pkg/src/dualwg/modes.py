"""Semi-vectorial TM finite-difference mode solver on a 2D permittivity grid.

Solves for the dominant field component E_y with interface-corrected
coefficients along the growth axis (continuity of D_y) and a plain Laplacian
laterally, via sparse shift-invert Arnoldi around an effective-index guess.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
import scipy.sparse as sp
import scipy.sparse.linalg as spla

from .constants import k0_um
from .grid import PermittivityGrid


class SolverError(RuntimeError):
    pass


@dataclass
class ModeSolution:
    n_eff: complex
    field: np.ndarray            # E_y on the grid, (ny, nx), normalized
    parity: str                  # 'symmetric' | 'antisymmetric' | 'none'
    gamma: float                 # confinement in the active region
    loss_cm: float
    nu_cm: float
    residual: float
    warnings: tuple = ()

    def overlap(self, other_field: np.ndarray, cell_area: float) -> float:
        return float(np.sum(self.field * other_field) * cell_area)


def _build_operator(eps_r: np.ndarray, dx: float, dy: float, k0: float,
                    bc_x: str = "dirichlet") -> sp.csr_matrix:
    """Assemble the eigenoperator A with A E = beta^2 E."""
    ny, nx = eps_r.shape
    n = ny * nx

    e = eps_r
    # neighbor permittivities with edge replication (Dirichlet boundary value
    # enters only through the diagonal weight)
    e_n = np.vstack([e[1:, :], e[-1:, :]])
    e_s = np.vstack([e[:1, :], e[:-1, :]])

    a_n = 2.0 * e_n / (e_n + e) / dy**2
    a_s = 2.0 * e_s / (e_s + e) / dy**2
    d_y = -(2.0 * e / (e_n + e) + 2.0 * e / (e_s + e)) / dy**2

    a_x = np.full((ny, nx), 1.0 / dx**2)
    d_x = np.full((ny, nx), -2.0 / dx**2)
    if bc_x == "neumann":
        d_x[:, 0] += 1.0 / dx**2
        d_x[:, -1] += 1.0 / dx**2
    elif bc_x != "dirichlet":
        raise ValueError(f"unknown bc_x {bc_x!r}")

    # rows whose 5-point y-neighborhood is homogeneous get a 4th-order
    # stencil; interface rows keep the 2nd-order D-continuity scheme
    uniform = np.zeros((ny, nx), dtype=bool)
    if ny >= 5:
        u = np.ones((ny - 4, nx), dtype=bool)
        for off in range(1, 5):
            u &= np.abs(e[off:ny - 4 + off, :] - e[:ny - 4, :]) < 1e-12
        uniform[2:ny - 2, :] = u

    c4 = np.array([-1.0, 16.0, -30.0, 16.0, -1.0]) / 12.0
    a_n2 = np.where(uniform, c4[4] / dy**2, 0.0)
    a_s2 = np.where(uniform, c4[0] / dy**2, 0.0)
    a_n1 = np.where(uniform, c4[3] / dy**2, a_n)
    a_s1 = np.where(uniform, c4[1] / dy**2, a_s)
    d_y = np.where(uniform, c4[2] / dy**2, d_y)

    diag = d_y + d_x + k0 * k0 * e

    idx = np.arange(n).reshape(ny, nx)
    rows, cols, vals = [], [], []

    def add(r, c, v):
        rows.append(r.ravel())
        cols.append(c.ravel())
        vals.append(v.ravel())

    add(idx, idx, diag)
    add(idx[:-1, :], idx[1:, :], a_n1[:-1, :])   # north neighbor
    add(idx[1:, :], idx[:-1, :], a_s1[1:, :])    # south neighbor
    add(idx[:-2, :], idx[2:, :], a_n2[:-2, :])   # north-north
    add(idx[2:, :], idx[:-2, :], a_s2[2:, :])    # south-south
    add(idx[:, :-1], idx[:, 1:], a_x[:, :-1])    # east
    add(idx[:, 1:], idx[:, :-1], a_x[:, 1:])     # west

    A = sp.csr_matrix(
        (np.concatenate(vals), (np.concatenate(rows), np.concatenate(cols))),
        shape=(n, n))
    return A


def solve_modes_2d(grid: PermittivityGrid, count: int = 2,
                   guess: float | None = None, bc_x: str = "dirichlet",
                   db=None) -> list[ModeSolution]:
    """``count`` eigenmodes nearest the index guess, sorted by descending
    Re(n_eff).  The eigenproblem uses the real part of the permittivity;
    losses are attached perturbatively from the imaginary part."""
    if count < 1:
        raise ValueError("count must be >= 1")
    eps_r = grid.eps.real
    k0 = k0_um(grid.nu_cm)
    n_max = grid.n_max()
    if guess is None:
        # no guided mode exists above the peak material index, so shifting
        # there makes shift-invert return the topmost (fundamental) modes
        guess = n_max
    if not (0.0 < guess <= n_max + 0.5):
        raise ValueError(f"guess {guess} outside plausible index range")

    A = _build_operator(eps_r, grid.dx_um, grid.dy_um, k0, bc_x)
    sigma = (k0 * guess) ** 2
    v0 = np.ones(A.shape[0])
    # explicit LU with a cheaper fill-reducing ordering than eigs' default
    shifted = (A - sigma * sp.identity(A.shape[0], format="csr")).tocsc()
    lu = spla.splu(shifted, permc_spec="MMD_AT_PLUS_A")
    op_inv = spla.LinearOperator(A.shape, matvec=lu.solve)
    try:
        lam, vec = spla.eigs(A, k=count, sigma=sigma, which="LM", v0=v0,
                             OPinv=op_inv, maxiter=5000, tol=1e-12)
    except spla.ArpackNoConvergence as exc:
        raise SolverError(
            f"eigensolver did not converge: {len(exc.eigenvalues)} of "
            f"{count} eigenvalues after maxiter iterations") from exc

    order = np.argsort(-lam.real)
    lam, vec = lam[order], vec[:, order]

    out = []
    for m in range(count):
        v = vec[:, m]
        resid = np.linalg.norm(A @ v - lam[m] * v) / np.linalg.norm(v)
        if resid > 1e-8:
            raise SolverError(f"eigenresidual {resid:.2e} above 1e-8")
        n_eff = np.sqrt(lam[m].real) / k0 if lam[m].real > 0 else 0.0
        E = v.real.reshape(grid.shape)
        # deterministic sign: strongest sample positive
        peak = np.unravel_index(np.argmax(np.abs(E)), E.shape)
        if E[peak] < 0:
            E = -E
        norm = np.sqrt(np.sum(E * E) * grid.cell_area_um2)
        E = E / norm

        warnings = []
        edge = max(np.abs(E[0, :]).max(), np.abs(E[-1, :]).max(),
                   np.abs(E[:, 0]).max(), np.abs(E[:, -1]).max())
        if bc_x == "dirichlet" and edge > 1e-4 * np.abs(E).max():
            warnings.append("window: field decays less than 4 decades at the "
                            "boundary")

        gamma = overlap_factor_field(E, grid, grid.ar_rect)
        loss = _perturbative_loss(E, grid, float(n_eff))
        n_eff_c = complex(n_eff, loss / (4.0 * np.pi * grid.nu_cm))
        mode = ModeSolution(n_eff=n_eff_c, field=E, parity="none",
                            gamma=gamma, loss_cm=loss, nu_cm=grid.nu_cm,
                            residual=float(resid), warnings=tuple(warnings))
        mode.parity = _lateral_parity_or_none(mode, grid)
        out.append(mode)
    return out


def _lateral_parity_or_none(mode, grid):
    try:
        return classify_parity(mode, grid)
    except ValueError:
        return "none"


def classify_parity(mode: ModeSolution, grid: PermittivityGrid,
                    threshold: float = 0.9) -> str:
    """Lateral (x) parity from the overlap of E(x) with E(-x)."""
    if not np.array_equal(grid.eps, grid.eps[:, ::-1]):
        raise ValueError("grid is not mirror-symmetric in x")
    E = mode.field
    num = float(np.sum(E * E[:, ::-1]))
    den = float(np.sum(E * E))
    s = num / den
    if s > threshold:
        return "symmetric"
    if s < -threshold:
        return "antisymmetric"
    return "none"


def vertical_parity(mode: ModeSolution, grid: PermittivityGrid) -> str:
    """Supermode label along the growth axis: sign agreement between the
    active-region lobe and the passive-waveguide lobe."""
    E = mode.field
    m_ar = grid.rect_mask(grid.ar_rect)
    m_wg = grid.rect_mask(grid.wg_rect)
    if not m_ar.any() or not m_wg.any():
        return "none"
    s_ar = E[m_ar][np.argmax(np.abs(E[m_ar]))]
    s_wg = E[m_wg][np.argmax(np.abs(E[m_wg]))]
    return "symmetric" if s_ar * s_wg > 0 else "antisymmetric"


def overlap_factor_field(E: np.ndarray, grid: PermittivityGrid, rect) -> float:
    mask = grid.rect_mask(rect)
    total = float(np.sum(E * E))
    if total == 0:
        return 0.0
    return float(np.sum(E[mask] ** 2) / total)


def overlap_factor(mode: ModeSolution, grid: PermittivityGrid, rect) -> float:
    """Confinement Gamma = sum_region |E|^2 / sum_all |E|^2."""
    return overlap_factor_field(mode.field, grid, rect)


def _perturbative_loss(E, grid, n_eff):
    """First-order power loss [1/cm] from Im(eps):
    alpha = 2*pi*nu * sum(Im eps |E|^2) / (Re n_eff * sum|E|^2)."""
    if n_eff <= 0:
        return 0.0
    num = float(np.sum(grid.eps.imag * E * E))
    den = n_eff * float(np.sum(E * E))
    return max(0.0, 2.0 * np.pi * grid.nu_cm * num / den)


def modal_loss(mode: ModeSolution, grid: PermittivityGrid) -> float:
    return _perturbative_loss(mode.field, grid, float(mode.n_eff.real))


def decompose_on_isolated_modes(supermode: ModeSolution,
                                isolated: list[ModeSolution],
                                grid: PermittivityGrid) -> np.ndarray:
    """Overlap coefficients of a supermode on isolated-waveguide modes solved
    on the same grid; sum(|c|^2) <= 1, the deficit is radiative mismatch."""
    for m in isolated:
        if m.field.shape != supermode.field.shape:
            raise ValueError("isolated modes solved on a different grid")
    area = grid.cell_area_um2
    c = np.array([np.sum(supermode.field * m.field) * area for m in isolated])
    return c
