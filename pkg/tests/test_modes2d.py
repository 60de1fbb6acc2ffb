"""2D finite-difference mode solver: oracle checks, parity, determinism."""

import numpy as np
import pytest

from dualwg.grid import build_permittivity_grid, grid_from_profile
from dualwg.modes import (SolverError, classify_parity,
                          decompose_on_isolated_modes, modal_loss,
                          overlap_factor, solve_modes_2d, vertical_parity)
from dualwg.slab import solve_slab
from dualwg.stacks import narrow_device

SLAB = [(3.08, 0.0), (3.37, 1.0), (3.08, 0.0)]


@pytest.fixture(scope="module")
def device_modes():
    grid = build_permittivity_grid(narrow_device(), 2200.0)
    return grid, solve_modes_2d(grid, count=2)


def test_slab_oracle_single_structure():
    ref = solve_slab(SLAB, 2200.0)[0].n_eff
    grid = grid_from_profile(SLAB, 2200.0)
    mode = solve_modes_2d(grid, count=1, bc_x="neumann")[0]
    assert abs(mode.n_eff.real - ref) < 1e-4


def test_grid_refinement_tightens_oracle_error():
    ref = solve_slab(SLAB, 2200.0)[0].n_eff
    errs = []
    for dy in (0.05, 0.025):
        grid = grid_from_profile(SLAB, 2200.0, dy_um=dy)
        mode = solve_modes_2d(grid, count=1, bc_x="neumann")[0]
        errs.append(abs(mode.n_eff.real - ref))
    assert errs[1] < errs[0] / 2


def test_device_fundamental_properties(device_modes):
    grid, modes = device_modes
    fund = modes[0]
    assert 3.1 < fund.n_eff.real < 3.3
    assert fund.n_eff.imag >= 0
    assert fund.gamma > 0.5                      # mostly in the active region
    assert fund.residual < 1e-8
    assert vertical_parity(fund, grid) == "symmetric"


def test_supermode_pair_near_orthogonal(device_modes):
    # the interface-corrected operator is slightly non-symmetric, so the
    # eigenmodes are orthogonal only up to the interface correction
    grid, modes = device_modes
    a, b = modes[0].field, modes[1].field
    overlap = abs(np.sum(a * b) * grid.cell_area_um2)
    assert overlap < 0.01


def test_fields_normalized_and_sign_fixed(device_modes):
    grid, modes = device_modes
    for m in modes:
        assert np.sum(m.field**2) * grid.cell_area_um2 == pytest.approx(1.0)
        peak = np.unravel_index(np.argmax(np.abs(m.field)), m.field.shape)
        assert m.field[peak] > 0


def test_lateral_parity_on_symmetric_grid(device_modes):
    grid, modes = device_modes
    assert classify_parity(modes[0], grid) in ("symmetric", "antisymmetric")


def test_classify_parity_rejects_asymmetric_grid(device_modes):
    grid, modes = device_modes
    broken = grid.eps.copy()
    broken[0, 0] += 0.5
    import dataclasses
    bad = dataclasses.replace(grid, eps=broken)
    with pytest.raises(ValueError, match="mirror-symmetric"):
        classify_parity(modes[0], bad)


def test_overlap_factor_complement(device_modes):
    grid, modes = device_modes
    full = (grid.x_um[0], grid.x_um[-1], grid.y_um[0], grid.y_um[-1])
    assert overlap_factor(modes[0], grid, full) == pytest.approx(1.0)
    g_in = overlap_factor(modes[0], grid, grid.ar_rect)
    assert 0.0 < g_in < 1.0


def test_modal_loss_matches_reported(device_modes):
    grid, modes = device_modes
    for m in modes:
        assert modal_loss(m, grid) == pytest.approx(m.loss_cm, rel=1e-9)
        assert m.loss_cm >= 0


def test_count_validation(device_modes):
    grid, _ = device_modes
    with pytest.raises(ValueError, match="count"):
        solve_modes_2d(grid, count=0)


def test_guess_validation(device_modes):
    grid, _ = device_modes
    with pytest.raises(ValueError, match="guess"):
        solve_modes_2d(grid, guess=99.0)


def test_unknown_bc_x():
    grid = grid_from_profile(SLAB, 2200.0)
    with pytest.raises(ValueError, match="bc_x"):
        solve_modes_2d(grid, bc_x="periodic")


def test_determinism(device_modes):
    grid, modes = device_modes
    again = solve_modes_2d(grid, count=2)
    for m, n in zip(modes, again):
        assert m.n_eff == n.n_eff
        assert np.array_equal(m.field, n.field)


def test_decompose_on_isolated_modes(device_modes):
    grid, modes = device_modes
    # the supermode expanded in its own basis: unit coefficient on itself
    c = decompose_on_isolated_modes(modes[0], list(modes), grid)
    assert c[0] == pytest.approx(1.0, abs=1e-9)
    assert abs(c[1]) < 0.01


def test_decompose_shape_mismatch(device_modes):
    grid, modes = device_modes
    other = grid_from_profile(SLAB, 2200.0)
    iso = solve_modes_2d(other, count=1, bc_x="neumann")
    with pytest.raises(ValueError, match="different grid"):
        decompose_on_isolated_modes(modes[0], iso, grid)
