"""Material database: table lookups, Drude corrections, effective medium."""

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from dualwg.materials import (MaterialDB, MaterialError, default_db,
                              effective_medium_index, refractive_index)
from dualwg.stacks import EV3032, parse_period


def test_background_indices_at_band_center():
    db = default_db()
    n_inp = db.refractive_index("InP", 2200.0).real
    n_gaas = db.refractive_index("InGaAs", 2200.0).real
    n_alinas = db.refractive_index("AlInAs", 2200.0).real
    assert 3.0 < n_inp < 3.2
    assert 3.2 < n_gaas < 3.5
    assert n_inp < n_gaas          # InGaAs guides against InP
    assert n_inp < n_alinas < n_gaas


def test_air_is_unity():
    assert default_db().refractive_index("Air", 2200.0) == pytest.approx(1.0)


def test_unknown_material_raises():
    with pytest.raises(MaterialError, match="unknown material"):
        default_db().refractive_index("GaN", 2200.0)


def test_out_of_range_wavenumber_raises():
    with pytest.raises(MaterialError, match="outside tabulated range"):
        default_db().refractive_index("InP", 123456.0)


def test_negative_doping_raises():
    with pytest.raises(MaterialError, match="doping"):
        default_db().permittivity("InP", 2200.0, -1e17)


def test_drude_lowers_index_and_absorbs():
    db = default_db()
    n0 = db.refractive_index("InP", 2200.0)
    n1 = db.refractive_index("InP", 2200.0, 1e18)
    assert n1.real < n0.real       # free carriers reduce the real index
    assert n0.imag == pytest.approx(0.0)
    assert n1.imag > 0             # and absorb


@settings(max_examples=30, deadline=None)
@given(st.floats(min_value=1e15, max_value=5e18),
       st.floats(min_value=1e15, max_value=5e18))
def test_drude_index_monotone_in_doping(na, nb):
    lo, hi = sorted((na, nb))
    db = default_db()
    n_lo = db.refractive_index("InP", 2200.0, lo)
    n_hi = db.refractive_index("InP", 2200.0, hi)
    assert n_hi.real <= n_lo.real + 1e-12
    assert n_hi.imag >= n_lo.imag - 1e-12


def test_drude_term_scales_linearly_with_density():
    db = default_db()
    e0 = db.permittivity("InP", 2200.0, 0.0)
    d1 = db.permittivity("InP", 2200.0, 1e17) - e0
    d2 = db.permittivity("InP", 2200.0, 2e17) - e0
    assert d2 == pytest.approx(2.0 * d1, rel=1e-9)


def test_effective_medium_between_constituents():
    db = default_db()
    n_eff = effective_medium_index(EV3032, 2200.0).real
    n_w = db.refractive_index("InGaAs", 2200.0).real
    n_b = db.refractive_index("AlInAs", 2200.0).real
    assert min(n_w, n_b) < n_eff < max(n_w, n_b)


def test_effective_medium_limit_pure_well():
    # a period that is almost all well material approaches the InGaAs index
    p = parse_period("0.001/1000")
    db = default_db()
    n_eff = effective_medium_index(p, 2200.0).real
    n_w = db.refractive_index("InGaAs", 2200.0).real
    assert n_eff == pytest.approx(n_w, abs=1e-4)


def test_active_region_registration():
    db = MaterialDB()
    db.register_active_region(EV3032)
    eps = db.permittivity("ActiveRegion", 2200.0)
    assert eps == pytest.approx(
        db.effective_medium_permittivity(EV3032, 2200.0))


def test_sheet_doping_adds_loss():
    undoped = parse_period("35/11/13/38")
    doped = parse_period("35/11/13/38", sheet_doping_cm2=1.25e11)
    db = default_db()
    e0 = db.effective_medium_permittivity(undoped, 2200.0)
    e1 = db.effective_medium_permittivity(doped, 2200.0)
    assert e1.imag > e0.imag
    assert e1.real < e0.real


def test_module_level_wrapper_matches_db():
    assert refractive_index("InGaAs", 2200.0) == pytest.approx(
        default_db().refractive_index("InGaAs", 2200.0))
