"""Facet reflectivity: Fresnel limit, coatings, quarter-wave self-test."""

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from dualwg.tmm import CoatingStack, facet_reflectivity, quarter_wave_coating


def test_bare_facet_is_fresnel():
    for n in (1.5, 3.19, 3.37):
        expected = ((n - 1) / (n + 1)) ** 2
        assert facet_reflectivity(n, None, 2200.0) == pytest.approx(expected)


def test_empty_coating_equals_none():
    assert facet_reflectivity(3.19, CoatingStack(()), 2200.0) == \
        pytest.approx(facet_reflectivity(3.19, None, 2200.0))


def test_quarter_wave_cancels_reflection():
    for n in (2.0, 3.19, 3.5):
        for nu in (1500.0, 2222.0):
            c = quarter_wave_coating(n, nu)
            assert facet_reflectivity(n, c, nu) < 1e-10


def test_half_wave_is_absentee_layer():
    n_f = 1.8
    t = 0.5 / (2222.0 * 1e-4 * n_f)      # half the in-film wavelength
    c = CoatingStack(((n_f, t),))
    assert facet_reflectivity(3.19, c, 2222.0) == \
        pytest.approx(facet_reflectivity(3.19, None, 2222.0), abs=1e-12)


@settings(max_examples=50, deadline=None)
@given(st.floats(min_value=1.01, max_value=5.0),
       st.floats(min_value=1.0, max_value=3.5),
       st.floats(min_value=0.05, max_value=3.0))
def test_reflectivity_bounded(n_facet, n_film, t):
    r = facet_reflectivity(n_facet, CoatingStack(((n_film, t),)), 2222.0)
    assert 0.0 <= r <= 1.0


@settings(max_examples=50, deadline=None)
@given(st.floats(min_value=1.01, max_value=4.0),
       st.floats(min_value=1.01, max_value=4.0))
def test_bare_reflectivity_monotone_in_index(na, nb):
    lo, hi = sorted((na, nb))
    r_lo = facet_reflectivity(lo, None, 2222.0)
    r_hi = facet_reflectivity(hi, None, 2222.0)
    assert r_hi >= r_lo - 1e-12


def test_invalid_facet_index():
    with pytest.raises(ValueError, match="facet index"):
        facet_reflectivity(0.0, None, 2222.0)


def test_invalid_film():
    with pytest.raises(ValueError, match="below 1"):
        CoatingStack(((0.5, 1.0),))
    with pytest.raises(ValueError, match="thickness"):
        CoatingStack(((1.5, -1.0),))


def test_two_film_stack_order_matters():
    a = CoatingStack(((1.35, 0.7), (2.2, 0.3)))
    b = CoatingStack(((2.2, 0.3), (1.35, 0.7)))
    ra = facet_reflectivity(3.19, a, 2222.0)
    rb = facet_reflectivity(3.19, b, 2222.0)
    assert ra != pytest.approx(rb, abs=1e-6)
