"""Layer-stack parsing, validation and device-config ingestion."""

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from dualwg.stacks import (CrossSection, Layer, ParseError, PeriodStack,
                           ValidationError, load_device_config, narrow_device,
                           parse_period, serialize_period, wide_device)


def test_parse_simple_period():
    p = parse_period("35/11/13/38")
    assert p.sublayers == (("barrier", 35.0), ("well", 11.0),
                           ("barrier", 13.0), ("well", 38.0))
    assert p.total_thickness_A == pytest.approx(97.0)
    assert p.well_fraction == pytest.approx(49.0 / 97.0)


def test_parse_ignores_whitespace():
    assert parse_period(" 35 / 11 ").sublayers == parse_period("35/11").sublayers


def test_parse_error_names_position():
    with pytest.raises(ParseError, match="position 3"):
        parse_period("35/11/abc/38")


def test_parse_rejects_nonpositive_thickness():
    with pytest.raises(ValidationError, match="position 2"):
        parse_period("35/0/13")


def test_parse_empty_string():
    with pytest.raises(ParseError, match="empty"):
        parse_period("   ")


def test_serialize_round_trip_reference():
    text = "35/11/13/38/10/35/18/27/19/26/15/23/14/21/22/19/20/19/19/17/24/17"
    assert serialize_period(parse_period(text)) == text


@settings(max_examples=50, deadline=None)
@given(st.lists(st.floats(min_value=0.5, max_value=500.0), min_size=1,
                max_size=24))
def test_parse_serialize_round_trip(thicknesses):
    text = "/".join(f"{t:g}" for t in thicknesses)
    period = parse_period(text)
    assert serialize_period(period) == text
    again = parse_period(serialize_period(period))
    assert again.sublayers == period.sublayers


def test_period_role_alternation_enforced():
    with pytest.raises(ValidationError, match="expected role"):
        PeriodStack((("well", 10.0),))


def test_layer_validation():
    with pytest.raises(ValidationError, match="unknown material"):
        Layer("Unobtainium", 1.0)
    with pytest.raises(ValidationError, match="thickness"):
        Layer("InP", 0.0)
    with pytest.raises(ValidationError, match="doping"):
        Layer("InP", 1.0, doping_cm3=-1.0)


def test_cross_section_needs_one_active_and_one_waveguide():
    stack = (Layer("InP", 1.0), Layer("ActiveRegion", 2.0))
    with pytest.raises(ValidationError, match="exactly one"):
        CrossSection(stack, 5.0, 3.0, 3.0)


def test_builtin_devices():
    narrow = narrow_device()
    wide = wide_device()
    assert narrow.top_wg_width_um == 3.0
    assert wide.top_wg_width_um == 8.5
    assert narrow.ar_width_um == wide.ar_width_um == 5.0
    # waveguide sits above the active region
    assert narrow.layer_span_um("InGaAs")[0] > narrow.layer_span_um("ActiveRegion")[1]


def test_without_passive_and_active():
    cs = narrow_device()
    iso_ar = cs.without_passive()
    iso_wg = cs.without_active()
    assert all(l.material != "InGaAs" for l in iso_ar.stack)
    assert all(l.material != "ActiveRegion" for l in iso_wg.stack)
    # total thickness is preserved
    total = sum(l.thickness_um for l in cs.stack)
    assert sum(l.thickness_um for l in iso_ar.stack) == pytest.approx(total)


def test_with_top_width():
    cs = narrow_device().with_top_width(6.5)
    assert cs.top_wg_width_um == 6.5
    assert cs.ar_width_um == 5.0


def test_load_device_config_matches_builtin():
    cs = load_device_config("configs/device_reference.ini")
    ref = narrow_device()
    assert cs.ar_width_um == ref.ar_width_um
    assert cs.top_wg_width_um == ref.top_wg_width_um
    assert cs.wg_spacing_um == ref.wg_spacing_um
    assert [l.material for l in cs.stack] == [l.material for l in ref.stack]
    assert [l.thickness_um for l in cs.stack] == \
        [l.thickness_um for l in ref.stack]
    assert [l.doping_cm3 for l in cs.stack] == \
        [l.doping_cm3 for l in ref.stack]


def test_load_device_config_missing_file():
    with pytest.raises(ParseError, match="cannot read"):
        load_device_config("/nonexistent/device.ini")


def test_load_device_config_missing_section(tmp_path):
    p = tmp_path / "bad.ini"
    p.write_text("[stack]\nsubstrate = InP 10.0\n")
    with pytest.raises(ParseError, match=r"missing \[geometry\]"):
        load_device_config(p)


def test_load_device_config_bad_thickness(tmp_path):
    p = tmp_path / "bad.ini"
    p.write_text("[stack]\nsubstrate = InP ten\n"
                 "[geometry]\nar_width_um = 5\ntop_wg_width_um = 3\n"
                 "wg_spacing_um = 3\n")
    with pytest.raises(ParseError, match="bad thickness"):
        load_device_config(p)
