"""Epitaxial layer stacks, active-region period notation, and the device
cross-section description.

Period notation: slash-separated thicknesses in Angstrom, odd positions
(1st, 3rd, ...) are barriers, even positions wells, e.g. "35/11/13/38".
Whitespace is ignored.
"""

from __future__ import annotations

import configparser
from dataclasses import dataclass, field

from .materials import MATERIALS


class ParseError(ValueError):
    pass


class ValidationError(ValueError):
    pass


@dataclass(frozen=True)
class Layer:
    material: str            # one of MATERIALS
    thickness_um: float
    doping_cm3: float = 0.0
    label: str = ""          # free-form tag, e.g. "buffer", "waveguide"

    def __post_init__(self):
        if self.material not in MATERIALS:
            raise ValidationError(f"unknown material {self.material!r}")
        if self.thickness_um <= 0:
            raise ValidationError(f"layer thickness must be > 0, got {self.thickness_um}")
        if self.doping_cm3 < 0:
            raise ValidationError("doping must be >= 0")


@dataclass(frozen=True)
class PeriodStack:
    """One superlattice period: alternating (barrier, well) sublayers in
    Angstrom, starting with the injection barrier."""

    sublayers: tuple          # ((role, thickness_A), ...), role in {barrier, well}
    repeats: int = 1
    sheet_doping_cm2: float = 0.0
    ga_fraction: float = 0.0
    al_fraction: float = 0.0

    def __post_init__(self):
        if self.repeats < 1:
            raise ValidationError("repeats must be >= 1")
        if not self.sublayers:
            raise ValidationError("period has no sublayers")
        for i, (role, t) in enumerate(self.sublayers):
            expected = "barrier" if i % 2 == 0 else "well"
            if role != expected:
                raise ValidationError(
                    f"sublayer {i}: expected role {expected!r}, got {role!r}"
                )
            if t <= 0:
                raise ValidationError(f"sublayer {i}: thickness must be > 0, got {t}")

    @property
    def sheet_doping(self) -> float:
        return self.sheet_doping_cm2

    @property
    def total_thickness_A(self) -> float:
        return sum(t for _, t in self.sublayers)

    @property
    def well_fraction(self) -> float:
        wells = sum(t for r, t in self.sublayers if r == "well")
        return wells / self.total_thickness_A


def parse_period(text: str, repeats: int = 1, sheet_doping_cm2: float = 0.0,
                 ga_fraction: float = 0.0, al_fraction: float = 0.0) -> PeriodStack:
    """Parse slash-separated Angstrom thicknesses into a PeriodStack."""
    cleaned = "".join(text.split())
    if not cleaned:
        raise ParseError("empty period string")
    tokens = cleaned.split("/")
    sublayers = []
    for i, tok in enumerate(tokens):
        try:
            t = float(tok)
        except ValueError:
            raise ParseError(f"non-numeric token {tok!r} at position {i + 1}") from None
        if t <= 0:
            raise ValidationError(f"thickness must be > 0 at position {i + 1}, got {t}")
        role = "barrier" if i % 2 == 0 else "well"
        sublayers.append((role, t))
    return PeriodStack(tuple(sublayers), repeats, sheet_doping_cm2,
                       ga_fraction, al_fraction)


def serialize_period(period: PeriodStack) -> str:
    """Inverse of parse_period; reproduces the token sequence."""
    def fmt(t):
        return f"{t:g}"
    return "/".join(fmt(t) for _, t in period.sublayers)


# Reference periods from the grown layers (thickness bookkeeping only).
EV3032 = parse_period(
    "35/11/13/38/10/35/18/27/19/26/15/23/14/21/22/19/20/19/19/17/24/17",
    repeats=35, sheet_doping_cm2=1.25e11, ga_fraction=0.326, al_fraction=0.652,
)
EV1426 = parse_period(
    "39/13/14/41/17/37/25/28/15/26/16/24/17/22/19/21/21/20/23/18/24/18",
    repeats=35, sheet_doping_cm2=1.1e11, ga_fraction=0.38, al_fraction=0.60,
)


@dataclass(frozen=True)
class CrossSection:
    """2D laser cross-section: vertical stack (bottom to top along the growth
    axis y) plus lateral widths.  The active region and the InGaAs waveguide
    layer are laterally patterned; all other layers are uniform in x and
    embedded in the lateral cladding."""

    stack: tuple                  # Layers, bottom (substrate side) to top
    ar_width_um: float
    top_wg_width_um: float
    wg_spacing_um: float          # thickness of the InP buffer between AR and waveguide
    lateral_cladding: str = "InP"
    lateral_cladding_doping_cm3: float = 0.0

    def __post_init__(self):
        if self.ar_width_um <= 0 or self.top_wg_width_um <= 0 or self.wg_spacing_um <= 0:
            raise ValidationError("widths and spacing must be > 0")
        n_ar = sum(1 for l in self.stack if l.material == "ActiveRegion")
        n_wg = sum(1 for l in self.stack if l.material == "InGaAs")
        if n_ar != 1 or n_wg != 1:
            raise ValidationError(
                f"need exactly one ActiveRegion and one InGaAs layer, "
                f"got {n_ar} and {n_wg}"
            )

    def layer(self, material: str) -> Layer:
        for l in self.stack:
            if l.material == material:
                return l
        raise ValidationError(f"no {material} layer in stack")

    def layer_span_um(self, material: str):
        """(y_bottom, y_top) of the first layer of the given material, with
        y = 0 at the bottom of the stack."""
        y = 0.0
        for l in self.stack:
            if l.material == material:
                return (y, y + l.thickness_um)
            y += l.thickness_um
        raise ValidationError(f"no {material} layer in stack")

    def without_passive(self) -> "CrossSection":
        """Same structure with the InGaAs waveguide replaced by cladding InP
        (isolated active waveguide)."""
        new = tuple(
            Layer("InP", l.thickness_um, l.doping_cm3, l.label)
            if l.material == "InGaAs" else l
            for l in self.stack
        )
        return _replace_stack(self, new)

    def without_active(self) -> "CrossSection":
        """Same structure with the active region replaced by undoped InP
        (isolated passive waveguide, as beyond the ring)."""
        new = tuple(
            Layer("InP", l.thickness_um, 0.0, l.label)
            if l.material == "ActiveRegion" else l
            for l in self.stack
        )
        return _replace_stack(self, new)

    def with_top_width(self, width_um: float) -> "CrossSection":
        return CrossSection(self.stack, self.ar_width_um, width_um,
                            self.wg_spacing_um, self.lateral_cladding,
                            self.lateral_cladding_doping_cm3)


def _replace_stack(cs: CrossSection, new_stack) -> CrossSection:
    obj = object.__new__(CrossSection)
    object.__setattr__(obj, "stack", new_stack)
    for f in ("ar_width_um", "top_wg_width_um", "wg_spacing_um",
              "lateral_cladding", "lateral_cladding_doping_cm3"):
        object.__setattr__(obj, f, getattr(cs, f))
    return obj


def reference_stack(wg_spacing_um: float = 3.0, substrate_um: float = 10.0,
                    gold_um: float = 4.0) -> tuple:
    """Vertical stack of the grown wafer, bottom to top (substrate truncated;
    the simulation window clips it further)."""
    return (
        Layer("InP", substrate_um, 2e17, "substrate"),
        Layer("ActiveRegion", 1.98, 0.0, "active"),
        Layer("InP", 0.5, 1e17, "planarization"),
        Layer("InP", wg_spacing_um, 1e16, "buffer"),
        Layer("InGaAs", 1.0, 1e16, "waveguide"),
        Layer("InP", 0.5, 1e16, "planarization"),
        Layer("InP", 1.1, 1e16, "cladding"),
        Layer("InP", 0.4, 2e17, "cladding"),
        Layer("InP", 0.4, 3e18, "contact"),
        Layer("Gold", gold_um, 0.0, "contact"),
    )


def narrow_device(top_width_um: float = 3.0) -> CrossSection:
    """Narrow-top-waveguide device: 3 um top waveguide, 3 um spacing."""
    return CrossSection(reference_stack(wg_spacing_um=3.0), 5.0,
                        top_width_um, 3.0)


def wide_device(top_width_um: float = 8.5) -> CrossSection:
    """Wide-top-waveguide device: 8.5 um top waveguide, 2.6 um spacing."""
    return CrossSection(reference_stack(wg_spacing_um=2.6), 5.0,
                        top_width_um, 2.6)


def load_device_config(path) -> CrossSection:
    """Read a device description from an INI file.

    Sections:
      [stack]    ordered entries ``name = material thickness_um [label]``
                 (bottom to top)
      [geometry] ar_width_um, top_wg_width_um, wg_spacing_um
                 (a stack layer labelled 'buffer' takes wg_spacing_um as its
                 thickness)
      [doping]   per stack entry name, carriers in cm^-3
    """
    cp = configparser.ConfigParser()
    read = cp.read(path)
    if not read:
        raise ParseError(f"cannot read config file {path}")
    for sec in ("stack", "geometry"):
        if sec not in cp:
            raise ParseError(f"missing [{sec}] section in {path}")
    geo = cp["geometry"]
    try:
        ar_w = float(geo["ar_width_um"])
        top_w = float(geo["top_wg_width_um"])
        spacing = float(geo["wg_spacing_um"])
    except KeyError as e:
        raise ParseError(f"geometry: missing key {e}") from None
    doping = cp["doping"] if "doping" in cp else {}
    layers = []
    for name, value in cp["stack"].items():
        parts = value.split()
        if len(parts) < 2:
            raise ParseError(f"stack entry {name!r}: need 'material thickness [label]'")
        material, thick = parts[0], parts[1]
        label = parts[2] if len(parts) > 2 else name
        try:
            t = float(thick)
        except ValueError:
            raise ParseError(f"stack entry {name!r}: bad thickness {thick!r}") from None
        if label == "buffer":
            t = spacing
        dop = float(doping.get(name, 0.0))
        layers.append(Layer(material, t, dop, label))
    return CrossSection(tuple(layers), ar_w, top_w, spacing)
