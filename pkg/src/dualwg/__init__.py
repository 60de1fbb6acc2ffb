"""dualwg: design and analysis toolkit for dual-waveguide ring quantum
cascade lasers."""

__version__ = "0.1.0"

from .materials import MaterialDB, default_db, effective_medium_index, refractive_index
from .stacks import (
    CrossSection,
    Layer,
    PeriodStack,
    narrow_device,
    parse_period,
    serialize_period,
    wide_device,
)
from .grid import PermittivityGrid, build_permittivity_grid
from .slab import SlabSolution, solve_slab
from .modes import (
    ModeSolution,
    classify_parity,
    decompose_on_isolated_modes,
    modal_loss,
    overlap_factor,
    solve_modes_2d,
    vertical_parity,
)
from .dispersion import (
    DesignTable,
    DispersionCurve,
    group_index,
    gvd_tod,
    sweep_neff,
    width_design_sweep,
)
from .tmm import CoatingStack, facet_reflectivity, quarter_wave_coating
from .comb import (
    CombParams,
    CombState,
    InstabilityError,
    SpectralMap,
    TruncationError,
    classify_spectrum,
    comb_bandwidth,
    dispersion_rates,
    rf_detuning_sweep,
    simulate_comb,
    single_site_state,
)
from .liv import (
    LIVCurve,
    analyze_map,
    channel_anticorrelation,
    load_liv,
    load_map,
    power_oscillation_metric,
    save_liv,
    save_map,
    threshold_and_slope,
)
