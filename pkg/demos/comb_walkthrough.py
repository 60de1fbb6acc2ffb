"""Modulated ring-laser comb in a nutshell: a single lasing mode spreads
into a comb when the RF modulation is near the roundtrip frequency, and the
comb is widest at zero detuning when dispersion is flat.

Runs in under a minute.
"""

import numpy as np

from dualwg.comb import (CombParams, classify_spectrum, comb_bandwidth,
                         rf_detuning_sweep, simulate_comb, single_site_state)

p = CombParams(mode_count=257, f_rep_ghz=15.691, mod_index=1.2, lef=1.5,
               gain=2.0, loss=1.0, noise_rate=1e-4)

print("1) no modulation: a single mode saturates at P_sat (g0/a - 1)")
p0 = CombParams(mode_count=257, mod_index=0.0, gain=2.0, loss=1.0)
quiet = simulate_comb(p0, t_end_ns=100.0, seed=0,
                      initial=single_site_state(p0))
print(f"   total power {quiet.power:.3f}, "
      f"state: {classify_spectrum(quiet.spectrum())}")

print("2) resonant modulation: the power spreads over the mode lattice")
comb = simulate_comb(p, t_end_ns=100.0, seed=0)
spec = comb.spectrum()
bw = comb_bandwidth(spec, p.line_spacing_cm)
print(f"   bandwidth {bw:.1f} cm^-1 "
      f"({classify_spectrum(spec)} envelope at this snapshot)")

print("3) detuning sweep across f_rep (5 points, warm start)")
smap = rf_detuning_sweep(p, p.f_rep_ghz - 0.05, p.f_rep_ghz + 0.05, 5,
                         t_end_ns=100.0, seed=0)
for f, row in zip(smap.sweep_axis, smap.intensity):
    bw = comb_bandwidth(row, p.line_spacing_cm) if row.max() > 0 else 0.0
    delta = (f - p.f_rep_ghz) * 1e3
    print(f"   delta = {delta:+6.1f} MHz -> bandwidth {bw:5.1f} cm^-1")
print("the comb is widest near zero detuning; large third-order dispersion")
print("(d3) collapses it there instead - see the rf-map CLI subcommand.")
