"""Facet reflectivity control with a single dielectric film.

An uncoated facet of modal index ~3.19 reflects 27%; a 700 nm alumina film
drops that to ~8%, boosting outcoupled power; a quarter-wave film nulls it.
"""

from dualwg.materials import refractive_index
from dualwg.tmm import CoatingStack, facet_reflectivity, quarter_wave_coating

NU = 2222.0   # cm^-1, band center
N_FACET = 3.19

bare = facet_reflectivity(N_FACET, None, NU)
print(f"bare facet:            R = {bare:.3f}")

n_al2o3 = refractive_index("Al2O3", NU).real
coated = facet_reflectivity(N_FACET, CoatingStack(((n_al2o3, 0.7),)), NU)
print(f"700 nm Al2O3 (n={n_al2o3:.2f}): R = {coated:.3f}")

qw = quarter_wave_coating(N_FACET, NU)
print(f"ideal quarter-wave:    R = {facet_reflectivity(N_FACET, qw, NU):.2e}")

print("\nthickness scan:")
for t in (0.3, 0.5, 0.7, 0.9, 1.1):
    r = facet_reflectivity(N_FACET, CoatingStack(((n_al2o3, t),)), NU)
    print(f"  {t:.1f} um -> R = {r:.3f}")
