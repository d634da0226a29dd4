"""Discrete spectrum above the band, eigenvalue curves, and the phase diagram.

Solves the four sector determinants for a reference configuration, follows
one eigenvalue branch in the coupling, and prints a coarse ASCII map of the
bound-state count over the (a, b) plane at fixed coupling.
"""

import numpy as np

from lattice_spectra.dispersion import DiscreteLaplacian
from lattice_spectra.spectrum import (eigenvalue_curve, phase_diagram,
                                      predicted_sector_counts, solve,
                                      triple_emergence_check)

lap = DiscreteLaplacian()

a, b, mu = 1.0, 3.0, 1.0
res = solve(lap, a, b, mu)
print(f"spectrum above the band for a={a:g}, b={b:g}, mu={mu:g}")
print("-" * 60)
for rec in sorted(res.records, key=lambda r: -r.energy):
    print(f"  sector {rec.sector:3s}  E = {rec.energy:.12f}  "
          f"depth {rec.energy - lap.e_max:.3e}  mult {rec.multiplicity}")
print(f"counts by sector: {res.sector_counts()}")
print(f"predicted by count table: {predicted_sector_counts(lap, a, b, mu)}")

print()
print("ea branch E(mu): increasing and convex in the coupling")
mus = np.linspace(2.0, 3.5, 9)
rep = eigenvalue_curve(lap, "ea", 1.0, 1.0, mus)
for m, e in zip(mus, rep.energies):
    print(f"  mu = {m:.4f}   E = {e:.10f}")
print(f"strictly increasing: {rep.strictly_increasing}, "
      f"min second difference: {rep.min_second_difference:.2e}")

print()
print("bound-state count over (a, b) at mu = 3")
grid_a = np.linspace(-3.0, 3.0, 13)
grid_b = np.linspace(-2.0, 2.0, 9)
grid_a = grid_a[grid_a != 0]
grid_b = grid_b[grid_b != 0]
pd = phase_diagram(lap, 3.0, grid_a, grid_b)
count_of = {(c.a, c.b): c.count for c in pd.cells}
for bj in grid_b[::-1]:
    row = "".join(f"{count_of[(ai, bj)]:2d}" for ai in grid_a)
    print(f"  b={bj:+5.2f} |{row}")
print(f"           a from {grid_a[0]:+g} to {grid_a[-1]:+g}, left to right")

print()
print("triple emergence: three states appear at once along a = (2 pi - 4) b")
tr = triple_emergence_check(lap, 1.0)
print(f"  located a* = {tr.a:.9f}  (2 pi - 4 = {2 * np.pi - 4:.9f})")
print(f"  total count jumps {tr.count_below} -> {tr.count_above}")
