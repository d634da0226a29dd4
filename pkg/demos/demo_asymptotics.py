"""Near-threshold behaviour of the shallowest bound state, sector by sector.

Each sector has a different law for the gap alpha = E - e_max as the
coupling approaches its threshold: linear in the even-antisymmetric sector,
linear with a logarithmic correction in the odd sectors, and exponentially
small in the even-symmetric sector. The closed-form rates are compared with
fits against the determinant root.
"""

import numpy as np

from lattice_spectra import asymptotics as asy
from lattice_spectra.dispersion import DiscreteLaplacian, PI

lap = DiscreteLaplacian()

coef = asy.leading_coefficients(lap, 1.0, 1.0)
print("leading coefficients for a = b = 1")
print("-" * 60)
print(f"c_os  = {coef.c_os:.8f}   (pi / gamma_os^2 = "
      f"{PI / (PI / (2 * PI - 4)) ** 2:.8f})")
print(f"c_ea  = {coef.c_ea:.8f}")
print(f"es exponential rate = {coef.es_exponent_rate:.8f}   "
      f"(2 pi / 5 = {2 * PI / 5:.8f})")
print(f"Lambda = {coef.Lambda:.8f}   (pi / 10 = {PI / 10:.8f})")
print(f"c_es_linear = {coef.c_es_linear:.8f}")

print()
print("ea sector: alpha ~ c_ea * lambda, lambda = mu - mu0")
rep = asy.fit_eigenvalue_asymptotics(lap, "ea", 1.0, 1.0)
for lam, alpha, _ in rep.samples:
    print(f"  lambda = {lam:.2e}   alpha/lambda = {alpha / lam:.8f}")
print(f"predicted slope {rep.predicted:.8f}, rel err {rep.relative_error:.2e}")

print()
print("os sector: alpha ~ c_os * lambda / (-ln lambda), ratio -> 1")
rep = asy.fit_eigenvalue_asymptotics(lap, "os", 1.0, 1.0)
for lam, alpha, pred in rep.samples:
    print(f"  lambda = {lam:.2e}   alpha / prediction = {alpha / pred:.4f}")

print()
print("es sector: alpha ~ exp(-rate / mu) as mu -> 0")
rep = asy.fit_eigenvalue_asymptotics(lap, "es", 1.0, 1.0, branch="exponential")
print(f"fitted rate {rep.measured:.6f} vs 2 pi / 5 = {rep.predicted:.6f}, "
      f"rel err {rep.relative_error:.2e}")

print()
print("log coefficient of the resolvent integral (v = 1): -2 pi")
one = lambda p1, p2: np.ones_like(np.asarray(p1, dtype=float))
rep = asy.extract_log_coefficient(lap, one)
print(f"measured {rep.measured:.8f} vs {rep.predicted:.8f}, "
      f"rel err {rep.relative_error:.2e}")
