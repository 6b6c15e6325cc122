"""Isoperimetric profiles of the 1-D factor measures.

For a log-concave measure on the line the minimal boundary mass at level a
is attained by half-lines, so the profile is just the density evaluated at
the a- and (1-a)-quantiles.  At p = 1 the two-sided factor gives the tent
min(a, 1-a) exactly; for p > 1 the profile dips below the tent near the
middle and the one-sided factor nu_p stays within a bounded band of it.
"""

import numpy as np

from isoplab import bobkov_profile, make_mu_p, make_nu_p, profile_comparison

grid = np.linspace(0.05, 0.95, 19)

mu1 = make_mu_p(1.0)
print("p = 1 tent check: max |profile - min(a, 1-a)| =",
      max(abs(bobkov_profile(mu1, a).boundary_mass - min(a, 1 - a))
          for a in grid))

for p in (1.5, 2.0):
    mu = make_mu_p(p)
    nu = make_nu_p(p)
    print(f"\np = {p}:   a    mu profile   nu profile")
    for a in (0.1, 0.25, 0.5):
        print(f"      {a:5.2f}   {bobkov_profile(mu, a).boundary_mass:.6f}"
              f"     {bobkov_profile(nu, a).boundary_mass:.6f}")

# ratio of each profile to the tent, over a finer grid
comp = profile_comparison(2.0, np.linspace(0.01, 0.99, 99))
print("\np = 2 profile/tent ratios over (0,1):")
print("  mu: min %.4f  max %.4f" % (comp.mu_ratios.min(), comp.mu_ratios.max()))
print("  nu: min %.4f  max %.4f" % (comp.nu_ratios.min(), comp.nu_ratios.max()))
