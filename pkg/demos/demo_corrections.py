"""Correction fields: self-similar scaling and the short-time divergence.

Run:  python3 demos/demo_corrections.py        (couple of minutes)
"""

import numpy as np

from driftlab.corrections import (build_J, jtilde_cutoff_study, windowed_lq)
from driftlab.functionals import lq_norm
from driftlab.grid import GridSpec

# the planar correction obeys an exact power scaling in time
spec = GridSpec(n=2, L=15.0, N=512, theta=1.0)
j1 = build_J(spec, 1.0)
j2 = build_J(spec, 2.0)
lam0 = 4.0
ratio = windowed_lq(j2, 1, 2 * lam0) / windowed_lq(j1, 1, lam0)
print("||J(2)||_1 / ||J(1)||_1 =", f"{ratio:.5f}", " predicted 0.5")
print("correction mass (exactly zero):", j1.mass)
print("||J(1)||_1 =", f"{lq_norm(j1, 1):.5f}", "(nontrivial)")

# at n = 3 the naive short-time integrand diverges like 1/s; the first-moment
# counter-term renders it flat
spec3 = GridSpec(n=3, L=12.0, N=96, theta=1.0)
table = jtilde_cutoff_study(spec3, 1.0)
print("\n  s        naive |integrand|_1   counter-termed")
for s in sorted(table, reverse=True):
    naive, bracket = table[s]
    print(f"  {s:7.4f}  {naive:12.5f}       {bracket:.6f}")
