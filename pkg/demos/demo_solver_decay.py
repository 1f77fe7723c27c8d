"""Mild-solution stepping and the decay ladder of a small planar run.

Run:  python3 demos/demo_solver_decay.py        (about a minute)
"""

import numpy as np

from driftlab.functionals import lq_norm, moments
from driftlab.grid import GridSpec
from driftlab.solver import SolverConfig, gaussian_data, run
from driftlab.verifier import fit_decay

spec = GridSpec(n=2, L=120.0, N=256, theta=1.0)
u0 = gaussian_data(spec, amplitude=0.8, width=2.0, center=(1.0, 0.0))
ladder = tuple(float(t) for t in np.geomspace(4.0, 40.0, 7))
cfg = SolverConfig(spec=spec, dt0=0.05, t_end=40.0, snapshot_times=ladder)
traj = run(cfg, u0)

rec = moments(u0)
print("initial mass:", rec.M, " first moment:", rec.m)
print("\n   t        |u|_1        |u|_2        |u|_inf      mass drift")
for t, f in zip(traj.times, traj.fields):
    print(f"  {t:6.2f}  {lq_norm(f, 1):.6e}  {lq_norm(f, 2):.6e}  "
          f"{lq_norm(f, np.inf):.6e}  {abs(f.mass - rec.M):.1e}")

slope2, _ = fit_decay(traj.times, [lq_norm(f, 2) for f in traj.fields])
slopeI, _ = fit_decay(traj.times, [lq_norm(f, np.inf) for f in traj.fields])
print("\nfitted L2 slope:", f"{slope2:.3f}", " (dimensional analysis: -1.0)")
print("fitted sup slope:", f"{slopeI:.3f}", " (dimensional analysis: -2.0)")
