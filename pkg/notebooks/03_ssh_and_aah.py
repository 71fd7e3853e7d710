"""
Dimerized and period-3 chains
=============================

The locking pattern survives non-uniform tunneling.  A stronger SSH
dimerization slows the approach to the locked values; the AAH chain with a
period-3 profile is not parity symmetric but still locks.
"""

# %%
import warnings

import numpy as np

from ptlattice import LatticeSpec, TimeGrid, build_hamiltonian, check_pt_symmetry, detect_locking, parity_matrix, phases, propagate, random_state
from ptlattice.models import AAHCommensurabilityWarning

# %%
for delta in (0.1, 0.9):
    spec = LatticeSpec("ssh", 8, gamma=2.0, m0=3, delta=delta)
    times = []
    for seed in range(1, 6):
        report = detect_locking(phases(propagate(build_hamiltonian(spec), random_state(8, seed), TimeGrid(40, 0.05))))
        times.append(report.convergence_time)
    print(f"delta={delta}: {report.snapped}  convergence times {np.round(times, 2)}")

# %%
warnings.simplefilter("ignore", AAHCommensurabilityWarning)
for m0 in (3, 6):
    spec = LatticeSpec("aah", 8, gamma=1.0, m0=m0, period_profile=(1.0, 0.8, 0.4))
    H = build_hamiltonian(spec)
    report = detect_locking(phases(propagate(H, random_state(8, 1), TimeGrid(40, 0.05))))
    print(f"m0={m0}: PT residual {check_pt_symmetry(H, parity_matrix(8)):.3f}  values {np.round(report.values, 3)}")
