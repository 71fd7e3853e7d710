"""
Two-tunneling rings
===================

Close the chain into a ring, with tunneling J on the arc from gain to loss
and J' elsewhere.  The threshold moves to |J - J'| (for rings of 4n sites)
and the locked phases are no longer multiples of pi/2.
"""

# %%
import numpy as np

from ptlattice import LatticeSpec, TimeGrid, build_hamiltonian, detect_locking, phases, propagate, pt_threshold, random_state

# %%
for N in (5, 8):
    for jp in (0.0, 0.25, 0.5, 0.75):
        g = pt_threshold(LatticeSpec("ring", N, m0=1, jprime=jp), 3.0).gamma_pt
        print(f"N={N} J'={jp}: gamma_PT={g:.4f}  |J-J'|={abs(1 - jp)}")

# %%
for m0 in (1, 2):
    spec = LatticeSpec("ring", 5, gamma=1.8, m0=m0, jprime=0.5)
    for seed in (1, 2):
        report = detect_locking(phases(propagate(build_hamiltonian(spec), random_state(5, seed), TimeGrid(40, 0.05))))
        print(f"m0={m0} seed={seed}:", np.round(report.values, 4))

# %%
spec = LatticeSpec("ring", 11, gamma=1.5, m0=1, jprime=0.01)
report = detect_locking(phases(propagate(build_hamiltonian(spec), random_state(11, 1), TimeGrid(40, 0.05))))
print("N=11 values:", np.round(report.values, 3))
print("snapped:    ", report.snapped)
