"""
Perfect-state-transfer chain
============================

Tunneling sqrt(k(N-k))/2 and a linear gain-loss ramp: the spectrum is
equidistant, m sqrt(J^2 - gamma^2), so below threshold the phases are
periodic, and above threshold every bond locks, at 3 pi/2 for gain on the
right half and pi/2 when the sign of gamma is flipped.
"""

# %%
import numpy as np

from ptlattice import LatticeSpec, TimeGrid, build_hamiltonian, detect_locking, eig, estimate_period, phases, propagate, random_state

# %%
spec = LatticeSpec("pst", 4, gamma=0.9)
H = build_hamiltonian(spec)
values = np.sort(eig(H, vectors=False).values.real)
lam = np.sqrt(1 - 0.9**2)
print("eigenvalues / lambda:", np.round(values / lam, 8))

ps = phases(propagate(H, random_state(4, 1), TimeGrid(100, 0.05)))
for bond in (2, 3, 4):
    est = estimate_period(ps, bond)
    print(f"theta_{bond}: period {est.period:.4f}  (pi/lambda = {np.pi / lam:.4f}, 2 pi/lambda = {2 * np.pi / lam:.4f})")

# %% [markdown]
# The phase differences repeat only after 2 pi / lambda: the spectrum is a
# ladder with spacing lambda, and the amplitudes themselves need the full
# ladder period to come back.

# %%
for gamma in (1.005, -1.005):
    report = detect_locking(phases(propagate(build_hamiltonian(spec.with_gamma(gamma)), random_state(4, 2), TimeGrid(300, 0.05))))
    print(f"gamma={gamma:+}: {report.snapped}")
