"""
Dimer and trimer
================

Two- and three-site PT-symmetric lattices: the propagator in closed form,
the threshold at gamma = J, and the PT product that stays constant even
when the norm grows.
"""

# %%
import numpy as np
import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt

from ptlattice import (
    LatticeSpec,
    TimeGrid,
    build_hamiltonian,
    dimer_propagator_closed_form,
    eig,
    expm,
    invariant_series,
    parity_matrix,
    phases,
    propagate,
)

# %% [markdown]
# Below threshold the eigenvalues are +-sqrt(J^2 - gamma^2); above it they
# turn into an imaginary pair.

# %%
for gamma in (0.0, 0.6, 1.0, 1.25):
    H = build_hamiltonian(LatticeSpec("dimer", gamma=gamma))
    print(f"gamma={gamma:4}:", np.round(eig(H, vectors=False).values, 6))

# %%
# the scaling-and-squaring exponential against the closed form
H = build_hamiltonian(LatticeSpec("dimer", gamma=0.5))
G = expm(-2j * H)
print("max |expm - closed form| =", np.abs(G - dimer_propagator_closed_form(1.0, 0.5, 2.0)).max())

# %% [markdown]
# Starting on site 1 with gamma = 0 the relative phase sits at pi/2 or
# 3 pi/2; above threshold the norm grows like exp(Lambda t) with
# Lambda = sqrt(gamma^2 - J^2).

# %%
grid = TimeGrid(30, 0.05)
traj = propagate(build_hamiltonian(LatticeSpec("dimer", gamma=1.25)), [1, 0], grid)
late = traj.times > 20
slope = np.polyfit(traj.times[late], traj.log_scale[late], 1)[0]
print("growth rate", slope, "expected", np.sqrt(1.25**2 - 1))

ps = phases(propagate(build_hamiltonian(LatticeSpec("dimer")), [1, 0], grid))
print("theta_2 values seen:", np.unique(np.round(ps.theta[ps.valid[:, 0], 0], 6)))

# %%
# PT product of the trimer: a2^2 + 2 a1 a3 cos(phi3 - phi1), conserved
H3 = build_hamiltonian(LatticeSpec("trimer", gamma=0.7))
psi0 = np.array([0.6, 0.3j, 0.74])
traj3 = propagate(H3, psi0, TimeGrid(40, 0.05))
series = invariant_series(traj3, parity_matrix(3))
print("reference", series.reference.real, "drift", series.max_relative_drift)

fig, ax = plt.subplots(2, 1, sharex=True, figsize=(6, 5))
ax[0].plot(traj3.times, traj3.log_scale)
ax[0].set_ylabel("log norm")
ax[1].plot(traj3.times, series.values.real)
ax[1].set_ylabel("PT product")
ax[1].set_xlabel("t J")
fig.savefig("dimer_trimer.png", dpi=100)
