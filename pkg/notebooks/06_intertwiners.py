"""
How many invariants?
====================

Every Hermitian eta with eta H = H^dagger eta gives a conserved
<psi|eta|psi>.  The parity matrix is one of them; the search below finds
the whole space numerically and checks each element along a trajectory.
"""

# %%
import numpy as np

from ptlattice import (
    LatticeSpec,
    TimeGrid,
    build_hamiltonian,
    find_intertwiners,
    invariant_digits,
    invariant_series,
    parity_matrix,
    propagate,
    random_state,
)

# %%
for spec in (
    LatticeSpec("dimer", gamma=0.5),
    LatticeSpec("trimer", gamma=0.5),
    LatticeSpec("chain", 6, gamma=0.5, m0=2),
    LatticeSpec("chain", 6, gamma=3.0, m0=2),
    LatticeSpec("ring", 5, gamma=1.8, m0=2, jprime=0.5),
):
    H = build_hamiltonian(spec)
    basis = find_intertwiners(H)
    print(f"{spec.variant.value:7s} N={spec.N} gamma={spec.gamma}: dimension {basis.dimension}, "
          f"P residual {basis.projection_residual(parity_matrix(spec.N)):.1e}")

# %% [markdown]
# Deep in the broken phase the norm grows like exp(2 Lambda t) inside the
# bilinear form, so the certification runs in extended precision.

# %%
H = build_hamiltonian(LatticeSpec("chain", 6, gamma=3.0, m0=2))
digits = invariant_digits(H, 12)
basis = find_intertwiners(H, digits=digits)
traj = propagate(H, random_state(6, 3), TimeGrid(12, 0.05), digits=digits)
drifts = [invariant_series(traj, eta).max_relative_drift for eta in basis.exact_basis]
print("digits", digits, "largest drift", max(drifts))

fast = propagate(H, random_state(6, 3), TimeGrid(12, 0.05))
print("same check in double precision:", invariant_series(fast, parity_matrix(6)).max_relative_drift)
