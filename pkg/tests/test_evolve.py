import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from ptlattice.errors import NumericalFailureError, NumericalInputError, SpecError
from ptlattice.evolve import (
    TimeGrid,
    dimer_propagator_closed_form,
    invariant_digits,
    phases,
    propagate,
    random_state,
)
from ptlattice.linalg import eig, expm
from ptlattice.models import LatticeSpec, build_hamiltonian


def dimer(gamma, J=1.0):
    return build_hamiltonian(LatticeSpec("dimer", J=J, gamma=gamma))


@pytest.mark.parametrize("t_max, dt, n", [(12, 0.05, 241), (0.3, 0.1, 4), (1.0, 1.0, 2), (1.0, 0.3, 4)])
def test_time_grid_length(t_max, dt, n):
    grid = TimeGrid(t_max, dt)
    assert len(grid) == n
    assert grid.times[0] == 0 and grid.times[-1] <= t_max + 1e-12


@pytest.mark.parametrize("t_max, dt", [(1.0, 0.0), (1.0, -0.1), (0.1, 0.2), (float("inf"), 0.1)])
def test_time_grid_rejects_bad_steps(t_max, dt):
    with pytest.raises(SpecError):
        TimeGrid(t_max, dt)


def test_random_state_normalized_and_deterministic():
    for seed in range(10):
        psi = random_state(6, seed)
        assert abs(np.linalg.norm(psi) - 1) < 1e-14
        np.testing.assert_array_equal(psi, random_state(6, seed))


def test_random_state_seeds_differ():
    diff = np.abs(random_state(6, 1) - random_state(6, 2)).max()
    assert diff > 1e-3
    # frozen from a direct evaluation of the seeded generator
    assert diff == pytest.approx(0.791, abs=1e-3)


def test_random_state_distribution():
    rng = np.random.default_rng(3)
    a = 1.0 - rng.random(5)
    phi = 2 * np.pi * (1.0 - rng.random(5))
    expected = a * np.exp(1j * phi)
    np.testing.assert_allclose(random_state(5, 3), expected / np.linalg.norm(expected), atol=1e-15)


def test_random_state_rejects_single_site():
    with pytest.raises(SpecError):
        random_state(1, 0)


def test_closed_form_at_zero_time():
    for gamma in (0.0, 0.5, 1.0, 2.0):
        np.testing.assert_array_equal(dimer_propagator_closed_form(1.0, gamma, 0.0), np.eye(2))


def test_closed_form_quarter_period_is_i_sigma_x():
    G = dimer_propagator_closed_form(1.0, 0.0, np.pi / 2)
    np.testing.assert_allclose(G, [[0, 1j], [1j, 0]], atol=1e-15)


def test_closed_form_at_exceptional_point_is_linear():
    t = 3.7
    G = dimer_propagator_closed_form(1.0, 1.0, t)
    np.testing.assert_allclose(G, np.eye(2) - 1j * dimer(1.0) * t, atol=1e-14)


def test_closed_form_continuous_across_threshold():
    t = 5.0
    below = dimer_propagator_closed_form(1.0, 1.0 - 1e-9, t)
    at = dimer_propagator_closed_form(1.0, 1.0, t)
    above = dimer_propagator_closed_form(1.0, 1.0 + 1e-9, t)
    assert np.abs(below - at).max() < 1e-6
    assert np.abs(above - at).max() < 1e-6


@pytest.mark.parametrize("gamma", [0.0, 0.5, 0.99, 1.0, 1.6])
def test_closed_form_matches_expm(gamma):
    for t in (0.5, 4.0, 9.0):
        ref = expm(-1j * dimer(gamma, J=1.3) * t)
        out = dimer_propagator_closed_form(1.3, gamma, t)
        assert np.abs(out - ref).max() < 1e-10 * max(1, np.abs(ref).max())


def test_hermitian_evolution_keeps_log_scale():
    H = build_hamiltonian(LatticeSpec("chain", 6))
    traj = propagate(H, random_state(6, 4), TimeGrid(50, 0.05))
    assert np.ptp(traj.log_scale) < 1e-10
    assert np.abs(np.linalg.norm(traj.states, axis=1) - 1).max() < 1e-12


def test_initial_log_scale_is_log_norm():
    traj = propagate(dimer(0.3), [3.0, 4.0], TimeGrid(1, 0.1))
    assert traj.log_scale[0] == pytest.approx(math.log(5.0))
    np.testing.assert_allclose(traj.states[0], [0.6, 0.8])


def test_growth_rate_above_threshold():
    traj = propagate(dimer(1.25), [1, 0], TimeGrid(60, 0.05))
    t, ell = traj.times, traj.log_scale
    late = t >= 20
    slope = np.polyfit(t[late], ell[late], 1)[0]
    assert slope == pytest.approx(0.75, rel=1e-2)
    # log|c|/t offsets decay like 1/t
    assert ell[-1] / t[-1] == pytest.approx(0.75, rel=3e-2)


@pytest.mark.parametrize("gamma", [0.2, 0.5, 0.9])
def test_reconstructed_state_matches_closed_form(gamma):
    psi0 = random_state(2, 11)
    traj = propagate(dimer(gamma), psi0, TimeGrid(10, 0.05))
    for n in range(0, len(traj.times), 20):
        exact = dimer_propagator_closed_form(1.0, gamma, traj.times[n]) @ psi0
        assert np.abs(traj.physical_state(n) - exact).max() < 1e-9


def test_semigroup_split_grid():
    H = build_hamiltonian(LatticeSpec("chain", 6, gamma=3.0, m0=2))
    psi0 = random_state(6, 2)
    whole = propagate(H, psi0, TimeGrid(8, 0.05))
    first = propagate(H, psi0, TimeGrid(4, 0.05))
    second = propagate(H, first.physical_state(-1), TimeGrid(4, 0.05))
    a = whole.states[-1] * np.exp(whole.log_scale[-1] - second.log_scale[-1])
    assert np.abs(a - second.states[-1]).max() < 1e-9


@pytest.mark.parametrize(
    "spec",
    [
        LatticeSpec("dimer", gamma=0.5),
        LatticeSpec("dimer", gamma=0.95),
        LatticeSpec("trimer", gamma=0.8),
        LatticeSpec("chain", 6, gamma=0.5, m0=3),
        LatticeSpec("chain", 6, gamma=0.3, m0=2),
        LatticeSpec("pst", 4, gamma=0.9),
    ],
    ids=lambda s: f"{s.variant.value}-{s.gamma}",
)
def test_log_scale_bounded_below_threshold(spec):
    H = build_hamiltonian(spec)
    kappa = np.linalg.cond(eig(H).right_vectors)
    for seed in range(1, 6):
        traj = propagate(H, random_state(spec.N, seed), TimeGrid(200, 0.05))
        assert np.ptp(traj.log_scale) < math.log(kappa)
        # no drift: the two halves reach the same band
        half = len(traj.log_scale) // 2
        assert abs(traj.log_scale[half:].max() - traj.log_scale[:half].max()) < 0.1 * math.log(kappa) + 1e-9


def test_high_precision_path_agrees_with_double():
    H = build_hamiltonian(LatticeSpec("chain", 6, gamma=3.0, m0=2))
    psi0 = random_state(6, 5)
    grid = TimeGrid(6, 0.05)
    fast = propagate(H, psi0, grid)
    exact = propagate(H, psi0, grid, digits=40)
    assert exact.hp_states is not None and exact.digits == 40
    assert np.abs(fast.states - exact.states).max() < 1e-10
    assert np.abs(fast.log_scale - exact.log_scale).max() < 1e-10


def test_propagate_input_errors():
    with pytest.raises(NumericalInputError):
        propagate(dimer(0.1), [0, 0], TimeGrid(1, 0.1))
    with pytest.raises(NumericalInputError):
        propagate(dimer(0.1), [1, 0, 0], TimeGrid(1, 0.1))
    with pytest.raises(NumericalInputError):
        propagate(dimer(0.1), [np.nan, 1], TimeGrid(1, 0.1))


def test_overflowing_step_reports_failure():
    with pytest.raises(NumericalFailureError) as info:
        propagate(np.diag([1e306j, 0]), [1, 1], TimeGrid(1, 0.5))
    assert info.value.operation == "expm"


def test_large_single_step_growth_is_handled():
    traj = propagate(np.diag([1e3j, 0]), [1, 1], TimeGrid(1, 0.5))
    assert traj.log_scale[-1] == pytest.approx(1000.0, rel=1e-12)


def test_invariant_digits_grows_with_time():
    H = build_hamiltonian(LatticeSpec("chain", 6, gamma=3.0, m0=2))
    short, long = invariant_digits(H, 5), invariant_digits(H, 20)
    assert long > short > 25
    # only roundoff-level growth for a Hermitian chain
    assert invariant_digits(build_hamiltonian(LatticeSpec("chain", 6)), 100) <= 26


def test_dimer_site_state_phase_is_quarter_turn():
    traj = propagate(dimer(0.0), [1, 0], TimeGrid(10, 0.05))
    ps = phases(traj)
    theta = ps.theta[1:, 0][ps.valid[1:, 0]]
    assert theta.size > 0
    dist = np.minimum(np.abs(theta - 0.5), np.abs(theta - 1.5))
    assert dist.max() < 1e-9
    # amplitude on site 2 vanishes at t = 0
    assert not ps.valid[0, 0]


def test_real_state_has_zero_phases():
    traj = propagate(build_hamiltonian(LatticeSpec("chain", 5)), np.ones(5), TimeGrid(1, 0.1))
    np.testing.assert_array_equal(phases(traj).theta[0], np.zeros(4))


def test_phases_range_and_mask():
    H = build_hamiltonian(LatticeSpec("chain", 6, gamma=3.0, m0=2))
    ps = phases(propagate(H, random_state(6, 1), TimeGrid(12, 0.05)))
    vals = ps.theta[ps.valid]
    assert vals.min() >= 0 and vals.max() < 2
    assert np.all(np.isnan(ps.theta[~ps.valid]))
    assert ps.n_bonds == 5
    sub = ps.subsample(2)
    assert len(sub.times) == (len(ps.times) + 1) // 2


@settings(max_examples=25, deadline=None)
@given(st.floats(0, 2 * np.pi), st.integers(0, 1000))
def test_phases_gauge_invariant(alpha, seed):
    H = build_hamiltonian(LatticeSpec("chain", 5, gamma=1.3, m0=1))
    psi0 = random_state(5, seed)
    grid = TimeGrid(3, 0.1)
    a = phases(propagate(H, psi0, grid))
    b = phases(propagate(H, np.exp(1j * alpha) * psi0, grid))
    diff = np.abs(a.theta - b.theta)
    diff = np.minimum(diff, 2 - diff)
    assert np.nanmax(diff) < 1e-12
