"""Non-unitary time evolution with overflow-safe renormalization.

States are renormalized to unit Dirac norm after every step and the
discarded scale is accumulated in ``log_scale``, so the physical state at
grid point ``n`` is ``exp(log_scale[n]) * states[n]``.

Deep in the broken phase the physical norm grows like ``exp(Lambda t)`` and
quantities such as the PT product, which stay O(1), are recovered from the
unit-norm state only after a cancellation of ``exp(2 Lambda t)``.  For those
checks :func:`propagate` accepts ``digits`` and carries the whole
trajectory in ``mpmath`` arithmetic at that precision.
"""

import math
from dataclasses import dataclass
from typing import List, Optional

import mpmath
import numpy as np

from .errors import NumericalFailureError, NumericalInputError, SpecError
from .linalg import as_matrix, as_vector, eig, expm, expm_mp

AMPLITUDE_FLOOR = 1e-9
DEFAULT_DT = 0.05


@dataclass(frozen=True)
class TimeGrid:
    """Uniform output grid ``0, dt, 2 dt, ...`` up to ``t_max`` (in 1/J)."""

    t_max: float
    dt: float = DEFAULT_DT

    def __post_init__(self):
        if not (math.isfinite(self.t_max) and math.isfinite(self.dt)):
            raise SpecError("t_max and dt must be finite", field="dt")
        if not 0 < self.dt <= self.t_max:
            raise SpecError(f"need 0 < dt <= t_max, got dt={self.dt}, t_max={self.t_max}", field="dt")

    def __len__(self):
        # tolerance keeps 0.3 / 0.1 from flooring to 2
        return int(math.floor(self.t_max / self.dt + 1e-9)) + 1

    @property
    def times(self):
        return self.dt * np.arange(len(self))


@dataclass
class StateTrajectory:
    grid: TimeGrid
    states: np.ndarray
    log_scale: np.ndarray
    # populated only by high-precision runs: per-step lists of mpmath.mpc
    hp_states: Optional[List[list]] = None
    hp_log_scale: Optional[list] = None
    digits: Optional[int] = None

    @property
    def times(self):
        return self.grid.times

    @property
    def dim(self):
        return self.states.shape[1]

    def physical_state(self, n):
        return np.exp(self.log_scale[n]) * self.states[n]


@dataclass
class PhaseSeries:
    """Adjacent-site phase differences in units of pi.

    ``theta[:, j]`` holds the bond between sites ``j + 1`` and ``j + 2``
    (1-based), i.e. the paper-style ``theta_{j+2}``.  Invalid entries, where
    one of the two amplitudes is below the floor, are NaN and flagged
    ``False`` in ``valid``.
    """

    times: np.ndarray
    theta: np.ndarray
    valid: np.ndarray

    @property
    def n_bonds(self):
        return self.theta.shape[1]

    def subsample(self, step):
        return PhaseSeries(self.times[::step], self.theta[::step], self.valid[::step])


def random_state(N, seed):
    """Random normalized state with amplitudes in (0, 1] and phases in (0, 2 pi]."""
    if N < 2:
        raise SpecError(f"N must be at least 2, got {N}", field="N")
    rng = np.random.default_rng(seed)
    amplitudes = 1.0 - rng.random(N)
    angles = 2 * np.pi * (1.0 - rng.random(N))
    psi = amplitudes * np.exp(1j * angles)
    return psi / np.linalg.norm(psi)


def dimer_propagator_closed_form(J, gamma, t):
    """``exp(-i H t)`` for the dimer ``-J sigma_x + i gamma sigma_z``.

    Uses ``cos(lt) 1 - i H sin(lt) / l`` with ``l = sqrt(J^2 - gamma^2)``,
    its hyperbolic continuation above threshold, and ``1 - i H t`` at
    ``gamma = J``.
    """
    H = np.array([[1j * gamma, -J], [-J, -1j * gamma]], dtype=complex)
    lam2 = J * J - gamma * gamma
    if lam2 >= 0:
        lam = math.sqrt(lam2)
        c = math.cos(lam * t)
        s = t * np.sinc(lam * t / np.pi)
    else:
        big = math.sqrt(-lam2)
        c = math.cosh(big * t)
        s = math.sinh(big * t) / big
    return c * np.eye(2, dtype=complex) - 1j * s * H


def invariant_digits(H, t_max, margin=25):
    """Working precision that keeps O(1) invariants accurate up to ``t_max``.

    The bilinear invariants lose ``2 Lambda t / ln 10`` digits to the growth
    of the dominant mode, plus the digits lost to a badly conditioned
    eigenbasis near an exceptional point.
    """
    dec = eig(H)
    growth = max(0.0, float(dec.values.imag.max()))
    cond = np.linalg.cond(dec.right_vectors)
    lost = 2 * growth * t_max / math.log(10) + 2 * math.log10(max(cond, 1.0))
    return int(margin + math.ceil(lost))


def _safe_norm(w):
    # plain norm squares the entries and overflows above ~1e154
    peak = np.max(np.abs(w))
    if not (math.isfinite(peak) and peak > 0):
        return peak
    return peak * np.linalg.norm(w / peak)


def propagate(H, psi0, grid, digits=None):
    """Evolve ``psi0`` under ``exp(-i H t)`` on ``grid``.

    The one-step propagator ``exp(-i H dt)`` is computed once and applied
    repeatedly; the state is renormalized after each step.

    Parameters
    ----------
    H : array_like, shape (N, N)
    psi0 : array_like, shape (N,)
        Initial state; need not be normalized.
    grid : TimeGrid
    digits : int, optional
        If given, evolve in ``mpmath`` arithmetic with this many decimal
        digits and keep the high-precision states on the trajectory.

    Raises
    ------
    NumericalFailureError
        If a step produces a zero or non-finite state.
    """
    H = as_matrix(H, "H")
    psi0 = as_vector(psi0, H.shape[0], "psi0")
    norm0 = np.linalg.norm(psi0)
    if norm0 == 0:
        raise NumericalInputError("initial state is zero")
    if digits is not None:
        return _propagate_mp(H, psi0, grid, int(digits))

    n_steps = len(grid)
    G = expm(-1j * grid.dt * H)
    states = np.empty((n_steps, H.shape[0]), dtype=complex)
    log_scale = np.empty(n_steps)
    states[0] = psi0 / norm0
    log_scale[0] = math.log(norm0)
    for n in range(1, n_steps):
        w = G @ states[n - 1]
        nrm = _safe_norm(w)
        if not (math.isfinite(nrm) and nrm > 0):
            raise NumericalFailureError(f"propagate: state became degenerate at step {n}", "propagate", n)
        states[n] = w / nrm
        log_scale[n] = log_scale[n - 1] + math.log(nrm)
    return StateTrajectory(grid, states, log_scale)


def _propagate_mp(H, psi0, grid, digits):
    N = H.shape[0]
    n_steps = len(grid)
    with mpmath.workdps(digits):
        Hm = mpmath.matrix(H.tolist())
        G = expm_mp(Hm * mpmath.mpc(0, -1) * mpmath.mpf(grid.dt), digits)
        rows = [[G[i, j] for j in range(N)] for i in range(N)]
        v = [mpmath.mpc(x) for x in psi0.tolist()]
        nrm = mpmath.sqrt(mpmath.fsum(abs(x) ** 2 for x in v))
        v = [x / nrm for x in v]
        ell = mpmath.log(nrm)
        hp_states, hp_log = [v], [ell]
        for n in range(1, n_steps):
            w = [mpmath.fdot(row, v) for row in rows]
            nrm = mpmath.sqrt(mpmath.fsum(abs(x) ** 2 for x in w))
            if nrm == 0 or not mpmath.isfinite(nrm):
                raise NumericalFailureError(f"propagate: state became degenerate at step {n}", "propagate", n)
            v = [x / nrm for x in w]
            ell = ell + mpmath.log(nrm)
            hp_states.append(v)
            hp_log.append(ell)
    states = np.array([[complex(x) for x in s] for s in hp_states])
    log_scale = np.array([float(x) for x in hp_log])
    return StateTrajectory(grid, states, log_scale, hp_states, hp_log, digits)


def phases(traj, floor=AMPLITUDE_FLOOR):
    """Adjacent-site phase differences ``(phi_k - phi_{k-1}) mod 2 pi`` in units of pi."""
    s = traj.states
    prod = s[:, 1:] * s[:, :-1].conj()
    theta = np.mod(np.angle(prod), 2 * np.pi) / np.pi
    theta[theta >= 2.0] = 0.0
    amp = np.abs(s)
    valid = np.minimum(amp[:, 1:], amp[:, :-1]) >= floor
    theta[~valid] = np.nan
    return PhaseSeries(traj.times, theta, valid)
