"""Thresholds, phase-locking detection and oscillation periods."""

import math
from dataclasses import asdict, dataclass
from typing import List, Optional, Tuple

import numpy as np
from scipy.signal import peak_prominences

from .errors import SpecError
from .linalg import eig
from .models import build_hamiltonian

SCAN_POINTS = 200
# |Im lambda| above this (in units of J) counts as complex
COMPLEX_TOL = 1e-8
DEFAULT_WINDOW = 0.2
DEFAULT_LOCK_TOL = 0.02
SNAP_TOL = 0.05
MIN_WINDOW_SAMPLES = 20


def count_complex(H, J=1.0):
    """Number of eigenvalues of ``H`` with ``|Im| > 1e-8 J``."""
    values = eig(H, vectors=False).values
    return int(np.sum(np.abs(values.imag) > COMPLEX_TOL * J))


def _spectrum_stats(H, J):
    """Complex-eigenvalue count and whether a single mode grows fastest."""
    values = eig(H, vectors=False).values
    n_complex = int(np.sum(np.abs(values.imag) > COMPLEX_TOL * J))
    growth = np.sort(values.imag)[::-1]
    single_leader = len(growth) < 2 or growth[0] - growth[1] > COMPLEX_TOL * J
    return n_complex, bool(single_leader)


@dataclass
class ThresholdResult:
    """PT threshold and onset of the fully broken regime, in units of J.

    ``gamma_full`` is the larger of two onsets: where the complex-eigenvalue
    count first reaches its scan maximum, and where the final scanned
    stretch begins on which one eigenvalue has a strictly larger imaginary
    part than all others.

    ``found`` is False (and both thresholds ``None``) when no complex
    eigenvalue appears up to the scanned ``gamma_max``.
    """

    found: bool
    gamma_pt: Optional[float]
    gamma_full: Optional[float]
    max_complex: int
    complex_count_curve: List[Tuple[float, int]]
    bracket: Optional[Tuple[float, float]]
    bracket_width: Optional[float]

    def to_dict(self):
        return asdict(self)


def _bisect(predicate, lo, hi, tol):
    # predicate(lo) is False, predicate(hi) is True
    while hi - lo > tol:
        mid = 0.5 * (lo + hi)
        if predicate(mid):
            hi = mid
        else:
            lo = mid
    return lo, hi


def pt_threshold(spec, gamma_max, tol=1e-6, points=SCAN_POINTS):
    """Locate the PT-breaking threshold of ``spec`` by scan and bisection.

    ``gamma`` is scanned on ``points`` values in ``[0, gamma_max]``; the first
    bracket in which an eigenvalue turns complex is bisected to width
    ``tol``.  ``gamma_full`` marks where the spectrum becomes fully broken:
    the complex count has reached its scan maximum and, from there to the
    end of the scan, a single mode grows fastest (complex quartets with
    equal growth rates keep the phases beating).  Both onsets are located
    on the scan and refined the same way.
    """
    if not gamma_max > 0:
        raise SpecError(f"gamma_max must be positive, got {gamma_max}", field="gamma_max")
    if not tol > 0:
        raise SpecError(f"tol must be positive, got {tol}", field="tol")

    def stats(g):
        return _spectrum_stats(build_hamiltonian(spec.with_gamma(g)), spec.J)

    grid = np.linspace(0.0, gamma_max, points)
    scan = [stats(g) for g in grid]
    counts = [c for c, _ in scan]
    curve = [(float(g), c) for g, c in zip(grid, counts)]
    max_count = max(counts)
    if max_count == 0:
        return ThresholdResult(False, None, None, 0, curve, None, None)

    first = next(i for i, c in enumerate(counts) if c > 0)
    if first == 0:
        lo = hi = 0.0
    else:
        lo, hi = _bisect(lambda g: stats(g)[0] > 0, grid[first - 1], grid[first], tol)
    gamma_pt = 0.5 * (lo + hi)

    def refine(predicate, idx):
        if idx == 0:
            return 0.0
        a, b = _bisect(predicate, grid[idx - 1], grid[idx], tol)
        return 0.5 * (a + b)

    saturate = next(i for i, c in enumerate(counts) if c >= max_count)
    gamma_full = refine(lambda g: stats(g)[0] >= max_count, saturate)
    lead = len(grid)
    while lead > 0 and scan[lead - 1][1]:
        lead -= 1
    if lead < len(grid):
        gamma_full = max(gamma_full, refine(lambda g: stats(g)[1], lead))
    return ThresholdResult(True, gamma_pt, max(gamma_full, gamma_pt), max_count, curve, (lo, hi), hi - lo)


@dataclass
class BondLock:
    """Locking verdict for one bond, labelled by its right-hand site ``bond`` (2..N).

    Values are in units of pi.  ``saturated`` is ``None`` when the bond has no
    valid samples in the window.
    """

    bond: int
    saturated: Optional[bool]
    value: Optional[float]
    spread: Optional[float]
    snapped: Optional[float]
    convergence_time: Optional[float]

    @property
    def locked_value(self):
        """Snapped value if there is one, otherwise the raw circular mean."""
        return self.snapped if self.snapped is not None else self.value


@dataclass
class LockingReport:
    bonds: List[BondLock]
    window_fraction: float
    tol: float
    snap_tol: float

    @property
    def all_saturated(self):
        return all(b.saturated for b in self.bonds)

    @property
    def snapped(self):
        return tuple(b.snapped for b in self.bonds)

    @property
    def values(self):
        return tuple(b.value for b in self.bonds)

    @property
    def convergence_time(self):
        """Latest per-bond convergence time, or ``None`` unless every bond saturated."""
        if not self.all_saturated:
            return None
        return max(b.convergence_time for b in self.bonds)

    def to_dict(self):
        out = asdict(self)
        out["all_saturated"] = self.all_saturated
        out["convergence_time"] = self.convergence_time
        return out


def _wrap(x):
    """Map phase offsets (units of pi) into [-1, 1)."""
    return np.mod(x + 1.0, 2.0) - 1.0


def _circular_mean(values):
    z = np.exp(1j * np.pi * values).mean()
    return float(np.mod(np.angle(z) / np.pi, 2.0))


def _snap(value, snap_tol):
    k = round(value / 0.5)
    if abs(_wrap(value - 0.5 * k)) <= snap_tol:
        return float(np.mod(0.5 * k, 2.0))
    return None


def detect_locking(ps, window_fraction=DEFAULT_WINDOW, tol=DEFAULT_LOCK_TOL, snap_tol=SNAP_TOL):
    """Decide which bonds' phase differences have saturated.

    A bond is saturated when the circular spread of its valid samples over
    the trailing ``window_fraction`` of the run is below ``tol``.  All
    tolerances are in units of pi.

    The saturation value is the circular mean of the window.  The
    convergence time of a saturated bond is the earliest grid time from
    which the spread of the whole remaining series stays below ``tol``.
    """
    n_times = len(ps.times)
    width = int(math.ceil(window_fraction * n_times))
    if width < MIN_WINDOW_SAMPLES:
        raise SpecError(
            f"locking window holds {width} samples, need at least {MIN_WINDOW_SAMPLES}", field="window_fraction"
        )

    bonds = []
    for j in range(ps.n_bonds):
        label = j + 2
        valid = ps.valid[:, j]
        window = ps.theta[-width:, j][valid[-width:]]
        if window.size == 0:
            bonds.append(BondLock(label, None, None, None, None, None))
            continue
        mean = _circular_mean(window)
        offsets = _wrap(window - mean)
        spread = float(offsets.max() - offsets.min())
        saturated = spread < tol
        snapped = _snap(mean, snap_tol) if saturated else None
        conv = None
        if saturated:
            off = _wrap(ps.theta[:, j] - mean)
            hi = np.where(valid, off, -np.inf)
            lo = np.where(valid, off, np.inf)
            suffix_spread = np.maximum.accumulate(hi[::-1])[::-1] - np.minimum.accumulate(lo[::-1])[::-1]
            conv = float(ps.times[int(np.argmax(suffix_spread < tol))])
        bonds.append(BondLock(label, saturated, mean, spread, snapped, conv))
    return LockingReport(bonds, window_fraction, tol, snap_tol)


@dataclass
class PeriodEstimate:
    period: Optional[float]
    confidence: float


def estimate_period(ps, bond, min_correlation=0.5):
    """Oscillation period of ``theta_bond(t)`` from its autocorrelation.

    The phase is mapped to the unit circle so the 0/2 pi branch cut does not
    create spurious jumps.  The period is the lag of the first local maximum
    of the normalized autocorrelation that reaches ``min_correlation``,
    refined by a parabola through the peak and its neighbours.

    Parameters
    ----------
    ps : PhaseSeries
    bond : int
        Right-hand site label of the bond, 2..N.
    """
    j = bond - 2
    if not 0 <= j < ps.n_bonds:
        raise SpecError(f"bond must be in 2..{ps.n_bonds + 1}, got {bond}", field="bond")
    valid = ps.valid[:, j]
    if valid.sum() < 4:
        return PeriodEstimate(None, 0.0)
    z = np.exp(1j * np.pi * np.where(valid, ps.theta[:, j], 0.0))
    z = np.where(valid, z - z[valid].mean(), 0.0)
    w = valid.astype(float)

    n = len(z)
    max_lag = n // 2
    full = np.correlate(z, z, mode="full")[n - 1 : n + max_lag]
    overlap = np.correlate(w, w, mode="full")[n - 1 : n + max_lag]
    acf = full.real / np.maximum(overlap, 1.0)
    if acf[0] <= 0:
        return PeriodEstimate(None, 0.0)
    acf = acf / acf[0]

    dt = float(ps.times[1] - ps.times[0])
    for lag in range(1, len(acf) - 1):
        y0, y1, y2 = acf[lag - 1], acf[lag], acf[lag + 1]
        if y1 > y0 and y1 >= y2 and y1 >= min_correlation:
            curv = y0 - 2 * y1 + y2
            shift = 0.5 * (y0 - y2) / curv if curv != 0 else 0.0
            prominence = float(peak_prominences(acf, [lag])[0][0])
            return PeriodEstimate((lag + shift) * dt, float(np.clip(prominence, 0.0, 1.0)))
    return PeriodEstimate(None, 0.0)
