"""Time invariants of PT-symmetric evolution.

Any Hermitian ``eta`` with ``eta H = H^dagger eta`` makes ``<psi(t)|eta|psi(t)>``
constant along a trajectory.  For PT-symmetric, complex-symmetric ``H`` the
parity matrix is such an operator and the conserved quantity is the PT
product ``<psi|P|psi>``.
"""

from dataclasses import dataclass
from typing import List, Optional

import mpmath
import numpy as np

from .errors import ExceptionalPointError, SpecError
from .linalg import as_matrix, as_vector, eig

SELF_ORTHOGONAL_TOL = 1e-6
NULLSPACE_TOL = 1e-10
MAX_INTERTWINER_DIM = 16
DRIFT_FLOOR = 1e-12
# exp(700) is close to the largest finite double
_MAX_LOG = 700.0


def pt_product(psi, P):
    """PT product ``sum_k conj(psi[kbar]) psi[k]``, i.e. ``<psi|P|psi>``.

    Real up to rounding for any state; returned as a complex number.
    """
    psi = as_vector(psi, name="psi")
    P = np.asarray(P)
    if P.shape != (psi.size, psi.size):
        raise SpecError(f"parity shape {P.shape} does not match state dimension {psi.size}", field="P")
    return complex(psi.conj() @ P @ psi)


def _check_hermitian(eta):
    e = np.asarray(eta, dtype=complex)
    if e.ndim != 2 or e.shape[0] != e.shape[1]:
        raise SpecError(f"eta must be square, got shape {e.shape}", field="eta")
    if np.max(np.abs(e - e.conj().T)) > 1e-12 * max(1.0, np.max(np.abs(e))):
        raise SpecError("eta is not Hermitian", field="eta")
    return e


@dataclass
class InvariantSeries:
    """``exp(2 l(t)) <state(t)|eta|state(t)>`` along a trajectory.

    ``values`` overflows to ``inf`` only when the expectation value itself
    exceeds the double range; ``max_relative_drift`` is always computed
    from the log-scale form.
    """

    times: np.ndarray
    values: np.ndarray
    reference: complex
    max_relative_drift: float


def invariant_series(traj, eta):
    """Expectation value of a Hermitian intertwiner along ``traj``.

    With ``eta = P`` this is the PT product at physical scale.  For a
    trajectory produced with ``digits`` the sum is evaluated from the
    high-precision states, so the cancellation against the growing norm
    does not eat the result.  ``eta`` may be a complex array or an object
    array of ``mpmath`` numbers.
    """
    e = _check_hermitian(eta)
    if e.shape[0] != traj.dim:
        raise SpecError(f"eta has dimension {e.shape[0]}, trajectory has {traj.dim}", field="eta")
    if traj.hp_states is not None:
        return _invariant_series_mp(traj, eta)

    q = np.einsum("ti,ij,tj->t", traj.states.conj(), e, traj.states)
    log_mag = 2 * traj.log_scale + np.log(np.abs(q), where=q != 0, out=np.full(q.shape, -np.inf))
    phase = np.angle(q)
    with np.errstate(over="ignore", invalid="ignore"):
        values = np.exp(np.minimum(log_mag, _MAX_LOG + 10)) * np.exp(1j * phase)
    values[q == 0] = 0
    ref = complex(values[0])
    denom = max(abs(ref), DRIFT_FLOOR)
    with np.errstate(over="ignore", invalid="ignore"):
        diff = np.abs(values - ref)
    drift = float(np.max(diff) / denom)
    if np.any(log_mag > _MAX_LOG):
        drift = float("inf")
    return InvariantSeries(traj.times, values, ref, drift)


def _invariant_series_mp(traj, eta):
    N = traj.dim
    with mpmath.workdps(traj.digits):
        rows = [[mpmath.mpc(eta[i][j]) for j in range(N)] for i in range(N)]
        vals = []
        for v, ell in zip(traj.hp_states, traj.hp_log_scale):
            ev = [mpmath.fdot(row, v) for row in rows]
            q = mpmath.fdot([mpmath.conj(x) for x in v], ev)
            vals.append(mpmath.exp(2 * ell) * q)
        ref = vals[0]
        denom = max(abs(ref), mpmath.mpf(DRIFT_FLOOR))
        drift = max(abs(x - ref) for x in vals) / denom
        values = np.array([complex(x) if abs(x) < 1e300 else complex(np.inf) for x in vals])
    return InvariantSeries(traj.times, values, complex(ref), float(drift))


@dataclass
class ModeCoefficients:
    """Expansion ``psi = sum_mu c_mu v_mu`` over right eigenvectors.

    For complex-symmetric ``H`` the left eigenvectors are the transposes of
    the right ones, so ``c_mu = v_mu^T psi / v_mu^T v_mu``.
    """

    values: np.ndarray
    vectors: np.ndarray
    coefficients: np.ndarray
    self_products: np.ndarray
    reconstruction_residual: float


def biorthogonal_decompose(H, psi):
    """Expand ``psi`` in the bi-orthogonal eigenbasis of complex-symmetric ``H``.

    Raises
    ------
    SpecError
        If ``H`` is not complex symmetric.
    ExceptionalPointError
        If some mode has ``|v^T v| < 1e-6``; the expansion is meaningless
        at an exceptional point.
    """
    H = as_matrix(H, "H")
    psi = as_vector(psi, H.shape[0], "psi")
    if np.max(np.abs(H - H.T)) > 1e-12 * max(1.0, np.max(np.abs(H))):
        raise SpecError("H is not complex symmetric (H^T != H)", field="H")
    dec = eig(H)
    V = dec.right_vectors
    self_products = np.sum(V * V, axis=0)
    worst = int(np.argmin(np.abs(self_products)))
    if abs(self_products[worst]) < SELF_ORTHOGONAL_TOL:
        raise ExceptionalPointError(
            f"mode {worst} (eigenvalue {dec.values[worst]:.6g}) is self-orthogonal: "
            f"|v^T v| = {abs(self_products[worst]):.3e}",
            operation="biorthogonal_decompose",
        )
    coeffs = (V.T @ psi) / self_products
    residual = float(np.linalg.norm(V @ coeffs - psi))
    return ModeCoefficients(dec.values, V, coeffs, self_products, residual)


def pt_partners(values, vectors, P):
    """Match every mode with its PT image.

    Returns ``(partner, phase, residual)``: ``P conj(v_mu)`` equals
    ``phase[mu] * v[partner[mu]]``, the partner carrying the eigenvalue
    closest to ``conj(lambda_mu)``; ``residual`` is the worst mismatch
    of that identity.
    """
    images = P @ vectors.conj()
    partner = np.array([int(np.argmin(np.abs(values - np.conj(lam)))) for lam in values])
    partner_vecs = vectors[:, partner]
    phase = np.sum(partner_vecs.conj() * images, axis=0)
    residual = float(np.max(np.linalg.norm(images - partner_vecs * phase, axis=0)))
    return partner, phase, residual


def mode_pt_product(modes, P):
    """PT product rebuilt from mode coefficients.

    By bi-orthogonality only PT-partner pairs survive:
    ``sum_mu conj(c_mu) c_nu phase_mu v_nu^T v_nu`` with ``nu`` the partner
    of ``mu``.  In a gauge where ``PT v_mu = v_nu`` exactly, every phase is 1.
    """
    partner, phase, _ = pt_partners(modes.values, modes.vectors, P)
    c = modes.coefficients
    return complex(np.sum(c.conj() * c[partner] * phase * modes.self_products[partner]))


@dataclass
class IntertwinerBasis:
    """Frobenius-orthonormal basis of Hermitian ``eta`` with ``eta H = H^dagger eta``.

    ``exact_basis`` holds the same operators as object arrays of ``mpmath``
    numbers when the search ran at extended precision.
    """

    basis: List[np.ndarray]
    residuals: List[float]
    exact_basis: Optional[List[np.ndarray]] = None
    digits: Optional[int] = None

    @property
    def dimension(self):
        return len(self.basis)

    def projection_residual(self, eta):
        """Relative distance from ``eta`` to the span of the basis."""
        eta = np.asarray(eta, dtype=complex)
        rest = eta.copy()
        for b in self.basis:
            rest = rest - np.vdot(b, eta) * b
        return float(np.linalg.norm(rest) / np.linalg.norm(eta))


def rank_revealing_nullspace(A, rel_tol=NULLSPACE_TOL):
    """Null space of a real matrix by Gauss-Jordan elimination with complete pivoting.

    Elimination stops once the largest remaining entry falls below
    ``rel_tol`` times the first (largest) pivot.  Works on float arrays and
    on object arrays of ``mpmath.mpf``.

    Returns
    -------
    basis : ndarray, shape (n, n - rank)
        Null-space vectors as columns (not orthonormalized).
    rank : int
    """
    A = np.array(A, copy=True)
    m, n = A.shape
    perm = np.arange(n)
    first = max(abs(x) for x in A.flat) if A.size else 0
    rank = 0
    if first != 0:
        for r in range(min(m, n)):
            sub = np.abs(A[r:, r:])
            flat = int(np.argmax(sub))
            i, j = divmod(flat, sub.shape[1])
            if not sub[i, j] > rel_tol * first:
                break
            i += r
            j += r
            A[[r, i]] = A[[i, r]]
            A[:, [r, j]] = A[:, [j, r]]
            perm[[r, j]] = perm[[j, r]]
            A[r] = A[r] / A[r, r]
            others = np.arange(m) != r
            A[others] = A[others] - np.outer(A[others, r], A[r])
            rank = r + 1
    free = n - rank
    basis = np.zeros((n, free), dtype=A.dtype)
    if A.dtype == object:
        basis[:] = mpmath.mpf(0)
    for f in range(free):
        col = rank + f
        basis[perm[:rank], f] = -A[:rank, col]
        basis[perm[col], f] = 1
    return basis, rank


def _hermitian_units(N, one, root_half, imag_unit):
    """Frobenius-orthonormal real basis of the N x N Hermitian matrices."""
    dtype = object if isinstance(one, mpmath.mpf) else complex
    zero = one * 0
    units = []
    for k in range(N):
        B = np.full((N, N), zero, dtype=dtype)
        B[k, k] = one
        units.append(B)
    for k in range(N):
        for l in range(k + 1, N):
            B = np.full((N, N), zero, dtype=dtype)
            B[k, l] = B[l, k] = root_half
            units.append(B)
            B = np.full((N, N), zero, dtype=dtype)
            B[k, l] = imag_unit * root_half
            B[l, k] = -imag_unit * root_half
            units.append(B)
    return units


def _orthonormalize(vectors, sqrt):
    out = []
    for v in vectors.T:
        w = v.copy()
        for _ in range(2):
            for u in out:
                w = w - np.dot(u, w) * u
        norm = sqrt(np.dot(w, w))
        out.append(w / norm)
    return out


def find_intertwiners(H, digits=None, rel_tol=NULLSPACE_TOL):
    """Numerically enumerate the Hermitian intertwiners of ``H``.

    ``eta`` is written in a real Frobenius-orthonormal basis of Hermitian
    matrices (``N^2`` parameters); the real and imaginary parts of
    ``eta H - H^dagger eta = 0`` give ``2 N^2`` homogeneous equations whose
    null space is found by rank-revealing elimination and then
    orthonormalized.

    Parameters
    ----------
    H : array_like, shape (N, N)
        ``N <= 16``.
    digits : int, optional
        Run the elimination in ``mpmath`` at this precision (``H`` taken
        exactly as its double entries) and keep the result as
        ``exact_basis``.
    rel_tol : float
        Pivot cutoff relative to the largest pivot.
    """
    H = as_matrix(H, "H")
    N = H.shape[0]
    if N > MAX_INTERTWINER_DIM:
        raise SpecError(f"find_intertwiners supports N <= {MAX_INTERTWINER_DIM}, got {N}", field="H")

    if digits is None:
        units = _hermitian_units(N, 1.0, np.sqrt(0.5), 1j)
        Hd = H.conj().T
        images = [B @ H - Hd @ B for B in units]
        system = np.array([np.concatenate([R.real.ravel(), R.imag.ravel()]) for R in images]).T
        null, _ = rank_revealing_nullspace(system, rel_tol)
        params = _orthonormalize(null, np.sqrt)
        basis = [sum(x * B for x, B in zip(p, units)) for p in params]
        exact = None
    else:
        with mpmath.workdps(int(digits)):
            Hm = np.array([[mpmath.mpc(x) for x in row] for row in H.tolist()], dtype=object)
            Hd = np.array([[mpmath.conj(x) for x in row] for row in Hm.T], dtype=object)
            units = _hermitian_units(N, mpmath.mpf(1), mpmath.sqrt(mpmath.mpf(0.5)), mpmath.mpc(0, 1))
            images = [B @ Hm - Hd @ B for B in units]
            system = np.array(
                [[mpmath.re(x) for x in R.flat] + [mpmath.im(x) for x in R.flat] for R in images],
                dtype=object,
            ).T
            null, _ = rank_revealing_nullspace(system, rel_tol)
            params = _orthonormalize(null, mpmath.sqrt)
            exact = [sum(x * B for x, B in zip(p, units)) for p in params]
            basis = [np.array(e.tolist(), dtype=complex) for e in exact]

    residuals = [float(np.linalg.norm(e @ H - H.conj().T @ e)) for e in basis]
    return IntertwinerBasis(basis, residuals, exact, None if digits is None else int(digits))
