"""Dense complex matrix kernel: matrix exponential and eigendecomposition.

Matrices are plain ``numpy`` arrays of dtype ``complex128``.  The helpers
here validate shapes and finiteness so that the model and dynamics code can
assume clean inputs.
"""

from dataclasses import dataclass
from math import ceil, factorial, log2
from typing import Optional

import mpmath
import numpy as np

from .errors import DecompositionError, NumericalFailureError, NumericalInputError

MAX_EIG_DIM = 64
PADE_ORDER = 10
# expm scales A by 2**-s until its 1-norm is at most this
SCALED_NORM = 0.5


def as_matrix(A, name="matrix"):
    A = np.asarray(A, dtype=complex)
    if A.ndim != 2 or A.shape[0] != A.shape[1] or A.shape[0] < 1:
        raise NumericalInputError(f"{name} must be a non-empty square matrix, got shape {A.shape}")
    if not np.all(np.isfinite(A)):
        raise NumericalInputError(f"{name} has non-finite entries")
    return A


def as_vector(v, dim=None, name="vector"):
    v = np.asarray(v, dtype=complex)
    if v.ndim != 1 or v.size < 1:
        raise NumericalInputError(f"{name} must be a non-empty 1-d array, got shape {v.shape}")
    if dim is not None and v.size != dim:
        raise NumericalInputError(f"{name} has dimension {v.size}, expected {dim}")
    if not np.all(np.isfinite(v)):
        raise NumericalInputError(f"{name} has non-finite entries")
    return v


def _pade_coefficients(m):
    return [
        factorial(2 * m - k) * factorial(m) / (factorial(2 * m) * factorial(k) * factorial(m - k))
        for k in range(m + 1)
    ]


_PADE = _pade_coefficients(PADE_ORDER)


def expm(A):
    """Matrix exponential by scaling and squaring.

    The input is scaled by ``2**-s`` so that its 1-norm does not exceed 0.5,
    exponentiated with a diagonal Pade approximant of order 10, and then
    squared ``s`` times.

    Parameters
    ----------
    A : array_like, shape (n, n)
        Complex square matrix with finite entries.

    Returns
    -------
    ndarray, shape (n, n)
    """
    A = as_matrix(A)
    n = A.shape[0]
    norm = np.linalg.norm(A, 1)
    s = max(0, ceil(log2(norm / SCALED_NORM))) if norm > 0 else 0
    X = A / 2.0**s

    ident = np.eye(n, dtype=complex)
    num = _PADE[0] * ident
    den = _PADE[0] * ident
    power = ident
    for k in range(1, PADE_ORDER + 1):
        power = power @ X
        term = _PADE[k] * power
        num = num + term
        den = den + term if k % 2 == 0 else den - term
    R = np.linalg.solve(den, num)
    with np.errstate(over="ignore", invalid="ignore"):
        for _ in range(s):
            R = R @ R
    if not np.all(np.isfinite(R)):
        raise NumericalFailureError("matrix exponential overflowed", operation="expm")
    return R


def expm_mp(A, digits):
    """Matrix exponential at ``digits`` decimal digits of working precision.

    ``A`` may be a numpy array or an ``mpmath.matrix``; entries of a numpy
    array are taken exactly as their binary values.  Returns an
    ``mpmath.matrix``.
    """
    with mpmath.workdps(digits):
        M = A if isinstance(A, mpmath.matrix) else mpmath.matrix(np.asarray(A, dtype=complex).tolist())
        return mpmath.expm(M)


@dataclass(frozen=True)
class EigenDecomposition:
    """Eigenvalues with unit-norm right eigenvectors stored as columns.

    ``right_vectors`` and ``residual`` are ``None`` when only values were
    requested.
    """

    values: np.ndarray
    right_vectors: Optional[np.ndarray]
    residual: Optional[float]

    def __len__(self):
        return len(self.values)


def _sort_order(values, scale):
    # round real parts so conjugate pairs differing by noise in Re stay adjacent
    re = np.round(values.real / (1e-10 * scale)) if scale > 0 else values.real
    return np.lexsort((values.imag, re))


def eig(A, vectors=True):
    """Eigenvalues (and right eigenvectors) of a complex square matrix.

    Values are sorted by real part, then imaginary part.  Each eigenvector
    is scaled to unit Dirac norm and rotated so that its largest-magnitude
    entry is real and positive.

    Raises
    ------
    DecompositionError
        If LAPACK fails to converge or the residual ``max |A v - lambda v|``
        exceeds ``1e-8 * |A|``.
    """
    A = as_matrix(A)
    if A.shape[0] > MAX_EIG_DIM:
        raise NumericalInputError(f"eig supports dimension <= {MAX_EIG_DIM}, got {A.shape[0]}")
    scale = np.linalg.norm(A)
    try:
        if not vectors:
            values = np.linalg.eigvals(A)
            return EigenDecomposition(values[_sort_order(values, scale)], None, None)
        values, vecs = np.linalg.eig(A)
    except np.linalg.LinAlgError as exc:
        raise DecompositionError(f"eigendecomposition did not converge: {exc}", operation="eig") from exc

    order = _sort_order(values, scale)
    values = values[order]
    vecs = vecs[:, order]
    vecs = vecs / np.linalg.norm(vecs, axis=0)
    pivots = np.abs(vecs).argmax(axis=0)
    lead = vecs[pivots, np.arange(vecs.shape[1])]
    vecs = vecs * (np.abs(lead) / lead)

    residual = float(np.max(np.linalg.norm(A @ vecs - vecs * values, axis=0)))
    if not residual <= 1e-8 * scale:
        raise DecompositionError(
            f"eigendecomposition residual {residual:.3e} exceeds bound {1e-8 * scale:.3e}",
            operation="eig",
        )
    return EigenDecomposition(values, vecs, residual)
