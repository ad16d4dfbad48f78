"""Dense linear algebra helpers and structural matrix predicates.

Matrices and vectors are plain float ndarrays (row-major); every routine
validates shape and finiteness instead of trusting the caller.
"""

import numpy as np

from .errors import DimensionError, SingularMatrixError

# Reciprocal condition number below which `solve` refuses to proceed.
RCOND_FLOOR = 1e-12


def as_matrix(a, name="matrix"):
    """Coerce to a finite 2-D float array."""
    m = np.asarray(a, dtype=float)
    if m.ndim != 2:
        raise DimensionError(f"{name} must be 2-D, got shape {m.shape}")
    if m.size and not np.all(np.isfinite(m)):
        raise DimensionError(f"{name} has non-finite entries")
    return m


def as_vector(v, name="vector"):
    """Coerce to a finite 1-D float array."""
    x = np.asarray(v, dtype=float)
    if x.ndim != 1:
        raise DimensionError(f"{name} must be 1-D, got shape {x.shape}")
    if x.size and not np.all(np.isfinite(x)):
        raise DimensionError(f"{name} has non-finite entries")
    return x


def is_metzler(m, tol=0.0):
    """True iff every off-diagonal entry of the square matrix is >= -tol."""
    m = as_matrix(m)
    if m.shape[0] != m.shape[1]:
        raise DimensionError(f"Metzler test needs a square matrix, got {m.shape}")
    off = m - np.diag(np.diag(m))
    return bool(np.all(off >= -tol))


def is_nonnegative(m, tol=0.0):
    """True iff every entry is >= -tol."""
    m = np.asarray(m, dtype=float)
    return bool(np.all(m >= -tol))


def metzler_violations(m, tol=0.0):
    """Indices and values of off-diagonal entries below -tol."""
    m = as_matrix(m)
    bad = []
    for i in range(m.shape[0]):
        for j in range(m.shape[1]):
            if i != j and m[i, j] < -tol:
                bad.append(((i, j), float(m[i, j])))
    return bad


def nonneg_violations(m, tol=0.0):
    """Indices and values of entries below -tol."""
    m = np.asarray(m, dtype=float)
    idx = np.argwhere(m < -tol)
    return [((int(i), int(j)), float(m[i, j])) for i, j in idx]


def solve(a, b):
    """Solve a X = b for square well-conditioned a.

    Uses partial-pivoting LU (LAPACK); the 1-norm condition number is
    estimated first and anything with 1/cond below ``RCOND_FLOOR`` raises
    SingularMatrixError carrying the estimate.
    """
    a = as_matrix(a, "a")
    bb = np.asarray(b, dtype=float)
    if a.shape[0] != a.shape[1]:
        raise DimensionError(f"solve needs a square matrix, got {a.shape}")
    if bb.shape[0] != a.shape[0]:
        raise DimensionError(f"rhs has {bb.shape[0]} rows, expected {a.shape[0]}")
    if a.shape[0] == 0:
        return np.zeros_like(bb)
    try:
        cond = float(np.linalg.cond(a, 1))
    except np.linalg.LinAlgError:
        cond = np.inf
    if not np.isfinite(cond) or 1.0 / cond < RCOND_FLOOR:
        raise SingularMatrixError(
            f"matrix is singular or ill-conditioned (cond_1 ~ {cond:.3e})",
            condition=cond,
        )
    return np.linalg.solve(a, bb)


def ones(n):
    return np.ones(n)
