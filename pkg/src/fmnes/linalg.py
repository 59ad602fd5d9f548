"""Dense linear algebra for small symmetric matrices.

Everything here operates on plain ``numpy`` arrays and is sized for the
d x d matrices (d <= ~200) that a full-covariance evolution strategy
touches once or a few times per generation.  All tolerances are fixed
constants so that downstream invariant tests stay stable.
"""

from __future__ import annotations

from typing import NamedTuple

import numpy as np

# Relative symmetry tolerance: |A[i,j] - A[j,i]| <= SYM_TOL * max(1, |A[i,j]|).
SYM_TOL = 1e-9

# Determinants below this magnitude are treated as singular.
DET_FLOOR = 1e-300


class EigenDecomposition(NamedTuple):
    """Spectral decomposition with eigenvalues sorted descending.

    ``eigenvectors`` holds one orthonormal eigenvector per column, matched
    to ``eigenvalues``; each column is sign-fixed so its first nonzero
    entry is positive.
    """

    eigenvalues: np.ndarray
    eigenvectors: np.ndarray


def _as_square(a) -> np.ndarray:
    a = np.asarray(a, dtype=float)
    if a.ndim != 2 or a.shape[0] != a.shape[1]:
        raise ValueError(f"expected a square matrix, got shape {a.shape}")
    return a


def check_symmetric(a) -> np.ndarray:
    """Validate symmetry of ``a`` and return it as a float array.

    Raises ``ValueError`` naming the worst-offending entry pair when the
    asymmetry exceeds the fixed tolerance.
    """
    a = _as_square(a)
    gap = np.abs(a - a.T)
    scale = np.maximum(1.0, np.abs(a))
    rel = gap / scale
    worst = np.unravel_index(np.argmax(rel), rel.shape)
    if rel[worst] > SYM_TOL:
        i, j = worst
        raise ValueError(
            f"matrix is not symmetric: entry ({i},{j})={a[i, j]!r} vs "
            f"({j},{i})={a[j, i]!r} differs by {gap[i, j]:.3e} "
            f"(relative {rel[worst]:.3e}, tolerance {SYM_TOL:.0e})"
        )
    return a


def _fix_column_signs(vectors: np.ndarray) -> np.ndarray:
    """Flip eigenvector columns so the first nonzero entry is >= 0."""
    v = vectors.copy()
    for k in range(v.shape[1]):
        col = v[:, k]
        nz = np.nonzero(col)[0]
        if nz.size and col[nz[0]] < 0.0:
            v[:, k] = -col
    return v


def sym_eigen(a) -> EigenDecomposition:
    """Eigendecomposition of a symmetric matrix, eigenvalues descending."""
    a = check_symmetric(a)
    vals, vecs = np.linalg.eigh(a)
    order = np.argsort(vals)[::-1]
    return EigenDecomposition(vals[order], _fix_column_signs(vecs[:, order]))


def sym_exp(a) -> np.ndarray:
    """Matrix exponential of a symmetric matrix (symmetric positive definite)."""
    a = check_symmetric(a)
    vals, vecs = np.linalg.eigh(a)
    out = (vecs * np.exp(vals)) @ vecs.T
    return (out + out.T) / 2.0


def trace(a) -> float:
    return float(np.trace(_as_square(a)))


def det(a) -> float:
    return float(np.linalg.det(_as_square(a)))


def inverse(a) -> np.ndarray:
    """Matrix inverse, rejecting (near-)singular input with a diagnostic."""
    a = _as_square(a)
    d = np.linalg.det(a)
    if not np.isfinite(d) or abs(d) <= DET_FLOOR:
        cond = np.linalg.cond(a)
        raise ValueError(
            f"matrix is singular to working precision: |det|={abs(d):.3e}, "
            f"condition estimate {cond:.3e}"
        )
    return np.linalg.inv(a)
