"""Dense symmetric linear algebra shared by every other module.

All decompositions operate on explicitly symmetrized inputs; asymmetry
beyond ``ASYM_TOL`` (relative) is reported as an error rather than
silently averaged away, because it usually indicates a bookkeeping bug
in the caller.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import NonFinite

# relative asymmetry allowed before symmetrization is refused
ASYM_TOL = 1e-8


@dataclass(frozen=True)
class SymEig:
    """Eigendecomposition of a symmetric matrix, eigenvalues sorted descending.

    ``values[k]`` pairs with the orthonormal column ``vectors[:, k]``;
    ``(vectors * values) @ vectors.T`` reconstructs the input.
    """

    values: np.ndarray
    vectors: np.ndarray

    def reconstruct(self) -> np.ndarray:
        return (self.vectors * self.values) @ self.vectors.T


def _checked_symmetric(X) -> np.ndarray:
    X = np.asarray(X, dtype=float)
    if X.ndim != 2 or X.shape[0] != X.shape[1]:
        raise ValueError(f"expected a square matrix, got shape {X.shape}")
    if not np.all(np.isfinite(X)):
        raise NonFinite("matrix contains NaN or Inf entries")
    if X.size:
        scale = 1.0 + float(np.abs(X).max())
        asym = float(np.abs(X - X.T).max())
        if asym > ASYM_TOL * scale:
            raise ValueError(f"matrix is asymmetric beyond tolerance ({asym:.3e})")
    return (X + X.T) / 2


def sym_eig(X) -> SymEig:
    """Full spectrum of a symmetric matrix, descending; deterministic."""
    S = _checked_symmetric(X)
    values, vectors = np.linalg.eigh(S)
    order = np.argsort(values)[::-1]
    return SymEig(values=values[order], vectors=vectors[:, order])


def psd_project(X) -> np.ndarray:
    """Frobenius-nearest positive semidefinite matrix.

    Eigendecomposes, clamps negative eigenvalues to zero and reconstructs.
    Idempotent and nonexpansive on symmetric inputs.
    """
    S = _checked_symmetric(X)
    values, vectors = np.linalg.eigh(S)
    values = np.clip(values, 0.0, None)
    return (vectors * values) @ vectors.T


def rank_truncate(X, r: int) -> np.ndarray:
    """Best Frobenius approximation of rank <= r to a symmetric matrix.

    Keeps the r eigenpairs of largest absolute eigenvalue with their
    signs, which coincides with SVD truncation for symmetric matrices.
    """
    S = _checked_symmetric(X)
    if not 1 <= r <= S.shape[0]:
        raise ValueError(f"rank {r} outside [1, {S.shape[0]}]")
    values, vectors = np.linalg.eigh(S)
    keep = np.argsort(np.abs(values))[::-1][:r]
    return (vectors[:, keep] * values[keep]) @ vectors[:, keep].T


def numeric_rank(X, tol: float) -> int:
    """Number of singular values above ``tol`` relative to the largest.

    The zero matrix has rank 0; ``tol`` must be positive.
    """
    if tol <= 0:
        raise ValueError("tol must be positive")
    X = np.asarray(X, dtype=float)
    if not np.all(np.isfinite(X)):
        raise NonFinite("matrix contains NaN or Inf entries")
    if X.size == 0:
        return 0
    sigma = np.linalg.svd(X, compute_uv=False)
    if sigma[0] == 0.0:
        return 0
    return int(np.sum(sigma > tol * sigma[0]))
