"""Small dense complex linear-algebra kernels.

Everything here works on plain ``numpy`` arrays.  Matrices are at most a
few tens of rows, so clarity wins over cleverness.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import DimensionError, NotHermitian, RankDeficient
from .rng import RandomStream

RANK_RTOL = 1e-10
ORTHO_TOL = 1e-10
HERMITIAN_TOL = 1e-9


@dataclass(frozen=True)
class OrthonormalBasis:
    """Orthonormal columns spanning a subspace of C^d.

    ``columns`` has shape ``(ambient_dim, basis_dim)``; ``basis_dim`` may be 0.
    """

    columns: np.ndarray

    def __post_init__(self):
        cols = np.asarray(self.columns, dtype=np.complex128)
        if cols.ndim != 2:
            raise DimensionError(f"basis columns must be 2-D, got shape {cols.shape}")
        if cols.shape[1] > cols.shape[0] or cols.shape[0] < 1:
            raise DimensionError(f"invalid basis shape {cols.shape}")
        gram = cols.conj().T @ cols
        if cols.shape[1] and np.max(np.abs(gram - np.eye(cols.shape[1]))) > ORTHO_TOL:
            raise ValueError("columns are not orthonormal")
        object.__setattr__(self, "columns", cols)

    @property
    def ambient_dim(self) -> int:
        return self.columns.shape[0]

    @property
    def basis_dim(self) -> int:
        return self.columns.shape[1]

    @property
    def projector(self) -> np.ndarray:
        return self.columns @ self.columns.conj().T


def _check_finite(A: np.ndarray, name: str = "matrix") -> None:
    if not np.all(np.isfinite(A)):
        raise ValueError(f"{name} contains NaN or Inf")


def pseudo_inverse(A) -> np.ndarray:
    """Moore-Penrose inverse of a tall, full-column-rank matrix.

    Raises
    ------
    RankDeficient
        If the smallest singular value is at most ``1e-10`` times the largest.
    """
    A = np.asarray(A, dtype=np.complex128)
    if A.ndim != 2:
        raise DimensionError(f"expected a matrix, got shape {A.shape}")
    rows, cols = A.shape
    if rows < cols:
        raise DimensionError(f"need rows >= cols, got {rows}x{cols}")
    _check_finite(A)
    u, s, vh = np.linalg.svd(A, full_matrices=False)
    if s[0] == 0.0 or s[-1] <= RANK_RTOL * s[0]:
        raise RankDeficient(f"condition number exceeds {1 / RANK_RTOL:.0e}")
    return (vh.conj().T / s) @ u.conj().T


def random_orthonormal(ambient_dim: int, basis_dim: int, rng: RandomStream) -> OrthonormalBasis:
    """Haar-distributed orthonormal ``basis_dim``-frame in C^ambient_dim.

    Columns come from QR of an iid complex Gaussian matrix with the phases
    of R's diagonal absorbed into Q, which makes the law rotation invariant.
    """
    d, r = int(ambient_dim), int(basis_dim)
    if not 0 < r <= d:
        raise DimensionError(f"need 0 < basis_dim <= ambient_dim, got ({d}, {r})")
    while True:
        Z = rng.complex_normal((d, r))
        q, R = np.linalg.qr(Z)
        diag = np.diag(R)
        if np.min(np.abs(diag)) > RANK_RTOL * np.max(np.abs(diag)):
            break
    q = q * (diag / np.abs(diag))
    return OrthonormalBasis(q)


def null_space_basis(V: OrthonormalBasis) -> OrthonormalBasis:
    """Orthonormal basis of the orthogonal complement of span(V)."""
    d, r = V.ambient_dim, V.basis_dim
    if r >= d:
        raise DimensionError(f"basis already spans C^{d}; kernel is empty")
    if r == 0:
        return OrthonormalBasis(np.eye(d, dtype=np.complex128))
    q, _ = np.linalg.qr(V.columns, mode="complete")
    U = q[:, r:]
    # one re-orthogonalisation pass keeps |V^H U| at machine precision
    U = U - V.columns @ (V.columns.conj().T @ U)
    U, _ = np.linalg.qr(U)
    return OrthonormalBasis(U)


def project_onto(U: OrthonormalBasis, h) -> np.ndarray:
    """Orthogonal projection sum_m (u_m^H h) u_m."""
    h = np.asarray(h, dtype=np.complex128)
    if h.shape != (U.ambient_dim,):
        raise DimensionError(f"vector of length {h.shape} vs ambient dim {U.ambient_dim}")
    return U.columns @ (U.columns.conj().T @ h)


def smallest_eigpair(A) -> tuple[float, np.ndarray]:
    """Smallest eigenvalue and a unit eigenvector of a Hermitian PSD matrix."""
    A = np.asarray(A, dtype=np.complex128)
    if A.ndim != 2 or A.shape[0] != A.shape[1]:
        raise DimensionError(f"expected a square matrix, got shape {A.shape}")
    _check_finite(A)
    if np.max(np.abs(A - A.conj().T), initial=0.0) > HERMITIAN_TOL:
        raise NotHermitian("matrix is not Hermitian within 1e-9")
    w, v = np.linalg.eigh(A)
    # PSD input: tiny negative eigenvalues are rounding noise
    lam = max(float(w[0]), 0.0)
    vec = v[:, 0]
    return lam, vec / np.linalg.norm(vec)
