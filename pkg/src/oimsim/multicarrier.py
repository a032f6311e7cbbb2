"""Multi-carrier OIA with per-user diagonal transmit weights.

Each BS has one antenna and the signal space is the Nsub-dimensional
frequency domain.  A user picks a unit-norm weight vector w (the diagonal of
its weight matrix) that minimises its total leakage

    sum_l || Proj_{U_l}(w * H_l) ||^2  =  w^H A w,
    A = sum_l diag(H_l)^H  U_l U_l^H  diag(H_l),

so the optimum is the eigenvector of A's smallest eigenvalue.
"""

from __future__ import annotations

from typing import Sequence

import numpy as np

from .channel import FrequencyChannelSet
from .errors import DimensionError
from .linalg import OrthonormalBasis, smallest_eigpair
from .scheduling import InterferenceBases


def _validate(H_list, U_list) -> tuple[list[np.ndarray], list[OrthonormalBasis]]:
    H_list = [np.asarray(H, dtype=np.complex128) for H in H_list]
    U_list = list(U_list)
    if len(H_list) != len(U_list):
        raise DimensionError(f"{len(H_list)} channels vs {len(U_list)} kernels")
    for H, U in zip(H_list, U_list):
        if H.shape != (U.ambient_dim,):
            raise DimensionError(f"channel of shape {H.shape} vs kernel in C^{U.ambient_dim}")
    return H_list, U_list


def leakage_form(H_list: Sequence, U_list: Sequence[OrthonormalBasis]) -> np.ndarray:
    """Hermitian PSD matrix A with weighted leakage = w^H A w."""
    H_list, U_list = _validate(H_list, U_list)
    if not H_list:
        raise DimensionError("need at least one interfering cell")
    A = np.zeros((H_list[0].size,) * 2, dtype=np.complex128)
    for H, U in zip(H_list, U_list):
        A += H.conj()[:, None] * U.projector * H[None, :]
    return 0.5 * (A + A.conj().T)


def optimize_weight(H_list: Sequence, U_list: Sequence[OrthonormalBasis]) -> tuple[np.ndarray, float]:
    """Unit weight vector minimising the total projected leakage, and that minimum."""
    lam, w = smallest_eigpair(leakage_form(H_list, U_list))
    return w, lam


def weighted_metric(w, H_list: Sequence, U_list: Sequence[OrthonormalBasis]) -> float:
    """sum_l ||Proj_{U_l}(w * H_l)||^2."""
    H_list, U_list = _validate(H_list, U_list)
    w = np.asarray(w, dtype=np.complex128)
    total = 0.0
    for H, U in zip(H_list, U_list):
        if w.shape != H.shape:
            raise DimensionError(f"weight of shape {w.shape} vs channel {H.shape}")
        c = U.columns.conj().T @ (w * H)
        total += float(np.sum(c.real**2 + c.imag**2))
    return total


def uniform_weight(Nsub: int) -> np.ndarray:
    return np.full(Nsub, 1.0 / np.sqrt(Nsub), dtype=np.complex128)


def user_leakage_forms(channels: FrequencyChannelSet, bases: InterferenceBases) -> np.ndarray:
    """Batched A matrices for every user, shape (K, N, Nsub, Nsub)."""
    K = channels.K
    Pk = np.stack([U.projector for U in bases.kernels])  # (K, Nsub, Nsub)
    H = channels.H  # H[l, i, j] : user j of cell i -> BS l
    # A[i, j] = sum_{l != i} conj(H[l,i,j])_a P_l[a,b] H[l,i,j]_b
    terms = H.conj()[..., :, None] * Pk[:, None, None] * H[..., None, :]
    idx = np.arange(K)
    terms[idx, idx] = 0.0
    A = terms.sum(axis=0)
    return 0.5 * (A + np.swapaxes(A.conj(), -1, -2))


def multicarrier_metrics(channels: FrequencyChannelSet, bases: InterferenceBases,
                         weights: str = "optimal") -> np.ndarray:
    """(K, N) scheduling metrics with optimal or uniform transmit weights."""
    A = user_leakage_forms(channels, bases)
    if weights == "optimal":
        return np.maximum(np.linalg.eigvalsh(A)[..., 0], 0.0)
    if weights == "uniform":
        w = uniform_weight(channels.Nsub)
        return np.real(np.einsum("a,...ab,b->...", w.conj(), A, w))
    raise ValueError(f"unknown weights {weights!r}")
