"""LIF metrics and opportunistic user selection (OIN / OIA).

Users of cell ``i`` are ranked by how much interference they leak into the
other cells' BSs.  Under OIN the leakage toward BS ``k`` is the full channel
energy ``||h||^2``; under OIA only the part falling outside BS ``k``'s
broadcast interference subspace counts, i.e. the projection onto its kernel.
"""

from __future__ import annotations

from dataclasses import dataclass
from enum import Enum

import numpy as np

from .channel import ChannelSet, NetworkConfig
from .errors import DimensionError, InvalidWindow, MissingBases
from .linalg import OrthonormalBasis, null_space_basis, project_onto, random_orthonormal
from .rng import RandomStream


class Mode(str, Enum):
    OIN = "oin"
    OIA = "oia"


@dataclass(frozen=True)
class InterferenceBases:
    """Per-cell interference directions V_i (M - S dims) and kernels U_i (S dims)."""

    directions: tuple[OrthonormalBasis, ...]
    kernels: tuple[OrthonormalBasis, ...]

    @property
    def kernel_array(self) -> np.ndarray:
        """(K, M, S) stack of kernel bases."""
        return np.stack([U.columns for U in self.kernels])


@dataclass(frozen=True)
class ScheduleDecision:
    """Selected users per cell (0-based, shape (K, S)) and their metrics."""

    selected: np.ndarray
    metrics: np.ndarray

    @property
    def S(self) -> int:
        return self.selected.shape[1]


def draw_interference_bases(config: NetworkConfig, rng: RandomStream) -> InterferenceBases:
    """Random orthonormal interference directions for every cell (OIA only)."""
    if config.S >= config.M:
        raise DimensionError("OIA needs S < M so that an interference subspace exists")
    V = tuple(random_orthonormal(config.M, config.M - config.S, rng) for _ in range(config.K))
    return InterferenceBases(V, tuple(null_space_basis(v) for v in V))


def lif_oin(h) -> float:
    """Leakage of interference under OIN: ||h||^2."""
    h = np.asarray(h, dtype=np.complex128)
    return float(np.sum(h.real**2 + h.imag**2))


def lif_oia(U: OrthonormalBasis, h) -> float:
    """Leakage of interference under OIA: ||Proj_U(h)||^2."""
    return lif_oin(project_onto(U, h))


def _mode(mode) -> Mode:
    return mode if isinstance(mode, Mode) else Mode(str(mode).lower())


def scheduling_metric(cell: int, user: int, channels: ChannelSet, mode=Mode.OIN,
                      bases: InterferenceBases | None = None) -> float:
    """Sum of the LIF of ``user`` in ``cell`` over every other BS."""
    mode = _mode(mode)
    if mode is Mode.OIA and bases is None:
        raise MissingBases("OIA metric needs interference bases")
    total = 0.0
    for k in range(channels.config.K):
        if k == cell:
            continue
        h = channels.h[k, cell, user]
        total += lif_oin(h) if mode is Mode.OIN else lif_oia(bases.kernels[k], h)
    return total


def leakage_components(channels: ChannelSet, mode=Mode.OIN,
                       bases: InterferenceBases | None = None) -> np.ndarray:
    """Per-BS LIF of every user: ``out[k, i, j]`` = L^i_{k,j}.

    Entries with ``k == i`` are zero (a user does not leak into its own BS).
    """
    mode = _mode(mode)
    if mode is Mode.OIA and bases is None:
        raise MissingBases("OIA metric needs interference bases")
    h = channels.h
    K = channels.config.K
    P = np.zeros(h.shape[:3])
    for k in range(K):
        for i in range(K):
            if i == k:
                continue
            x = h[k, i] if mode is Mode.OIN else h[k, i] @ bases.kernels[k].columns.conj()
            P[k, i] = np.sum(x.real**2 + x.imag**2, axis=-1)
    return P


def metric_matrix(channels: ChannelSet, mode=Mode.OIN,
                  bases: InterferenceBases | None = None) -> np.ndarray:
    """(K, N) array of scheduling metrics L_j^i for all users at once."""
    return leakage_components(channels, mode, bases).sum(axis=0)


def select_users(metrics, S: int) -> ScheduleDecision:
    """Per cell, the S users with the smallest metrics (ties: lowest index)."""
    metrics = np.atleast_2d(np.asarray(metrics, dtype=float))
    if S > metrics.shape[1]:
        raise DimensionError(f"cannot select {S} of {metrics.shape[1]} users")
    order = np.argsort(metrics, axis=1, kind="stable")[:, :S]
    return ScheduleDecision(order, np.take_along_axis(metrics, order, axis=1))


def two_step_select(channels: ChannelSet, window: int, mode=Mode.OIN,
                    bases: InterferenceBases | None = None,
                    metrics: np.ndarray | None = None) -> ScheduleDecision:
    """Keep the ``window`` smallest-LIF users, then the S with largest desired gain.

    The returned selection is ordered by decreasing desired gain and carries
    the step-1 LIF values of the chosen users.
    """
    cfg = channels.config
    if not cfg.S <= window <= cfg.N:
        raise InvalidWindow(f"window must lie in [{cfg.S}, {cfg.N}], got {window}")
    if metrics is None:
        metrics = metric_matrix(channels, mode, bases)
    step1 = select_users(metrics, window).selected
    gain = np.take_along_axis(channels.desired_gain(), step1, axis=1)
    selected = np.empty((cfg.K, cfg.S), dtype=np.intp)
    for i in range(cfg.K):
        # largest gain first, equal gains by lowest user index
        rank = np.lexsort((step1[i], -gain[i]))[: cfg.S]
        selected[i] = step1[i, rank]
    return ScheduleDecision(selected, np.take_along_axis(metrics, selected, axis=1))


def received_lif(channels: ChannelSet, schedule: ScheduleDecision, mode=Mode.OIN,
                 bases: InterferenceBases | None = None) -> np.ndarray:
    """Per BS ``i``: sum over k != i and scheduled j of L^k_{i, pi_k(j)}.

    This is the aggregate interference term that must stay O(1/SNR) for the
    scheme to reach full DoFs.
    """
    mode = _mode(mode)
    if mode is Mode.OIA and bases is None:
        raise MissingBases("OIA metric needs interference bases")
    K = channels.config.K
    out = np.zeros(K)
    for i in range(K):
        for k in range(K):
            if k == i:
                continue
            x = channels.h[i, k, schedule.selected[k]]
            if mode is Mode.OIA:
                x = x @ bases.kernels[i].columns.conj()
            out[i] += float(np.sum(x.real**2 + x.imag**2))
    return out
