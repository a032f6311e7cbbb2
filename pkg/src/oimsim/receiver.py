"""Zero-forcing receivers, per-stream SINR and post-ZF interference leakage.

Noise convention: P = 1 and N0 = 1/snr.  The filtered noise power of row
``g`` is ``||g||^2 / snr``, so after dividing through by ``||g||^2 N0`` the
SINR takes the ``1 + sum(...) * snr`` form used throughout.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .channel import ChannelSet
from .errors import DimensionError
from .linalg import OrthonormalBasis, pseudo_inverse
from .scheduling import InterferenceBases, ScheduleDecision


@dataclass(frozen=True)
class ZfFilter:
    """ZF matrix ``G`` (S x M) of one BS; row m is g_m^H.

    ``directions``/``kernel`` are the cell's interference subspace and its
    complement under OIA, ``None`` under OIN.
    """

    cell: int
    G: np.ndarray
    directions: OrthonormalBasis | None = None
    kernel: OrthonormalBasis | None = None


@dataclass(frozen=True)
class LinkReport:
    """Per (cell, stream) link quantities of one trial, arrays of shape (K, S)."""

    sinr_exact: np.ndarray
    sinr_lower: np.ndarray
    leakage: np.ndarray

    @property
    def rate_bits(self) -> np.ndarray:
        return np.log2(1.0 + self.sinr_exact)


def zf_filter_oin(intra, cell: int = 0) -> ZfFilter:
    """G = pseudo-inverse of the stacked selected home-cell channels."""
    return ZfFilter(cell, pseudo_inverse(intra))


def zf_filter_oia(V: OrthonormalBasis, intra, cell: int = 0,
                  kernel: OrthonormalBasis | None = None) -> ZfFilter:
    """ZF against both the interference directions and the intra-cell channels.

    The rows of pinv([V | intra]) that belong to the intra columns satisfy
    g_m^H v = 0 for every direction v and g_m^H h_{m'} = delta_{mm'}.
    """
    intra = np.asarray(intra, dtype=np.complex128)
    if intra.ndim != 2 or intra.shape[0] != V.ambient_dim:
        raise DimensionError(f"intra shape {intra.shape} vs ambient dim {V.ambient_dim}")
    A = np.concatenate([V.columns, intra], axis=1)
    if A.shape[1] > A.shape[0]:
        raise DimensionError(f"[V | intra] has {A.shape[1]} columns for {A.shape[0]} antennas")
    G = pseudo_inverse(A)[V.basis_dim:]
    return ZfFilter(cell, G, V, kernel)


def build_filters(channels: ChannelSet, schedule: ScheduleDecision,
                  bases: InterferenceBases | None = None) -> list[ZfFilter]:
    """One ZF filter per cell for the scheduled users (OIA iff ``bases``)."""
    filters = []
    for i in range(channels.config.K):
        intra = channels.intra(i, schedule.selected[i])
        if bases is None:
            filters.append(zf_filter_oin(intra, i))
        else:
            filters.append(zf_filter_oia(bases.directions[i], intra, i, bases.kernels[i]))
    return filters


def _check(filters, channels: ChannelSet, schedule: ScheduleDecision) -> None:
    K, M = channels.config.K, channels.config.M
    if len(filters) != K or schedule.selected.shape[0] != K:
        raise DimensionError("need one filter and one schedule row per cell")
    for f in filters:
        if f.G.shape != (schedule.S, M):
            raise DimensionError(f"filter of cell {f.cell} has shape {f.G.shape}")


def _interference(f: ZfFilter, channels: ChannelSet, schedule: ScheduleDecision) -> np.ndarray:
    """(S, n_interferers) array of |g_m^H h|^2 over all scheduled other-cell users."""
    i = f.cell
    cols = [channels.h[i, k, schedule.selected[k]].T
            for k in range(channels.config.K) if k != i]
    if not cols:
        return np.zeros((f.G.shape[0], 0))
    return np.abs(f.G @ np.concatenate(cols, axis=1)) ** 2


def _received_lif(f: ZfFilter, channels: ChannelSet, schedule: ScheduleDecision) -> float:
    """sum_{k != i} sum_j L^k_{i, pi_k(j)} seen at BS ``f.cell``."""
    i = f.cell
    total = 0.0
    for k in range(channels.config.K):
        if k == i:
            continue
        H = channels.h[i, k, schedule.selected[k]]
        if f.kernel is not None:
            H = H @ f.kernel.columns.conj()
        total += float(np.sum(H.real**2 + H.imag**2))
    return total


def compute_sinr(filters, channels: ChannelSet, schedule: ScheduleDecision,
                 snr: float) -> LinkReport:
    """Exact per-stream SINR and its Cauchy-Schwarz lower bound."""
    _check(filters, channels, schedule)
    K, S = schedule.selected.shape
    exact = np.empty((K, S))
    lower = np.empty((K, S))
    leak = np.empty((K, S))
    for f in filters:
        i = f.cell
        desired = np.abs(np.einsum("sm,ms->s", f.G, channels.intra(i, schedule.selected[i]))) ** 2
        gnorm2 = np.sum(np.abs(f.G) ** 2, axis=1)
        interf = _interference(f, channels, schedule).sum(axis=1)
        signal = desired / gnorm2 * snr
        exact[i] = signal / (1.0 + interf / gnorm2 * snr)
        lower[i] = signal / (1.0 + _received_lif(f, channels, schedule) * snr)
        leak[i] = interf / desired
    return LinkReport(exact, lower, leak)


def leakage_after_zf(filters, channels: ChannelSet, schedule: ScheduleDecision,
                     normalization: str = "desired") -> np.ndarray:
    """Total other-cell interference power left in each cell's streams after ZF.

    ``normalization="desired"`` scales every filter row so that its desired
    stream has unit gain (the ZF construction already does this).
    ``"unit"`` scales every row to unit norm instead, which bounds each term
    by the corresponding LIF and keeps the measure's mean finite.
    """
    _check(filters, channels, schedule)
    out = np.zeros(len(filters))
    for f in filters:
        P = _interference(f, channels, schedule)
        if normalization == "desired":
            d = np.abs(np.einsum("sm,ms->s", f.G, channels.intra(f.cell, schedule.selected[f.cell]))) ** 2
            P = P / d[:, None]
        elif normalization == "unit":
            P = P / np.sum(np.abs(f.G) ** 2, axis=1)[:, None]
        else:
            raise ValueError(f"unknown normalization {normalization!r}")
        out[f.cell] = P.sum()
    return out


def sum_rate(reports) -> float:
    """Sum of log2(1 + SINR) over all streams.

    Accepts a ``LinkReport``, an iterable of them, or raw SINR values.
    """
    if isinstance(reports, LinkReport):
        return float(np.sum(reports.rate_bits))
    items = list(reports) if not isinstance(reports, np.ndarray) else [reports]
    if items and all(isinstance(r, LinkReport) for r in items):
        return float(sum(np.sum(r.rate_bits) for r in items))
    sinr = np.asarray(items, dtype=float)
    return float(np.sum(np.log2(1.0 + sinr)))
