"""Block-fading Rayleigh channels for the K-cell uplink (IMAC) model."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import ConfigError
from .rng import RandomStream

# Variance of each real component of a channel entry.  With 1.0 the squared
# norm of an M-vector is chi-square with 2M degrees of freedom, the law the
# LIF cdf in ``analysis.lif_cdf`` is written for.  Use 0.5 for CN(0, 1).
COMPONENT_VARIANCE = 1.0


@dataclass(frozen=True)
class NetworkConfig:
    """K cells, N users per cell, M receive antennas, S streams per cell.

    ``snr`` is linear (P / N0 with P = 1).
    """

    K: int
    N: int
    M: int
    S: int
    snr: float = 1.0

    def __post_init__(self):
        for name in ("K", "N", "M", "S"):
            if int(getattr(self, name)) < 1:
                raise ConfigError(f"{name} must be >= 1, got {getattr(self, name)}")
        if self.S > self.M:
            raise ConfigError(f"S={self.S} exceeds M={self.M}")
        if self.S > self.N:
            raise ConfigError(f"S={self.S} exceeds N={self.N}")
        if not self.snr > 0:
            raise ConfigError(f"snr must be positive, got {self.snr}")

    @property
    def is_oin(self) -> bool:
        return self.S == self.M


@dataclass(frozen=True)
class ChannelSet:
    """All SIMO channel vectors of one fading block.

    ``h[i, k, j]`` is the length-M channel from user ``j`` of cell ``k`` to
    BS ``i`` (h_{i,j}^{(k)} in the usual notation); indices are 0-based.
    """

    config: NetworkConfig
    h: np.ndarray

    def __post_init__(self):
        c = self.config
        if self.h.shape != (c.K, c.K, c.N, c.M):
            raise ConfigError(f"channel shape {self.h.shape} does not match {c}")

    def intra(self, cell: int, users) -> np.ndarray:
        """M x len(users) matrix of home-cell channels of ``users``."""
        return self.h[cell, cell, np.asarray(users)].T

    def desired_gain(self) -> np.ndarray:
        """(K, N) array of ||h_{i,j}^{(i)}||^2."""
        idx = np.arange(self.config.K)
        return np.sum(np.abs(self.h[idx, idx]) ** 2, axis=-1)


@dataclass(frozen=True)
class FrequencyChannelSet:
    """Frequency responses ``H[i, k, j]`` in C^Nsub (single antenna per BS)."""

    H: np.ndarray

    @property
    def K(self) -> int:
        return self.H.shape[0]

    @property
    def N(self) -> int:
        return self.H.shape[2]

    @property
    def Nsub(self) -> int:
        return self.H.shape[3]


def draw_channels(config: NetworkConfig, rng: RandomStream,
                  component_variance: float = COMPONENT_VARIANCE) -> ChannelSet:
    """Draw one block of iid Rayleigh channels."""
    shape = (config.K, config.K, config.N, config.M)
    return ChannelSet(config, rng.complex_normal(shape, component_variance))


def draw_frequency_channels(Nsub: int, K: int, N: int, rng: RandomStream,
                            component_variance: float = COMPONENT_VARIANCE) -> FrequencyChannelSet:
    """iid per-subcarrier gains (rich scattering)."""
    if Nsub < 1 or K < 1 or N < 1:
        raise ConfigError(f"need Nsub, K, N >= 1, got ({Nsub}, {K}, {N})")
    return FrequencyChannelSet(rng.complex_normal((K, K, N, Nsub), component_variance))
