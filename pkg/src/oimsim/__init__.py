"""Opportunistic interference nulling / alignment for K-cell uplink networks.

Channel generation, LIF-based user scheduling, zero-forcing receivers,
analytic oracles for the scaling results and a seeded experiment harness.
"""

from .channel import ChannelSet, FrequencyChannelSet, NetworkConfig, draw_channels, draw_frequency_channels
from .errors import (
    ConfigError,
    DimensionError,
    DomainError,
    InvalidWindow,
    MissingBases,
    NotHermitian,
    RankDeficient,
    ResourceError,
)
from .rng import DEFAULT_SEED, RandomStream
from .scheduling import Mode

__version__ = "0.1.0"

__all__ = [
    "ChannelSet", "ConfigError", "DEFAULT_SEED", "DimensionError", "DomainError",
    "FrequencyChannelSet", "InvalidWindow", "MissingBases", "Mode", "NetworkConfig",
    "NotHermitian", "RandomStream", "RankDeficient", "ResourceError", "draw_channels",
    "draw_frequency_channels",
]
