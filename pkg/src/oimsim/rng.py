"""Seedable, splittable random streams.

Every stream is a Philox (counter-based) generator keyed by a master seed
and a tuple of integers.  Substreams are derived by extending the key, so
the numbers a trial sees depend only on ``(seed, key)`` and never on the
order in which trials are executed.
"""

from __future__ import annotations

import hashlib
import json
from typing import Any

import numpy as np

DEFAULT_SEED = 1234


class RandomStream:
    """A reproducible random stream identified by ``(seed, key)``."""

    __slots__ = ("seed", "key", "_gen")

    def __init__(self, seed: int = DEFAULT_SEED, key: tuple[int, ...] = ()):
        seed = int(seed)
        if seed < 0 or seed >= 2**64:
            raise ValueError(f"seed must be a 64-bit unsigned integer, got {seed}")
        self.seed = seed
        self.key = tuple(int(k) for k in key)
        ss = np.random.SeedSequence(seed, spawn_key=self.key)
        self._gen = np.random.Generator(np.random.Philox(ss))

    def substream(self, *key: int) -> RandomStream:
        """Return an independent stream whose key extends this one."""
        return RandomStream(self.seed, self.key + tuple(key))

    @property
    def generator(self) -> np.random.Generator:
        return self._gen

    def standard_normal(self, shape) -> np.ndarray:
        return self._gen.standard_normal(shape)

    def complex_normal(self, shape, component_variance: float = 1.0) -> np.ndarray:
        """Circularly symmetric complex Gaussian samples.

        Real and imaginary parts are independent N(0, component_variance),
        so ``E|z|^2 = 2 * component_variance``.
        """
        shape = (int(shape),) if np.ndim(shape) == 0 else tuple(int(s) for s in shape)
        raw = self._gen.standard_normal(shape + (2,))
        if component_variance != 1.0:
            raw *= np.sqrt(component_variance)
        return raw.view(np.complex128)[..., 0]

    def __repr__(self) -> str:
        return f"RandomStream(seed={self.seed}, key={self.key})"


def stable_key(params: dict[str, Any]) -> tuple[int, int]:
    """Map a parameter dict to two 32-bit words, independent of dict order."""
    blob = json.dumps(params, sort_keys=True, separators=(",", ":")).encode()
    digest = hashlib.blake2b(blob, digest_size=8).digest()
    return int.from_bytes(digest[:4], "little"), int.from_bytes(digest[4:], "little")
