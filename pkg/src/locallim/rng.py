"""Counter-based random streams addressed by (master seed, stream index).

Each stream is a Philox generator keyed through ``SeedSequence`` with the
stream index as spawn key, so replicate ``i`` draws the same numbers no matter
which worker runs it or in what order.
"""

from __future__ import annotations

import numpy as np

# Streams at or above this index are reserved for roots and references.
ROOT_STREAM_BASE = 1 << 40
REFERENCE_STREAM_BASE = 1 << 41

MASK64 = (1 << 64) - 1


def derive_seed(master: int, stream: int) -> np.random.Generator:
    ss = np.random.SeedSequence(entropy=master & MASK64, spawn_key=(stream,))
    return np.random.Generator(np.random.Philox(ss))


def root_stream(master: int, replicate: int) -> np.random.Generator:
    return derive_seed(master, ROOT_STREAM_BASE + replicate)


def reference_stream(master: int, index: int = 0) -> np.random.Generator:
    return derive_seed(master, REFERENCE_STREAM_BASE + index)


def uniform_ints(rng: np.random.Generator, low: int, high: int, size: int) -> list[int]:
    """``size`` integers uniform on ``low..high-1`` as a list.

    Scaled 53-bit uniforms: a per-value bias of at most ``(high-low) / 2**53``
    in exchange for a much cheaper call than ``Generator.integers``.
    """
    span = high - low
    return [low + int(u * span) for u in rng.random(size).tolist()]


class PoissonBuffer:
    """Scalar Poisson draws served from bulk numpy blocks.

    Used in hot loops where a per-draw call into numpy would dominate.
    """

    def __init__(self, rng: np.random.Generator, lam: float = 1.0, block: int = 1 << 16):
        self.rng = rng
        self.lam = lam
        self.block = block
        self._buf: list[int] = []
        self._i = 0

    def __call__(self) -> int:
        if self._i >= len(self._buf):
            self._buf = self.rng.poisson(self.lam, self.block).tolist()
            self._i = 0
        x = self._buf[self._i]
        self._i += 1
        return x
