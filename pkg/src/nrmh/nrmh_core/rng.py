"""
Seedable random streams for the samplers.

Normals come from the Marsaglia polar method applied to uniforms of a PCG64
bit generator, so a stream is reproducible from its seed alone, independent
of numpy's own normal sampler. Draws are generated in vectorized blocks and
served from buffers.
"""

import numpy as np

from .numerics import Vector

SEED_MASK = (1 << 64) - 1
SEED_SPLIT_MULTIPLIER = 0x9E3779B97F4A7C15
DEFAULT_BUFFER_SIZE = 8192


def split_seed(master: int, index: int) -> int:
    """Seed of the index-th chain derived from a master seed."""
    return (master ^ (index * SEED_SPLIT_MULTIPLIER)) & SEED_MASK


class GaussianStream:
    """Buffered standard normals (polar method) and uniforms over PCG64."""

    name = "PCG64/marsaglia-polar"

    def __init__(self, seed: int, buffer_size: int = DEFAULT_BUFFER_SIZE):
        if buffer_size < 2:
            raise ValueError("buffer_size must be at least 2")
        self.seed = int(seed) & SEED_MASK
        self._generator = np.random.Generator(np.random.PCG64(self.seed))
        self._buffer_size = buffer_size
        self._normals = np.empty(0)
        self._normal_pos = 0
        self._uniforms = np.empty(0)
        self._uniform_pos = 0

    def _polar_block(self) -> Vector:
        pairs_needed = (self._buffer_size + 1) // 2
        blocks = []
        while pairs_needed > 0:
            # acceptance rate of the polar method is pi/4
            draw = 2.0 * self._generator.random((2, int(pairs_needed / 0.78) + 8)) - 1.0
            s = draw[0] ** 2 + draw[1] ** 2
            keep = (s > 0.0) & (s < 1.0)
            u, v, s = draw[0][keep], draw[1][keep], s[keep]
            factor = np.sqrt(-2.0 * np.log(s) / s)
            take = min(pairs_needed, s.size)
            block = np.empty(2 * take)
            block[0::2] = u[:take] * factor[:take]
            block[1::2] = v[:take] * factor[:take]
            blocks.append(block)
            pairs_needed -= take
        return np.concatenate(blocks)

    def normals(self, k: int) -> Vector:
        """Next k standard normal variates."""
        out = np.empty(k)
        filled = 0
        while filled < k:
            if self._normal_pos >= self._normals.size:
                self._normals = self._polar_block()
                self._normal_pos = 0
            take = min(k - filled, self._normals.size - self._normal_pos)
            out[filled : filled + take] = self._normals[self._normal_pos : self._normal_pos + take]
            self._normal_pos += take
            filled += take
        return out

    def uniform(self) -> float:
        """Next uniform variate on [0, 1)."""
        if self._uniform_pos >= self._uniforms.size:
            self._uniforms = self._generator.random(self._buffer_size)
            self._uniform_pos = 0
        u = float(self._uniforms[self._uniform_pos])
        self._uniform_pos += 1
        return u
