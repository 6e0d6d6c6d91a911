"""Counter-based random substreams keyed by ``(root, path)``.

Every stochastic operation takes an :class:`RngSeed`. The generator for a seed
is a Philox counter-based bit generator whose key is derived from the root and
the integer path through :class:`numpy.random.SeedSequence`, so a draw depends
only on where it sits in the path tree and never on execution order.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

_TINY = np.nextafter(0.0, 1.0)
_BELOW_ONE = np.nextafter(1.0, 0.0)


@dataclass(frozen=True)
class RngSeed:
    root: int
    path: tuple[int, ...] = ()

    def __post_init__(self):
        if not 0 <= int(self.root) < 2**64:
            raise ValueError("seed root must be a 64-bit unsigned integer")
        if any(int(p) < 0 for p in self.path):
            raise ValueError("seed path entries must be nonnegative")
        object.__setattr__(self, "root", int(self.root))
        object.__setattr__(self, "path", tuple(int(p) for p in self.path))

    def child(self, *indices: int) -> RngSeed:
        return RngSeed(self.root, self.path + tuple(indices))

    def generator(self) -> np.random.Generator:
        ss = np.random.SeedSequence(self.root, spawn_key=self.path)
        return np.random.Generator(np.random.Philox(ss))

    def uniforms(self, size=None):
        """Uniforms on the open interval, clamped one ulp away from 0 and 1."""
        u = self.generator().random(size)
        return np.clip(u, _TINY, _BELOW_ONE)


def as_seed(seed: RngSeed | int) -> RngSeed:
    return seed if isinstance(seed, RngSeed) else RngSeed(int(seed))


def open_uniforms(gen: np.random.Generator, size=None):
    return np.clip(gen.random(size), _TINY, _BELOW_ONE)
