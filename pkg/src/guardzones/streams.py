"""Seeded random substreams.

Every Monte Carlo quantity is drawn from a substream keyed by
``(seed, purpose, block)``.  Realization ``k`` always lives in block
``k // BLOCK_SIZE``, so results do not depend on how blocks are spread
over workers.
"""
import numpy as np

BLOCK_SIZE = 500

# purpose keys
PLACEMENT = 0
SHADOWING = 1
CHIP_OFFSET = 2
FADING = 3


def block_rng(seed, purpose, block):
    ss = np.random.SeedSequence(int(seed), spawn_key=(int(purpose), int(block)))
    return np.random.default_rng(ss)


def blocks(n, block_size=BLOCK_SIZE):
    """Yield ``(block_index, start, stop)`` covering ``range(n)``."""
    for b, start in enumerate(range(0, n, block_size)):
        yield b, start, min(start + block_size, n)
