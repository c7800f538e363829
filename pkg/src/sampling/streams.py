"""
Counter-based random streams keyed by (master seed, stream index)
"""
from dataclasses import dataclass
from typing import Iterator, List, Tuple

import numpy as np

import config


@dataclass(frozen=True)
class StreamFactory:
    """Hands out independent, reproducible numpy Generators

    Stream ``i`` is a Philox generator seeded with
    ``SeedSequence(master_seed, spawn_key=(i,))``, so it depends only on the
    pair and never on how many streams were requested before it.
    """

    master_seed: int = config.MASTER_SEED

    def stream(self, index: int) -> np.random.Generator:
        if index < 0:
            raise ValueError(f"stream index must be nonnegative, got {index}")
        seq = np.random.SeedSequence(self.master_seed, spawn_key=(index,))
        return np.random.Generator(np.random.Philox(seq))

    def streams(self, count: int, start: int = 0) -> List[np.random.Generator]:
        return [self.stream(start + i) for i in range(count)]


def make_stream(master_seed: int, index: int = 0) -> np.random.Generator:
    """Shortcut for ``StreamFactory(master_seed).stream(index)``"""
    return StreamFactory(master_seed).stream(index)


def draw_blocks(draws: int, block_size: int = config.BLOCK_SIZE) -> Iterator[Tuple[int, int]]:
    """
    Split a draw count into fixed blocks

    Yields:
        (block index, draws in this block); block b always consumes stream b
    """
    if draws < 0 or block_size < 1:
        raise ValueError("draws must be >= 0 and block_size >= 1")
    index = 0
    remaining = draws
    while remaining > 0:
        size = min(block_size, remaining)
        yield index, size
        remaining -= size
        index += 1
