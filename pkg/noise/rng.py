"""Counter-based random streams.

Every block of replicas owns a Philox key derived from the experiment seed
and the block index; the time step selects the counter. A (seed, block,
step) triple therefore always yields the same numbers, whichever worker
draws them and in whatever order.
"""

from dataclasses import dataclass
from typing import List, Tuple

import numpy as np

from common.errors import DomainError

DEFAULT_BATCH_SIZE = 64


@dataclass(frozen=True)
class RandomStreams:
    seed: int
    batch_size: int = DEFAULT_BATCH_SIZE

    def __post_init__(self) -> None:
        if self.seed < 0:
            raise DomainError(f"seed must be nonnegative, got {self.seed}")
        if self.batch_size < 1:
            raise DomainError(f"batch_size must be positive, got {self.batch_size}")

    def key(self, block: int) -> np.ndarray:
        return np.random.SeedSequence(self.seed, spawn_key=(block,)).generate_state(2, dtype=np.uint64)

    def generator(self, block: int, step: int) -> np.random.Generator:
        """Generator for one block at one time step."""
        # the low counter words advance while drawing; the step lives above them
        counter = np.array([0, 0, step, 0], dtype=np.uint64)
        return np.random.Generator(np.random.Philox(key=self.key(block), counter=counter))

    def blocks(self, replicas: int) -> List[Tuple[int, int, int]]:
        """(block, first replica, replica count) covering ``replicas``."""
        if replicas < 1:
            raise DomainError(f"replicas must be positive, got {replicas}")
        out = []
        for block, start in enumerate(range(0, replicas, self.batch_size)):
            out.append((block, start, min(self.batch_size, replicas - start)))
        return out

    def block_of(self, replica: int) -> Tuple[int, int]:
        """(block, offset within the block) of a replica id."""
        return divmod(replica, self.batch_size)
