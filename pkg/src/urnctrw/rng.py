"""Per-path random streams.

Every simulated path draws from its own generator derived from
``(master_seed, path_index)`` so results do not depend on how many paths are
run or how they are split across workers.
"""

import numpy as np


def stream(master_seed: int, *key: int) -> np.random.Generator:
    """Independent generator for the spawn key ``key`` under ``master_seed``."""
    ss = np.random.SeedSequence(int(master_seed), spawn_key=tuple(int(k) for k in key))
    return np.random.Generator(np.random.PCG64(ss))


def path_rng(master_seed: int, index: int) -> np.random.Generator:
    return stream(master_seed, index)
