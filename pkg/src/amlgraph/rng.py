"""Named random substreams derived from the master seed.

Every stage draws from its own ``numpy.random.Generator`` keyed by a tuple
path, so adding work to one stage never shifts the draws of another.
"""

import numpy as np

POPULATION = 0
PATTERNS = 1
BACKGROUND = 2
ASSEMBLY = 3


def substream(master_seed, *path):
    """Return an independent generator for ``path`` under ``master_seed``."""
    seq = np.random.SeedSequence(entropy=int(master_seed), spawn_key=tuple(int(p) for p in path))
    return np.random.Generator(np.random.PCG64(seq))
