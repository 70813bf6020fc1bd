"""Counter-based random streams.

Every randomized routine draws from a Philox generator keyed by
(seed, stream), so independent consumers of the same seed see identical,
reproducible values regardless of call order.
"""

import numpy as np

# Stream-id families, spaced so derived streams never collide.
STREAM_SKETCH = 0
STREAM_G2_BASE = 1_000
STREAM_RSISVD = 2_000_000
STREAM_GEN = 3_000_000


def philox(seed, stream=0):
    key = np.array([np.uint64(seed & 0xFFFFFFFFFFFFFFFF), np.uint64(stream)])
    return np.random.Generator(np.random.Philox(key=key))


def gaussian(rows, cols, seed, stream=0):
    return philox(seed, stream).standard_normal((rows, cols))
