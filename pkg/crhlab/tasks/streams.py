import numpy as np

BLOCK_SIZE = 1024

TRAIN_STREAM = 0
EVAL_STREAM = 1


def gaussian_rows(seed: int, stream: int, start: int, count: int, dim: int,
                  block_size: int = BLOCK_SIZE) -> np.ndarray:
    """
    Rows start .. start+count of an endless N(0, I) sample stream. Row i depends only
    on (seed, stream, i): blocks of block_size rows each get their own generator.
    """
    if start < 0 or count < 0:
        raise ValueError("start and count must be non-negative")
    out = np.empty((count, dim))
    filled = 0
    while filled < count:
        index = start + filled
        block, offset = divmod(index, block_size)
        rows = np.random.default_rng([seed, stream, block]).standard_normal((block_size, dim))
        take = min(block_size - offset, count - filled)
        out[filled:filled + take] = rows[offset:offset + take]
        filled += take
    return out
