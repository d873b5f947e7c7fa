import numpy as np

from gclab.errors import InvalidInputError

_U64 = 2**64


def stream_rng(seed: int, stream: int = 0) -> np.random.Generator:
    """Counter-based generator keyed by (seed, stream).

    Replication r of an experiment uses stream r, so replications can run in any
    order or in parallel and still draw the same numbers.
    """
    if not 0 <= seed < _U64 or not 0 <= stream < _U64:
        raise InvalidInputError(f"seed and stream must be 64-bit unsigned, got ({seed}, {stream})")
    key = np.array([seed, stream], dtype=np.uint64)
    return np.random.Generator(np.random.Philox(key=key))
