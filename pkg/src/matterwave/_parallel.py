"""Chunked, order-preserving thread map.

Results come back in input order whatever the thread count, so outputs are
bitwise identical between runs; the numba kernels release the GIL.
"""
from concurrent.futures import ThreadPoolExecutor

import numpy as np

_CHUNK = 256


def map_chunks(fn, points, threads=1, chunk=_CHUNK):
    """Apply ``fn`` to consecutive row blocks of ``points``; returns the list of results."""
    points = np.asarray(points)
    blocks = [points[i:i + chunk] for i in range(0, max(len(points), 1), chunk)] if len(points) else [points]
    if threads is None or threads <= 1 or len(blocks) == 1:
        return [fn(b) for b in blocks]
    with ThreadPoolExecutor(max_workers=int(threads)) as ex:
        return list(ex.map(fn, blocks))


def pairwise_sum(values):
    """Tree summation along the first axis (fixed order, bounded rounding)."""
    v = np.asarray(values)
    if v.shape[0] == 0:
        return np.zeros(v.shape[1:], dtype=v.dtype)
    while v.shape[0] > 1:
        if v.shape[0] % 2:
            v = np.concatenate([v, np.zeros((1,) + v.shape[1:], dtype=v.dtype)])
        v = v[0::2] + v[1::2]
    return v[0]
