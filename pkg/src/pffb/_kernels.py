"""Inner loops of the brute-force oracle.

Times arrive here as integers (every rational input scaled by one common
denominator), so both paths are exact.  The numba path is used when numba
imports and ``PFFB_DISABLE_NUMBA`` is unset or ``0``; otherwise the
vectorized numpy path runs.  Object arrays (Python ints, for scaled values
that would overflow int64) always take the numpy path.

Compositions are encoded per stage as two ``(K, n)`` int64 tables:
``block_last[k, q]`` is the last job of block ``q`` (``-1`` past the final
block) and ``block_of[k, j]`` is the block holding job ``j``.
"""

import os

import numpy as np

_flag = os.environ.get("PFFB_DISABLE_NUMBA", "0").strip().lower()
NUMBA_REQUESTED = _flag in ("", "0", "false", "no")

try:
    if not NUMBA_REQUESTED:
        raise ImportError
    import numba

    njit = numba.njit(cache=True, nogil=True)
    HAVE_NUMBA = True
except ImportError:
    numba = None
    HAVE_NUMBA = False

MAKESPAN, TOTAL_COMPLETION, MAX_FLOW, TOTAL_FLOW = 0, 1, 2, 3


def expand_stage_numpy(avail, block_last, block_of, machines, p):
    """Completion times at one stage for every (state, composition) pair.

    ``avail`` is ``(S, n)``: when each job becomes available at the stage.
    Returns ``(S*K, n)`` ordered state-major.  Block ``q`` starts at
    ``max(avail[last job of q], start[q - machines] + p)``: with equal
    processing times and nondecreasing starts, the machine freed earliest is
    the one that ran block ``q - machines``.
    """
    S, n = avail.shape
    K = block_last.shape[0]
    starts = np.empty((S, K, n), dtype=avail.dtype)
    for q in range(n):
        last = block_last[:, q]
        ready = avail[:, np.where(last >= 0, last, 0)]
        if q >= machines:
            ready = np.maximum(ready, starts[:, :, q - machines] + p)
        starts[:, :, q] = ready
    idx = np.broadcast_to(block_of[None, :, :], (S, K, n))
    done = np.take_along_axis(starts, idx, axis=2) + p
    return done.reshape(S * K, n)


def objective_values_numpy(done, releases, kind):
    if kind == MAKESPAN:
        return done.max(axis=1)
    if kind == TOTAL_COMPLETION:
        return done.sum(axis=1)
    flows = done - releases[None, :]
    if kind == MAX_FLOW:
        return flows.max(axis=1)
    return flows.sum(axis=1)


if HAVE_NUMBA:

    @njit
    def expand_stage_numba(avail, block_last, block_of, machines, p):
        S, n = avail.shape
        K = block_last.shape[0]
        out = np.empty((S * K, n), dtype=np.int64)
        starts = np.empty(n, dtype=np.int64)
        for s in range(S):
            for k in range(K):
                for q in range(n):
                    last = block_last[k, q]
                    if last < 0:
                        break
                    t = avail[s, last]
                    if q >= machines:
                        prev = starts[q - machines] + p
                        if prev > t:
                            t = prev
                    starts[q] = t
                row = s * K + k
                for j in range(n):
                    out[row, j] = starts[block_of[k, j]] + p
        return out

    @njit
    def objective_values_numba(done, releases, kind):
        N, n = done.shape
        out = np.empty(N, dtype=np.int64)
        for r in range(N):
            acc = 0
            for j in range(n):
                v = done[r, j]
                if kind == MAX_FLOW or kind == TOTAL_FLOW:
                    v -= releases[j]
                if kind == MAKESPAN or kind == MAX_FLOW:
                    if j == 0 or v > acc:
                        acc = v
                else:
                    acc += v
            out[r] = acc
        return out

else:
    expand_stage_numba = None
    objective_values_numba = None


def expand_stage(avail, block_last, block_of, machines, p):
    if HAVE_NUMBA and avail.dtype == np.int64:
        return expand_stage_numba(avail, block_last, block_of, machines, p)
    return expand_stage_numpy(avail, block_last, block_of, machines, p)


def objective_values(done, releases, kind):
    if HAVE_NUMBA and done.dtype == np.int64:
        return objective_values_numba(done, releases, kind)
    return objective_values_numpy(done, releases, kind)


def backend() -> str:
    return "numba" if HAVE_NUMBA else "numpy"


def warmup() -> None:
    """Compile (or load from cache) the numba kernels ahead of timed work."""
    if not HAVE_NUMBA:
        return
    avail = np.zeros((1, 1), dtype=np.int64)
    table = np.zeros((1, 1), dtype=np.int64)
    done = expand_stage_numba(avail, table, table, 1, 1)
    objective_values_numba(done, np.zeros(1, dtype=np.int64), MAKESPAN)
