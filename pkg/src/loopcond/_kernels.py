"""Hot loops: batched operation application, vector key packing, and the
existential search behind the pp-gadgets.

Each kernel exists twice. The numba version is compiled with ``@njit``; the
fallback is vectorised numpy, or for the backtracking search the same
source run as plain Python. Set ``LOOPCOND_NO_NUMBA=1`` to
force the fallback, e.g. to compare timings or when numba is unavailable.
"""
import os

import numpy as np

try:
    import numba
except ImportError:  # pragma: no cover - numba is a declared dependency
    numba = None

NUMBA_AVAILABLE = numba is not None
USE_NUMBA = NUMBA_AVAILABLE and os.environ.get("LOOPCOND_NO_NUMBA", "").lower() not in ("1", "true", "yes")


def apply_op_numpy(table, size, vals, idx):
    """out[b, c] = table[vals[idx[b, 0], c], ..., vals[idx[b, k-1], c]]."""
    flat = np.zeros((idx.shape[0], vals.shape[1]), dtype=np.int64)
    for i in range(idx.shape[1]):
        flat *= size
        flat += vals[idx[:, i]]
    return table[flat].astype(np.uint8)


def _apply_op_loops(table, size, vals, idx):
    nb, k = idx.shape
    width = vals.shape[1]
    out = np.empty((nb, width), dtype=np.uint8)
    for b in range(nb):
        for c in range(width):
            code = 0
            for i in range(k):
                code = code * size + vals[idx[b, i], c]
            out[b, c] = table[code]
    return out


def pack_keys_numpy(rows, bits):
    """Pack each row into one uint64, ``bits`` bits per cell, cell 0 lowest."""
    if rows.shape[1] == 0:
        return np.zeros(rows.shape[0], dtype=np.uint64)
    shifts = np.arange(rows.shape[1], dtype=np.uint64) * np.uint64(bits)
    return np.bitwise_or.reduce(rows.astype(np.uint64) << shifts, axis=1)


def _pack_keys_loops(rows, bits):
    nb, width = rows.shape
    out = np.zeros(nb, dtype=np.uint64)
    for b in range(nb):
        key = np.uint64(0)
        for c in range(width - 1, -1, -1):
            key = (key << np.uint64(bits)) | np.uint64(rows[b, c])
        out[b] = key
    return out


def search_xs_python(mask, d, m, nx, cons, ptr, fixed, xs):
    """Find x_0..x_{nx-1} in {0..d-1} meeting every membership constraint.

    ``cons`` has one row of m slot codes per constraint: a code c >= 0 names
    x_c, a code c < 0 names ``fixed[-c - 1]``. Constraints are grouped by
    the largest x they mention: constraints on fixed values only span
    ``cons[ptr[0]:ptr[1]]`` and those whose largest x is x_t span
    ``cons[ptr[t + 1]:ptr[t + 2]]``. A constraint holds
    when its tuple is in the relation whose flat membership array is
    ``mask``. On success ``xs`` holds the first solution in lexicographic
    order and the return value is True.
    """
    for r in range(ptr[0], ptr[1]):
        code = 0
        for s in range(m):
            code = code * d + fixed[-cons[r, s] - 1]
        if mask[code] == 0:
            return False
    if nx == 0:
        return True
    level = 0
    xs[0] = -1
    while level >= 0:
        xs[level] += 1
        if xs[level] >= d:
            level -= 1
            continue
        ok = True
        for r in range(ptr[level + 1], ptr[level + 2]):
            code = 0
            for s in range(m):
                c = cons[r, s]
                v = xs[c] if c >= 0 else fixed[-c - 1]
                code = code * d + v
            if mask[code] == 0:
                ok = False
                break
        if not ok:
            continue
        if level == nx - 1:
            return True
        level += 1
        xs[level] = -1
    return False


if USE_NUMBA:
    apply_op_numba = numba.njit(cache=True, nogil=True)(_apply_op_loops)
    pack_keys_numba = numba.njit(cache=True, nogil=True)(_pack_keys_loops)
    search_xs_numba = numba.njit(cache=True, nogil=True)(search_xs_python)
    apply_op = apply_op_numba
    pack_keys = pack_keys_numba
    search_xs = search_xs_numba
else:
    apply_op_numba = pack_keys_numba = search_xs_numba = None
    apply_op = apply_op_numpy
    pack_keys = pack_keys_numpy
    search_xs = search_xs_python


def backend() -> str:
    return "numba" if USE_NUMBA else "numpy"
