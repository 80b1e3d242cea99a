"""Compiled inner loops.  All release the GIL so blocks can run on threads."""

from __future__ import annotations

import numba as nb
import numpy as np

from .streams import GOLDEN, INDEX_SALT, MIX1, MIX2

_GOLDEN = np.uint64(GOLDEN)
_MIX1 = np.uint64(MIX1)
_MIX2 = np.uint64(MIX2)
_SALT = np.uint64(INDEX_SALT)
_S30 = np.uint64(30)
_S27 = np.uint64(27)
_S31 = np.uint64(31)
_S11 = np.uint64(11)
_SCALE = 2.0**-53

CENSORED = -1

_jit = nb.njit(nogil=True, cache=True)


@_jit
def _mix64(z):
    z = (z ^ (z >> _S30)) * _MIX1
    z = (z ^ (z >> _S27)) * _MIX2
    return z ^ (z >> _S31)


@_jit
def stream_keys(master_seed, start, count):
    seed_mixed = _mix64(np.uint64(master_seed))
    out = np.empty(count, dtype=np.uint64)
    for j in range(count):
        idx = np.uint64(start + j)
        out[j] = _mix64(seed_mixed ^ _mix64(idx * _SALT + _GOLDEN))
    return out


@_jit
def waiting_times(keys, thresholds, out):
    """First index k (1-based) with u_k < thresholds[k-1], or CENSORED."""
    cap = thresholds.shape[0]
    for i in range(keys.shape[0]):
        state = keys[i]
        result = CENSORED
        for k in range(cap):
            state += _GOLDEN
            u = np.float64(_mix64(state) >> _S11) * _SCALE
            if u < thresholds[k]:
                result = k + 1
                break
        out[i] = result


@_jit
def second_black(keys, cap, first, delta):
    """Two-stage run from one black and one white ball.

    Stage one waits for the first black draw under the unit rule; the urn then
    holds two black balls and ``first`` white balls, and stage two waits for
    the next black draw on the same stream.
    """
    for i in range(keys.shape[0]):
        state = keys[i]
        t1 = CENSORED
        for k in range(cap):
            state += _GOLDEN
            u = np.float64(_mix64(state) >> _S11) * _SCALE
            if u < 1.0 / (2.0 + k):
                t1 = k + 1
                break
        first[i] = t1
        d = CENSORED
        if t1 != CENSORED:
            white = np.float64(t1)
            for k in range(cap):
                state += _GOLDEN
                u = np.float64(_mix64(state) >> _S11) * _SCALE
                if u < 2.0 / (2.0 + white + k):
                    d = k + 1
                    break
        delta[i] = d


@_jit
def black_fractions(keys, b, w, n_draws, out):
    """Classical urn (both colours reinforced): black fraction after n_draws."""
    for i in range(keys.shape[0]):
        state = keys[i]
        black = b
        total = b + w
        for _ in range(n_draws):
            state += _GOLDEN
            u = np.float64(_mix64(state) >> _S11) * _SCALE
            if u < black / total:
                black += 1
            total += 1
        out[i] = black / total
