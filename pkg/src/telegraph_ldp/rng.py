"""Counter-based uniform streams (Philox4x32-10).

Every uniform is a pure function of ``(seed, stream_index, draw_index)``, so
a path's random numbers do not depend on how paths are batched or spread over
workers. Draw ``j`` of stream ``s`` under key ``seed`` encrypts the counter
``(j, retry, s_lo, s_hi)``; ``retry`` is bumped only when the 53-bit uniform
comes out exactly 0, which is rejected so that ``-log(u)`` stays finite.

Two implementations are kept in lockstep: :func:`uniforms` (numpy, vectorized)
and :func:`philox_uniform` (numba, scalar, used inside compiled kernels).
"""

from __future__ import annotations

from dataclasses import dataclass

import numba as nb
import numpy as np

PHILOX_M0 = 0xD2511F53
PHILOX_M1 = 0xCD9E8D57
PHILOX_W0 = 0x9E3779B9
PHILOX_W1 = 0xBB67AE85
PHILOX_ROUNDS = 10

_MASK32 = 0xFFFFFFFF
_TWO_M53 = 2.0**-53


@dataclass(frozen=True)
class RngStream:
    seed: int
    stream_index: int

    def __post_init__(self):
        if not 0 <= self.seed < 2**64:
            raise ValueError("seed must fit in 64 unsigned bits")
        if not 0 <= self.stream_index < 2**64:
            raise ValueError("stream_index must be a nonnegative 64-bit integer")


def philox4x32(counter, key):
    """Vectorized Philox4x32-10 block function.

    ``counter`` is a 4-tuple and ``key`` a 2-tuple of uint32-valued arrays or
    scalars (broadcast together). Returns the four output words as uint64 arrays
    holding 32-bit values.
    """
    c0, c1, c2, c3 = (np.asarray(c, dtype=np.uint64) & np.uint64(_MASK32) for c in counter)
    k0, k1 = (np.asarray(k, dtype=np.uint64) & np.uint64(_MASK32) for k in key)
    m0, m1 = np.uint64(PHILOX_M0), np.uint64(PHILOX_M1)
    w0, w1 = np.uint64(PHILOX_W0), np.uint64(PHILOX_W1)
    mask, shift = np.uint64(_MASK32), np.uint64(32)
    for r in range(PHILOX_ROUNDS):
        if r:
            k0 = (k0 + w0) & mask
            k1 = (k1 + w1) & mask
        p0 = m0 * c0
        p1 = m1 * c2
        c0, c1, c2, c3 = (
            (p1 >> shift) ^ c1 ^ k0,
            p1 & mask,
            (p0 >> shift) ^ c3 ^ k1,
            p0 & mask,
        )
    return c0, c1, c2, c3


def _raw_uniform(seed, stream, draw, retry):
    seed = np.uint64(seed)
    stream = np.asarray(stream, dtype=np.uint64)
    draw = np.asarray(draw, dtype=np.uint64)
    mask, shift = np.uint64(_MASK32), np.uint64(32)
    w0, w1, _, _ = philox4x32(
        (draw & mask, np.asarray(retry, dtype=np.uint64), stream & mask, stream >> shift),
        (seed & mask, seed >> shift),
    )
    bits = (w0 << np.uint64(21)) | (w1 >> np.uint64(11))
    return bits.astype(np.float64) * _TWO_M53


def uniforms(seed: int, stream, draw) -> np.ndarray:
    """Uniforms in (0, 1) for broadcast arrays of stream and draw indices."""
    stream, draw = np.broadcast_arrays(np.asarray(stream, np.uint64), np.asarray(draw, np.uint64))
    u = np.array(_raw_uniform(seed, stream, draw, 0), dtype=np.float64, ndmin=1)
    zero = u == 0.0
    retry = 0
    while zero.any():
        retry += 1
        u[zero] = _raw_uniform(seed, stream[zero], draw[zero], retry)
        zero = u == 0.0
    return u.reshape(stream.shape)


def stream_uniforms(stream: RngStream, start: int, count: int) -> np.ndarray:
    """``count`` consecutive draws of one stream, beginning at ``start``."""
    draws = np.arange(start, start + count, dtype=np.uint64)
    return uniforms(stream.seed, np.uint64(stream.stream_index), draws)


@nb.njit(cache=True, nogil=True)
def _philox_words01(c0, c1, c2, c3, k0, k1):
    mask = np.uint64(_MASK32)
    for r in range(PHILOX_ROUNDS):
        if r > 0:
            k0 = (k0 + np.uint64(PHILOX_W0)) & mask
            k1 = (k1 + np.uint64(PHILOX_W1)) & mask
        p0 = np.uint64(PHILOX_M0) * c0
        p1 = np.uint64(PHILOX_M1) * c2
        n0 = (p1 >> np.uint64(32)) ^ c1 ^ k0
        n1 = p1 & mask
        n2 = (p0 >> np.uint64(32)) ^ c3 ^ k1
        n3 = p0 & mask
        c0, c1, c2, c3 = n0, n1, n2, n3
    return c0, c1


@nb.njit(cache=True, nogil=True)
def philox_uniform(seed, stream, draw):
    """Scalar twin of :func:`uniforms` for use inside compiled kernels."""
    mask = np.uint64(_MASK32)
    seed = np.uint64(seed)
    stream = np.uint64(stream)
    draw = np.uint64(draw)
    retry = np.uint64(0)
    while True:
        w0, w1 = _philox_words01(
            draw & mask, retry, stream & mask, stream >> np.uint64(32), seed & mask, seed >> np.uint64(32)
        )
        bits = (w0 << np.uint64(21)) | (w1 >> np.uint64(11))
        u = np.float64(bits) * _TWO_M53
        if u != 0.0:
            return u
        retry += np.uint64(1)
