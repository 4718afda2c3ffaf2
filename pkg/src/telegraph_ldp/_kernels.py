"""Compiled path kernels.

Draw 0 of a path's stream picks the initial velocity; draw ``n >= 1`` gives
the ``n``-th holding time. Positions advance as ``pos + v * (t_new - t)``, the
same arithmetic :mod:`telegraph_ldp.sampler` uses on skeletons, so kernel and
skeleton results agree bit for bit.
"""

import math

import numba as nb

from .rng import philox_uniform

OK = 0
HIT_TOP = 1
ABANDONED = 2
TRUNCATED_TIME = 3
TRUNCATED_SWITCHES = 4
EXPLODED = 5


@nb.njit(cache=True, nogil=True)
def segment_rate(n, up0, damped, lam1, lam2):
    """Switch rate of segment ``n`` (1-based) of a path with initial direction ``up0``."""
    up = (n % 2 == 1) == up0
    lam = lam1 if up else lam2
    if damped:
        return lam * ((n + 1) // 2)
    return lam


@nb.njit(cache=True, nogil=True)
def endpoint_kernel(lam1, lam2, c1, c2, alpha, damped, horizon, seed, first, max_switches,
                    pos_out, nsw_out, up0_out, max_out, gridmax_out):
    """Fill per-path D(horizon), N(horizon), initial direction, running max and
    integer-grid max. Returns the offset of the first path that tripped the
    switch cap, or -1."""
    for i in range(pos_out.shape[0]):
        stream = first + i
        up0 = philox_uniform(seed, stream, 0) < alpha
        up = up0
        t = 0.0
        pos = 0.0
        m = 0.0
        gm = 0.0
        count = 0
        while True:
            rate = segment_rate(count + 1, up0, damped, lam1, lam2)
            tau = -math.log(philox_uniform(seed, stream, count + 1)) / rate
            t_new = t + tau
            v = c1 if up else -c2
            last = t_new > horizon
            end = horizon if last else t_new
            if up:
                k = math.floor(end)
                if k > t:
                    g = pos + v * (k - t)
                    if g > gm:
                        gm = g
            else:
                k = math.floor(t) + 1.0
                if k <= end:
                    g = pos + v * (k - t)
                    if g > gm:
                        gm = g
            new_pos = pos + v * (end - t)
            if new_pos > m:
                m = new_pos
            pos = new_pos
            if last:
                break
            count += 1
            if count > max_switches:
                return i
            t = t_new
            up = not up
        pos_out[i] = pos
        nsw_out[i] = count
        up0_out[i] = up0
        max_out[i] = m
        gridmax_out[i] = gm
    return -1


@nb.njit(cache=True, nogil=True)
def crossing_kernel(lam1, lam2, c1, c2, alpha, damped, seed, first, q_top,
                    abandon_log, abandon_gap, t_max, max_switches, max_out, status_out):
    """Simulate paths on [0, t_max] until a stop rule fires; record running max
    and stop reason per path.

    Stop rules: running max above ``q_top``; abandonment; time cap; switch cap.
    Standard process: abandon once ``pos < max - abandon_gap``. Damped process:
    at the start of each leftward segment, abandon once
    ``theta * (max - pos) >= abandon_log`` where ``theta`` is the largest
    exponent making ``exp(theta * future peak increments)`` a supermartingale,
    so that the probability of ever exceeding the current max again is at most
    ``exp(-abandon_log)``.
    """
    for i in range(max_out.shape[0]):
        stream = first + i
        up0 = philox_uniform(seed, stream, 0) < alpha
        up = up0
        t = 0.0
        pos = 0.0
        m = 0.0
        count = 0
        status = OK
        while True:
            rate = segment_rate(count + 1, up0, damped, lam1, lam2)
            tau = -math.log(philox_uniform(seed, stream, count + 1)) / rate
            t_new = t + tau
            v = c1 if up else -c2
            capped = t_new >= t_max
            end = t_max if capped else t_new
            pos_new = pos + v * (end - t)
            if pos_new > m:
                m = pos_new
            if m > q_top:
                status = HIT_TOP
                break
            if capped:
                status = TRUNCATED_TIME
                break
            count += 1
            if count >= max_switches:
                status = TRUNCATED_SWITCHES
                break
            pos = pos_new
            t = t_new
            up = not up
            if damped:
                if not up:
                    b = segment_rate(count + 1, up0, True, lam1, lam2)
                    a = segment_rate(count + 2, up0, True, lam1, lam2)
                    theta = (a * c2 - b * c1) / (c1 * c2)
                    if theta > 0.0 and theta * (m - pos) >= abandon_log:
                        status = ABANDONED
                        break
            elif pos < m - abandon_gap:
                status = ABANDONED
                break
        max_out[i] = m
        status_out[i] = status
