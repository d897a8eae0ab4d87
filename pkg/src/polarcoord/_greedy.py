"""Greedy profile quantizers (compiled).

Both routines take entries sorted by delta and reduce them to ``target``
entries, one cheapest operation at a time, using a binary heap with lazy
invalidation over a doubly linked list.
"""

import heapq

import numpy as np
from numba import njit


@njit(cache=True)
def _h(d):
    if d <= 0.0 or d >= 1.0:
        return 0.0
    return -(d * np.log2(d) + (1.0 - d) * np.log2(1.0 - d))


@njit(cache=True)
def _merge_cost(m1, d1, m2, d2):
    tot = m1 + m2
    avg = (m1 * d1 + m2 * d2) / tot
    c = tot * _h(avg) - m1 * _h(d1) - m2 * _h(d2)
    return c if c > 0.0 else 0.0


@njit(cache=True)
def greedy_degrade(mass_in, delta_in, target):
    n = mass_in.size
    mass = mass_in.copy()
    delta = delta_in.copy()
    nxt = np.arange(1, n + 1)
    prv = np.arange(-1, n - 1)
    alive = np.ones(n, dtype=np.bool_)
    ver = np.zeros(n, dtype=np.int64)
    heap = [(0.0, 0, 0, 0)]
    heap.pop()
    for j in range(n - 1):
        heap.append((_merge_cost(mass[j], delta[j], mass[j + 1], delta[j + 1]), j, 0, 0))
    heapq.heapify(heap)
    count = n
    while count > target and len(heap) > 0:
        cost, left, vl, vr = heapq.heappop(heap)
        if not alive[left]:
            continue
        right = nxt[left]
        if right >= n or ver[left] != vl or ver[right] != vr:
            continue
        tot = mass[left] + mass[right]
        delta[left] = (mass[left] * delta[left] + mass[right] * delta[right]) / tot
        mass[left] = tot
        alive[right] = False
        nxt[left] = nxt[right]
        if nxt[right] < n:
            prv[nxt[right]] = left
        ver[left] += 1
        count -= 1
        p = prv[left]
        if p >= 0:
            heapq.heappush(heap, (_merge_cost(mass[p], delta[p], mass[left], delta[left]),
                                  p, ver[p], ver[left]))
        q = nxt[left]
        if q < n:
            heapq.heappush(heap, (_merge_cost(mass[left], delta[left], mass[q], delta[q]),
                                  left, ver[left], ver[q]))
    return mass[alive], delta[alive]


@njit(cache=True)
def _split_cost(m, lo, mid, hi):
    m_hi = m * (mid - lo) / (hi - lo)
    m_lo = m - m_hi
    c = m * _h(mid) - m_lo * _h(lo) - m_hi * _h(hi)
    return c if c > 0.0 else 0.0


@njit(cache=True)
def greedy_upgrade(mass_in, delta_in, target):
    n = mass_in.size
    mass = mass_in.copy()
    delta = delta_in.copy()
    nxt = np.arange(1, n + 1)
    prv = np.arange(-1, n - 1)
    alive = np.ones(n, dtype=np.bool_)
    ver = np.zeros(n, dtype=np.int64)
    heap = [(0.0, 0, 0)]
    heap.pop()
    for j in range(1, n - 1):
        heap.append((_split_cost(mass[j], delta[j - 1], delta[j], delta[j + 1]), j, 0))
    heapq.heapify(heap)
    count = n
    while count > target and len(heap) > 0:
        cost, j, vj = heapq.heappop(heap)
        if not alive[j] or ver[j] != vj:
            continue
        a, b = prv[j], nxt[j]
        if a < 0 or b >= n:
            continue
        m_hi = mass[j] * (delta[j] - delta[a]) / (delta[b] - delta[a])
        mass[a] += mass[j] - m_hi
        mass[b] += m_hi
        alive[j] = False
        nxt[a] = b
        prv[b] = a
        ver[a] += 1
        ver[b] += 1
        count -= 1
        if prv[a] >= 0:
            heapq.heappush(heap, (_split_cost(mass[a], delta[prv[a]], delta[a], delta[b]), a, ver[a]))
        if nxt[b] < n:
            heapq.heappush(heap, (_split_cost(mass[b], delta[a], delta[b], delta[nxt[b]]), b, ver[b]))
    return mass[alive], delta[alive]
