"""Compiled inner loops over CSR adjacency (indptr, indices with sorted rows).

All loops run sources in index order and neighbours in ascending order, so
floating-point accumulation is deterministic.
"""

import numpy as np
from numba import njit

_INC, _DEC, _BROKEN = 0, 1, 2


@njit(cache=True, nogil=True)
def brandes_paths(indptr, indices, n):
    """Unnormalised betweenness plus the ordered-pair shortest-path length histogram.

    Returns ``(bc, hist)``: ``bc[v]`` sums sigma_st(v)/sigma_st over ordered
    pairs (s, t), so each unordered pair is counted twice; ``hist[d]`` counts
    ordered pairs at distance ``d`` (index 0 unused).
    """
    bc = np.zeros(n)
    hist = np.zeros(max(n, 1), dtype=np.int64)
    dist = np.full(n, -1, dtype=np.int64)
    sigma = np.zeros(n)
    delta = np.zeros(n)
    order = np.empty(n, dtype=np.int64)
    for s in range(n):
        for v in range(n):
            dist[v] = -1
            sigma[v] = 0.0
            delta[v] = 0.0
        dist[s] = 0
        sigma[s] = 1.0
        order[0] = s
        head = 0
        tail = 1
        while head < tail:
            v = order[head]
            head += 1
            dv = dist[v]
            for k in range(indptr[v], indptr[v + 1]):
                w = indices[k]
                if dist[w] < 0:
                    dist[w] = dv + 1
                    order[tail] = w
                    tail += 1
                if dist[w] == dv + 1:
                    sigma[w] += sigma[v]
        for idx in range(tail - 1, 0, -1):
            w = order[idx]
            hist[dist[w]] += 1
            coeff = (1.0 + delta[w]) / sigma[w]
            dw = dist[w]
            for k in range(indptr[w], indptr[w + 1]):
                v = indices[k]
                if dist[v] == dw - 1:
                    delta[v] += sigma[v] * coeff
            bc[w] += delta[w]
    return bc, hist


@njit(cache=True, nogil=True)
def hierarchical_pairs(indptr, indices, degree, n):
    """Count reachable unordered pairs and those whose canonical path is hierarchical.

    The canonical path for u < v follows the BFS tree rooted at u in which every
    node's parent is its smallest-index neighbour one level closer to u. A path
    is hierarchical when its degree sequence never rises after it has fallen
    (plateaus allowed).
    """
    dist = np.full(n, -1, dtype=np.int64)
    state = np.zeros(n, dtype=np.int64)
    order = np.empty(n, dtype=np.int64)
    pairs = 0
    good = 0
    for u in range(n):
        for v in range(n):
            dist[v] = -1
        dist[u] = 0
        state[u] = _INC
        order[0] = u
        head = 0
        tail = 1
        while head < tail:
            v = order[head]
            head += 1
            for k in range(indptr[v], indptr[v + 1]):
                w = indices[k]
                if dist[w] < 0:
                    dist[w] = dist[v] + 1
                    order[tail] = w
                    tail += 1
        # BFS order guarantees a node's parent is processed before it
        for idx in range(1, tail):
            v = order[idx]
            parent = -1
            for k in range(indptr[v], indptr[v + 1]):
                w = indices[k]
                if dist[w] == dist[v] - 1:
                    parent = w
                    break
            ps = state[parent]
            if ps == _BROKEN:
                st = _BROKEN
            elif ps == _INC:
                st = _INC if degree[v] >= degree[parent] else _DEC
            else:
                st = _DEC if degree[v] <= degree[parent] else _BROKEN
            state[v] = st
            if v > u:
                pairs += 1
                if st != _BROKEN:
                    good += 1
    return pairs, good


@njit(cache=True, nogil=True)
def triangles_per_node(indptr, indices, n):
    """Number of links among each node's neighbours."""
    tri = np.zeros(n, dtype=np.int64)
    mark = np.zeros(n, dtype=np.bool_)
    for i in range(n):
        start, stop = indptr[i], indptr[i + 1]
        for k in range(start, stop):
            mark[indices[k]] = True
        count = 0
        for k in range(start, stop):
            j = indices[k]
            for kk in range(indptr[j], indptr[j + 1]):
                if mark[indices[kk]]:
                    count += 1
        tri[i] = count // 2
        for k in range(start, stop):
            mark[indices[k]] = False
    return tri
