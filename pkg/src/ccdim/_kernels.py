"""Compiled inner loops for G-RR sampling and coverage greedy."""
from __future__ import annotations

import numpy as np
from numba import njit


@njit(cache=True)
def sample_grr_batch(in_ptr, in_src, in_prob, in_eid, key_ptr, key_nodes, sentinel,
                     m, count, seed):
    """Sample ``count`` G-RR sets.

    Returns ``(lengths, covered, nodes)`` laid out set-major, one slot per
    community key. Covered slots have length 0. Edge coins are memoized per
    G-RR set so that all roots of one set share a single realization.
    """
    np.random.seed(seed)
    n = in_ptr.shape[0] - 1
    n_keys = key_ptr.shape[0] - 1
    lengths = np.zeros(count * n_keys, np.int64)
    covered = np.zeros(count * n_keys, np.bool_)
    cap = 1024
    buf = np.empty(cap, np.int64)
    size = 0
    edge_state = np.zeros(max(m, 1), np.int8)  # 0 unknown, 1 live, 2 blocked
    touched = np.empty(max(m, 1), np.int64)
    n_touched = 0
    stamp = np.zeros(n, np.int64)
    cur = 0
    queue = np.empty(n, np.int64)
    for i in range(count):
        for e in range(n_keys):
            out = i * n_keys + e
            lo = key_ptr[e]
            sz = key_ptr[e + 1] - lo
            r = int(np.random.random() * sz)
            if r >= sz:
                r = sz - 1
            root = key_nodes[lo + r]
            if sentinel[root]:
                covered[out] = True
                continue
            cur += 1
            start = size
            if size + 1 > cap:
                cap *= 2
                nb = np.empty(cap, np.int64)
                nb[:size] = buf[:size]
                buf = nb
            buf[size] = root
            size += 1
            stamp[root] = cur
            head = 0
            tail = 1
            queue[0] = root
            hit = False
            while head < tail:
                u = queue[head]
                head += 1
                for idx in range(in_ptr[u], in_ptr[u + 1]):
                    w = in_src[idx]
                    if stamp[w] == cur:
                        continue
                    ed = in_eid[idx]
                    st = edge_state[ed]
                    if st == 0:
                        st = 1 if np.random.random() < in_prob[idx] else 2
                        edge_state[ed] = st
                        touched[n_touched] = ed
                        n_touched += 1
                    if st == 2:
                        continue
                    if sentinel[w]:
                        hit = True
                        break
                    if size + 1 > cap:
                        cap *= 2
                        nb = np.empty(cap, np.int64)
                        nb[:size] = buf[:size]
                        buf = nb
                    buf[size] = w
                    size += 1
                    stamp[w] = cur
                    queue[tail] = w
                    tail += 1
                if hit:
                    break
            if hit:
                size = start
                covered[out] = True
            else:
                lengths[out] = size - start
        for t in range(n_touched):
            edge_state[touched[t]] = 0
        n_touched = 0
    return lengths, covered, buf[:size].copy()


@njit(cache=True)
def cover_node(v, inv_ptr, inv_ent, covered, ent_ptr, nodes, n_keys, counts, gained,
               weights, scores, mark):
    """Mark every uncovered entry containing ``v`` as covered.

    Decrements ``counts[u, key]`` for every node ``u`` of a newly covered entry,
    adds the number of newly covered entries per key into ``gained``, and
    recomputes ``scores[u] = counts[u] @ weights`` for every touched node.
    ``mark`` is scratch space of length n holding no ``True`` on entry.
    """
    touched = []
    for t in range(inv_ptr[v], inv_ptr[v + 1]):
        ent = inv_ent[t]
        if covered[ent]:
            continue
        covered[ent] = True
        key = ent % n_keys
        gained[key] += 1
        for p in range(ent_ptr[ent], ent_ptr[ent + 1]):
            u = nodes[p]
            counts[u, key] -= 1
            if not mark[u]:
                mark[u] = True
                touched.append(u)
    for u in touched:
        mark[u] = False
        acc = 0.0
        for e in range(n_keys):
            acc += counts[u, e] * weights[e]
        scores[u] = acc


@njit(cache=True)
def cover_entries_of(v, inv_ptr, inv_ent, covered):
    for t in range(inv_ptr[v], inv_ptr[v + 1]):
        covered[inv_ent[t]] = True


@njit(cache=True)
def scores_from_counts(counts, weights):
    n, n_keys = counts.shape
    out = np.empty(n, np.float64)
    for u in range(n):
        acc = 0.0
        for e in range(n_keys):
            acc += counts[u, e] * weights[e]
        out[u] = acc
    return out


@njit(cache=True)
def top_k_sum(scores, available, k):
    """Sum of the ``k`` largest available scores (all of them if fewer)."""
    heap = np.empty(max(k, 1), np.float64)
    size = 0
    for u in range(scores.shape[0]):
        if not available[u]:
            continue
        x = scores[u]
        if size < k:
            # sift up into a min-heap
            i = size
            heap[i] = x
            size += 1
            while i > 0:
                parent = (i - 1) // 2
                if heap[parent] <= heap[i]:
                    break
                heap[parent], heap[i] = heap[i], heap[parent]
                i = parent
        elif k > 0 and x > heap[0]:
            heap[0] = x
            i = 0
            while True:
                left = 2 * i + 1
                if left >= size:
                    break
                small = left
                if left + 1 < size and heap[left + 1] < heap[left]:
                    small = left + 1
                if heap[i] <= heap[small]:
                    break
                heap[i], heap[small] = heap[small], heap[i]
                i = small
    total = 0.0
    for i in range(size):
        total += heap[i]
    return total


@njit(cache=True)
def argmax_available(scores, available, rtol):
    """Smallest id whose score is within ``rtol`` (relative) of the best available."""
    best = -np.inf
    for u in range(scores.shape[0]):
        if available[u] and scores[u] > best:
            best = scores[u]
    tol = rtol * max(1.0, abs(best))
    for u in range(scores.shape[0]):
        if available[u] and scores[u] >= best - tol:
            return u
    return -1
