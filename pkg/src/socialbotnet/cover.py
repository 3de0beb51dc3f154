"""Greedy MinCover / MaxCover over follower sets.

Sets are encoded as Python int bitmasks so unions and marginal counts are
single big-int operations. Ties are broken by ascending bot id.
"""
from __future__ import annotations

import heapq


def encode(follower_sets):
    """Return ``{bot: bitmask}`` for ``(bot, set)`` pairs or a ``{bot: set}`` mapping."""
    items = list(follower_sets.items()) if hasattr(follower_sets, "items") else list(follower_sets)
    universe = sorted(set().union(*(s for _, s in items))) if items else []
    index = {x: i for i, x in enumerate(universe)}
    masks = {}
    for bot, s in items:
        m = 0
        for x in s:
            m |= 1 << index[x]
        masks[bot] = m
    return masks


def _check_k(k, n):
    if k < 0 or k > n:
        raise ValueError(f"k={k} must lie in [0, {n}]")


def min_cover_masks(masks, k, covered=0):
    """Greedy MinCover on pre-encoded masks; returns bots in selection order."""
    _check_k(k, len(masks))
    remaining = sorted(masks)
    chosen = []
    for _ in range(k):
        best, best_gain = None, None
        for b in remaining:
            gain = (masks[b] & ~covered).bit_count()
            if best_gain is None or gain < best_gain:
                best, best_gain = b, gain
        chosen.append(best)
        covered |= masks[best]
        remaining.remove(best)
    return chosen


def max_cover_masks(masks, k, covered=0):
    """Lazy greedy MaxCover on pre-encoded masks; returns bots in selection order.

    Marginal gains never grow as the union grows, so a stale heap entry is an
    upper bound and the first entry whose refreshed key still beats the heap
    top is the exact greedy choice (ties included).
    """
    _check_k(k, len(masks))
    heap = [(-(m & ~covered).bit_count(), b) for b, m in masks.items()]
    heapq.heapify(heap)
    chosen = []
    while len(chosen) < k:
        neg, b = heapq.heappop(heap)
        fresh = -(masks[b] & ~covered).bit_count()
        if fresh != neg and heap and (fresh, b) > heap[0]:
            heapq.heappush(heap, (fresh, b))
            continue
        chosen.append(b)
        covered |= masks[b]
    return chosen


def min_cover_greedy(follower_sets, k):
    """Pick ``k`` bots, each time the one adding the fewest new followers."""
    return min_cover_masks(encode(follower_sets), k)


def max_cover_greedy(follower_sets, k):
    """Pick ``k`` bots, each time the one adding the most new followers."""
    return max_cover_masks(encode(follower_sets), k)
