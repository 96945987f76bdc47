"""Independent reference computations used as test oracles.

Nothing here imports the package's symmetry or structure code.
"""
from __future__ import annotations

from itertools import combinations
from math import comb, gcd


def rotations_and_reflections(occ):
    n = len(occ)
    out = []
    for r in range(n):
        rot = tuple(occ[(i + r) % n] for i in range(n))
        out.append(rot)
        out.append(tuple(reversed(rot)))
    return out


def naive_canonical(occ):
    return min(rotations_and_reflections(tuple(occ)))


def bracelet_count(n: int, k: int) -> int:
    """Binary bracelets (necklaces up to rotation and reflection) with k black beads, by Burnside."""
    total = 0
    for r in range(n):
        g = gcd(n, r) if r else n
        length = n // g
        if k % length == 0:
            total += comb(g, k // length)

    def fixed(f, t):
        return sum(comb(f, j) * comb(t, (k - j) // 2) for j in range(f + 1) if (k - j) % 2 == 0 and k - j >= 0)

    if n % 2:
        total += n * fixed(1, (n - 1) // 2)
    else:
        total += (n // 2) * fixed(2, (n - 2) // 2) + (n // 2) * fixed(0, n // 2)
    assert total % (2 * n) == 0
    return total // (2 * n)


def brute_bracelets(n: int, k: int) -> int:
    seen = set()
    for pos in combinations(range(n), k):
        occ = [0] * n
        for p in pos:
            occ[p] = 1
        seen.add(naive_canonical(occ))
    return len(seen)


def ring_dist(a, b, n):
    x = (a - b) % n
    return min(x, n - x)


def brute_blocks(occ):
    """(d, blocks as frozensets, isolated) for a towerless configuration with >= 2 robots."""
    n = len(occ)
    robots = [i for i in range(n) if occ[i]]
    d = min(ring_dist(a, b, n) for a, b in combinations(robots, 2))
    adj = {u: set() for u in robots}
    for u in robots:
        for v in ((u + d) % n, (u - d) % n):
            if occ[v] and v != u:
                adj[u].add(v)
    comps, seen = [], set()
    for u in robots:
        if u in seen:
            continue
        stack, comp = [u], set()
        while stack:
            x = stack.pop()
            if x in comp:
                continue
            comp.add(x)
            stack.extend(adj[x] - comp)
        seen |= comp
        comps.append(frozenset(comp))
    blocks = {c for c in comps if len(c) > 1}
    isolated = sorted(next(iter(c)) for c in comps if len(c) == 1)
    return d, blocks, isolated
