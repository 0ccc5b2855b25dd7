"""Independent reference implementations used as test oracles.

These deliberately avoid the package's own linear algebra and search code: GF(2) ranks
use dense numpy elimination, code distances are brute force over all low-weight
operators, and shortest valid paths come from plain BFS or exhaustive enumeration of
simple paths.
"""

from __future__ import annotations

from collections import deque
from itertools import combinations

import numpy as np


def gf2_rank(rows: list[list[int]] | np.ndarray) -> int:
    """Rank over GF(2) of a 0/1 matrix by dense Gaussian elimination."""
    m = np.array(rows, dtype=np.uint8) % 2
    if m.size == 0:
        return 0
    m = m.copy()
    r = 0
    for c in range(m.shape[1]):
        piv = next((i for i in range(r, m.shape[0]) if m[i, c]), None)
        if piv is None:
            continue
        m[[r, piv]] = m[[piv, r]]
        for i in range(m.shape[0]):
            if i != r and m[i, c]:
                m[i] ^= m[r]
        r += 1
        if r == m.shape[0]:
            break
    return r


def symplectic_rows(ops, n: int) -> np.ndarray:
    """Rows ``[x | z]`` of Pauli operators."""
    out = np.zeros((len(ops), 2 * n), dtype=np.uint8)
    for k, p in enumerate(ops):
        for q in p.x_support:
            out[k, q] = 1
        for q in p.z_support:
            out[k, n + q] = 1
    return out


def in_span(rows: np.ndarray, v: np.ndarray) -> bool:
    return gf2_rank(rows) == gf2_rank(np.vstack([rows, v[None, :]]))


def intersection_dim(a: np.ndarray, b: np.ndarray) -> int:
    return gf2_rank(a) + gf2_rank(b) - gf2_rank(np.vstack([a, b]))


def css_distance(x_checks: list[tuple[int, ...]], z_checks: list[tuple[int, ...]], n: int, limit: int) -> int | None:
    """Smallest weight of a nontrivial logical of a CSS stabilizer code, if below ``limit``.

    Enumerates every X-type and Z-type operator of weight ``< limit``.
    """
    hx = np.zeros((len(x_checks), n), dtype=np.uint8)
    hz = np.zeros((len(z_checks), n), dtype=np.uint8)
    for k, f in enumerate(x_checks):
        hx[k, list(f)] = 1
    for k, f in enumerate(z_checks):
        hz[k, list(f)] = 1
    for w in range(1, limit):
        for supp in combinations(range(n), w):
            v = np.zeros(n, dtype=np.uint8)
            v[list(supp)] = 1
            # X-type logical: commutes with Z checks and is not an X stabilizer
            if not (hz @ v % 2).any() and not in_span(hx, v):
                return w
            if not (hx @ v % 2).any() and not in_span(hz, v):
                return w
    return None


def valid_path_length(g, src: int, targets: list[int], occupied: set[int]) -> int | None:
    """Edge count of a shortest valid path, by BFS (color) or path enumeration (surface)."""
    targets = [t for t in targets if t != src and t not in occupied]
    if src in occupied or not targets:
        return None
    tset = set(targets)

    def free(v: int) -> bool:
        return g.types[v] == "A" and v not in occupied

    if g.substrate == "color":
        dist = {src: 0}
        queue = deque([src])
        best = None
        while queue:
            u = queue.popleft()
            for v in g.adjacency[u]:
                if v in tset and u != src:
                    cand = dist[u] + 1
                    best = cand if best is None else min(best, cand)
                if free(v) and v not in dist:
                    dist[v] = dist[u] + 1
                    queue.append(v)
        return best
    best = None

    def dfs(path: list[int], mask: int, limit: int) -> bool:
        u = path[-1]
        for v in g.adjacency[u]:
            if v in path:
                continue
            m = mask | g.direction[(u, v)]
            if v in tset and len(path) >= 2 and m == 7:
                return True
            if len(path) < limit and free(v):
                path.append(v)
                if dfs(path, m, limit):
                    return True
                path.pop()
        return False

    for limit in range(1, sum(free(v) for v in range(g.num_vertices)) + 2):
        if dfs([src], 0, limit):
            best = limit
            break
    return best
