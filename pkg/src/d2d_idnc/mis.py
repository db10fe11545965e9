"""Maximum independent sets of conflict graphs.

``maximum_independent_set`` runs Bron-Kerbosch with pivoting over the
complement graph (maximal cliques of the complement are maximal
independent sets of the graph), pruned by a greedy clique-cover bound.
That yields the independence number; a second, index-ordered search then
returns the lexicographically smallest set of that size so results are
reproducible. Connected components are solved separately.

``brute_force_mis`` is an exhaustive subset check used as a test oracle.
"""

from __future__ import annotations

import sys
from typing import Sequence

import numpy as np

from ._bitset import bits, mask_of
from .errors import CapacityError

DEFAULT_MAX_VERTICES = 400
BRUTE_FORCE_LIMIT = 22

sys.setrecursionlimit(max(sys.getrecursionlimit(), 10_000))


def _adjacency(graph) -> Sequence[int]:
    return graph.adj if hasattr(graph, "adj") else tuple(graph)


def is_independent(graph, vertices) -> bool:
    adj = _adjacency(graph)
    m = vertices if isinstance(vertices, int) else mask_of(vertices)
    for v in bits(m):
        if adj[v] & m:
            return False
    return True


def _clique_cover(p: int, adj: Sequence[int]) -> list[int]:
    """Greedy partition of ``p`` into cliques of the graph.

    An independent set takes at most one vertex per clique, so the number
    of classes still meeting the candidate set bounds how many more
    vertices can join.
    """
    classes = []
    while p:
        v = (p & -p).bit_length() - 1
        cls = 1 << v
        q = p & adj[v]
        p &= ~cls
        while q:
            w = (q & -q).bit_length() - 1
            p &= ~(1 << w)
            cls |= 1 << w
            q &= adj[w]
        classes.append(cls)
    return classes


def _live(classes: list[int], p: int) -> int:
    return sum(1 for cls in classes if cls & p)


def _components(mask: int, adj: Sequence[int]) -> list[int]:
    comps = []
    while mask:
        seed = mask & -mask
        comp = frontier = seed
        while frontier:
            v = (frontier & -frontier).bit_length() - 1
            frontier &= frontier - 1
            new = adj[v] & mask & ~comp
            comp |= new
            frontier |= new
        comps.append(comp)
        mask &= ~comp
    return comps


def _greedy(p: int, adj: Sequence[int]) -> int:
    """Min-degree greedy independent set, a starting incumbent."""
    chosen = 0
    while p:
        v = min(bits(p), key=lambda u: ((adj[u] & p).bit_count(), u))
        chosen |= 1 << v
        p &= ~adj[v] & ~(1 << v)
    return chosen


class _Solver:
    """Search state for one connected component."""

    def __init__(self, adj: Sequence[int], universe: int):
        self.adj = adj
        # complement adjacency, restricted to the component
        self.comp = {v: universe & ~adj[v] & ~(1 << v) for v in bits(universe)}
        self.universe = universe
        self.best = 0
        self.best_size = 0
        self.nodes = 0

    def bron_kerbosch(self, r: int, r_size: int, p: int, x: int) -> None:
        self.nodes += 1
        if r_size > self.best_size:
            self.best, self.best_size = r, r_size
        if not p:
            return
        cover = _clique_cover(p, self.adj)
        if r_size + len(cover) <= self.best_size:
            return
        comp = self.comp
        pivot, reach = -1, -1
        for u in bits(p | x):
            c = (p & comp[u]).bit_count()
            if c > reach:
                pivot, reach = u, c
        for v in bits(p & ~comp[pivot]):
            self.bron_kerbosch(r | 1 << v, r_size + 1, p & comp[v], x & comp[v])
            p &= ~(1 << v)
            x |= 1 << v
            if r_size + _live(cover, p) <= self.best_size:
                return

    def first_of_size(self, r: int, r_size: int, p: int, target: int) -> int | None:
        """Lexicographically first independent set of ``target`` vertices."""
        self.nodes += 1
        if r_size == target:
            return r
        cover = _clique_cover(p, self.adj)
        comp = self.comp
        while p:
            if r_size + _live(cover, p) < target:
                return None
            v = (p & -p).bit_length() - 1
            p &= ~(1 << v)
            found = self.first_of_size(r | 1 << v, r_size + 1, p & comp[v], target)
            if found is not None:
                return found
        return None


def independence_number(graph, max_vertices: int = DEFAULT_MAX_VERTICES) -> int:
    return len(maximum_independent_set(graph, max_vertices))


def maximum_independent_set(graph, max_vertices: int = DEFAULT_MAX_VERTICES) -> frozenset[int]:
    """Lexicographically smallest maximum independent set, as vertex indices."""
    adj = _adjacency(graph)
    n = len(adj)
    if n > max_vertices:
        raise CapacityError(f"graph has {n} vertices, above the MIS ceiling of {max_vertices}", n, max_vertices)
    result = 0
    for comp in _components((1 << n) - 1, adj):
        if comp & (comp - 1) == 0:
            result |= comp
            continue
        solver = _Solver(adj, comp)
        solver.best = _greedy(comp, adj)
        solver.best_size = solver.best.bit_count()
        solver.bron_kerbosch(0, 0, comp, 0)
        lex = solver.first_of_size(0, 0, comp, solver.best_size)
        result |= lex
    return frozenset(bits(result))


def brute_force_mis(graph, limit: int = BRUTE_FORCE_LIMIT) -> frozenset[int]:
    """Exhaustive maximum independent set with the same tie-break.

    Every subset is classified as independent or not by extending subsets
    one highest vertex at a time, so memory is ``2**n`` booleans.
    """
    adj = _adjacency(graph)
    n = len(adj)
    if n > limit:
        raise CapacityError(f"brute force limited to {limit} vertices, got {n}", n, limit)
    if n == 0:
        return frozenset()
    indep = np.ones(1, dtype=bool)
    for i in range(n):
        lower = np.arange(1 << i, dtype=np.int64)
        clash = (lower & (adj[i] & ((1 << i) - 1))) != 0
        indep = np.concatenate([indep, indep & ~clash])
    masks = np.flatnonzero(indep).astype(np.int64)
    sizes = np.zeros(masks.shape, dtype=np.int64)
    for i in range(n):
        sizes += (masks >> i) & 1
    best = masks[sizes == sizes.max()]
    # Equal-size sorted tuples compare like membership vectors read from
    # index 0 upward, with membership preferred: maximise bit-reversed masks.
    rev = np.zeros(best.shape, dtype=np.int64)
    for i in range(n):
        rev |= ((best >> i) & 1) << (n - 1 - i)
    return frozenset(bits(int(best[np.argmax(rev)])))
