"""
Maximum-cardinality bipartite matching (Hopcroft-Karp) with a Hall-violator
certificate for the unmatched part.
"""

import logging
from collections import deque
from collections.abc import Sequence

logger = logging.getLogger(__name__)


class BipartiteGraph:
    """
    Bipartite graph G = ((U, V), E); vertices on each side are indexed 0, 1, ...
    """
    def __init__(self, num_u: int, num_v: int, edges: Sequence[tuple[int, int]]):
        if num_u < 0 or num_v < 0:
            raise ValueError("Vertex counts must be non-negative")
        self.num_u = num_u
        self.num_v = num_v
        self.adj_u: list[list[int]] = [[] for _ in range(num_u)]
        self.adj_v: list[list[int]] = [[] for _ in range(num_v)]
        seen = set()
        for u, v in edges:
            if not (0 <= u < num_u and 0 <= v < num_v):
                raise ValueError(f"Edge ({u}, {v}) out of range")
            if (u, v) in seen:
                continue
            seen.add((u, v))
            self.adj_u[u].append(v)
            self.adj_v[v].append(u)

    @property
    def num_edges(self) -> int:
        return sum(len(a) for a in self.adj_u)

    def transposed(self) -> "BipartiteGraph":
        return BipartiteGraph(
            self.num_v, self.num_u, [(v, u) for u in range(self.num_u) for v in self.adj_u[u]]
        )


class HopcroftKarp:
    """
    Maximum matching by shortest augmenting paths, phase by phase.

    The depth-first search is iterative so long alternating paths do not hit the
    recursion limit.
    """
    def __init__(self, graph: BipartiteGraph):
        self.graph = graph
        self.matched_pairs_u = graph.num_u * [-1]
        self.matched_pairs_v = graph.num_v * [-1]
        self.dist: list[int] = graph.num_u * [0]
        self.dist_nil = 0
        self._inf = graph.num_u + 1

    def _connect_unmatched_vertices(self) -> bool:
        """Layer U by alternating BFS from the free vertices; True if a free V is reachable."""
        queue = deque()
        inf = self._inf
        for u in range(self.graph.num_u):
            if self.matched_pairs_u[u] == -1:
                self.dist[u] = 0
                queue.append(u)
            else:
                self.dist[u] = inf
        self.dist_nil = inf
        while queue:
            u = queue.popleft()
            if self.dist[u] >= self.dist_nil:
                continue
            for v in self.graph.adj_u[u]:
                w = self.matched_pairs_v[v]
                if w == -1:
                    if self.dist_nil == inf:
                        self.dist_nil = self.dist[u] + 1
                elif self.dist[w] == inf:
                    self.dist[w] = self.dist[u] + 1
                    queue.append(w)
        return self.dist_nil != inf

    def _add_augmenting_path(self, root: int) -> bool:
        stack = [(root, iter(self.graph.adj_u[root]))]
        via: list[int] = []
        while stack:
            u, edges = stack[-1]
            for v in edges:
                w = self.matched_pairs_v[v]
                if w == -1:
                    if self.dist_nil == self.dist[u] + 1:
                        via.append(v)
                        for (x, _), y in zip(stack, via):
                            self.matched_pairs_u[x] = y
                            self.matched_pairs_v[y] = x
                        return True
                elif self.dist[w] == self.dist[u] + 1:
                    via.append(v)
                    stack.append((w, iter(self.graph.adj_u[w])))
                    break
            else:
                # dead end for this phase
                self.dist[u] = self._inf
                stack.pop()
                if via:
                    via.pop()
        return False

    def __call__(self) -> list[tuple[int, int]]:
        self.matched_pairs_u = self.graph.num_u * [-1]
        self.matched_pairs_v = self.graph.num_v * [-1]
        phases = 0
        while self._connect_unmatched_vertices():
            phases += 1
            for u in range(self.graph.num_u):
                if self.matched_pairs_u[u] == -1:
                    self._add_augmenting_path(u)
        matching = [
            (u, v) for u, v in enumerate(self.matched_pairs_u) if v != -1
        ]
        logger.debug(
            f"Hopcroft-Karp: {len(matching)} pairs on {self.graph.num_u}+{self.graph.num_v} "
            f"vertices after {phases} phase(s)"
        )
        return matching

    def hall_violator(self) -> tuple[list[int], list[int]]:
        """
        (F, N(F)) with F in U reachable by alternating paths from unmatched U vertices.

        After a maximum matching every vertex of N(F) is matched into F, so
        |F| - |N(F)| equals the number of unmatched U vertices. Both lists are
        empty when U is fully matched.
        """
        free = [u for u in range(self.graph.num_u) if self.matched_pairs_u[u] == -1]
        reached_u = set(free)
        reached_v: set[int] = set()
        queue = deque(free)
        while queue:
            u = queue.popleft()
            for v in self.graph.adj_u[u]:
                if v in reached_v:
                    continue
                reached_v.add(v)
                w = self.matched_pairs_v[v]
                if w != -1 and w not in reached_u:
                    reached_u.add(w)
                    queue.append(w)
        return sorted(reached_u), sorted(reached_v)


def maximum_matching(graph: BipartiteGraph) -> list[tuple[int, int]]:
    return HopcroftKarp(graph)()
