"""Simple undirected graphs: cliques, holes and chordality.

Vertices are ``0..n-1``; edges are stored as pairs ``(i, j)`` with ``i < j``.
A *hole* is an induced cycle on at least four vertices and the *chordal girth*
is the length of the shortest hole (``math.inf`` for chordal graphs).
"""

from __future__ import annotations

import math
from collections import deque
from dataclasses import dataclass, field
from functools import cached_property
from pathlib import Path
from typing import Iterable, Sequence


class GraphError(ValueError):
    pass


def _norm_edge(u: int, v: int) -> tuple[int, int]:
    return (u, v) if u < v else (v, u)


@dataclass(frozen=True)
class Graph:
    n: int
    edges: frozenset = field(default_factory=frozenset)

    def __post_init__(self):
        if self.n < 0:
            raise GraphError("vertex count must be nonnegative")
        clean = set()
        for e in self.edges:
            u, v = (int(x) for x in e)
            if u == v:
                raise GraphError(f"self-loop at vertex {u}")
            if not (0 <= u < self.n and 0 <= v < self.n):
                raise GraphError(f"edge {(u, v)} out of range for n={self.n}")
            clean.add(_norm_edge(u, v))
        object.__setattr__(self, "edges", frozenset(clean))

    @classmethod
    def from_edges(cls, n: int, edges: Iterable[Sequence[int]]) -> "Graph":
        edges = list(edges)
        seen = set()
        for e in edges:
            key = _norm_edge(int(e[0]), int(e[1]))
            if key in seen:
                raise GraphError(f"duplicate edge {key}")
            seen.add(key)
        return cls(n, frozenset(seen))

    # -- constructors -------------------------------------------------------

    @classmethod
    def empty(cls, n: int) -> "Graph":
        return cls(n)

    @classmethod
    def complete(cls, n: int) -> "Graph":
        return cls(n, frozenset((i, j) for i in range(n) for j in range(i + 1, n)))

    @classmethod
    def path(cls, n: int) -> "Graph":
        return cls(n, frozenset((i, i + 1) for i in range(n - 1)))

    @classmethod
    def cycle(cls, n: int) -> "Graph":
        if n < 3:
            raise GraphError("a cycle needs at least 3 vertices")
        return cls(n, frozenset(_norm_edge(i, (i + 1) % n) for i in range(n)))

    @classmethod
    def wheel(cls, n: int) -> "Graph":
        """Cone over C_n; the hub is vertex ``n``."""
        return cls.cycle(n).cone()

    @classmethod
    def complete_bipartite(cls, a: int, b: int) -> "Graph":
        return cls(a + b, frozenset((i, a + j) for i in range(a) for j in range(b)))

    def cone(self) -> "Graph":
        """Add a universal vertex, numbered ``self.n``."""
        return Graph(self.n + 1, self.edges | {(i, self.n) for i in range(self.n)})

    def join(self, other: "Graph") -> "Graph":
        shift = {(u + self.n, v + self.n) for u, v in other.edges}
        cross = {(i, self.n + j) for i in range(self.n) for j in range(other.n)}
        return Graph(self.n + other.n, self.edges | shift | cross)

    def clique_sum(self, other: "Graph", shared: dict[int, int]) -> tuple["Graph", list[int]]:
        """Glue ``other`` onto ``self`` along the clique ``shared`` (other vertex -> self vertex).

        Returns the sum and the labels the vertices of ``other`` received.
        """
        for a in shared:
            for b in shared:
                if a < b:
                    if not other.has_edge(a, b):
                        raise GraphError("shared vertices are not a clique in the second graph")
                    if not self.has_edge(shared[a], shared[b]):
                        raise GraphError("shared vertices are not a clique in the first graph")
        if len(set(shared.values())) != len(shared):
            raise GraphError("clique map is not injective")
        labels = []
        nxt = self.n
        for v in range(other.n):
            if v in shared:
                labels.append(shared[v])
            else:
                labels.append(nxt)
                nxt += 1
        edges = set(self.edges) | {_norm_edge(labels[u], labels[v]) for u, v in other.edges}
        return Graph(nxt, frozenset(edges)), labels

    def disjoint_union(self, other: "Graph") -> "Graph":
        return self.clique_sum(other, {})[0]

    # -- queries ------------------------------------------------------------

    @property
    def m(self) -> int:
        return len(self.edges)

    @cached_property
    def adj(self) -> tuple[frozenset, ...]:
        nbrs: list[set] = [set() for _ in range(self.n)]
        for u, v in self.edges:
            nbrs[u].add(v)
            nbrs[v].add(u)
        return tuple(frozenset(s) for s in nbrs)

    def has_edge(self, u: int, v: int) -> bool:
        return _norm_edge(u, v) in self.edges

    def degree(self, v: int) -> int:
        return len(self.adj[v])

    def sorted_edges(self) -> list[tuple[int, int]]:
        return sorted(self.edges)

    def non_edges(self) -> list[tuple[int, int]]:
        return [(i, j) for i in range(self.n) for j in range(i + 1, self.n) if (i, j) not in self.edges]

    def is_clique(self, vs: Iterable[int]) -> bool:
        vs = list(vs)
        return all(self.has_edge(a, b) for k, a in enumerate(vs) for b in vs[k + 1:])

    def relabel(self, perm: Sequence[int]) -> "Graph":
        """Vertex ``v`` becomes ``perm[v]``."""
        return Graph(self.n, frozenset(_norm_edge(perm[u], perm[v]) for u, v in self.edges))

    def components(self, removed: Iterable[int] = ()) -> list[list[int]]:
        """Connected components of the graph with ``removed`` deleted, sorted by smallest vertex."""
        gone = set(removed)
        seen = set(gone)
        comps = []
        for s in range(self.n):
            if s in seen:
                continue
            comp = [s]
            seen.add(s)
            stack = [s]
            while stack:
                u = stack.pop()
                for w in self.adj[u]:
                    if w not in seen:
                        seen.add(w)
                        comp.append(w)
                        stack.append(w)
            comps.append(sorted(comp))
        return comps

    def is_connected(self) -> bool:
        return len(self.components()) <= 1


def induced_subgraph(g: Graph, vs: Iterable[int]) -> tuple[Graph, list[int]]:
    """Subgraph induced by ``vs``; vertex ``k`` of the result is ``mapping[k]`` in ``g``."""
    mapping = sorted(set(vs))
    for v in mapping:
        if not 0 <= v < g.n:
            raise GraphError(f"vertex {v} out of range")
    index = {v: k for k, v in enumerate(mapping)}
    edges = {(index[u], index[v]) for u, v in g.edges if u in index and v in index}
    return Graph(len(mapping), frozenset(_norm_edge(*e) for e in edges)), mapping


def maximal_cliques(g: Graph) -> list[tuple[int, ...]]:
    """All inclusion-maximal cliques, each sorted, listed lexicographically.

    Bron-Kerbosch with Tomita pivoting.
    """
    out: list[tuple[int, ...]] = []
    adj = g.adj

    def expand(r: list[int], p: set, x: set):
        if not p and not x:
            out.append(tuple(sorted(r)))
            return
        pivot = max(p | x, key=lambda u: (len(adj[u] & p), -u))
        for v in sorted(p - adj[pivot]):
            expand(r + [v], p & adj[v], x & adj[v])
            p = p - {v}
            x = x | {v}

    expand([], set(range(g.n)), set())
    return sorted(out)


def maximum_cardinality_search(g: Graph) -> list[int]:
    """MCS visiting order; ties go to the smallest vertex. Reversed, it is a PEO for chordal graphs."""
    weight = [0] * g.n
    done = [False] * g.n
    order = []
    for _ in range(g.n):
        v = max((u for u in range(g.n) if not done[u]), key=lambda u: (weight[u], -u))
        done[v] = True
        order.append(v)
        for w in g.adj[v]:
            if not done[w]:
                weight[w] += 1
    return order


def is_perfect_elimination_ordering(g: Graph, order: Sequence[int]) -> bool:
    pos = {v: k for k, v in enumerate(order)}
    for v in order:
        later = [w for w in g.adj[v] if pos[w] > pos[v]]
        if not g.is_clique(later):
            return False
    return True


def shortest_hole(g: Graph) -> list[int] | None:
    """A shortest induced cycle of length >= 4, as a vertex sequence, or ``None``.

    For each edge uv, a shortest u-v path avoiding the edge and all common
    neighbours of u and v closes into an induced cycle; the minimum over edges
    is the chordal girth.
    """
    best: list[int] | None = None
    for u, v in g.sorted_edges():
        blocked = g.adj[u] & g.adj[v]
        prev = {u: None}
        queue = deque([u])
        found = False
        while queue and not found:
            x = queue.popleft()
            for y in sorted(g.adj[x]):
                if y in prev or y in blocked or (x == u and y == v):
                    continue
                prev[y] = x
                if y == v:
                    found = True
                    break
                queue.append(y)
        if not found:
            continue
        path = [v]
        while prev[path[-1]] is not None:
            path.append(prev[path[-1]])
        cyc = path[::-1]
        if len(cyc) >= 4 and (best is None or len(cyc) < len(best)):
            best = cyc
    return best


def is_chordal(g: Graph) -> tuple[bool, list[int]]:
    """``(True, peo)`` with a perfect elimination ordering, or ``(False, hole)``."""
    order = maximum_cardinality_search(g)[::-1]
    if is_perfect_elimination_ordering(g, order):
        return True, order
    hole = shortest_hole(g)
    assert hole is not None, "MCS rejected a graph without holes"
    return False, hole


def chordal_girth(g: Graph) -> float:
    hole = shortest_hole(g)
    return math.inf if hole is None else len(hole)


def is_induced_cycle(g: Graph, cyc: Sequence[int]) -> bool:
    k = len(cyc)
    if k < 3 or len(set(cyc)) != k:
        return False
    for a in range(k):
        for b in range(a + 1, k):
            adjacent = b == a + 1 or (a == 0 and b == k - 1)
            if g.has_edge(cyc[a], cyc[b]) != adjacent:
                return False
    return True


def induced_cycles(g: Graph, min_length: int = 4) -> list[list[int]]:
    """Every induced cycle with at least ``min_length`` vertices, each listed once.

    A cycle is reported starting at its smallest vertex, with its second vertex
    smaller than its last. Exponential in general; meant for desk-scale graphs.
    """
    out = []
    adj = g.adj
    for s in range(g.n):
        def extend(path: list[int]):
            last = path[-1]
            for w in sorted(adj[last]):
                if w <= s or w in path:
                    continue
                # w may touch only `last` among interior path vertices; s is allowed as the closer
                if any(w in adj[p] for p in path[1:-1]):
                    continue
                if s in adj[w]:
                    if len(path) + 1 >= max(min_length, 3) and path[1] < w:
                        out.append(path + [w])
                    continue
                extend(path + [w])

        for t in sorted(adj[s]):
            if t > s:
                extend([s, t])
    return out


# -- text format ----------------------------------------------------------

def parse_graph(text: str) -> Graph:
    """Parse ``n m`` followed by ``m`` lines ``u v``; ``#`` starts a comment."""
    rows = []
    for raw in text.splitlines():
        line = raw.split("#", 1)[0].strip()
        if line:
            rows.append(line.split())
    if not rows:
        raise GraphError("empty graph file")
    try:
        if len(rows[0]) != 2:
            raise GraphError("header must be 'n m'")
        n, m = int(rows[0][0]), int(rows[0][1])
        if len(rows) - 1 != m:
            raise GraphError(f"header promises {m} edges, found {len(rows) - 1}")
        edges = []
        for r in rows[1:]:
            if len(r) != 2:
                raise GraphError(f"bad edge line {' '.join(r)!r}")
            edges.append((int(r[0]), int(r[1])))
    except ValueError as exc:
        if isinstance(exc, GraphError):
            raise
        raise GraphError(str(exc)) from exc
    return Graph.from_edges(n, edges)


def format_graph(g: Graph) -> str:
    lines = [f"{g.n} {g.m}"] + [f"{u} {v}" for u, v in g.sorted_edges()]
    return "\n".join(lines) + "\n"


def read_graph(path) -> Graph:
    return parse_graph(Path(path).read_text())


def write_graph(g: Graph, path) -> None:
    Path(path).write_text(format_graph(g))
