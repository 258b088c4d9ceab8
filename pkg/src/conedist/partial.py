"""Partially specified symmetric matrices over a graph.

A :class:`PartialMatrix` stores the diagonal and one value per edge of its
graph. Entries at non-edges are unknown; completion routines fill them in.
"""

from __future__ import annotations

from dataclasses import dataclass
from pathlib import Path
from typing import Iterable

import numpy as np

from .graph import Graph, GraphError, induced_subgraph, maximal_cliques
from .numerics import as_symmetric, sym_eig

PP_TOL = 1e-9


class PartialMatrixError(ValueError):
    pass


@dataclass(frozen=True, eq=False)
class PartialMatrix:
    graph: Graph
    diag: np.ndarray
    off: dict

    def __post_init__(self):
        d = np.asarray(self.diag, dtype=float).copy()
        if d.shape != (self.graph.n,):
            raise PartialMatrixError(f"diagonal has shape {d.shape}, expected ({self.graph.n},)")
        off = {}
        for e, val in self.off.items():
            u, v = sorted((int(e[0]), int(e[1])))
            off[(u, v)] = float(val)
        if set(off) != set(self.graph.edges):
            raise PartialMatrixError("off-diagonal entries must match the graph edges exactly")
        if not np.all(np.isfinite(d)) or not all(np.isfinite(x) for x in off.values()):
            raise PartialMatrixError("entries must be finite")
        d.setflags(write=False)
        object.__setattr__(self, "diag", d)
        object.__setattr__(self, "off", off)

    @property
    def n(self) -> int:
        return self.graph.n

    @property
    def trace(self) -> float:
        return float(np.sum(self.diag))

    def entry(self, i: int, j: int) -> float:
        if i == j:
            return float(self.diag[i])
        key = (i, j) if i < j else (j, i)
        if key not in self.off:
            raise KeyError(f"entry {key} is not specified")
        return self.off[key]

    def to_dense(self, fill: float = 0.0) -> np.ndarray:
        """Full matrix with unknown entries set to ``fill``."""
        m = np.full((self.n, self.n), float(fill))
        np.fill_diagonal(m, self.diag)
        for (u, v), val in self.off.items():
            m[u, v] = m[v, u] = val
        return m

    def mask(self) -> np.ndarray:
        """Boolean matrix marking the specified entries."""
        m = np.eye(self.n, dtype=bool)
        for u, v in self.off:
            m[u, v] = m[v, u] = True
        return m

    def shifted(self, eps: float) -> "PartialMatrix":
        """``A + eps * I``."""
        return PartialMatrix(self.graph, self.diag + eps, self.off)

    def scaled(self, c: float) -> "PartialMatrix":
        return PartialMatrix(self.graph, self.diag * c, {e: c * x for e, x in self.off.items()})

    def __add__(self, other: "PartialMatrix") -> "PartialMatrix":
        if other.graph != self.graph:
            raise PartialMatrixError("graphs differ")
        return PartialMatrix(self.graph, self.diag + other.diag, {e: x + other.off[e] for e, x in self.off.items()})

    def relabel(self, perm) -> "PartialMatrix":
        """Vertex ``v`` becomes ``perm[v]``."""
        g = self.graph.relabel(perm)
        d = np.empty(self.n)
        d[list(perm)] = self.diag
        return PartialMatrix(g, d, {(perm[u], perm[v]): x for (u, v), x in self.off.items()})

    def allclose(self, other: "PartialMatrix", atol: float = 1e-12) -> bool:
        return (
            self.graph == other.graph
            and np.allclose(self.diag, other.diag, atol=atol, rtol=0)
            and all(abs(x - other.off[e]) <= atol for e, x in self.off.items())
        )


def project(m, g: Graph) -> PartialMatrix:
    """Keep the diagonal and the edge entries of a full symmetric matrix."""
    a = as_symmetric(m, tol=1e-9)
    if a.shape[0] != g.n:
        raise PartialMatrixError(f"matrix is {a.shape[0]}x{a.shape[0]} but graph has {g.n} vertices")
    return PartialMatrix(g, np.diag(a).copy(), {(u, v): a[u, v] for u, v in g.edges})


def zeros(g: Graph) -> PartialMatrix:
    return PartialMatrix(g, np.zeros(g.n), {e: 0.0 for e in g.edges})


def identity(g: Graph) -> PartialMatrix:
    return PartialMatrix(g, np.ones(g.n), {e: 0.0 for e in g.edges})


def restrict(a: PartialMatrix, vs: Iterable[int], h: Graph | None = None) -> PartialMatrix:
    """Restrict to the vertices ``vs`` (relabelled ``0..k-1`` in sorted order).

    With ``h`` omitted the induced subgraph is used; otherwise ``h`` must be a
    subgraph of the induced subgraph (in the relabelled numbering). For a
    clique this returns the fully specified principal submatrix.
    """
    vs = sorted(set(vs))
    try:
        sub, mapping = induced_subgraph(a.graph, vs)
    except GraphError as exc:
        raise PartialMatrixError(str(exc)) from exc
    if h is None:
        h = sub
    elif h.n != sub.n or not h.edges <= sub.edges:
        raise PartialMatrixError("h is not a subgraph of the induced subgraph")
    return PartialMatrix(h, a.diag[mapping], {(u, v): a.off[(mapping[u], mapping[v])] for u, v in h.edges})


def block(a: PartialMatrix, clique) -> np.ndarray:
    """Fully specified principal submatrix on a clique of ``a.graph``."""
    clique = list(clique)
    k = len(clique)
    out = np.empty((k, k))
    for r, i in enumerate(clique):
        for c, j in enumerate(clique):
            out[r, c] = a.entry(i, j)
    return out


@dataclass
class PositivityReport:
    ok: bool
    min_eigenvalue: float
    clique: tuple | None = None

    def __bool__(self) -> bool:
        return self.ok


def is_partially_positive(a: PartialMatrix, tol: float = PP_TOL, cliques=None) -> PositivityReport:
    """Check every maximal-clique block is PSD (minimum eigenvalue >= -tol).

    On failure the lexicographically first violating clique is reported.
    """
    if tol < 0:
        raise PartialMatrixError("tol must be nonnegative")
    cliques = maximal_cliques(a.graph) if cliques is None else cliques
    worst = np.inf
    for c in cliques:
        lam = float(sym_eig(block(a, c))[0][0])
        worst = min(worst, lam)
        if lam < -tol:
            return PositivityReport(False, lam, tuple(c))
    return PositivityReport(True, float(worst) if cliques else np.inf)


def is_standard_cycle(g: Graph) -> bool:
    return g.n >= 3 and g == Graph.cycle(g.n)


def normal_form_cycle(a: PartialMatrix) -> tuple[np.ndarray, PartialMatrix]:
    """Sign-conjugate a cycle matrix to have as few negative edge entries as possible.

    Returns ``(d, D a D)`` with ``D = diag(d)`` and ``d[0] = +1``. Zero entries
    count as positive. If the product of edge signs is negative the single
    remaining negative entry sits on edge ``{0, 1}``.
    """
    n = a.n
    if not is_standard_cycle(a.graph):
        raise PartialMatrixError("normal form is defined for the standard cycle C_n")
    sign = [1.0 if a.entry(i, (i + 1) % n) >= 0 else -1.0 for i in range(n)]
    d = np.ones(n)
    # walk 1 -> 2 -> ... -> n-1 -> 0 so every edge except {0,1} becomes nonnegative
    d[1] = 1.0
    for i in range(1, n):
        nxt = (i + 1) % n
        if nxt == 0:
            break
        d[nxt] = d[i] * sign[i]
    d[0] = d[n - 1] * sign[n - 1]
    if d[0] < 0:
        d = -d
    off = {(u, v): d[u] * d[v] * x for (u, v), x in a.off.items()}
    return d, PartialMatrix(a.graph, a.diag, off)


def conjugate(a: PartialMatrix, d) -> PartialMatrix:
    d = np.asarray(d, dtype=float)
    return PartialMatrix(a.graph, a.diag, {(u, v): d[u] * d[v] * x for (u, v), x in a.off.items()})


def universal_vertices(g: Graph) -> list[int]:
    return [v for v in range(g.n) if g.degree(v) == g.n - 1]


class ZeroApex(Exception):
    """Apex diagonal and column are both zero; the caller should take the block-diagonal branch."""


def schur_complement_cone(a: PartialMatrix, apex: int) -> PartialMatrix:
    """``Q - b^-1 pi_G(c c^T)`` for the apex ``v*`` of a cone graph.

    ``b`` is the apex diagonal entry and ``c`` its column. The result lives on
    the graph with the apex removed (vertices above ``apex`` shift down by one).
    Raises :class:`ZeroApex` when ``b == 0`` and ``c == 0``.
    """
    g = a.graph
    if not 0 <= apex < g.n or g.degree(apex) != g.n - 1:
        raise PartialMatrixError(f"vertex {apex} is not universal")
    rest = [v for v in range(g.n) if v != apex]
    b = float(a.diag[apex])
    c = np.array([a.entry(v, apex) for v in rest])
    sub = restrict(a, rest)
    if b < 0:
        raise PartialMatrixError("apex diagonal entry is negative; input is not partially positive")
    if b == 0:
        if np.any(c != 0):
            raise PartialMatrixError("apex diagonal is zero but its column is not")
        raise ZeroApex()
    diag = sub.diag - c * c / b
    off = {(u, v): x - c[u] * c[v] / b for (u, v), x in sub.off.items()}
    return PartialMatrix(sub.graph, diag, off)


# -- text format ----------------------------------------------------------

def parse_partial_matrix(text: str, graph: Graph | None = None) -> PartialMatrix:
    """Parse a header ``n`` followed by lines ``i j value`` (``i <= j``).

    Every diagonal index must appear exactly once. Without ``graph`` the edge
    set is read off the off-diagonal lines; with it, the lines must cover
    exactly its edges.
    """
    rows = []
    for raw in text.splitlines():
        line = raw.split("#", 1)[0].strip()
        if line:
            rows.append(line.split())
    if not rows or len(rows[0]) != 1:
        raise PartialMatrixError("header must be a single integer n")
    try:
        n = int(rows[0][0])
        diag = [None] * n
        off = {}
        for r in rows[1:]:
            if len(r) != 3:
                raise PartialMatrixError(f"bad entry line {' '.join(r)!r}")
            i, j, val = int(r[0]), int(r[1]), float(r[2])
            if not (0 <= i <= j < n):
                raise PartialMatrixError(f"entry ({i}, {j}) must satisfy 0 <= i <= j < n")
            if i == j:
                if diag[i] is not None:
                    raise PartialMatrixError(f"diagonal entry {i} repeated")
                diag[i] = val
            else:
                if (i, j) in off:
                    raise PartialMatrixError(f"entry ({i}, {j}) repeated")
                off[(i, j)] = val
    except ValueError as exc:
        if isinstance(exc, PartialMatrixError):
            raise
        raise PartialMatrixError(str(exc)) from exc
    missing = [i for i, x in enumerate(diag) if x is None]
    if missing:
        raise PartialMatrixError(f"missing diagonal entries {missing}")
    if graph is None:
        graph = Graph(n, frozenset(off))
    else:
        if graph.n != n:
            raise PartialMatrixError("matrix size does not match the graph")
        if set(off) != set(graph.edges):
            raise PartialMatrixError("specified entries do not match the graph edges")
    return PartialMatrix(graph, np.array(diag, dtype=float), off)


def format_partial_matrix(a: PartialMatrix) -> str:
    lines = [str(a.n)]
    for i in range(a.n):
        lines.append(f"{i} {i} {float(a.diag[i])!r}")
    for (u, v) in sorted(a.off):
        lines.append(f"{u} {v} {a.off[(u, v)]!r}")
    return "\n".join(lines) + "\n"


def read_partial_matrix(path, graph: Graph | None = None) -> PartialMatrix:
    return parse_partial_matrix(Path(path).read_text(), graph)


def write_partial_matrix(a: PartialMatrix, path) -> None:
    Path(path).write_text(format_partial_matrix(a))
