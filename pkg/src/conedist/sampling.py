"""Seeded samplers for trace-one partially positive matrices.

Generic samples start at ``I/n``, which lies inside every maximal-clique PSD
cone, and move along a random trace-zero direction supported on the graph.
Because each clique block of ``I/n`` is a multiple of the identity, the exit
point from the partially positive set is known in closed form. With
probability ``boundary`` the sample is placed exactly on that exit point;
otherwise it is drawn uniformly on the segment.
"""

from __future__ import annotations

import numpy as np

from .graph import Graph, maximal_cliques
from .partial import PartialMatrix, block, project
from .numerics import sym_eig


def random_direction(g: Graph, rng: np.random.Generator) -> PartialMatrix:
    """Gaussian partial matrix on ``g`` with its diagonal shifted to trace zero."""
    n = g.n
    m = rng.standard_normal((n, n))
    m = (m + m.T) / 2
    d = np.diag(m) - np.trace(m) / n
    np.fill_diagonal(m, d)
    return project(m, g)


def exit_step(direction: PartialMatrix, cliques=None) -> float:
    """Largest ``t`` with ``I/n + t D`` partially positive (``inf`` if unbounded)."""
    n = direction.n
    cliques = maximal_cliques(direction.graph) if cliques is None else cliques
    t = np.inf
    for c in cliques:
        lam = float(sym_eig(block(direction, c))[0][0])
        if lam < 0:
            t = min(t, (1.0 / n) / -lam)
    return t


def sample_partially_positive(g: Graph, rng: np.random.Generator, boundary: float = 0.5,
                              cliques=None) -> PartialMatrix:
    """A trace-one element of the partially positive set on ``g``."""
    if g.n == 0:
        raise ValueError("graph has no vertices")
    cliques = maximal_cliques(g) if cliques is None else cliques
    center = PartialMatrix(g, np.full(g.n, 1.0 / g.n), {e: 0.0 for e in g.edges})
    for _ in range(100):
        d = random_direction(g, rng)
        t = exit_step(d, cliques)
        if np.isfinite(t):
            break
    else:
        return center
    s = t if rng.random() < boundary else t * rng.random()
    return PartialMatrix(g, center.diag + s * d.diag, {e: s * x for e, x in d.off.items()})


def sample_extreme_cycle(n: int, rng: np.random.Generator) -> PartialMatrix:
    """Normal-form cycle matrix with singular edge blocks and trace one.

    Random positive diagonal; edge ``{0, 1}`` is ``-sqrt(d_0 d_1)``, every
    other edge ``+sqrt(d_i d_j)``.
    """
    d = rng.uniform(0.2, 1.0, n)
    d /= d.sum()
    g = Graph.cycle(n)
    off = {}
    for i in range(n):
        j = (i + 1) % n
        off[(min(i, j), max(i, j))] = np.sqrt(d[i] * d[j])
    off[(0, 1)] = -off[(0, 1)]
    return PartialMatrix(g, d, off)


def embed_on_cone(base: PartialMatrix, apex_weight: float = 0.0, column=None) -> PartialMatrix:
    """Extend ``base`` to the cone over its graph (apex numbered ``n``).

    With ``column = c`` and ``apex_weight = b > 0`` the result has Schur
    complement ``base`` at the apex: the rim block becomes
    ``base + pi(c c^T) / b``. The default zero apex gives a block-diagonal
    extension. The result is rescaled to trace one.
    """
    n = base.n
    g = base.graph.cone()
    c = np.zeros(n) if column is None else np.asarray(column, dtype=float)
    b = float(apex_weight)
    if b == 0 and np.any(c != 0):
        raise ValueError("a zero apex needs a zero column")
    diag = np.concatenate([base.diag + (c * c / b if b > 0 else 0.0), [b]])
    off = {}
    for (u, v), x in base.off.items():
        off[(u, v)] = x + (c[u] * c[v] / b if b > 0 else 0.0)
    for v in range(n):
        off[(v, n)] = c[v]
    a = PartialMatrix(g, diag, off)
    return a.scaled(1.0 / a.trace)
