"""Strategies and brute-force references shared by the tests."""

import itertools

import networkx as nx
import numpy as np
from hypothesis import strategies as st

from conedist.graph import Graph

# one line per acceptance criterion, printed at the end of the pytest run
ACCEPTANCE: list[str] = []


def record(criterion, ok: bool, detail: str) -> bool:
    line = f"{'PASS' if ok else 'FAIL'} criterion {criterion}: {detail}"
    ACCEPTANCE.append(line)
    print(line)
    return ok


@st.composite
def graphs(draw, min_n=1, max_n=8):
    n = draw(st.integers(min_n, max_n))
    pairs = [(i, j) for i in range(n) for j in range(i + 1, n)]
    mask = draw(st.lists(st.booleans(), min_size=len(pairs), max_size=len(pairs)))
    return Graph(n, frozenset(p for p, keep in zip(pairs, mask) if keep))


def random_graph(rng, n, p):
    return Graph(n, frozenset((i, j) for i in range(n) for j in range(i + 1, n) if rng.random() < p))


def to_nx(g: Graph) -> nx.Graph:
    h = nx.Graph()
    h.add_nodes_from(range(g.n))
    h.add_edges_from(g.edges)
    return h


def from_nx(h: nx.Graph) -> Graph:
    h = nx.convert_node_labels_to_integers(h)
    return Graph(h.number_of_nodes(), frozenset(tuple(sorted(e)) for e in h.edges))


def brute_maximal_cliques(g: Graph):
    cl = [frozenset(s) for r in range(1, g.n + 1) for s in itertools.combinations(range(g.n), r)
          if g.is_clique(s)]
    return sorted(tuple(sorted(c)) for c in cl if not any(c < d for d in cl))


def brute_girth(g: Graph):
    h = to_nx(g)
    for r in range(4, g.n + 1):
        for s in itertools.combinations(range(g.n), r):
            sub = h.subgraph(s)
            if all(d == 2 for _, d in sub.degree()) and nx.is_connected(sub):
                return r
    return float("inf")


def has_k4_minor(g: Graph) -> bool:
    """Exhaustive branch-set search; fine up to 7 vertices."""
    h = to_nx(g)
    n = g.n
    for assign in itertools.product(range(5), repeat=n):
        sets = [[v for v in range(n) if assign[v] == k] for k in range(4)]
        if any(not s for s in sets):
            continue
        firsts = [s[0] for s in sets]
        if firsts != sorted(firsts):
            continue
        if not all(nx.is_connected(h.subgraph(s)) for s in sets):
            continue
        if all(any(h.has_edge(u, v) for u in sets[a] for v in sets[b])
               for a, b in itertools.combinations(range(4), 2)):
            return True
    return False


def random_chordal(rng, n, max_clique=4):
    """Grow a chordal graph by attaching each new vertex to a clique of the current graph."""
    edges = set()
    cliques = [[0]]
    for v in range(1, n):
        base = cliques[rng.integers(len(cliques))]
        k = int(rng.integers(1, min(len(base), max_clique - 1) + 1))
        attach = sorted(rng.choice(base, size=k, replace=False).tolist())
        edges.update((u, v) for u in attach)
        cliques.append(attach + [v])
    return Graph(n, frozenset(edges))


def random_series_parallel(rng, n):
    """Start from an edge; repeatedly subdivide an edge or add a parallel path of length 2."""
    edges = {(0, 1)}
    nxt = 2
    while nxt < n:
        u, v = sorted(edges)[rng.integers(len(edges))]
        if rng.random() < 0.5:
            edges.discard((u, v))
        edges.add((min(u, nxt), max(u, nxt)))
        edges.add((min(v, nxt), max(v, nxt)))
        nxt += 1
    return Graph(n, frozenset(edges))


def rank2_oracle(a, starts=None, seed=0):
    """Search for a rank-2 Gram arrangement with nonlinear least squares from many starts.

    Independent of the sign enumeration: with the diagonal fixed, vertex ``i``
    is the planar vector ``sqrt(d_i) (cos phi_i, sin phi_i)`` and the angles are
    fitted to the edge entries directly (``phi_0 = 0``). One start comes from
    the top two eigenpairs of an SDP completion (eigenvalue truncation), the
    rest are uniform; by default ``4 * 2^n`` of them, enough to visit each sign
    branch of the cycle several times. If the SDP finds no PSD completion at
    all, no rank-2 one exists and ``inf`` is returned.
    Returns the smallest maximum residual found.
    """
    from scipy.optimize import least_squares

    from conedist.completion import epsilon_at

    n = a.n
    r = np.sqrt(np.maximum(a.diag, 0.0))
    edges = sorted(a.graph.edges)
    u = np.array([e[0] for e in edges])
    v = np.array([e[1] for e in edges])
    target = np.array([a.off[e] for e in edges])
    scale = r[u] * r[v]

    def angles(x):
        return np.concatenate([[0.0], x])

    def resid(x):
        phi = angles(x)
        return scale * np.cos(phi[u] - phi[v]) - target

    def jac(x):
        phi = angles(x)
        s = -scale * np.sin(phi[u] - phi[v])
        J = np.zeros((len(edges), n))
        J[np.arange(len(edges)), u] += s
        J[np.arange(len(edges)), v] -= s
        return J[:, 1:]

    res = epsilon_at(a)
    if res.raw_epsilon > 1e-7:
        return np.inf
    starts = 4 * 2 ** n if starts is None else starts
    M = res.completion - res.epsilon * np.eye(n)
    w, q = np.linalg.eigh(M)
    V = q[:, -2:] * np.sqrt(np.clip(w[-2:], 0, None))
    phi = np.arctan2(V[:, 1], V[:, 0])
    inits = [phi[1:] - phi[0]]
    rng = np.random.default_rng(seed)
    inits += [rng.uniform(0, 2 * np.pi, n - 1) for _ in range(starts)]
    best = np.inf
    for x0 in inits:
        sol = least_squares(resid, x0, jac=jac, xtol=1e-15, ftol=1e-15, gtol=1e-15, max_nfev=200)
        best = min(best, float(np.max(np.abs(resid(sol.x)))))
        if best < 1e-9:
            break
    return best


def random_class_member(rng, pieces=3, max_piece=6, kinds=(0, 1, 2)):
    """Clique sums of series-parallel graphs (0), chordal graphs (1) and cones over series-parallel graphs (2)."""
    from conedist.graph import maximal_cliques

    def piece():
        kind = kinds[rng.integers(len(kinds))]
        k = int(rng.integers(3, max_piece + 1))
        if kind == 0:
            return random_series_parallel(rng, k)
        if kind == 1:
            return random_chordal(rng, k)
        return random_series_parallel(rng, k - 1).cone()

    g = piece()
    for _ in range(pieces - 1):
        h = piece()
        cg = [c for c in maximal_cliques(g)]
        ch = [c for c in maximal_cliques(h)]
        size = int(rng.integers(1, min(max(map(len, cg)), max(map(len, ch))) + 1))
        a = [c for c in cg if len(c) >= size]
        b = [c for c in ch if len(c) >= size]
        ka = list(a[rng.integers(len(a))])[:size]
        kb = list(b[rng.integers(len(b))])[:size]
        g, _ = g.clique_sum(h, dict(zip(kb, ka)))
    return g
