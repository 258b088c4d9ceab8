"""Compute reference values for the test suite and freeze them in tests/oracles.json.

Nothing here imports the package under test: values come from mpmath,
networkx, brute-force enumeration and an external conic solver (cvxpy with
Clarabel). Run once; the tests only read the JSON.

    python3 scripts/compute_oracles.py
"""

from __future__ import annotations

import itertools
import json
from pathlib import Path

import cvxpy as cp
import mpmath
import networkx as nx
import numpy as np
from scipy.optimize import minimize_scalar

OUT = Path(__file__).resolve().parents[1] / "tests" / "oracles.json"

# W_5 (rim 0..4, hub 5) glued to C_6 along the rim edge {0, 1}; ten vertices
CLIQUE_SUM_10 = [(i, (i + 1) % 5) for i in range(5)] + [(i, 5) for i in range(5)] + \
    [(1, 6), (6, 7), (7, 8), (8, 9), (9, 0)]


def cycle_edges(n):
    return [(i, (i + 1) % n) for i in range(n)]


def wheel_edges(n):
    return cycle_edges(n) + [(i, n) for i in range(n)]


def closed_form(n: int) -> float:
    mpmath.mp.dps = 40
    return float((1 / mpmath.cos(mpmath.pi / n) - 1) / n)


def cvx_epsilon(n, diag, off):
    """min eps such that diag + eps on the diagonal and ``off`` on the edges completes to PSD."""
    M = cp.Variable((n, n), symmetric=True)
    eps = cp.Variable()
    cons = [M >> 0] + [M[i, i] == diag[i] + eps for i in range(n)]
    cons += [M[i, j] == v for (i, j), v in off.items()]
    cp.Problem(cp.Minimize(eps), cons).solve(solver="CLARABEL", tol_gap_abs=1e-11, tol_gap_rel=1e-11,
                                             tol_feas=1e-11)
    return float(eps.value)


def extremal_cycle(n):
    off = {(i, (i + 1) % n): 1.0 / n for i in range(n)}
    off[(0, 1)] = -1.0 / n
    return [1.0 / n] * n, off


def circle_maxcut(n):
    """Best one-parameter arrangement theta_j = j * beta for the rescaled MAX-CUT on C_n."""
    def f(beta):
        return (n - 1) * np.cos(beta) + np.cos((n - 1) * beta)

    grid = np.linspace(0, 2 * np.pi, 200001)
    b0 = grid[np.argmin(f(grid))]
    res = minimize_scalar(f, bounds=(b0 - 1e-4, b0 + 1e-4), method="bounded", options={"xatol": 1e-14})
    return float(res.fun)


def cvx_maxcut(n, edges):
    """(alpha, alpha') for min n * sum_edges X_ij, X_ii = 1/n, with full PSD / clique-block PSD."""
    g = nx.Graph()
    g.add_nodes_from(range(n))
    g.add_edges_from(edges)
    out = []
    for mode in ("full", "cliques"):
        X = cp.Variable((n, n), symmetric=True)
        cons = [X[i, i] == 1.0 / n for i in range(n)]
        if mode == "full":
            cons.append(X >> 0)
        else:
            for K in nx.find_cliques(g):
                K = sorted(K)
                cons.append(X[np.ix_(K, K)] >> 0)
        obj = n * sum(X[i, j] for i, j in edges) if edges else cp.Constant(0)
        prob = cp.Problem(cp.Minimize(obj), cons)
        prob.solve(solver="CLARABEL", tol_gap_abs=1e-11, tol_gap_rel=1e-11, tol_feas=1e-11)
        out.append(float(prob.value))
    return out


def brute_cliques(n, edges):
    es = {frozenset(e) for e in edges}
    cl = [set(s) for r in range(1, n + 1) for s in itertools.combinations(range(n), r)
          if all(frozenset(p) in es for p in itertools.combinations(s, 2))]
    maximal = [sorted(c) for c in cl if not any(c < d for d in cl)]
    return sorted(maximal)


def brute_girth(n, edges):
    g = nx.Graph(edges)
    best = None
    for r in range(4, n + 1):
        for s in itertools.combinations(range(n), r):
            h = g.subgraph(s)
            if nx.is_connected(h) and all(d == 2 for _, d in h.degree()):
                best = r if best is None else min(best, r)
    return best


def has_k4_minor_brute(n, edges):
    """Assign each vertex to one of four branch sets or to none; test the minor condition."""
    g = nx.Graph()
    g.add_nodes_from(range(n))
    g.add_edges_from(edges)
    for assign in itertools.product(range(5), repeat=n):
        sets = [[v for v in range(n) if assign[v] == k] for k in range(4)]
        if any(not s for s in sets) or sets[0][0] != min(v for s in sets for v in s):
            continue
        if not all(nx.is_connected(g.subgraph(s)) for s in sets):
            continue
        if all(any(g.has_edge(u, v) for u in sets[a] for v in sets[b]) for a, b in itertools.combinations(range(4), 2)):
            return True
    return False


def treewidth_at_most(g: nx.Graph, k: int) -> bool:
    """Exact test by dynamic programming over elimination prefixes."""
    nodes = list(g.nodes)
    idx = {v: i for i, v in enumerate(nodes)}
    n = len(nodes)
    adj = [0] * n
    for u, v in g.edges:
        adj[idx[u]] |= 1 << idx[v]
        adj[idx[v]] |= 1 << idx[u]

    def q(s, v):
        # vertices outside s + v reachable from v through s
        seen = 1 << v
        stack = [v]
        out = 0
        while stack:
            x = stack.pop()
            nb = adj[x] & ~seen
            seen |= nb
            out |= nb & ~s
            inside = nb & s
            for y in range(n):
                if inside >> y & 1:
                    stack.append(y)
        return bin(out & ~(1 << v)).count("1")

    ok = {0: True}
    for size in range(1, n + 1):
        for comb in itertools.combinations(range(n), size):
            s = sum(1 << v for v in comb)
            ok[s] = any(ok.get(s & ~(1 << v), False) and q(s & ~(1 << v), v) <= k for v in comb)
    return ok[(1 << n) - 1]


def is_member_brute(g: nx.Graph) -> bool:
    """Recursive definition of the class: chordal, series-parallel, a cone over a member,
    or a clique sum of members along some clique separator (all separators tried)."""
    memo = {}

    def rec(vs: frozenset) -> bool:
        if vs in memo:
            return memo[vs]
        h = g.subgraph(vs)
        if len(vs) <= 3:
            res = True
        elif not nx.is_connected(h):
            res = all(rec(frozenset(c)) for c in nx.connected_components(h))
        elif nx.is_chordal(h) or treewidth_at_most(h, 2):
            res = True
        else:
            res = False
            for v in vs:
                if h.degree(v) == len(vs) - 1 and rec(vs - {v}):
                    res = True
                    break
            if not res:
                cliques = set()
                for K in nx.find_cliques(h):
                    for r in range(1, len(K) + 1):
                        cliques.update(frozenset(c) for c in itertools.combinations(K, r))
                for S in cliques:
                    rest = h.subgraph(vs - S)
                    comps = list(nx.connected_components(rest))
                    if len(comps) < 2:
                        continue
                    pieces = []
                    for c in comps:
                        nb = {w for x in c for w in h[x]} - set(c)
                        pieces.append(frozenset(c) | frozenset(nb))
                    if all(rec(p) for p in pieces):
                        res = True
                        break
        memo[vs] = res
        return res

    return rec(frozenset(g.nodes))


def main():
    data = {}
    data["cycle_epsilon"] = {str(n): closed_form(n) for n in list(range(3, 13)) + [16, 32, 64]}
    data["extremal_epsilon_sdp"] = {str(n): cvx_epsilon(n, *extremal_cycle(n)) for n in range(4, 11)}
    data["maxcut_circle"] = {"C5": circle_maxcut(5), "C7": circle_maxcut(7)}
    data["maxcut_sdp"] = {
        "P2": cvx_maxcut(2, [(0, 1)]),
        "K3": cvx_maxcut(3, [(0, 1), (1, 2), (0, 2)]),
        "C5": cvx_maxcut(5, cycle_edges(5)),
        "C7": cvx_maxcut(7, cycle_edges(7)),
        "W5": cvx_maxcut(6, wheel_edges(5)),
        "CS10": cvx_maxcut(10, CLIQUE_SUM_10),
    }
    data["clique_sum_10_edges"] = CLIQUE_SUM_10
    data["w5_cliques"] = brute_cliques(6, wheel_edges(5))
    data["w6_girth"] = brute_girth(7, wheel_edges(6))
    data["k33_has_k4_minor"] = has_k4_minor_brute(6, [(i, 3 + j) for i in range(3) for j in range(3)])
    data["k33_member"] = is_member_brute(nx.complete_bipartite_graph(3, 3))
    # C_4 with unit diagonal and edges (1, 1, 1, -1)
    bad = {(0, 1): 1.0, (1, 2): 1.0, (2, 3): 1.0, (0, 3): -1.0}
    data["c4_bad_epsilon"] = cvx_epsilon(4, [1.0] * 4, bad)
    phis = [0.0, 0.0, 0.0, np.pi]
    data["c4_bad_sign_distance"] = min(
        abs(s - 2 * np.pi * round(s / (2 * np.pi)))
        for s in (float(np.dot(sg, phis)) for sg in itertools.product((1, -1), repeat=4)))
    # all-negative C_4: fewest negative entries over the 16 conjugations
    data["c4_all_negative_min_negatives"] = min(
        sum(1 for i in range(4) if -d[i] * d[(i + 1) % 4] < 0) for d in itertools.product((1, -1), repeat=4))
    # W_4 with unit diagonal and every edge 1/2: complete with 1/2 everywhere, take the Schur complement
    full = 0.5 * np.eye(5) + 0.5 * np.ones((5, 5))
    schur = full[:4, :4] - np.outer(full[:4, 4], full[:4, 4]) / full[4, 4]
    data["schur_w4"] = {"diag": float(schur[0, 0]), "edge": float(schur[0, 1])}
    # two triangles sharing edge {1, 2}: count perfect elimination orderings by brute force
    tt = nx.Graph([(0, 1), (0, 2), (1, 2), (1, 3), (2, 3)])
    data["two_triangles_peo_count"] = sum(
        all(all(tt.has_edge(a, b) for a, b in itertools.combinations([w for w in tt[v] if order.index(w) > k], 2))
            for k, v in enumerate(order))
        for order in itertools.permutations(range(4)))
    atlas = nx.graph_atlas_g()
    data["atlas_members"] = [i for i, g in enumerate(atlas) if is_member_brute(g)]
    data["atlas_size"] = len(atlas)
    OUT.write_text(json.dumps(data, indent=1) + "\n")
    print(f"wrote {OUT}")


if __name__ == "__main__":
    main()
