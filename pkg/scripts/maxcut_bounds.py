"""MAX-CUT relaxation values and the clique-decomposition bound on class members.

For each graph the full relaxation value alpha, the clique-decomposed value
alpha', and the interval [alpha', alpha'/(1 + n eps)] are reported, with the
relative width of the interval. Random members are clique sums of
series-parallel, chordal and coned pieces.

    python3 scripts/maxcut_bounds.py --random 10 --seed 1
"""

from __future__ import annotations

import argparse
import sys
from dataclasses import dataclass

import numpy as np

from conedist.graph import Graph, maximal_cliques
from conedist.recognition import is_in_class_G
from conedist.sdp import bound_gap, decompose, maxcut_sdp, solve, solve_decomposed


@dataclass
class BoundConfig:
    random: int = 5
    seed: int = 0
    max_vertices: int = 16
    tol: float = 1e-8


def _random_piece(rng):
    k = int(rng.integers(3, 7))
    kind = rng.integers(3)
    if kind == 0:
        return Graph.cycle(k)
    if kind == 1:
        return Graph.wheel(k)
    return Graph.complete(min(k, 4))


def random_member(rng, pieces: int) -> Graph:
    g = _random_piece(rng)
    for _ in range(pieces - 1):
        h = _random_piece(rng)
        a = maximal_cliques(g)[rng.integers(len(maximal_cliques(g)))]
        b = maximal_cliques(h)[rng.integers(len(maximal_cliques(h)))]
        size = int(rng.integers(1, min(len(a), len(b), 2) + 1))
        g, _ = g.clique_sum(h, dict(zip(b[:size], a[:size])))
    return g


def report(name: str, g: Graph, tol: float) -> dict:
    cert = is_in_class_G(g)
    s = maxcut_sdp(g)
    alpha = solve(s, tol=tol).value
    alpha_prime = solve_decomposed(decompose(s), tol=tol).value
    lo, hi = bound_gap(alpha_prime, cert.epsilon, float(np.trace(s.objective)), g.n)
    return {"graph": name, "n": g.n, "m": g.m, "girth": cert.chordal_girth, "alpha": alpha,
            "alpha_prime": alpha_prime, "upper": hi, "width": (hi - lo) / abs(lo) if lo else 0.0}


def main(argv=None) -> int:
    p = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    p.add_argument("--random", type=int, default=5, help="number of random members")
    p.add_argument("--seed", type=int, default=0)
    ns = p.parse_args(argv)
    cfg = BoundConfig(random=ns.random, seed=ns.seed)
    graphs = {f"C{n}": Graph.cycle(n) for n in (5, 7, 9)} | {f"W{n}": Graph.wheel(n) for n in (5, 6)}
    rng = np.random.default_rng(cfg.seed)
    k = 0
    while k < cfg.random:
        g = random_member(rng, int(rng.integers(2, 4)))
        if g.n <= cfg.max_vertices:
            graphs[f"random{k}"] = g
            k += 1
    print(f"{'graph':>9} {'n':>3} {'m':>3} {'girth':>5} {'alpha':>12} {'alpha_prime':>12} {'upper':>12} "
          f"{'width':>7}")
    for name, g in graphs.items():
        r = report(name, g, cfg.tol)
        print(f"{r['graph']:>9} {r['n']:>3} {r['m']:>3} {r['girth']:>5} {r['alpha']:>12.7f} "
              f"{r['alpha_prime']:>12.7f} {r['upper']:>12.7f} {r['width']:>7.3f}")
    return 0


if __name__ == "__main__":
    sys.exit(main())
