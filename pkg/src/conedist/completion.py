"""PSD completion and the conical distance at a partial matrix.

``epsilon_at(A)`` is the least ``eps`` such that ``A + eps I`` has a PSD
completion. It is computed from the semidefinite pair

    primal:  min eps    s.t.  M = A + eps I on the diagonal and the edges,  M PSD
    dual:    max -<A, Y> s.t.  Y_ij = 0 off the edges,  tr Y = 1,  Y PSD

Note the sign of the dual objective: with it, an interior point ``A = I/n``
has value ``-1/n`` on both sides.

Besides the SDP route there are the constructive completions: Gram gluing
across a clique separator, the cone (apex elimination) construction and the
rank-2 angle construction on cycles.
"""

from __future__ import annotations

import math
from collections import deque
from dataclasses import dataclass, field
from typing import Callable

import numpy as np

from .graph import Graph, induced_cycles, is_chordal, maximal_cliques
from .numerics import NumericsError, gram_factor, orthogonal_align, sym_eig
from .partial import (PartialMatrix, PartialMatrixError, ZeroApex, block, is_partially_positive,
                      is_standard_cycle, restrict, schur_complement_cone, universal_vertices)
from .sdp import SolverOptions, solve_standard

RANK_TOL = 1e-6


class CompletionError(ValueError):
    pass


class SolverFailure(RuntimeError):
    pass


def cycle_epsilon(n: int) -> float:
    """Conical distance of the n-cycle, ``(1/n) (1/cos(pi/n) - 1)``; zero for n = 3."""
    if n < 3:
        raise ValueError("cycles have at least 3 vertices")
    if n == 3:
        return 0.0
    return (1.0 / math.cos(math.pi / n) - 1.0) / n


def extremal_cycle_matrix(n: int) -> PartialMatrix:
    """Trace-one cycle matrix attaining the cycle's conical distance.

    Diagonal ``1/n``, edge ``{0, 1}`` equal to ``-1/n``, every other edge ``1/n``.
    """
    g = Graph.cycle(n)
    off = {e: 1.0 / n for e in g.edges}
    off[(0, 1)] = -1.0 / n
    return PartialMatrix(g, np.full(n, 1.0 / n), off)


@dataclass
class CompletionResult:
    epsilon: float
    raw_epsilon: float
    dual_value: float
    completion: np.ndarray
    dual_certificate: np.ndarray
    rank: int
    status: str = "optimal"
    residuals: dict = field(default_factory=dict)

    @property
    def gap(self) -> float:
        return abs(self.raw_epsilon - self.dual_value)

    def to_json(self, digits: int = 10) -> dict:
        def r(x):
            return float(f"{x:.{digits}g}")

        return {
            "epsilon": r(self.epsilon),
            "raw_epsilon": r(self.raw_epsilon),
            "dual_value": r(self.dual_value),
            "gap": r(self.gap),
            "rank": int(self.rank),
            "status": self.status,
            "completion": [[r(x) for x in row] for row in self.completion],
            "dual_certificate": [[r(x) for x in row] for row in self.dual_certificate],
            "residuals": {k: r(v) for k, v in self.residuals.items()},
        }


def _epsilon_program(a: PartialMatrix):
    n = a.n
    C = a.to_dense(0.0)
    mats = [np.eye(n)]
    for i, j in a.graph.non_edges():
        E = np.zeros((n, n))
        E[i, j] = E[j, i] = 1.0 / math.sqrt(2.0)
        mats.append(E)
    b = np.zeros(len(mats))
    b[0] = 1.0
    return C, np.array(mats), b


def _solve_epsilon(a: PartialMatrix, tol: float):
    if a.n == 0:
        raise CompletionError("empty matrix")
    C, A, b = _epsilon_program(a)
    sol = solve_standard(C, A, b, SolverOptions(tol=tol, max_iter=150))
    if sol.status != "optimal":
        raise SolverFailure(f"epsilon program did not converge: {sol.status} {sol.detail}".strip())
    return sol


def epsilon_at(a: PartialMatrix, tol: float = 1e-9) -> CompletionResult:
    """Conical distance at ``a`` with completion, dual certificate and rank.

    ``raw_epsilon`` is the signed optimum (negative for interior points of the
    completable cone); ``epsilon`` is ``max(raw_epsilon, 0)`` and
    ``completion`` completes ``a + epsilon I``. Accepts matrices that are not
    partially positive.
    """
    sol = _solve_epsilon(a, tol)
    raw = -float(sol.y[0])
    dual = -float(np.sum(a.to_dense(0.0) * sol.X))
    Y = 0.5 * (sol.X + sol.X.T)
    M_raw = 0.5 * (sol.Z + sol.Z.T)
    # re-impose specified entries exactly; the dual residual is below tol
    known = a.mask()
    target = a.to_dense(0.0) + raw * np.eye(a.n)
    M_raw[known] = target[known]
    eps = max(raw, 0.0)
    M = M_raw + (eps - raw) * np.eye(a.n)
    w, _ = sym_eig(M)
    residuals = {
        "entry": float(np.max(np.abs((M - a.to_dense(0.0) - eps * np.eye(a.n))[known]))),
        "min_eigenvalue": float(w[0]),
        "complementarity": float(np.linalg.norm(Y @ M_raw)),
        "dual_offsupport": float(np.max(np.abs(Y[~known]), initial=0.0)),
        "dual_trace": float(np.trace(Y) - 1.0),
        "solver_gap": float(sol.gap),
    }
    return CompletionResult(eps, raw, dual, M, Y, int(np.sum(np.abs(w) > RANK_TOL)), "optimal", residuals)


def dual_epsilon(a: PartialMatrix, tol: float = 1e-9) -> tuple[float, np.ndarray]:
    """Optimal value of the dual program and its maximizer ``Y``.

    The value equals the signed primal optimum ``raw_epsilon`` of
    :func:`epsilon_at` (strong duality).
    """
    sol = _solve_epsilon(a, tol)
    Y = 0.5 * (sol.X + sol.X.T)
    return -float(np.sum(a.to_dense(0.0) * Y)), Y


@dataclass
class Completability:
    completable: bool
    completion: np.ndarray | None = None
    certificate: np.ndarray | None = None
    method: str = ""

    def __bool__(self) -> bool:
        return self.completable


def is_psd_completable(a: PartialMatrix, tol: float = 1e-8) -> Completability:
    """Decide whether ``a`` has a PSD completion.

    On success a completion with minimum eigenvalue >= -tol is returned. On
    failure the certificate ``Y`` is PSD, supported on the diagonal and edges,
    has trace one and satisfies ``<A, Y> < -tol``. Chordal patterns are
    completed constructively by gluing clique blocks.
    """
    pp = is_partially_positive(a, tol)
    if not pp.ok:
        w, v = sym_eig(block(a, pp.clique))
        Y = np.zeros((a.n, a.n))
        idx = list(pp.clique)
        Y[np.ix_(idx, idx)] = np.outer(v[:, 0], v[:, 0])
        return Completability(False, None, Y, "clique")
    chordal, _ = is_chordal(a.graph)
    if chordal:
        return Completability(True, complete_chordal(a, tol), None, "chordal")
    res = epsilon_at(a)
    if res.raw_epsilon <= tol:
        M = res.completion - res.epsilon * np.eye(a.n)
        return Completability(True, M, None, "sdp")
    return Completability(False, None, res.dual_certificate, "sdp")


def complete(a: PartialMatrix, tol: float = 1e-8) -> np.ndarray:
    """A PSD completion of ``a``; raises :class:`CompletionError` if none exists."""
    res = is_psd_completable(a, tol)
    if not res:
        raise CompletionError("matrix is not PSD completable")
    return res.completion


# -- constructive completions ---------------------------------------------------

def glue_clique_sum(m_g, verts_g, m_h, verts_h, tol: float = 1e-8) -> tuple[np.ndarray, list[int]]:
    """Glue PSD matrices on vertex sets sharing a clique into one PSD matrix.

    ``m_g`` is indexed by ``verts_g`` and ``m_h`` by ``verts_h`` (global labels).
    Their blocks on the common vertices must agree. The result is indexed by the
    sorted union and restricts to ``m_g`` and ``m_h``. Built by Gram-factoring
    both, rotating the second arrangement onto the first along the shared
    vectors, and concatenating.
    """
    m_g = np.asarray(m_g, dtype=float)
    m_h = np.asarray(m_h, dtype=float)
    verts_g, verts_h = list(verts_g), list(verts_h)
    pos_g = {v: k for k, v in enumerate(verts_g)}
    pos_h = {v: k for k, v in enumerate(verts_h)}
    shared = sorted(set(verts_g) & set(verts_h))
    union = sorted(set(verts_g) | set(verts_h))
    scale = 1.0 + max(np.max(np.abs(m_g), initial=0.0), np.max(np.abs(m_h), initial=0.0))
    sg = [pos_g[v] for v in shared]
    sh = [pos_h[v] for v in shared]
    if np.max(np.abs(m_g[np.ix_(sg, sg)] - m_h[np.ix_(sh, sh)]), initial=0.0) > tol * scale:
        raise CompletionError("the two matrices disagree on the shared clique")
    try:
        V = gram_factor(m_g, clamp=tol * scale)
        W = gram_factor(m_h, clamp=tol * scale)
    except NumericsError as exc:
        raise CompletionError(f"input is not PSD: {exc}") from exc
    # V sits in the trailing coordinates, so the directions of H not fixed by the
    # shared clique are sent to fresh coordinates, orthogonal to everything in G
    dim = V.shape[1] + W.shape[1]
    V = np.pad(V, ((0, 0), (dim - V.shape[1], 0)))
    W = np.pad(W, ((0, 0), (0, dim - W.shape[1])))
    if shared:
        try:
            T = orthogonal_align(W[sh], V[sg], tol=max(tol, 1e-7))
        except NumericsError as exc:
            raise CompletionError(f"shared Gram factors do not match: {exc}") from exc
    else:
        T = np.eye(dim)
    U = np.zeros((len(union), dim))
    at = {v: k for k, v in enumerate(union)}
    for v in verts_h:
        U[at[v]] = T @ W[pos_h[v]]
    for v in verts_g:
        U[at[v]] = V[pos_g[v]]
    M = U @ U.T
    # the arrangement reproduces both inputs up to rounding; restore them exactly
    ig = [at[v] for v in verts_g]
    ih = [at[v] for v in verts_h]
    M[np.ix_(ih, ih)] = m_h
    M[np.ix_(ig, ig)] = m_g
    return M, union


def clique_tree(cliques: list) -> list[tuple[int, int | None]]:
    """BFS order over a maximum-weight spanning forest of the clique intersection graph.

    Returns ``(clique_index, parent_index)`` pairs; roots have parent ``None``.
    """
    k = len(cliques)
    sets = [set(c) for c in cliques]
    in_tree = [False] * k
    best = [-1] * k
    parent: list[int | None] = [None] * k
    order = []
    # Prim's algorithm; weight-0 links start a new tree
    for _ in range(k):
        cand = [i for i in range(k) if not in_tree[i]]
        i = max(cand, key=lambda j: (best[j], -j))
        if best[i] <= 0:
            parent[i] = None
        in_tree[i] = True
        order.append(i)
        for j in range(k):
            if not in_tree[j]:
                w = len(sets[i] & sets[j])
                if w > best[j]:
                    best[j], parent[j] = w, i
    # Prim's order already lists parents before children; convert to BFS
    children: dict = {i: [] for i in range(k)}
    roots = []
    for i in order:
        if parent[i] is None or best[i] <= 0:
            parent[i] = None
            roots.append(i)
        else:
            children[parent[i]].append(i)
    out = []
    for r in roots:
        queue = deque([r])
        while queue:
            i = queue.popleft()
            out.append((i, parent[i]))
            queue.extend(children[i])
    return out


def complete_chordal(a: PartialMatrix, tol: float = 1e-8) -> np.ndarray:
    """PSD completion of a partially positive matrix on a chordal graph by clique gluing."""
    if not is_chordal(a.graph)[0]:
        raise CompletionError("graph is not chordal")
    cliques = maximal_cliques(a.graph)
    M = np.zeros((0, 0))
    verts: list[int] = []
    for i, _ in clique_tree(cliques):
        K = list(cliques[i])
        M, verts = glue_clique_sum(M, verts, block(a, K), K, tol)
    return M


def cone_completion(a: PartialMatrix, inner: Callable[[PartialMatrix], np.ndarray] | None = None,
                    eps: float = 0.0, apex: int | None = None) -> np.ndarray:
    """Complete ``a + eps I`` on a cone graph through apex elimination.

    With apex diagonal ``b > 0`` and column ``c``, ``a`` splits into the
    Schur complement (zero apex row) plus the projection of ``r r^T`` with
    ``r = (c / sqrt(b), sqrt(b))``; ``inner`` completes ``schur + eps I`` on the
    base graph. With ``b = 0`` the column must vanish and the base block is
    completed directly.
    """
    inner = inner or complete
    g = a.graph
    if apex is None:
        uv = universal_vertices(g)
        if not uv:
            raise CompletionError("graph has no universal vertex")
        apex = uv[-1]
    rest = [v for v in range(g.n) if v != apex]
    M = np.zeros((g.n, g.n))
    try:
        S = schur_complement_cone(a, apex)
    except ZeroApex:
        Q = restrict(a, rest)
        M[np.ix_(rest, rest)] = inner(Q.shifted(eps))
        M[apex, apex] = eps
        return M
    except PartialMatrixError as exc:
        raise CompletionError(str(exc)) from exc
    b = float(a.diag[apex])
    c = np.array([a.entry(v, apex) for v in rest])
    M[np.ix_(rest, rest)] = inner(S.shifted(eps))
    r = np.zeros(g.n)
    r[rest] = c / math.sqrt(b)
    r[apex] = math.sqrt(b)
    M += np.outer(r, r)
    M[apex, apex] += eps
    return M


# -- cycles -------------------------------------------------------------------

def _normalized_angles(a: PartialMatrix) -> np.ndarray:
    n = a.n
    if not is_standard_cycle(a.graph) or n < 3:
        raise CompletionError("expected a matrix on the standard cycle C_n")
    d = np.asarray(a.diag)
    if np.any(d <= 0):
        raise CompletionError("rank-2 cycle conditions need a positive diagonal")
    cos = np.array([a.entry(i, (i + 1) % n) / math.sqrt(d[i] * d[(i + 1) % n]) for i in range(n)])
    return np.arccos(np.clip(cos, -1.0, 1.0))


@dataclass
class Rank2Witness:
    feasible: bool
    signs: np.ndarray | None
    k: int | None
    residual: float


MAX_SIGN_SEARCH = 24


def rank2_cycle_feasible(a: PartialMatrix, tol: float | None = None) -> Rank2Witness:
    """Whether a cycle matrix has a rank-2 PSD completion.

    Searches sign vectors ``s`` (with ``s[0] = +1``) for which the signed sum of
    the edge angles ``arccos(A_{i,i+1} / sqrt(A_ii A_{i+1,i+1}))`` lies within
    ``tol`` of a multiple of ``2 pi``. The first feasible vector in
    lexicographic order (``+1`` before ``-1``) is returned.
    """
    phi = _normalized_angles(a)
    n = a.n
    if n > MAX_SIGN_SEARCH:
        raise CompletionError(f"sign search limited to n <= {MAX_SIGN_SEARCH}")
    tol = 1e-8 * n if tol is None else tol
    free = n - 1
    best = math.inf
    chunk = 1 << min(free, 16)
    shifts = np.arange(free - 1, -1, -1, dtype=np.int64)
    for start in range(0, 1 << free, chunk):
        idx = np.arange(start, min(start + chunk, 1 << free), dtype=np.int64)
        bits = (idx[:, None] >> shifts[None, :]) & 1
        signs = 1.0 - 2.0 * bits
        total = phi[0] + signs @ phi[1:]
        k = np.round(total / (2 * math.pi))
        dist = np.abs(total - 2 * math.pi * k)
        hit = np.nonzero(dist <= tol)[0]
        best = min(best, float(dist.min()))
        if hit.size:
            j = hit[0]
            s = np.concatenate([[1.0], signs[j]])
            return Rank2Witness(True, s, int(k[j]), float(dist[j]))
    return Rank2Witness(False, None, None, best)


def rank2_cycle_completion(a: PartialMatrix, signs, k: int, tol: float | None = None):
    """Rank-2 completion from a feasible sign vector: returns ``(M, theta)``.

    ``theta[0] = 0`` and ``theta[i+1] = theta[i] + signs[i] * angle[i]``; then
    ``M_ij = sqrt(A_ii A_jj) cos(theta_i - theta_j)``.
    """
    phi = _normalized_angles(a)
    n = a.n
    tol = 1e-8 * n if tol is None else tol
    signs = np.asarray(signs, dtype=float)
    if signs.shape != (n,) or not np.all(np.abs(signs) == 1):
        raise CompletionError("signs must be a +-1 vector of length n")
    if abs(float(signs @ phi) - 2 * math.pi * k) > tol:
        raise CompletionError("sign vector and k do not satisfy the angle condition")
    theta = np.concatenate([[0.0], np.cumsum(signs[:-1] * phi[:-1])])
    r = np.sqrt(np.asarray(a.diag))
    M = np.outer(r, r) * np.cos(theta[:, None] - theta[None, :])
    return M, theta


def f_eps(x: float, y: float, eps: float) -> float:
    """``arccos(sqrt(x y) / sqrt((x + eps)(y + eps)))``, convex in ``(x, y)`` for ``eps >= 0``.

    A zero argument gives ``pi/2``, the limit as ``eps -> 0+``.
    """
    if x <= 0 or y <= 0:
        return math.pi / 2
    ratio = math.sqrt(x * y) / math.sqrt((x + eps) * (y + eps))
    return math.acos(min(1.0, ratio))


def cycle_angle_sum(a: PartialMatrix, eps: float) -> float:
    """Sum over edges of ``arccos(sqrt(A_ii A_jj) / sqrt((A_ii + eps)(A_jj + eps)))``.

    Edges touching a zero diagonal entry contribute ``pi/2`` (their limit as
    ``eps -> 0+``).
    """
    n = a.n
    d = np.asarray(a.diag)
    return sum(f_eps(d[i], d[(i + 1) % n], eps) for i in range(n))


def cycle_epsilon_bisect(a: PartialMatrix, tol: float = 1e-12, max_iter: int = 100) -> float:
    """Conical distance at a normal-form cycle matrix with singular edge blocks.

    Finds the root of ``cycle_angle_sum(a, eps) = pi`` on ``[0, eps(C_n)]`` by
    bisection; the angle sum is nondecreasing in ``eps``.
    """
    n = a.n
    if not is_standard_cycle(a.graph) or n < 4:
        raise CompletionError("expected a matrix on the standard cycle C_n, n >= 4")
    d = np.asarray(a.diag)
    if abs(a.trace - 1.0) > 1e-9:
        raise CompletionError("matrix must have trace 1")
    if np.any(d < 0):
        raise CompletionError("negative diagonal entry")
    for i in range(n):
        j = (i + 1) % n
        x = a.entry(i, j)
        if abs(x * x - d[i] * d[j]) > 1e-9:
            raise CompletionError(f"edge block ({i}, {j}) is not singular")
        if (i == 0 and x > 0) or (i != 0 and x < 0):
            raise CompletionError("matrix is not in normal form (single negative entry on edge {0, 1})")
    hi = cycle_epsilon(n)
    if cycle_angle_sum(a, 0.0) >= math.pi:
        return 0.0
    if cycle_angle_sum(a, hi) < math.pi - 1e-12:
        raise RuntimeError("angle sum at the closed-form bound is below pi; convexity bound violated")
    lo = 0.0
    for _ in range(max_iter):
        if hi - lo <= tol:
            break
        mid = 0.5 * (lo + hi)
        if cycle_angle_sum(a, mid) >= math.pi:
            hi = mid
        else:
            lo = mid
    return 0.5 * (lo + hi)


def hole_restriction(a: PartialMatrix, cyc) -> PartialMatrix:
    """The restriction of ``a`` to an induced cycle, relabelled to the standard C_k."""
    k = len(cyc)
    g = Graph.cycle(k)
    off = {}
    for i in range(k):
        j = (i + 1) % k
        off[(min(i, j), max(i, j))] = a.entry(cyc[i], cyc[j])
    return PartialMatrix(g, np.array([a.diag[v] for v in cyc]), off)


def cycle_constraints_satisfied(a: PartialMatrix, tol: float = 1e-8) -> bool:
    """Whether every induced cycle restriction of ``a`` is PSD completable.

    Triangles are checked as 3x3 blocks. Holes are accepted when a rank-2
    completion exists, otherwise through the SDP.
    """
    for cyc in induced_cycles(a.graph, min_length=3):
        if len(cyc) == 3:
            if sym_eig(block(a, cyc))[0][0] < -tol:
                return False
            continue
        h = hole_restriction(a, cyc)
        if not is_partially_positive(h, tol):
            return False
        if np.all(np.asarray(h.diag) > 0) and rank2_cycle_feasible(h).feasible:
            continue
        if epsilon_at(h).raw_epsilon > tol:
            return False
    return True
