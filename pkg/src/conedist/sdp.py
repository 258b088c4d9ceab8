"""Small dense semidefinite programming.

The solver handles the standard primal/dual pair

    primal:  minimize <C, X>  s.t.  <A_k, X> = b_k,  X PSD
    dual:    maximize b.y     s.t.  C - sum_k y_k A_k = Z,  Z PSD

with an infeasible primal-dual path-following method (HKM search direction,
Mehrotra predictor-corrector). Block-diagonal problems are passed as one
dense block-diagonal matrix; the iterates keep the block pattern exactly.

On top of it sit :class:`SparseSdp` (trace-normalized programs read from
files), the clique-block relaxation :func:`solve_decomposed`, the approximation
interval :func:`bound_gap` and the MAX-CUT builder :func:`maxcut_sdp`.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from pathlib import Path

import numpy as np
import scipy.linalg

from .graph import Graph, maximal_cliques
from .partial import PartialMatrix

MAX_DIM = 64
MAX_CONSTRAINTS = 200


class SdpError(ValueError):
    pass


@dataclass
class SolverOptions:
    tol: float = 1e-9
    max_iter: int = 100
    step_fraction: float = 0.98
    infeasibility_tol: float = 1e-8


@dataclass
class SdpSolution:
    status: str  # "optimal" | "infeasible" | "max_iter"
    primal_value: float
    dual_value: float
    X: np.ndarray
    y: np.ndarray
    Z: np.ndarray
    iterations: int
    primal_residual: float
    dual_residual: float
    gap: float
    detail: str = ""

    @property
    def value(self) -> float:
        return 0.5 * (self.primal_value + self.dual_value)


def _max_step(X: np.ndarray, dX: np.ndarray) -> float:
    """Largest alpha in (0, inf] with X + alpha dX PSD (X positive definite)."""
    try:
        L = np.linalg.cholesky(X)
    except np.linalg.LinAlgError:
        return 0.0
    Li = scipy.linalg.solve_triangular(L, np.eye(X.shape[0]), lower=True)
    lam = np.linalg.eigvalsh(Li @ dX @ Li.T)[0]
    return np.inf if lam >= 0 else -1.0 / lam


def _independent_rows(Amat: np.ndarray, b: np.ndarray, tol: float = 1e-10):
    """Drop linearly dependent constraints; flag inconsistent right-hand sides."""
    m = Amat.shape[0]
    if m == 0:
        return np.arange(0), True
    _, r, piv = scipy.linalg.qr(Amat.T, mode="economic", pivoting=True)
    diag = np.abs(np.diag(r))
    rank = int(np.sum(diag > tol * max(1.0, diag[0] if diag.size else 1.0)))
    keep = np.sort(piv[:rank])
    if rank == m:
        return keep, True
    coef, *_ = np.linalg.lstsq(Amat[keep].T, Amat.T, rcond=None)
    consistent = np.allclose(coef.T @ b[keep], b, atol=1e-9 * (1 + np.abs(b).max()))
    return keep, consistent


def solve_standard(C, A, b, options: SolverOptions | None = None) -> SdpSolution:
    """Solve the standard-form pair for dense data ``C`` (n x n), ``A`` (m x n x n), ``b`` (m,)."""
    opt = options or SolverOptions()
    C = np.asarray(C, dtype=float)
    n = C.shape[0]
    A = np.asarray(A, dtype=float).reshape(-1, n, n)
    b = np.asarray(b, dtype=float).reshape(-1)
    keep, consistent = _independent_rows(A.reshape(len(b), -1), b)
    if not consistent:
        z = np.zeros((n, n))
        return SdpSolution("infeasible", np.inf, np.inf, z, np.zeros(len(b)), z, 0, np.inf, np.inf, np.inf,
                           detail="inconsistent linear constraints")
    sol = _ipm(C, A[keep], b[keep], opt)
    y_full = np.zeros(len(b))
    y_full[keep] = sol.y
    sol.y = y_full
    return sol


def _ipm(C: np.ndarray, A: np.ndarray, b: np.ndarray, opt: SolverOptions) -> SdpSolution:
    n = C.shape[0]
    m = len(b)
    Amat = A.reshape(m, n * n)
    I = np.eye(n)
    norm_b = 1.0 + np.linalg.norm(b)
    norm_C = 1.0 + np.linalg.norm(C)
    norm_A = np.linalg.norm(Amat, axis=1) if m else np.zeros(0)
    xi = max(10.0, np.sqrt(n), n * max(((1.0 + np.abs(b)) / (1.0 + norm_A)).max(initial=0.0), 1.0))
    eta = max(10.0, np.sqrt(n), norm_A.max(initial=0.0), np.linalg.norm(C))
    X = xi * I
    Z = eta * I
    y = np.zeros(m)

    status, detail = "max_iter", ""
    pinf = dinf = gap = np.inf
    it = 0
    for it in range(opt.max_iter + 1):
        rp = b - Amat @ X.ravel()
        Aty = (y @ Amat).reshape(n, n)
        Rd = C - Aty - Z
        Rd = 0.5 * (Rd + Rd.T)
        pobj = float(np.sum(C * X))
        dobj = float(b @ y)
        xz = float(np.sum(X * Z))
        mu = xz / n
        pinf = np.linalg.norm(rp) / norm_b
        dinf = np.linalg.norm(Rd) / norm_C
        gap = max(abs(pobj - dobj), xz) / (1.0 + abs(pobj) + abs(dobj))
        if max(pinf, dinf, gap) <= opt.tol:
            status = "optimal"
            break
        # Farkas-type certificates read off diverging iterates
        if dobj > 0 and m:
            cert = Aty / dobj
            if np.linalg.eigvalsh(cert)[-1] <= opt.infeasibility_tol and dobj > 1e6 * norm_C:
                status, detail = "infeasible", "primal infeasible"
                break
        if pobj < 0:
            ax = Amat @ X.ravel() / -pobj
            if np.linalg.norm(ax) <= opt.infeasibility_tol * norm_b and -pobj > 1e6 * norm_b:
                status, detail = "infeasible", "dual infeasible"
                break
        if it == opt.max_iter:
            break

        try:
            Lz = np.linalg.cholesky(Z)
        except np.linalg.LinAlgError:
            detail = "dual slack lost definiteness"
            break
        Lzi = scipy.linalg.solve_triangular(Lz, I, lower=True)
        Zinv = Lzi.T @ Lzi
        W = np.matmul(np.matmul(X, A), Zinv) if m else np.zeros((0, n, n))
        M = Amat @ W.reshape(m, -1).T
        M = 0.5 * (M + M.T)
        try:
            factor = scipy.linalg.cho_factor(M, lower=True, check_finite=False)

            def msolve(r):
                return scipy.linalg.cho_solve(factor, r, check_finite=False)
        except (np.linalg.LinAlgError, ValueError):
            pinvM = np.linalg.pinv(M, rcond=1e-14)

            def msolve(r):
                return pinvM @ r

        XRdZi = X @ Rd @ Zinv

        def direction(R):
            rhs = rp - Amat @ (R - XRdZi).ravel() if m else np.zeros(0)
            dy = msolve(rhs) if m else np.zeros(0)
            dZ = Rd - (dy @ Amat).reshape(n, n) if m else Rd.copy()
            dX = R - X @ dZ @ Zinv
            return 0.5 * (dX + dX.T), dy, dZ

        # predictor
        dXa, dya, dZa = direction(-X)
        ap = min(1.0, _max_step(X, dXa))
        ad = min(1.0, _max_step(Z, dZa))
        mu_aff = float(np.sum((X + ap * dXa) * (Z + ad * dZa))) / n
        sigma = min(1.0, (mu_aff / mu) ** 3) if mu > 0 else 0.0
        # corrector
        R = sigma * mu * Zinv - X - dXa @ dZa @ Zinv
        dX, dy, dZ = direction(R)
        tau = opt.step_fraction
        ap = min(1.0, tau * _max_step(X, dX))
        ad = min(1.0, tau * _max_step(Z, dZ))
        if ap <= 1e-14 and ad <= 1e-14:
            detail = "step length collapsed"
            break
        X = X + ap * dX
        X = 0.5 * (X + X.T)
        y = y + ad * dy
        Z = Z + ad * dZ
        Z = 0.5 * (Z + Z.T)

    return SdpSolution(status, float(np.sum(C * X)), float(b @ y), X, y, Z, it, float(pinf), float(dinf),
                       float(gap), detail)


# -- G-sparse programs -------------------------------------------------------

@dataclass
class SparseSdp:
    """minimize <B0, X> s.t. <B_l, X> = b_l (and tr X = 1 when ``trace_normalized``), X PSD."""

    n: int
    objective: np.ndarray
    constraints: list = field(default_factory=list)  # list of (B_l, b_l)
    trace_normalized: bool = False

    def __post_init__(self):
        self.objective = _check_sym(self.objective, self.n, "objective")
        self.constraints = [(_check_sym(B, self.n, f"constraint {k + 1}"), float(rhs))
                            for k, (B, rhs) in enumerate(self.constraints)]

    @property
    def k(self) -> int:
        return len(self.constraints)

    def data(self):
        """``(C, A, b)`` arrays including the trace row when flagged."""
        mats = [B for B, _ in self.constraints]
        rhs = [r for _, r in self.constraints]
        if self.trace_normalized:
            mats.append(np.eye(self.n))
            rhs.append(1.0)
        A = np.array(mats) if mats else np.zeros((0, self.n, self.n))
        return self.objective, A, np.array(rhs, dtype=float)

    def objective_at(self, X) -> float:
        return float(np.sum(self.objective * X))

    def residuals(self, X) -> np.ndarray:
        _, A, b = self.data()
        return np.array([np.sum(Ak * X) for Ak in A]) - b

    def identity_feasible(self, tol: float = 1e-9) -> bool:
        """Whether ``I/n`` satisfies every linear constraint within ``tol``."""
        if self.n == 0:
            return False
        X = np.eye(self.n) / self.n
        r = self.residuals(X)
        return bool(np.all(np.abs(r) <= tol * (1.0 + np.abs(self.data()[2]))))

    def equals(self, other: "SparseSdp") -> bool:
        return (self.n == other.n and self.trace_normalized == other.trace_normalized
                and np.array_equal(self.objective, other.objective) and self.k == other.k
                and all(np.array_equal(B1, B2) and b1 == b2
                        for (B1, b1), (B2, b2) in zip(self.constraints, other.constraints)))


def _check_sym(B, n: int, what: str) -> np.ndarray:
    B = np.asarray(B, dtype=float)
    if B.shape != (n, n):
        raise SdpError(f"{what} has shape {B.shape}, expected ({n}, {n})")
    if not np.array_equal(B, B.T):
        if np.max(np.abs(B - B.T)) > 1e-12 * (1 + np.max(np.abs(B))):
            raise SdpError(f"{what} is not symmetric")
        B = 0.5 * (B + B.T)
    return B


def _check_size(s: SparseSdp):
    if s.n > MAX_DIM:
        raise SdpError(f"n = {s.n} exceeds the dense solver limit {MAX_DIM}")
    if s.k > MAX_CONSTRAINTS:
        raise SdpError(f"{s.k} constraints exceed the limit {MAX_CONSTRAINTS}")


def sparsity_graph(s: SparseSdp) -> Graph:
    """Edge {i, j} iff some data matrix (objective included) has a nonzero (i, j) entry."""
    support = np.abs(s.objective) > 0
    for B, _ in s.constraints:
        support |= np.abs(B) > 0
    iu, ju = np.nonzero(np.triu(support, 1))
    return Graph(s.n, frozenset(zip(iu.tolist(), ju.tolist())))


@dataclass
class SdpResult:
    value: float
    X: np.ndarray
    status: str
    solution: SdpSolution | None = None


def solve(s: SparseSdp, tol: float = 1e-8, max_iter: int = 100) -> SdpResult:
    """Solve the full program with a global PSD constraint."""
    _check_size(s)
    C, A, b = s.data()
    sol = solve_standard(C, A, b, SolverOptions(tol=tol, max_iter=max_iter))
    return SdpResult(sol.value if sol.status == "optimal" else sol.primal_value, sol.X, sol.status, sol)


@dataclass
class DecomposedSdp:
    base: SparseSdp
    graph: Graph
    clique_blocks: list

    @property
    def variables(self) -> list:
        """Entries carried by the program: diagonal ``(i, i)`` then edges ``(u, v)``."""
        return [(i, i) for i in range(self.graph.n)] + self.graph.sorted_edges()


def decompose(s: SparseSdp, graph: Graph | None = None) -> DecomposedSdp:
    """Replace the global PSD constraint by PSD constraints on maximal cliques.

    ``graph`` defaults to the sparsity graph; a supergraph may be supplied.
    """
    g = sparsity_graph(s) if graph is None else graph
    if not sparsity_graph(s).edges <= g.edges:
        raise SdpError("the program has data outside the supplied graph")
    return DecomposedSdp(s, g, maximal_cliques(g))


def _linear_row(B: np.ndarray, variables) -> np.ndarray:
    return np.array([B[i, j] if i == j else 2.0 * B[i, j] for i, j in variables])


@dataclass
class DecomposedResult:
    value: float
    X: PartialMatrix | None
    status: str
    solution: SdpSolution | None = None


def solve_decomposed(d: DecomposedSdp, tol: float = 1e-8, max_iter: int = 100) -> DecomposedResult:
    """Optimum of the relaxation where only the clique blocks must be PSD.

    The entries on the diagonal and the edges are the decision variables; a
    variable shared by several cliques appears in each of their blocks. The
    linear constraints are eliminated through a null-space parametrization,
    which turns the program into the dual standard form.
    """
    s = d.base
    _check_size(s)
    variables = d.variables
    p = len(variables)
    index = {e: k for k, e in enumerate(variables)}
    c = _linear_row(s.objective, variables)
    rows = [_linear_row(B, variables) for B, _ in s.constraints]
    rhs = [r for _, r in s.constraints]
    if s.trace_normalized:
        rows.append(np.array([1.0 if i == j else 0.0 for i, j in variables]))
        rhs.append(1.0)
    F = np.array(rows).reshape(-1, p)
    h = np.array(rhs, dtype=float)

    if F.shape[0]:
        x0, *_ = np.linalg.lstsq(F, h, rcond=None)
        if np.linalg.norm(F @ x0 - h) > 1e-9 * (1.0 + np.linalg.norm(h)):
            return DecomposedResult(np.inf, None, "infeasible")
        N = scipy.linalg.null_space(F, rcond=1e-12)
    else:
        x0 = np.zeros(p)
        N = np.eye(p)

    sizes = [len(K) for K in d.clique_blocks]
    D = sum(sizes)
    basis = np.zeros((p, D, D))
    off = 0
    for K in d.clique_blocks:
        for r, i in enumerate(K):
            for q, j in enumerate(K):
                basis[index[(min(i, j), max(i, j))], off + r, off + q] = 1.0
        off += len(K)

    def assemble(x):
        return np.tensordot(x, basis, axes=1)

    def to_partial(x) -> PartialMatrix:
        n = d.graph.n
        return PartialMatrix(d.graph, x[:n], {e: x[index[e]] for e in d.graph.edges})

    base_value = float(c @ x0)
    if N.shape[1] == 0:
        lam = np.linalg.eigvalsh(assemble(x0))[0] if D else 0.0
        if lam >= -tol:
            return DecomposedResult(base_value, to_partial(x0), "optimal")
        return DecomposedResult(np.inf, None, "infeasible")

    Cstd = assemble(x0)
    Astd = -np.tensordot(N.T, basis, axes=1)
    bstd = -(N.T @ c)
    sol = solve_standard(Cstd, Astd, bstd, SolverOptions(tol=tol, max_iter=max_iter))
    x = x0 + N @ sol.y
    value = base_value - sol.value
    return DecomposedResult(value, to_partial(x), sol.status, sol)


def bound_gap(alpha_prime: float, eps: float, trace_b0: float, n: int) -> tuple[float, float]:
    """Interval known to contain the full optimum given the relaxed optimum ``alpha_prime``.

    Valid when ``I/n`` is feasible for the full program and the program is
    sparse over a graph whose conical distance is ``eps``.
    """
    if eps < 0:
        raise SdpError("eps must be nonnegative")
    if n <= 0:
        raise SdpError("n must be positive")
    scale = 1.0 + n * eps
    return alpha_prime, alpha_prime / scale + eps * trace_b0 / scale


def maxcut_sdp(g: Graph) -> SparseSdp:
    """Rescaled Goemans-Williamson relaxation, written as a minimization.

    minimize n * sum_{edges ij} X_ij  s.t.  X_ii = 1/n,  X PSD.

    Each unordered edge contributes ``n * X_ij`` to the objective, so the
    objective matrix holds ``n/2`` in both symmetric positions. The trace
    constraint is implied by the diagonal constraints.
    """
    n = g.n
    if n == 0:
        raise SdpError("MAX-CUT needs at least one vertex")
    B0 = np.zeros((n, n))
    for u, v in g.edges:
        B0[u, v] = B0[v, u] = n / 2.0
    cons = []
    for i in range(n):
        E = np.zeros((n, n))
        E[i, i] = 1.0
        cons.append((E, 1.0 / n))
    return SparseSdp(n, B0, cons, trace_normalized=True)


# -- file format -------------------------------------------------------------

def parse_sdp(text: str) -> SparseSdp:
    """Parse the restricted SDPA-like format.

    ``n k`` header; entry lines ``l i j v`` (``l = 0`` is the objective,
    ``1..k`` the constraints, ``0 <= i <= j < n``, each ``(l, i, j)`` at most
    once, value stored at both ``(i, j)`` and ``(j, i)``); one ``rhs b_1 ... b_k``
    line; an optional ``trace 1`` line. ``#`` starts a comment.
    """
    rows = []
    for raw in text.splitlines():
        line = raw.split("#", 1)[0].strip()
        if line:
            rows.append(line.split())
    if not rows or len(rows[0]) != 2:
        raise SdpError("header must be 'n k'")
    try:
        n, k = int(rows[0][0]), int(rows[0][1])
        if n <= 0 or k < 0:
            raise SdpError("n must be positive and k nonnegative")
        mats = [np.zeros((n, n)) for _ in range(k + 1)]
        seen = set()
        rhs = None
        trace = False
        for r in rows[1:]:
            if r[0] == "rhs":
                if rhs is not None:
                    raise SdpError("rhs line repeated")
                if len(r) != k + 1:
                    raise SdpError(f"rhs line needs {k} values")
                rhs = [float(x) for x in r[1:]]
            elif r[0] == "trace":
                if trace or r[1:] != ["1"]:
                    raise SdpError("trace line must read 'trace 1' and appear once")
                trace = True
            else:
                if len(r) != 4:
                    raise SdpError(f"bad entry line {' '.join(r)!r}")
                ell, i, j, v = int(r[0]), int(r[1]), int(r[2]), float(r[3])
                if not 0 <= ell <= k:
                    raise SdpError(f"matrix index {ell} out of range")
                if not 0 <= i <= j < n:
                    raise SdpError(f"entry ({i}, {j}) must satisfy 0 <= i <= j < n")
                if (ell, i, j) in seen:
                    raise SdpError(f"entry ({ell}, {i}, {j}) repeated")
                seen.add((ell, i, j))
                mats[ell][i, j] = mats[ell][j, i] = v
    except ValueError as exc:
        if isinstance(exc, SdpError):
            raise
        raise SdpError(str(exc)) from exc
    if rhs is None:
        if k:
            raise SdpError("missing rhs line")
        rhs = []
    return SparseSdp(n, mats[0], list(zip(mats[1:], rhs)), trace_normalized=trace)


def format_sdp(s: SparseSdp) -> str:
    lines = [f"{s.n} {s.k}"]
    for ell, B in enumerate([s.objective] + [B for B, _ in s.constraints]):
        for i in range(s.n):
            for j in range(i, s.n):
                if B[i, j] != 0:
                    lines.append(f"{ell} {i} {j} {float(B[i, j])!r}")
    lines.append(" ".join(["rhs"] + [repr(float(r)) for _, r in s.constraints]))
    if s.trace_normalized:
        lines.append("trace 1")
    return "\n".join(lines) + "\n"


def read_sdp(path) -> SparseSdp:
    return parse_sdp(Path(path).read_text())


def write_sdp(s: SparseSdp, path) -> None:
    Path(path).write_text(format_sdp(s))
