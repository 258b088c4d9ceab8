"""Dense symmetric linear algebra shared by the rest of the package.

Everything here works on small dense matrices (n <= 64). The eigensolver is a
cyclic Jacobi sweep, which is slow in absolute terms but accurate to machine
precision on the block sizes this package produces.
"""

from __future__ import annotations

import math

import numpy as np

SYMMETRY_TOL = 1e-12
MAX_SWEEPS = 100


class NumericsError(ValueError):
    pass


class ConvergenceError(NumericsError):
    pass


def as_symmetric(m, tol: float = SYMMETRY_TOL) -> np.ndarray:
    """Validate ``m`` as a square symmetric matrix and return the symmetrized copy.

    The upper triangle is authoritative; asymmetry larger than ``tol`` (relative
    to the matrix scale) is rejected.
    """
    a = np.array(m, dtype=float)
    if a.ndim != 2 or a.shape[0] != a.shape[1]:
        raise NumericsError(f"expected a square matrix, got shape {a.shape}")
    scale = max(1.0, float(np.max(np.abs(a)))) if a.size else 1.0
    if a.size and np.max(np.abs(a - a.T)) > tol * scale:
        raise NumericsError("matrix is not symmetric")
    upper = np.triu(a)
    return upper + np.triu(a, 1).T


def sym_eig(m, tol: float = 1e-14) -> tuple[np.ndarray, np.ndarray]:
    """Eigendecomposition of a symmetric matrix by cyclic Jacobi rotations.

    Returns eigenvalues in ascending order and the matching orthonormal
    eigenvectors as columns.
    """
    a = as_symmetric(m)
    n = a.shape[0]
    v = np.eye(n)
    if n <= 1:
        return np.diag(a).copy(), v
    total = math.sqrt(float(np.sum(a * a)))
    if total == 0.0:
        return np.zeros(n), v
    for _ in range(MAX_SWEEPS):
        off = math.sqrt(float(np.sum(np.triu(a, 1) ** 2)) * 2.0)
        if off <= tol * total:
            break
        for p in range(n - 1):
            for q in range(p + 1, n):
                apq = a[p, q]
                if abs(apq) <= 1e-300:
                    continue
                theta = (a[q, q] - a[p, p]) / (2.0 * apq)
                if abs(theta) > 1e150:
                    t = 0.5 / theta
                else:
                    t = math.copysign(1.0, theta) / (abs(theta) + math.sqrt(theta * theta + 1.0))
                c = 1.0 / math.sqrt(t * t + 1.0)
                s = t * c
                ap = a[:, p].copy()
                aq = a[:, q].copy()
                a[:, p] = c * ap - s * aq
                a[:, q] = s * ap + c * aq
                rp = a[p, :].copy()
                rq = a[q, :].copy()
                a[p, :] = c * rp - s * rq
                a[q, :] = s * rp + c * rq
                a[p, q] = a[q, p] = 0.0
                vp = v[:, p].copy()
                v[:, p] = c * vp - s * v[:, q]
                v[:, q] = s * vp + c * v[:, q]
    else:
        raise ConvergenceError(f"Jacobi iteration did not converge in {MAX_SWEEPS} sweeps")
    w = np.diag(a).copy()
    order = np.argsort(w, kind="stable")
    return w[order], v[:, order]


def min_eigenvalue(m) -> float:
    w, _ = sym_eig(m)
    return float(w[0]) if w.size else math.inf


def numerical_rank(m, tol: float = 1e-6) -> int:
    """Number of eigenvalues whose magnitude exceeds ``tol``."""
    w, _ = sym_eig(m)
    return int(np.sum(np.abs(w) > tol))


def gram_factor(m, clamp: float = 1e-10) -> np.ndarray:
    """Factor ``V`` with ``V @ V.T`` equal to ``m`` with negative eigenvalues clamped to 0.

    Rows of ``V`` are the vectors of a Gram arrangement. Columns are ordered by
    decreasing eigenvalue, so a rank-r input has its trailing columns zero.
    """
    w, q = sym_eig(m)
    if w.size and w[0] < -clamp:
        raise NumericsError(f"matrix has eigenvalue {w[0]:.3e} below -{clamp:g}")
    w = np.clip(w, 0.0, None)[::-1]
    q = q[:, ::-1]
    return q * np.sqrt(w)


def _complete_basis(cols: list[np.ndarray], dim: int, tol: float = 1e-8) -> list[np.ndarray]:
    """Extend orthonormal vectors to a basis of R^dim using e_0, e_1, ... in order."""
    basis = list(cols)
    for k in range(dim):
        if len(basis) == dim:
            break
        e = np.zeros(dim)
        e[k] = 1.0
        for b in basis:
            e -= (b @ e) * b
        for b in basis:
            e -= (b @ e) * b
        nrm = np.linalg.norm(e)
        if nrm > tol:
            basis.append(e / nrm)
    return basis


def orthogonal_align(src, dst, tol: float = 1e-7) -> np.ndarray:
    """Orthogonal ``T`` with ``T @ src[i] ~= dst[i]`` for every row ``i``.

    Solves the orthogonal Procrustes problem through the polar factor of the
    cross-covariance ``dst.T @ src``. Requires the two arrangements to have
    matching Gram matrices within ``tol`` (relative to their scale).
    """
    src = np.atleast_2d(np.asarray(src, dtype=float))
    dst = np.atleast_2d(np.asarray(dst, dtype=float))
    if src.shape != dst.shape:
        raise NumericsError(f"shape mismatch {src.shape} vs {dst.shape}")
    dim = src.shape[1]
    g_src = src @ src.T
    g_dst = dst @ dst.T
    scale = 1.0 + max(np.max(np.abs(g_src), initial=0.0), np.max(np.abs(g_dst), initial=0.0))
    if np.max(np.abs(g_src - g_dst), initial=0.0) > tol * scale:
        raise NumericsError("Gram matrices of the two arrangements disagree")
    cross = dst.T @ src
    w, v = sym_eig(cross.T @ cross)
    w, v = w[::-1], v[:, ::-1]
    cutoff = max(tol * scale, 1e-12) ** 2
    us, vs = [], []
    for k in range(dim):
        if w[k] <= cutoff:
            break
        sigma = math.sqrt(w[k])
        u = cross @ v[:, k] / sigma
        for prev in us:
            u -= (prev @ u) * prev
        u /= np.linalg.norm(u)
        us.append(u)
        vs.append(v[:, k])
    us = _complete_basis(us, dim)
    vs = _complete_basis(vs, dim)
    return np.column_stack(us) @ np.column_stack(vs).T
