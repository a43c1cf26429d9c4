"""Small linear-algebra kernel for the transform-based swarm variant.

Covers exactly four operations: Householder-QR least squares for the
particle-mixing transform, eigenvalue extraction, spectral normalization,
and the 2x2 dynamic-matrix stability diagnostic.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import ShapeError, SingularSpectrumError


@dataclass(frozen=True)
class TransformFit:
    """Least-squares transform estimate with solve metadata."""

    matrix: np.ndarray
    rank: int
    rank_deficient: bool
    residual: float


def householder_qr_solve(a: np.ndarray, b: np.ndarray, rcond: float = 1e-12):
    """Solve the overdetermined system a @ z = b by Householder QR.

    a is (m, n) with m >= n, b is (m, k). Reflections are applied in place
    to a working copy of [a | b]; back substitution then yields z. Returns
    (z, rank); rank < n signals a numerically rank-deficient triangle, in
    which case z is not computed and None is returned for it.
    """
    m, n = a.shape
    if m < n:
        raise ShapeError(f"householder_qr_solve needs m >= n, got {a.shape}")
    r = a.astype(float, copy=True)
    y = b.astype(float, copy=True)
    for j in range(n):
        x = r[j:, j]
        norm_x = np.linalg.norm(x)
        if norm_x == 0.0:
            continue
        v = x.copy()
        v[0] += np.copysign(norm_x, x[0] if x[0] != 0 else 1.0)
        v /= np.linalg.norm(v)
        r[j:, j:] -= 2.0 * np.outer(v, v @ r[j:, j:])
        y[j:] -= 2.0 * np.outer(v, v @ y[j:])
    diag = np.abs(np.diag(r)[:n])
    tol = rcond * max(m, n) * (diag.max() if diag.size else 0.0)
    rank = int(np.sum(diag > tol))
    if rank < n:
        return None, rank
    z = np.empty((n, y.shape[1]))
    with np.errstate(over="ignore", invalid="ignore", divide="ignore"):
        for i in range(n - 1, -1, -1):
            z[i] = (y[i] - r[i, i + 1 : n] @ z[i + 1 :]) / r[i, i]
    if not np.isfinite(z).all():
        # pivot above tolerance but numerically useless; treat as deficient
        return None, rank - 1
    return z, rank


def lstsq_transform(x_now: np.ndarray, x_next: np.ndarray) -> TransformFit:
    """Estimate the N x N matrix C minimizing ||x_next - C @ x_now||_F.

    Positions are stacked one particle per row (N rows, D columns), so C
    mixes particles, not coordinates. The system has the form y = C x with
    C unknown; it is solved against the transposed problem
    x_now.T @ C.T = x_next.T, column block by column block.

    Full-rank systems go through Householder QR; rank-deficient ones
    (including D < N, where the transpose is underdetermined) fall back to
    the minimum-norm least-squares solution, flagged in the result. A
    collapsed swarm is an expected runtime condition, not a failure.
    """
    x_now = np.asarray(x_now, dtype=float)
    x_next = np.asarray(x_next, dtype=float)
    if x_now.ndim != 2 or x_now.shape != x_next.shape:
        raise ShapeError(
            f"position blocks must share an (N, D) shape, got "
            f"{x_now.shape} and {x_next.shape}"
        )
    n, d = x_now.shape
    a = x_now.T  # (D, N)
    b = x_next.T  # (D, N)
    rank_deficient = True
    z = None
    rank = min(n, d)
    if d >= n:
        z, rank = householder_qr_solve(a, b)
        rank_deficient = z is None
    if z is None:
        z, _, rank, _ = np.linalg.lstsq(a, b, rcond=None)
        rank = int(rank)
    c = z.T
    residual = float(np.linalg.norm(x_next - c @ x_now))
    return TransformFit(matrix=c, rank=rank, rank_deficient=rank_deficient, residual=residual)


def eigenvalues(m: np.ndarray) -> np.ndarray:
    """All eigenvalues of a real square matrix, complex valued.

    Sorted by descending modulus; ties broken by descending real part.
    Delegates to LAPACK via numpy (implicit-shift QR on the Hessenberg
    form) which meets the accuracy contract needed here.
    """
    m = np.asarray(m, dtype=float)
    if m.ndim != 2 or m.shape[0] != m.shape[1]:
        raise ShapeError(f"eigenvalues needs a square matrix, got {m.shape}")
    if not np.isfinite(m).all():
        raise ShapeError("eigenvalues needs finite matrix entries")
    eig = np.linalg.eigvals(m)
    order = np.lexsort((-eig.real, -np.abs(eig)))
    return eig[order]


def spectral_normalize(m: np.ndarray) -> np.ndarray:
    """Divide a square matrix by the modulus of its top eigenvalue.

    The returned matrix has top eigenvalue modulus 1 (within 1e-9). The
    modulus is used rather than the raw eigenvalue because the top
    eigenvalue of a real matrix may be complex; dividing by it would leave
    the real field.
    """
    spectrum = eigenvalues(m)
    top = float(np.abs(spectrum[0]))
    if top == 0.0:
        raise SingularSpectrumError("all eigenvalues are zero; cannot normalize")
    return np.asarray(m, dtype=float) / top


def dynamic_system(alpha1: float, alpha2: float, omega: float):
    """Per-dimension deterministic swarm model as (dynamic matrix, input matrix).

    Random attraction factors are replaced by their expectation 1/2, giving
    theta = (alpha1 + alpha2) / 2 and the state update
    [x, v](t+1) = A @ [x, v](t) + B * psi.
    """
    theta = (alpha1 + alpha2) / 2.0
    a = np.array([[1.0 - theta, omega], [-theta, omega]])
    b = np.array([theta, theta])
    return a, b


def dynamic_matrix_eigs(alpha1: float, alpha2: float, omega: float) -> np.ndarray:
    """Eigenvalues of the 2x2 dynamic matrix for a parameter triple.

    All moduli below one means the deterministic model is stagnant; any
    modulus above one means it is chaotic. The critical boundary sits at
    top modulus exactly one.
    """
    a, _ = dynamic_system(alpha1, alpha2, omega)
    return eigenvalues(a)
