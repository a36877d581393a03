"""Complex linear-algebra kernel shared by the precoders and link chains.

All routines are pure functions of their inputs. A single relative tolerance,
``RANK_TOL``, decides numerical rank everywhere: a matrix is treated as rank
deficient when its smallest pivot (or singular value) falls below
``RANK_TOL`` times its largest.
"""

from __future__ import annotations

import numpy as np
import scipy.linalg

from .errors import RankDeficient

RANK_TOL = 1e-12

__all__ = [
    "RANK_TOL",
    "hermitian",
    "numerical_rank",
    "lsq_solve",
    "projection_orthogonal",
    "dft",
]


def hermitian(a: np.ndarray) -> np.ndarray:
    """Conjugate transpose of a 1-D or 2-D array."""
    a = np.asarray(a)
    if a.ndim == 1:
        return a.conj()
    return a.conj().T


def numerical_rank(a: np.ndarray, tol: float = RANK_TOL) -> int:
    s = np.linalg.svd(np.atleast_2d(a), compute_uv=False)
    if s.size == 0 or s[0] == 0.0:
        return 0
    return int(np.count_nonzero(s > tol * s[0]))


def _pivoted_qr(a: np.ndarray):
    q, r, piv = scipy.linalg.qr(a, mode="economic", pivoting=True)
    diag = np.abs(np.diag(r))
    k = a.shape[1]
    rank = int(np.count_nonzero(diag > RANK_TOL * diag[0])) if diag[0] > 0.0 else 0
    if rank < k:
        raise RankDeficient(f"matrix with {k} columns has effective rank {rank}")
    return q, r, piv


def lsq_solve(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    """Least-squares solution of ``a @ x ~= b``.

    Parameters
    ----------
    a : np.ndarray
        ``(m, k)`` complex matrix with full column rank (``k <= m``).
    b : np.ndarray
        ``(m,)`` or ``(m, n)`` right-hand side.

    Returns
    -------
    np.ndarray
        ``x`` of shape ``(k,)`` or ``(k, n)`` minimising ``||b - a x||_F``.

    Raises
    ------
    RankDeficient
        If the column-pivoted QR of ``a`` reveals rank below ``k``.
    """
    a = np.atleast_2d(np.asarray(a, dtype=complex))
    b = np.asarray(b, dtype=complex)
    vector_rhs = b.ndim == 1
    b2 = b.reshape(-1, 1) if vector_rhs else b
    if a.shape[0] != b2.shape[0]:
        raise ValueError(f"row mismatch: a has {a.shape[0]} rows, b has {b2.shape[0]}")
    if a.shape[1] > a.shape[0]:
        raise RankDeficient(f"{a.shape[1]} columns exceed {a.shape[0]} rows")
    q, r, piv = _pivoted_qr(a)
    y = scipy.linalg.solve_triangular(r, q.conj().T @ b2)
    x = np.empty_like(y)
    x[piv] = y
    return x[:, 0] if vector_rhs else x


def projection_orthogonal(h: np.ndarray, dim: int | None = None) -> np.ndarray:
    """Projector onto the orthogonal complement of ``span(h)``.

    Equivalent to ``I - h (h^H h)^{-1} h^H`` but formed from an orthonormal
    basis of the column space, which stays accurate when the columns are
    nearly collinear. With zero columns the identity is returned; ``dim``
    gives the ambient dimension in that case when ``h`` carries no rows.
    """
    h = np.asarray(h, dtype=complex)
    if h.ndim == 1:
        h = h.reshape(-1, 1)
    m = h.shape[0] if h.size or dim is None else dim
    if h.shape[1] == 0:
        return np.eye(m, dtype=complex)
    if h.shape[1] > h.shape[0]:
        raise RankDeficient(f"{h.shape[1]} columns exceed {h.shape[0]} rows")
    q, _, _ = _pivoted_qr(h)
    return np.eye(m, dtype=complex) - q @ q.conj().T


def dft(x: np.ndarray, inverse: bool = False, axis: int = -1) -> np.ndarray:
    """Unitary DFT along ``axis``.

    Forward: ``X[k] = K^{-1/2} sum_n x[n] exp(-2j pi k n / K)``; the inverse
    uses the conjugate kernel with the same ``K^{-1/2}`` scale.
    """
    x = np.asarray(x, dtype=complex)
    if inverse:
        return np.fft.ifft(x, axis=axis, norm="ortho")
    return np.fft.fft(x, axis=axis, norm="ortho")
