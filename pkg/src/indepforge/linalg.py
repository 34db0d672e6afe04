"""Dense exact linear algebra over a :class:`~indepforge.field.Field`.

Subspaces of ``F^n`` are carried as reduced row echelon matrices of shape
``(k, n)``; two equal subspaces always have identical matrices.  Pivoting
is leftmost-column first, which fixes every "first solution" choice made
elsewhere in the package.
"""

from __future__ import annotations

import numpy as np

from .field import Field


def rref(F: Field, M) -> tuple[np.ndarray, list[int]]:
    """Reduced row echelon form; returns the nonzero rows and pivot columns."""
    A = np.array(M, dtype=F.dtype, copy=True)
    if A.ndim != 2:
        raise ValueError("rref expects a 2-d array")
    rows, cols = A.shape
    pivots: list[int] = []
    r = 0
    for c in range(cols):
        if r == rows:
            break
        nz = np.nonzero(A[r:, c])[0]
        if len(nz) == 0:
            continue
        i = r + int(nz[0])
        if i != r:
            A[[r, i]] = A[[i, r]]
        A[r] = F.reduce(A[r] * F.inv(A[r, c]))
        col = A[:, c].copy()
        col[r] = 0
        hit = np.nonzero(col)[0]
        if len(hit):
            A[hit] = F.reduce(A[hit] - np.outer(col[hit], A[r]))
        pivots.append(c)
        r += 1
    return A[:r], pivots


def rank(F: Field, M) -> int:
    M = np.asarray(M)
    if M.size == 0:
        return 0
    return len(rref(F, M)[1])


def span(F: Field, rows, n: int | None = None) -> np.ndarray:
    """Canonical basis (rref rows) of the span of ``rows``."""
    rows = np.asarray(rows, dtype=F.dtype) if not isinstance(rows, np.ndarray) else rows
    if rows.ndim == 1:
        rows = rows.reshape(1, -1) if rows.size else F.zeros((0, n or 0))
    if rows.shape[0] == 0:
        return F.zeros((0, rows.shape[1] if n is None else n))
    return rref(F, rows)[0]


def kernel(F: Field, M) -> np.ndarray:
    """Basis of ``{v : M v = 0}`` as rows, one per free column of ``M``."""
    M = np.asarray(M)
    m, n = M.shape
    if m == 0:
        return F.eye(n)
    R, piv = rref(F, M)
    free = [j for j in range(n) if j not in set(piv)]
    K = F.zeros((len(free), n))
    for k, j in enumerate(free):
        K[k, j] = 1
        for i, pc in enumerate(piv):
            K[k, pc] = F.neg(R[i, j])
    return K


def solve(F: Field, M, b):
    """A solution of ``M v = b`` with every free variable set to zero, or None."""
    M = np.asarray(M)
    m, n = M.shape
    aug = np.concatenate([M.astype(F.dtype), np.asarray(b, dtype=F.dtype).reshape(m, 1)], axis=1)
    R, piv = rref(F, aug)
    if piv and piv[-1] == n:
        return None
    v = F.zeros(n)
    for i, pc in enumerate(piv):
        v[pc] = R[i, n]
    return v


def quotient_map(F: Field, R: np.ndarray, n: int) -> tuple[np.ndarray, list[int]]:
    """Matrix of ``F^n -> F^n / span(R)`` in the coordinates of the non-pivot columns.

    ``R`` must be in rref.  Returns the matrix and the kept (non-pivot) columns.
    """
    piv = [int(np.nonzero(row)[0][0]) for row in R]
    pset = set(piv)
    keep = [j for j in range(n) if j not in pset]
    Q = F.zeros((len(keep), n))
    for a, j in enumerate(keep):
        Q[a, j] = 1
    if piv and keep:
        Q[:, piv] = F.reduce(-R[:, keep].T)
    return Q, keep


def reduce_mod(F: Field, R: np.ndarray, v: np.ndarray) -> np.ndarray:
    """Normal form of ``v`` modulo the row space of the rref matrix ``R``."""
    v = np.array(v, dtype=F.dtype, copy=True)
    for row in R:
        c = int(np.nonzero(row)[0][0])
        if v[c]:
            v = F.reduce(v - v[c] * row)
    return v


def contains(F: Field, R: np.ndarray, v) -> bool:
    return F.is_zero(reduce_mod(F, R, v))


def is_subspace(F: Field, U: np.ndarray, V: np.ndarray) -> bool:
    """True when span(U) is contained in span(V) (V in rref)."""
    return all(contains(F, V, u) for u in U)


def add(F: Field, U: np.ndarray, V: np.ndarray) -> np.ndarray:
    return span(F, np.concatenate([U, V], axis=0), U.shape[1])


def intersect(F: Field, U: np.ndarray, V: np.ndarray) -> np.ndarray:
    n = U.shape[1]
    if U.shape[0] == 0 or V.shape[0] == 0:
        return F.zeros((0, n))
    C = np.concatenate([U, F.reduce(-V)], axis=0).T
    K = kernel(F, C)
    if K.shape[0] == 0:
        return F.zeros((0, n))
    return span(F, F.matmul(K[:, : U.shape[0]], U), n)


def preimage(F: Field, M: np.ndarray, V: np.ndarray) -> np.ndarray:
    """Rows spanning ``{v : M v in span(V)}`` (V in rref), canonicalized."""
    Q, _ = quotient_map(F, V, M.shape[0])
    if Q.shape[0] == 0:
        return F.eye(M.shape[1])
    return span(F, kernel(F, F.matmul(Q, M)), M.shape[1])


def image(F: Field, M: np.ndarray) -> np.ndarray:
    """Canonical basis of the column space of ``M``."""
    return span(F, M.T, M.shape[0])
