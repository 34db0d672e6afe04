"""Square matrices with entries in a local algebra: determinants and minors."""

from __future__ import annotations

from typing import Sequence

import numpy as np

from .algebra import LocalAlgebra
from .errors import CapExceeded, ValidationError

DEFAULT_MAX_DET = 8


def determinant(A: LocalAlgebra, W: Sequence[Sequence[np.ndarray]], max_n: int = DEFAULT_MAX_DET) -> np.ndarray:
    """Cofactor expansion along rows, memoized over the remaining column subsets."""
    n = len(W)
    if any(len(row) != n for row in W):
        raise ValidationError("determinant of a non-square matrix")
    if n > max_n:
        raise CapExceeded(f"determinant of size {n} exceeds cap {max_n}")
    return _det(A, W, list(range(n)), list(range(n)))


def minor(A: LocalAlgebra, W, rows: Sequence[int], cols: Sequence[int]) -> np.ndarray:
    if len(rows) != len(cols):
        raise ValidationError("minor needs as many rows as columns")
    return _det(A, W, list(rows), list(cols))


def _det(A: LocalAlgebra, W, rows: list[int], cols: list[int]) -> np.ndarray:
    if not rows:
        return A.one()
    memo: dict[tuple, np.ndarray] = {}
    k = len(rows)

    def rec(depth: int, avail: tuple) -> np.ndarray:
        if depth == k:
            return A.one()
        if avail in memo:
            return memo[avail]
        out = A.zero()
        r = rows[depth]
        for pos, c in enumerate(avail):
            entry = W[r][c]
            if A.is_zero(entry):
                continue
            sub = rec(depth + 1, avail[:pos] + avail[pos + 1:])
            term = A.mul(entry, sub)
            out = A.add(out, term) if pos % 2 == 0 else A.sub(out, term)
        memo[avail] = out
        return out

    return rec(0, tuple(cols))


def matmul(A: LocalAlgebra, X, Y) -> list[list[np.ndarray]]:
    """Product of matrices of algebra elements."""
    rows, inner, cols = len(X), len(Y), len(Y[0]) if Y else 0
    out = []
    for i in range(rows):
        row = []
        for j in range(cols):
            acc = A.zero()
            for k in range(inner):
                acc = A.add(acc, A.mul(X[i][k], Y[k][j]))
            row.append(acc)
        out.append(row)
    return out


def identity(A: LocalAlgebra, n: int) -> list[list[np.ndarray]]:
    return [[A.one() if i == j else A.zero() for j in range(n)] for i in range(n)]
