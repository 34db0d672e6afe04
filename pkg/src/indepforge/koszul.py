"""Koszul complexes ``K(x)`` and ``K(x, M)``, morphisms between complexes and homotopies.

Degree ``l`` of ``K(x)`` has the basis of increasing index tuples of length
``l``; the differential sends ``e_I`` to ``sum_j (-1)^(j-1) x_{i_j} e_{I - i_j}``.
Complexes of modules are carried as k-linear data (:class:`ModuleComplex`).
"""

from __future__ import annotations

from dataclasses import dataclass
from itertools import combinations
from math import comb
from typing import Sequence

import numpy as np

from . import linalg as la
from .algebra import LocalAlgebra
from .algmatrix import minor
from .errors import CapExceeded, NoSolution, PreconditionFailed, RelationViolated, ValidationError
from .module import FpModule, Submodule, algebra_as_module, direct_sum

DEFAULT_MAX_SEQ = 12


def wedge_basis(n: int, l: int) -> list[tuple[int, ...]]:
    return list(combinations(range(n), l))


def wedge_sign(I: tuple[int, ...], alpha: int) -> tuple[int, tuple[int, ...]]:
    """``e_I ∧ e_alpha = sign * e_J`` with ``J`` sorted (sign 0 if ``alpha`` is in ``I``)."""
    if alpha in I:
        return 0, I
    after = sum(1 for i in I if i > alpha)
    return (-1) ** after, tuple(sorted(I + (alpha,)))


class KoszulComplex:
    """``K(x)`` over ``A``: ``d[l]`` lists, per basis tuple, its (row, sign, index) terms."""

    def __init__(self, A: LocalAlgebra, xs: Sequence, max_seq: int = DEFAULT_MAX_SEQ):
        xs = [A.element(x) for x in xs]
        n = len(xs)
        if n > max_seq:
            raise CapExceeded(f"sequence length {n} exceeds cap {max_seq}")
        self.A, self.xs, self.n = A, xs, n
        self.bases = [wedge_basis(n, l) for l in range(n + 1)]
        self.index = [{I: k for k, I in enumerate(b)} for b in self.bases]
        self.terms: list[list[list[tuple[int, int, int]]]] = [[]]
        for l in range(1, n + 1):
            cols = []
            for I in self.bases[l]:
                col = []
                for j, i in enumerate(I):
                    rest = I[:j] + I[j + 1:]
                    col.append((self.index[l - 1][rest], 1 if j % 2 == 0 else -1, i))
                cols.append(col)
            self.terms.append(cols)
        self.verify_square_zero()

    def rank(self, l: int) -> int:
        return len(self.bases[l]) if 0 <= l <= self.n else 0

    def matrix(self, l: int) -> list[list[np.ndarray]]:
        """``d_l`` as a matrix of algebra elements."""
        A = self.A
        M = [[A.zero() for _ in self.bases[l]] for _ in self.bases[l - 1]]
        for c, col in enumerate(self.terms[l]):
            for r, s, i in col:
                M[r][c] = self.xs[i] if s > 0 else A.scale(-1, self.xs[i])
        return M

    def verify_square_zero(self) -> None:
        A = self.A
        for l in range(2, self.n + 1):
            for col in self.terms[l]:
                acc: dict[int, np.ndarray] = {}
                for r, s, i in col:
                    for r2, s2, i2 in self.terms[l - 1][r]:
                        term = A.scale(s * s2, A.mul(self.xs[i], self.xs[i2]))
                        acc[r2] = A.add(acc.get(r2, A.zero()), term)
                if any(not A.is_zero(v) for v in acc.values()):
                    raise AssertionError(f"d_{l - 1} d_{l} != 0")

    def with_coefficients(self, M: FpModule) -> "KoszulWithCoefficients":
        return KoszulWithCoefficients(self, M)

    def as_complex(self) -> "KoszulWithCoefficients":
        return KoszulWithCoefficients(self, algebra_as_module(self.A))


def build_koszul(A: LocalAlgebra, xs: Sequence, max_seq: int = DEFAULT_MAX_SEQ) -> KoszulComplex:
    return KoszulComplex(A, xs, max_seq=max_seq)


class ModuleComplex:
    """Modules ``M_0..M_n`` with k-linear A-maps ``diff[l] : M_l -> M_{l-1}`` (``l >= 1``)."""

    def __init__(self, modules: Sequence[FpModule], diffs: Sequence[np.ndarray | None]):
        self.modules = list(modules)
        self._diffs = list(diffs)

    @property
    def length(self) -> int:
        return len(self.modules) - 1

    def module(self, l: int) -> FpModule | None:
        return self.modules[l] if 0 <= l < len(self.modules) else None

    def dim(self, l: int) -> int:
        M = self.module(l)
        return M.dim if M is not None else 0

    def diff(self, l: int) -> np.ndarray:
        """``M_l -> M_{l-1}``; the zero map outside ``1..length``."""
        F = self.modules[0].F
        if 1 <= l <= self.length:
            return self._diffs[l]
        return F.zeros((self.dim(l - 1), self.dim(l)))

    def check_square_zero(self) -> bool:
        F = self.modules[0].F
        return all(F.is_zero(F.matmul(self.diff(l - 1), self.diff(l))) for l in range(2, self.length + 1))

    def homology_dims(self) -> list[int]:
        F = self.modules[0].F
        out = []
        for l in range(self.length + 1):
            ker = self.dim(l) - la.rank(F, self.diff(l))
            im = la.rank(F, self.diff(l + 1))
            out.append(ker - im)
        return out


class KoszulWithCoefficients(ModuleComplex):
    """``K(x) ⊗ M``: degree ``l`` is ``M^{C(n,l)}`` with blocks ``±x_i`` acting on ``M``."""

    def __init__(self, K: KoszulComplex, M: FpModule):
        if M.A is not K.A:
            raise ValidationError("module over another algebra")
        self.K, self.M = K, M
        n = K.n
        self._x_actions = [M.act_mat(x) for x in K.xs]
        modules = [direct_sum([M] * comb(n, l)) if comb(n, l) else None for l in range(n + 1)]
        super().__init__(modules, [None] * (n + 1))
        self._built: dict[int, np.ndarray] = {}

    def diff(self, l: int) -> np.ndarray:
        K, F, d = self.K, self.M.F, self.M.dim
        if not 1 <= l <= K.n:
            return F.zeros((K.rank(l - 1) * d, K.rank(l) * d))
        if l not in self._built:
            D = F.zeros((K.rank(l - 1) * d, K.rank(l) * d))
            for c, col in enumerate(K.terms[l]):
                for r, s, i in col:
                    X = self._x_actions[i]
                    D[r * d:(r + 1) * d, c * d:(c + 1) * d] = X if s > 0 else F.reduce(-X)
            self._built[l] = D
        return self._built[l]

    def module(self, l: int) -> FpModule | None:
        if 0 <= l <= self.K.n:
            return self.modules[l]
        return None

    def dim(self, l: int) -> int:
        return self.K.rank(l) * self.M.dim

    def jx_part(self, l: int) -> np.ndarray:
        """Rows of ``J_x K_l(x, M) = (J_x M)^{C(n,l)}``."""
        JM = jx_times(self.M, self.K.xs)
        return block_rows(self.M.F, JM, self.K.rank(l), self.M.dim)

    def block_submodule(self, l: int, rows: np.ndarray) -> np.ndarray:
        return block_rows(self.M.F, rows, self.K.rank(l), self.M.dim)


def jx_times(M: FpModule, xs) -> np.ndarray:
    return M.sequence_times(xs).rows


def block_rows(F, rows: np.ndarray, copies: int, d: int) -> np.ndarray:
    """Rows spanning ``S^copies`` inside ``M^copies`` for a subspace ``S`` of ``M``."""
    k = rows.shape[0]
    out = F.zeros((k * copies, d * copies))
    for c in range(copies):
        out[c * k:(c + 1) * k, c * d:(c + 1) * d] = rows
    return out


def homology_dims(KM: ModuleComplex) -> list[int]:
    return KM.homology_dims()


def dual_cohomology_dims(K: KoszulComplex, M: FpModule) -> list[int]:
    """Cohomology of ``Hom(K(x), M)`` with ``Hom(K_l, M) = M^{C(n,l)}``."""
    F, d, n = M.F, M.dim, K.n
    KM = K.with_coefficients(M)

    def delta(l):  # Hom(K_l, M) -> Hom(K_{l+1}, M), phi -> phi o d_{l+1}
        if not 0 <= l < n:
            return F.zeros((K.rank(l + 1) * d, K.rank(l) * d))
        D = KM.diff(l + 1)
        # transpose the block structure, keeping each block as the action matrix
        R, C = K.rank(l), K.rank(l + 1)
        out = F.zeros((C * d, R * d))
        for r in range(R):
            for c in range(C):
                out[c * d:(c + 1) * d, r * d:(r + 1) * d] = D[r * d:(r + 1) * d, c * d:(c + 1) * d]
        return out

    dims = []
    for l in range(n + 1):
        ker = K.rank(l) * d - la.rank(F, delta(l))
        im = la.rank(F, delta(l - 1)) if l >= 1 else 0
        dims.append(ker - im)
    return dims


@dataclass
class KoszulIndependence:
    verdict: bool
    kernel_dim: int
    witness: list[np.ndarray] | None


def independence_via_koszul(A: LocalAlgebra, xs, M: FpModule,
                            max_seq: int = DEFAULT_MAX_SEQ) -> KoszulIndependence:
    """``Ker d_1^{x,M} ⊆ J_x K_1(x, M)``, with a kernel vector outside it on failure."""
    K = build_koszul(A, xs, max_seq=max_seq)
    F, d, n = M.F, M.dim, K.n
    if n == 0 or d == 0:
        return KoszulIndependence(True, 0, None)
    KM = K.with_coefficients(M)
    ker = la.kernel(F, KM.diff(1))
    target = KM.jx_part(1)
    target = la.span(F, target, n * d)
    for row in ker:
        if not la.contains(F, target, row):
            return KoszulIndependence(False, ker.shape[0], [row[i * d:(i + 1) * d] for i in range(n)])
    return KoszulIndependence(True, ker.shape[0], None)


def higher_kernel_inclusion(A: LocalAlgebra, xs, M: FpModule, l: int, N: Submodule,
                            max_seq: int = DEFAULT_MAX_SEQ) -> bool:
    """``(d_l)^{-1}(J_x K_{l-1}(x, N)) ⊆ K_l(x, N) + J_x K_l(x, M)``."""
    K = build_koszul(A, xs, max_seq=max_seq)
    if not 1 <= l <= K.n:
        raise ValidationError(f"degree {l} outside 1..{K.n}")
    if N.module is not M:
        raise ValidationError("N must be a submodule of M")
    F, d = M.F, M.dim
    KM = K.with_coefficients(M)
    JN = jx_times_sub(M, N, K.xs)
    low = la.span(F, block_rows(F, JN, K.rank(l - 1), d), K.rank(l - 1) * d)
    pre = la.preimage(F, KM.diff(l), low)
    rhs = la.span(F, np.concatenate([block_rows(F, N.rows, K.rank(l), d), KM.jx_part(l)], axis=0),
                  K.rank(l) * d)
    return la.is_subspace(F, pre, rhs)


def jx_times_sub(M: FpModule, N: Submodule, xs) -> np.ndarray:
    if N.is_zero() or not xs:
        return M.F.zeros((0, M.dim))
    parts = [M.F.matmul(N.rows, M.act_mat(x).T) for x in xs]
    return la.span(M.F, np.concatenate(parts, axis=0), M.dim)


# -- morphisms of complexes ------------------------------------------------

@dataclass
class ComplexMorphism:
    """``maps[l] : source_l -> target_{l + shift}`` as k-linear matrices."""

    source: ModuleComplex
    target: ModuleComplex
    maps: list[np.ndarray]
    shift: int = 0

    def map(self, l: int) -> np.ndarray:
        F = self.source.modules[0].F
        if 0 <= l < len(self.maps):
            return self.maps[l]
        return F.zeros((self.target.dim(l + self.shift), self.source.dim(l)))

    def commutes(self) -> bool:
        """``f_{l+s} phi_l == phi_{l-1} d_l`` in every degree."""
        F = self.source.modules[0].F
        s = self.shift
        for l in range(1, self.source.length + 1):
            lhs = F.matmul(self.target.diff(l + s), self.map(l))
            rhs = F.matmul(self.map(l - 1), self.source.diff(l))
            if not F.equal(lhs, rhs):
                return False
        return True

    def compose(self, other: "ComplexMorphism") -> "ComplexMorphism":
        """``self ∘ other``."""
        F = self.source.modules[0].F
        maps = [F.matmul(self.map(l + other.shift), other.map(l)) for l in range(other.source.length + 1)]
        return ComplexMorphism(other.source, self.target, maps, self.shift + other.shift)


def wedge_morphism(A: LocalAlgebra, W, xs, us, M: FpModule | None = None,
                   max_seq: int = DEFAULT_MAX_SEQ) -> ComplexMorphism:
    """``ΛW : K(x) -> K(u)`` (tensored with ``M`` when given) for ``x = uW``.

    Degree ``l`` sends ``e_I`` to ``sum_J det(W[J, I]) e_J``.
    """
    xs = [A.element(x) for x in xs]
    us = [A.element(u) for u in us]
    n = len(us)
    if len(xs) != n or len(W) != n or any(len(r) != n for r in W):
        raise ValidationError("wedge morphism needs square W and sequences of equal length")
    for j in range(n):
        acc = A.zero()
        for i in range(n):
            acc = A.add(acc, A.mul(us[i], W[i][j]))
        if not A.F.equal(acc, xs[j]):
            raise RelationViolated(f"x_{j + 1} != sum_i u_i W_i{j + 1}", j)
    M = M if M is not None else algebra_as_module(A)
    Kx = build_koszul(A, xs, max_seq).with_coefficients(M)
    Ku = build_koszul(A, us, max_seq).with_coefficients(M)
    F, d = A.F, M.dim
    maps = []
    for l in range(n + 1):
        basis = Kx.K.bases[l]
        Phi = F.zeros((len(basis) * d, len(basis) * d))
        for c, I in enumerate(basis):
            for r, J in enumerate(basis):
                m = minor(A, W, J, I)
                if not A.is_zero(m):
                    Phi[r * d:(r + 1) * d, c * d:(c + 1) * d] = M.act_mat(m)
        maps.append(Phi)
    phi = ComplexMorphism(Kx, Ku, maps, 0)
    if not phi.commutes():
        raise AssertionError("ΛW does not commute with the Koszul differentials")
    return phi


def delta_mu(A: LocalAlgebra, us, mu: Sequence[np.ndarray], M: FpModule,
             max_seq: int = DEFAULT_MAX_SEQ) -> ComplexMorphism:
    """Degree-one morphism ``K(u) -> K(u, M)``, ``a -> sum_alpha (a ∧ e_alpha) ⊗ m_alpha``.

    Requires ``sum u_alpha m_alpha = 0``.
    """
    us = [A.element(u) for u in us]
    n = len(us)
    if len(mu) != n:
        raise ValidationError("mu must have one component per element of u")
    F, D, d = A.F, A.dim, M.dim
    tot = M.zero()
    for u, m in zip(us, mu):
        tot = F.reduce(tot + M.act(u, m))
    if not F.is_zero(tot):
        raise PreconditionFailed("u . mu != 0")
    Ku = build_koszul(A, us, max_seq)
    src, tgt = Ku.as_complex(), Ku.with_coefficients(M)
    # column of b_i e_I: sum_alpha sign * (b_i m_alpha) in block J = I ∪ alpha
    maps = []
    for l in range(n + 1):
        basis = Ku.bases[l]
        Phi = F.zeros((Ku.rank(l + 1) * d, len(basis) * D))
        for c, I in enumerate(basis):
            for alpha in range(n):
                s, J = wedge_sign(I, alpha)
                if s == 0:
                    continue
                r = Ku.index[l + 1][J]
                block = np.stack([F.matmul(M.action[i], mu[alpha]) for i in range(D)], axis=1)
                Phi[r * d:(r + 1) * d, c * D:(c + 1) * D] = F.reduce(
                    Phi[r * d:(r + 1) * d, c * D:(c + 1) * D] + s * block)
        maps.append(Phi)
    return ComplexMorphism(src, tgt, maps, 1)


def multiplication_morphism(A: LocalAlgebra, us, m: np.ndarray, M: FpModule,
                            max_seq: int = DEFAULT_MAX_SEQ) -> ComplexMorphism:
    """``K(u) -> K(u, M)``, ``a e_I -> e_I ⊗ a m``."""
    Ku = build_koszul(A, us, max_seq)
    src, tgt = Ku.as_complex(), Ku.with_coefficients(M)
    F, D, d = A.F, A.dim, M.dim
    block = np.stack([F.matmul(M.action[i], m) for i in range(D)], axis=1)
    maps = []
    for l in range(Ku.n + 1):
        k = Ku.rank(l)
        Phi = F.zeros((k * d, k * D))
        for c in range(k):
            Phi[c * d:(c + 1) * d, c * D:(c + 1) * D] = block
        maps.append(Phi)
    return ComplexMorphism(src, tgt, maps, 0)


def shift_down(C: ModuleComplex, n: int) -> ModuleComplex:
    """``M_l = C_{l+1}`` for ``l = 0..n-1`` and ``M_n = 0``, so a degree-one map becomes degree zero."""
    A = C.modules[0].A if C.modules[0] is not None else None
    mods = []
    diffs: list = [None]
    zero = FpModule(A, A.F.zeros((A.dim, 0, 0)))
    for l in range(n + 1):
        mods.append(C.module(l + 1) or zero)
    for l in range(1, n + 1):
        diffs.append(_resize(A.F, C.diff(l + 1), mods[l - 1].dim, mods[l].dim))
    return ModuleComplex(mods, diffs)


def as_degree_zero(phi: ComplexMorphism, n: int) -> ComplexMorphism:
    """Reinterpret a degree-one morphism into ``C`` as a degree-zero one into ``shift_down(C)``."""
    if phi.shift != 1:
        raise ValidationError("expected a degree-one morphism")
    return ComplexMorphism(phi.source, shift_down(phi.target, n), list(phi.maps), 0)


def _resize(F, D: np.ndarray, rows: int, cols: int) -> np.ndarray:
    if D.shape == (rows, cols):
        return D
    return F.zeros((rows, cols))


# -- homotopies -------------------------------------------------------------

@dataclass
class Homotopy:
    """``h[l] : K_l(x) -> M_{l+1}`` and the corrected morphism ``psi``."""

    h: list[np.ndarray]
    psi: list[np.ndarray]
    zero: bool


def construct_homotopy(K: KoszulComplex, target: ModuleComplex, phi: ComplexMorphism) -> Homotopy:
    """Inductive solve ``phi_l ≡ f_{l+1} h_l (mod J_x M_l)`` from ``l = n-1`` down to 0.

    Each basis element ``e_I`` of ``K_l(x)`` is solved separately; unknowns are
    ordered (J_x M_l coordinates, then ``h_l(e_I)``) so the echelon solver sets
    the homotopy to zero whenever that already works.
    """
    A, F, n = K.A, K.A.F, K.n
    D = A.dim
    src = K.as_complex()
    if phi.shift != 0:
        raise ValidationError("construct_homotopy expects a degree-zero morphism")
    if not phi.commutes():
        raise ValidationError("phi is not a morphism of complexes")
    for l in range(n + 1):
        Ml = target.module(l)
        if Ml is not None and Ml.dim and not _independent_on(A, K.xs, Ml):
            raise PreconditionFailed(f"x is not M_{l}-independent")
    Mn = target.module(n)
    if Mn is not None and Mn.dim:
        Jn = la.span(F, block_rows(F, Mn.sequence_times(K.xs).rows, 1, Mn.dim), Mn.dim)
        for c in range(phi.map(n).shape[1]):
            if not la.contains(F, Jn, phi.map(n)[:, c]):
                raise PreconditionFailed("phi_n does not take values in J_x M_n")
    h: list[np.ndarray | None] = [None] * (n + 1)
    h_n = F.zeros((target.dim(n + 1), src.dim(n)))
    for l in range(n - 1, -1, -1):
        Ml, Mup = target.module(l), target.module(l + 1)
        dl, dup = target.dim(l), target.dim(l + 1)
        k = K.rank(l)
        H = F.zeros((dup, k * D))
        if dl:
            J = Ml.sequence_times(K.xs).rows
            f = target.diff(l + 1)
            system = np.concatenate([J.T, f], axis=1) if J.shape[0] else f
            Phi = phi.map(l)
            for c in range(k):
                rhs = Phi[:, c * D]
                sol = la.solve(F, system, rhs)
                if sol is None:
                    raise NoSolution(f"no homotopy step in degree {l}", l)
                v = sol[J.shape[0]:]
                if dup:
                    H[:, c * D:(c + 1) * D] = np.stack(
                        [F.matmul(Mup.action[i], v) for i in range(D)], axis=1)
        h[l] = H
    h[n] = h_n
    psi = []
    for l in range(n + 1):
        P = F.reduce(phi.map(l) - F.matmul(target.diff(l + 1), h[l]))
        if l >= 1:
            P = F.reduce(P - F.matmul(h[l - 1], src.diff(l)))
        psi.append(P)
    zero = all(F.is_zero(x) for x in h)
    return Homotopy(h, psi, zero)


def verify_homotopy(K: KoszulComplex, target: ModuleComplex, phi: ComplexMorphism, H: Homotopy) -> dict:
    """``psi`` is a morphism and takes values in ``J_x M_l`` in every degree."""
    F = K.A.F
    src = K.as_complex()
    psi = ComplexMorphism(src, target, H.psi, 0)
    contained = []
    for l in range(K.n + 1):
        Ml = target.module(l)
        if Ml is None or Ml.dim == 0:
            contained.append(True)
            continue
        J = Ml.sequence_times(K.xs).rows
        contained.append(all(la.contains(F, J, col) for col in H.psi[l].T))
    return {"morphism": psi.commutes(), "values_in_JxM": contained, "ok": psi.commutes() and all(contained)}


def _independent_on(A, xs, M: FpModule) -> bool:
    return independence_via_koszul(A, xs, M).verdict
