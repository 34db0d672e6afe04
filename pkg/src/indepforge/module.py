"""Finitely presented modules over a :class:`LocalAlgebra` as linear data.

A module stores one ``d x d`` action matrix per algebra basis element, so
closures, colons and annihilators are all plain kernel computations.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence

import numpy as np

from . import linalg as la
from .algebra import AlgebraMorphism, Ideal, LocalAlgebra
from .errors import AlgebraMismatch, Disagreement, NotSubmodule, OwnerMismatch, ValidationError


class FpModule:
    def __init__(self, A: LocalAlgebra, action: np.ndarray, name: str | None = None,
                 ambient_rank: int | None = None, keep: list[int] | None = None):
        D = A.dim
        if action.ndim != 3 or action.shape[0] != D or action.shape[1] != action.shape[2]:
            raise ValidationError(f"action tensor must have shape ({D}, d, d)")
        self.A = A
        self.F = A.F
        self.action = action
        self.dim = action.shape[1]
        self.name = name
        # for cokernels of A^r: coordinates of M sit at these positions of A^r
        self.ambient_rank = ambient_rank
        self.keep = keep
        self._var_actions = None
        self._mA = None

    def __repr__(self):
        return f"<FpModule {self.name or 'M'} over {self.A.name or 'A'}: dim {self.dim}>"

    @property
    def var_actions(self) -> list[np.ndarray]:
        if self._var_actions is None:
            self._var_actions = [self.act_mat(v) for v in self.A.variables]
        return self._var_actions

    def act_mat(self, a) -> np.ndarray:
        """Matrix of multiplication by the algebra element ``a``."""
        d = self.dim
        a = np.asarray(a)
        if a.shape != (self.A.dim,):
            raise AlgebraMismatch("scalar from another algebra")
        return self.F.matmul(a, self.action.reshape(self.A.dim, d * d)).reshape(d, d)

    def act(self, a, m) -> np.ndarray:
        return self.F.matmul(self.act_mat(a), np.asarray(m))

    def zero(self) -> np.ndarray:
        return self.F.zeros(self.dim)

    def basis_vector(self, j: int) -> np.ndarray:
        v = self.zero()
        v[j] = 1
        return v

    def check_action(self) -> bool:
        """Identity on ``1``, and ``action(a) action(b) = action(ab)`` on basis pairs."""
        F, A, T = self.F, self.A, self.action
        if not F.equal(T[0], F.eye(self.dim)):
            return False
        for i in range(A.dim):
            for j in range(i, A.dim):
                prod = F.matmul(T[i], T[j])
                if not F.equal(prod, self.act_mat(A.mult[i][:, j])):
                    return False
                if not F.equal(prod, F.matmul(T[j], T[i])):
                    return False
        return True

    # -- submodules -------------------------------------------------------

    def closure(self, rows) -> np.ndarray:
        """Canonical rows of the submodule generated by ``rows``."""
        F = self.F
        if self.dim == 0:
            return F.zeros((0, 0))
        S = la.span(F, np.asarray(rows, dtype=F.dtype).reshape(-1, self.dim), self.dim)
        while S.shape[0]:
            parts = [S] + [F.matmul(S, X.T) for X in self.var_actions]
            T = la.span(F, np.concatenate(parts, axis=0), self.dim)
            if T.shape[0] == S.shape[0]:
                return T
            S = T
        return S

    def span(self, elements) -> "Submodule":
        elements = [np.asarray(e) for e in elements]
        if not elements:
            return self.zero_submodule()
        return Submodule(self, self.closure(np.stack(elements)))

    def submodule(self, rows, check: bool = True) -> "Submodule":
        """Wrap a subspace, rejecting it unless it is action-closed."""
        R = la.span(self.F, np.asarray(rows, dtype=self.F.dtype).reshape(-1, self.dim), self.dim)
        if check:
            for X in self.var_actions:
                if not la.is_subspace(self.F, self.F.matmul(R, X.T), R):
                    raise NotSubmodule("subspace is not closed under the algebra action")
        return Submodule(self, R)

    def whole(self) -> "Submodule":
        return Submodule(self, self.F.eye(self.dim))

    def zero_submodule(self) -> "Submodule":
        return Submodule(self, self.F.zeros((0, self.dim)))

    def ideal_times(self, I: Ideal) -> "Submodule":
        """``I M``, spanned by ``g M`` over minimal generators ``g`` of ``I``."""
        if I.algebra is not self.A:
            raise AlgebraMismatch("ideal of another algebra")
        if I.is_zero() or self.dim == 0:
            return self.zero_submodule()
        if I is self.A.maximal_ideal():
            return self.max_times()
        parts = [self.act_mat(g).T for g in I.minimal_generators()]
        return Submodule(self, la.span(self.F, np.concatenate(parts, axis=0), self.dim))

    def sequence_times(self, xs) -> "Submodule":
        """``(x_1..x_n) M`` for a sequence of algebra elements."""
        xs = [np.asarray(x) for x in xs]
        if not xs or self.dim == 0:
            return self.zero_submodule()
        parts = [self.act_mat(x).T for x in xs]
        return Submodule(self, la.span(self.F, np.concatenate(parts, axis=0), self.dim))

    def max_times(self) -> "Submodule":
        if self._mA is None:
            if not self.var_actions or self.dim == 0:
                self._mA = self.zero_submodule()
            else:
                parts = [X.T for X in self.var_actions]
                self._mA = Submodule(self, la.span(self.F, np.concatenate(parts, axis=0), self.dim))
        return self._mA

    def mu(self) -> int:
        return self.dim - self.max_times().dim

    def generators(self) -> list[np.ndarray]:
        """Minimal generators: basis vectors at the non-pivot columns of ``m_A M``."""
        _, keep = la.quotient_map(self.F, self.max_times().rows, self.dim)
        return [self.basis_vector(j) for j in keep]

    # -- formatting -------------------------------------------------------

    def lift(self, m) -> list[np.ndarray] | None:
        """Components in ``A^r`` when the module is a cokernel of ``A^r``."""
        if self.keep is None:
            return None
        D = self.A.dim
        v = self.F.zeros(self.ambient_rank * D)
        v[self.keep] = np.asarray(m)
        return [v[k * D:(k + 1) * D] for k in range(self.ambient_rank)]

    def format(self, m) -> str:
        parts = self.lift(m)
        if parts is None:
            return "[" + ", ".join(self.F.to_str(c) for c in np.asarray(m)) + "]"
        return "(" + ", ".join(self.A.format(p) for p in parts) + ")"


class Submodule:
    """An action-closed subspace of an :class:`FpModule`, in canonical form."""

    def __init__(self, module: FpModule, rows: np.ndarray):
        self.module = module
        self.rows = rows

    @property
    def dim(self) -> int:
        return self.rows.shape[0]

    def _same(self, other: "Submodule"):
        if other.module is not self.module:
            raise OwnerMismatch("submodules of different modules")

    def __eq__(self, other) -> bool:
        if not isinstance(other, Submodule):
            return NotImplemented
        self._same(other)
        return self.rows.shape == other.rows.shape and not np.any(self.rows != other.rows)

    def __hash__(self):
        return hash(self.rows.tobytes())

    def __repr__(self):
        return f"<Submodule dim {self.dim} of {self.module!r}>"

    def contains(self, m) -> bool:
        return la.contains(self.module.F, self.rows, m)

    def issubset(self, other: "Submodule") -> bool:
        self._same(other)
        return la.is_subspace(self.module.F, self.rows, other.rows)

    __le__ = issubset

    def __add__(self, other: "Submodule") -> "Submodule":
        self._same(other)
        return Submodule(self.module, la.add(self.module.F, self.rows, other.rows))

    def intersect(self, other: "Submodule") -> "Submodule":
        self._same(other)
        return Submodule(self.module, la.intersect(self.module.F, self.rows, other.rows))

    def is_zero(self) -> bool:
        return self.dim == 0

    def as_module(self, name: str | None = None) -> FpModule:
        """The submodule with its own action (coordinates at the echelon pivots)."""
        M = self.module
        piv = [int(np.nonzero(r)[0][0]) for r in self.rows]
        k = self.dim
        act = M.F.zeros((M.A.dim, k, k))
        for i in range(M.A.dim):
            images = M.F.matmul(self.rows, M.action[i].T)  # row j = b_i * rows[j]
            act[i] = images[:, piv].T
        return FpModule(M.A, act, name=name)

    def mu(self) -> int:
        return submodule_mu(self)

    def minimal_generators(self) -> list[np.ndarray]:
        """Greedy lift of a basis of ``N / m_A N`` from the echelon rows."""
        M = self.module
        S = _times_max(M, self).rows
        gens = []
        for row in self.rows:
            if not la.contains(M.F, S, row):
                gens.append(row.copy())
                S = la.add(M.F, S, row.reshape(1, -1))
        return gens


# -- constructors ----------------------------------------------------------

def free_module(A: LocalAlgebra, r: int, name: str | None = None) -> FpModule:
    D = A.dim
    F = A.F
    act = F.zeros((D, r * D, r * D))
    T = A.mult
    for i in range(D):
        for k in range(r):
            act[i, k * D:(k + 1) * D, k * D:(k + 1) * D] = T[i]
    return FpModule(A, act, name=name, ambient_rank=r, keep=list(range(r * D)))


def free_vector(A: LocalAlgebra, comps: Sequence) -> np.ndarray:
    """Concatenate ``r`` algebra elements into a vector of ``A^r``."""
    return np.concatenate([A.element(c) for c in comps]) if comps else A.F.zeros(0)


def module_from_cokernel(A: LocalAlgebra, r: int, columns: Sequence, name: str | None = None) -> FpModule:
    """``A^r`` modulo the submodule generated by ``columns`` (each a list of ``r`` elements)."""
    Fr = free_module(A, r)
    vecs = []
    for col in columns:
        col = list(col)
        if len(col) != r:
            raise ValidationError(f"column of length {len(col)} in a rank-{r} presentation")
        vecs.append(free_vector(A, col))
    N = Fr.span(vecs)
    return quotient_module(Fr, N, name=name)


def quotient_module(M: FpModule, N: Submodule, name: str | None = None) -> FpModule:
    """``M/N`` with the induced action; coordinates are the non-pivot columns of ``N``."""
    if N.module is not M:
        raise OwnerMismatch("submodule of another module")
    F = M.F
    for X in M.var_actions:
        if not la.is_subspace(F, F.matmul(N.rows, X.T), N.rows):
            raise NotSubmodule("quotient by a subspace that is not a submodule")
    Q, keep = la.quotient_map(F, N.rows, M.dim)
    act = F.zeros((M.A.dim, len(keep), len(keep)))
    for i in range(M.A.dim):
        act[i] = F.matmul(Q, M.action[i][:, keep])
    amb = None if M.keep is None else [M.keep[j] for j in keep]
    out = FpModule(M.A, act, name=name, ambient_rank=M.ambient_rank, keep=amb)
    out.projection = Q
    return out


def quotient_ideal_module(A: LocalAlgebra, I: Ideal, name: str | None = None) -> FpModule:
    """``A/I`` as an ``A``-module."""
    return module_from_cokernel(A, 1, [[g] for g in I.minimal_generators()], name=name)


def algebra_as_module(A: LocalAlgebra, name: str | None = None) -> FpModule:
    return free_module(A, 1, name=name)


def restrict_scalars(phi: AlgebraMorphism, M: FpModule, name: str | None = None) -> FpModule:
    """View a module over ``phi.target`` as a module over ``phi.source``."""
    if M.A is not phi.target:
        raise AlgebraMismatch("module is not over the target of the morphism")
    d, DA, DB = M.dim, phi.source.dim, phi.target.dim
    act = M.F.matmul(phi.matrix.T, M.action.reshape(DB, d * d)).reshape(DA, d, d)
    return FpModule(phi.source, act, name=name)


def direct_sum(modules: Sequence[FpModule], name: str | None = None) -> FpModule:
    if not modules:
        raise ValidationError("direct sum of no modules")
    A = modules[0].A
    if any(M.A is not A for M in modules):
        raise AlgebraMismatch("direct sum over different algebras")
    d = sum(M.dim for M in modules)
    act = A.F.zeros((A.dim, d, d))
    off = 0
    for M in modules:
        act[:, off:off + M.dim, off:off + M.dim] = M.action
        off += M.dim
    return FpModule(A, act, name=name)


def base_change(M: FpModule, I: Ideal, name: str | None = None) -> tuple[LocalAlgebra, FpModule]:
    """``A/I`` and ``M/IM`` as a module over it."""
    A = M.A
    Abar, _ = A.quotient(I)
    Mbar = quotient_module(M, M.ideal_times(I))
    _, keep = la.quotient_map(A.F, I.rows, A.dim)
    act = Mbar.action[keep]
    return Abar, FpModule(Abar, np.ascontiguousarray(act), name=name)


def change_rings(M: FpModule, B: LocalAlgebra, keep: list[int]) -> FpModule:
    """Reinterpret ``M`` over a quotient ``B`` of its algebra whose basis is ``A.basis[keep]``.

    Valid only when the kernel of ``A -> B`` annihilates ``M``.
    """
    return FpModule(B, np.ascontiguousarray(M.action[keep]), name=M.name)


# -- colons and annihilators ---------------------------------------------

def colon_submodule(N: Submodule, I: Ideal) -> Submodule:
    """``(N :_M I) = {m : g m in N for every generator g of I}``."""
    M = N.module
    if I.algebra is not M.A:
        raise AlgebraMismatch("ideal of another algebra")
    out = M.F.eye(M.dim)
    for g in I.minimal_generators():
        out = la.intersect(M.F, out, la.preimage(M.F, M.act_mat(g), N.rows))
    return Submodule(M, out)


def annihilator_of_quotient(M: FpModule, N: Submodule) -> Ideal:
    """``{a in A : a M ⊆ N}``."""
    if N.module is not M:
        raise OwnerMismatch("submodule of another module")
    return annihilator_of_subquotient(M.whole(), N)


def annihilator_of_subquotient(N1: Submodule, N2: Submodule) -> Ideal:
    """``{a in A : a N1 ⊆ N2}``, the annihilator of ``N1/N2`` when ``N2 ⊆ N1``."""
    N1._same(N2)
    M = N1.module
    A, F = M.A, M.F
    if N1.is_zero():
        return A.unit_ideal()
    Q, _ = la.quotient_map(F, N2.rows, M.dim)
    if Q.shape[0] == 0:
        return A.unit_ideal()
    # a -> Q (a n) for each basis vector n of N1; stacked over n
    D, d = A.dim, M.dim
    flat = M.action.reshape(D * d, d)
    blocks = [F.matmul(Q, F.matmul(flat, n).reshape(D, d).T) for n in N1.rows]
    return Ideal(A, la.span(F, la.kernel(F, np.concatenate(blocks, axis=0)), A.dim))


def annihilator(M: FpModule) -> Ideal:
    return annihilator_of_quotient(M, M.zero_submodule())


# -- presentations -------------------------------------------------------

@dataclass
class PresentationData:
    """``pi : A^r -> M`` on chosen generators, with kernel ``K`` inside ``A^r``."""

    module: FpModule
    rank: int
    generators: list
    free: FpModule
    pi: np.ndarray
    kernel: Submodule
    kernel_mu: int

    def kernel_generators(self) -> list[np.ndarray]:
        """Minimal generators of ``K`` as vectors of ``A^r``."""
        return self.kernel.minimal_generators()

    def matrix(self) -> list[list[np.ndarray]]:
        """Presentation matrix ``D`` (``r`` rows of algebra elements, one column per relation)."""
        D = self.module.A.dim
        cols = self.kernel_generators()
        return [[c[k * D:(k + 1) * D] for c in cols] for k in range(self.rank)]


def presentation_map(M: FpModule, gens: Sequence[np.ndarray]) -> np.ndarray:
    """Matrix of ``A^r -> M``, ``(a_k) -> sum a_k g_k``."""
    F, D = M.F, M.A.dim
    if not gens:
        return F.zeros((M.dim, 0))
    cols = []
    for g in gens:
        cols.append(np.stack([F.matmul(M.action[i], g) for i in range(D)], axis=1))
    return np.concatenate(cols, axis=1)


def minimal_presentation(M: FpModule) -> PresentationData:
    F, A = M.F, M.A
    gens = M.generators()
    r = len(gens)
    Fr = free_module(A, r)
    pi = presentation_map(M, gens)
    K = Submodule(Fr, la.span(F, la.kernel(F, pi), Fr.dim)) if r else Fr.zero_submodule()
    if r and not K.issubset(Fr.max_times()):
        raise AssertionError("syzygies of a minimal presentation left m_A A^r")
    mu_K = submodule_mu(K)
    return PresentationData(M, r, gens, Fr, pi, K, mu_K)


def _times_max(M: FpModule, N: Submodule) -> Submodule:
    if N.is_zero() or not M.var_actions:
        return M.zero_submodule()
    parts = [M.F.matmul(N.rows, X.T) for X in M.var_actions]
    return Submodule(M, la.span(M.F, np.concatenate(parts, axis=0), M.dim))


def submodule_mu(N: Submodule) -> int:
    """``dim N / m_A N``."""
    return N.dim - _times_max(N.module, N).dim


def mu(M: FpModule) -> int:
    return M.mu()


@dataclass(frozen=True)
class TorsionRatio:
    numerator: int
    denominator: int
    zero_module: bool

    @property
    def value(self) -> Fraction:
        if self.zero_module:
            return Fraction(0)
        return Fraction(self.numerator, self.denominator)

    def __str__(self):
        v = self.value
        return str(v.numerator) if v.denominator == 1 else f"{v.numerator}/{v.denominator}"


def torsion_ratio(M: FpModule) -> TorsionRatio:
    if M.dim == 0:
        return TorsionRatio(0, 0, True)
    P = minimal_presentation(M)
    return TorsionRatio(P.kernel_mu, P.rank, False)


def freeness_oracle(M: FpModule, details: bool = False):
    """``dim M == mu * dim A`` and the generator map ``A^mu -> M`` is injective."""
    A = M.A
    r = M.mu()
    dim_ok = M.dim == r * A.dim
    pi = presentation_map(M, M.generators())
    inj_ok = la.rank(M.F, pi) == r * A.dim
    if dim_ok != inj_ok:
        raise Disagreement("dimension and injectivity freeness checks disagree")
    verdict = dim_ok and inj_ok
    if details:
        return verdict, {"dim": M.dim, "mu": r, "algebra_dim": A.dim,
                         "dimension_check": dim_ok, "injectivity_check": inj_ok}
    return verdict
