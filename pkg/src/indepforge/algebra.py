"""Finite-dimensional local algebras ``k[x_1..x_n]/(relations + (x)^d)``.

A :class:`LocalAlgebra` is a k-basis of standard monomials (``basis[0] == 1``)
together with the multiplication matrices of the variables.  Elements are
plain coordinate vectors (numpy arrays) over that basis.  Ideals are
k-subspaces in canonical echelon form (:class:`Ideal`).
"""

from __future__ import annotations

from dataclasses import dataclass, field as dc_field
from typing import Sequence

import numpy as np

from . import linalg as la
from .errors import (AlgebraMismatch, CapExceeded, NotLocal, NotZeroDimensional,
                     RelationViolated, ValidationError)
from .field import Field
from .poly import (MonomialOrder, Poly, buchberger, format_terms, monomials_of_degree,
                   normal_form, parse_poly, quotient_monomial_basis)

DEFAULT_MAX_DIM = 512


@dataclass
class AlgebraPresentation:
    """Field, variable names, relations and the mandatory truncation degree."""

    field: Field
    var_names: list[str]
    relations: list[Poly] = dc_field(default_factory=list)
    truncation: int = 1
    order: MonomialOrder = dc_field(default_factory=MonomialOrder)

    @classmethod
    def from_strings(cls, field, var_names, relations=(), truncation=1, order="degrevlex"):
        F = Field.parse(field)
        names = list(var_names)
        rels = [r if isinstance(r, Poly) else parse_poly(r, F, names) for r in relations]
        return cls(F, names, rels, int(truncation), MonomialOrder(order))

    def relation_strings(self) -> list[str]:
        return [r.format(self.var_names, self.order) for r in self.relations]


def build_algebra(pres: AlgebraPresentation, max_dim: int = DEFAULT_MAX_DIM,
                  name: str | None = None) -> "LocalAlgebra":
    """Quotient by the relations and ``(vars)^truncation`` via a Groebner basis."""
    F, n, d = pres.field, len(pres.var_names), pres.truncation
    if d < 1:
        raise ValidationError("truncation degree must be at least 1")
    if len(set(pres.var_names)) != n:
        raise ValidationError("duplicate variable names")
    for r in pres.relations:
        if r.nvars != n:
            raise ValidationError("relation over the wrong number of variables")
        if r.constant_term():
            raise NotLocal(f"relation {r.format(pres.var_names)} has a nonzero constant term")
    gens = list(pres.relations) + [Poly.monomial(F, n, m) for m in monomials_of_degree(n, d)]
    if n == 0:
        G = []
        basis = [()]
    else:
        G = buchberger(gens, pres.order)
        basis = quotient_monomial_basis(G, pres.order, n)
    if not basis or any(basis[0]):
        raise NotZeroDimensional("quotient is zero or lost its unit")
    if len(basis) > max_dim:
        raise CapExceeded(f"algebra dimension {len(basis)} exceeds cap {max_dim}")
    index = {m: i for i, m in enumerate(basis)}
    D = len(basis)

    def coords(p: Poly) -> np.ndarray:
        v = F.zeros(D)
        for m, c in normal_form(p, G, pres.order).terms.items():
            v[index[m]] = c
        return v

    var_mats = []
    variables = []
    for v in range(n):
        xv = Poly.variable(F, n, v)
        X = F.zeros((D, D))
        for j, m in enumerate(basis):
            X[:, j] = coords(xv.mul_term(m, 1))
        var_mats.append(X)
        variables.append(coords(xv))
    return LocalAlgebra(F, pres.var_names, basis, var_mats, variables, pres.order,
                        presentation=pres, groebner=G, name=name)


class LocalAlgebra:
    """A finite-dimensional local k-algebra with a monomial basis."""

    def __init__(self, F: Field, var_names, basis, var_mats, variables, order=None,
                 presentation: AlgebraPresentation | None = None, groebner=None, name=None):
        self.F = F
        self.var_names = list(var_names)
        self.basis = [tuple(m) for m in basis]
        self.dim = len(self.basis)
        self.var_mats = list(var_mats)
        self.variables = list(variables)
        self.order = order or MonomialOrder()
        self.presentation = presentation
        self.groebner = groebner
        self.name = name
        self._mult = None
        self._nilpotency = None
        self._edim = None
        self._maximal = None

    def __repr__(self):
        label = self.name or "A"
        return f"<LocalAlgebra {label} over {self.F}: dim {self.dim}, vars {self.var_names}>"

    @property
    def nvars(self) -> int:
        return len(self.var_names)

    # -- structure constants -------------------------------------------------

    @property
    def mult(self) -> np.ndarray:
        """``mult[i]`` is the matrix of multiplication by ``basis[i]``."""
        if self._mult is None:
            F, D = self.F, self.dim
            memo = {(0,) * self.nvars: F.eye(D)}

            def power_mat(m):
                if m in memo:
                    return memo[m]
                v = next(k for k, e in enumerate(m) if e)
                rest = tuple(e - (k == v) for k, e in enumerate(m))
                memo[m] = F.matmul(self.var_mats[v], power_mat(rest))
                return memo[m]

            T = F.zeros((D, D, D))
            for i, m in enumerate(self.basis):
                T[i] = power_mat(m)
            self._mult = T
        return self._mult

    def mat(self, a) -> np.ndarray:
        """Matrix of multiplication by the element ``a``."""
        D = self.dim
        return self.F.matmul(np.asarray(a), self.mult.reshape(D, D * D)).reshape(D, D)

    def mul(self, a, b) -> np.ndarray:
        return self.F.matmul(self.mat(a), np.asarray(b))

    def power(self, a, e: int) -> np.ndarray:
        out = self.one()
        for _ in range(e):
            out = self.mul(out, a)
        return out

    def add(self, a, b):
        return self.F.reduce(np.asarray(a) + np.asarray(b))

    def sub(self, a, b):
        return self.F.reduce(np.asarray(a) - np.asarray(b))

    def scale(self, c, a):
        return self.F.reduce(self.F(c) * np.asarray(a))

    def one(self) -> np.ndarray:
        v = self.F.zeros(self.dim)
        v[0] = 1
        return v

    def zero(self) -> np.ndarray:
        return self.F.zeros(self.dim)

    def basis_element(self, i: int) -> np.ndarray:
        v = self.zero()
        v[i] = 1
        return v

    def is_zero(self, a) -> bool:
        return self.F.is_zero(a)

    def is_unit(self, a) -> bool:
        return bool(a[0])

    def in_maximal_ideal(self, a) -> bool:
        return not a[0]

    def inverse(self, a) -> np.ndarray:
        sol = la.solve(self.F, self.mat(a), self.one())
        if sol is None:
            raise ZeroDivisionError("element is not a unit")
        return sol

    def evaluate(self, p: Poly, images: Sequence[np.ndarray]) -> np.ndarray:
        """Value of ``p`` with variable ``i`` replaced by ``images[i]``."""
        if p.nvars != len(images):
            raise ValidationError("wrong number of images for polynomial evaluation")
        memo: dict = {}

        def mono(m):
            if m in memo:
                return memo[m]
            if not any(m):
                memo[m] = self.one()
            else:
                v = next(k for k, e in enumerate(m) if e)
                rest = tuple(e - (k == v) for k, e in enumerate(m))
                memo[m] = self.F.matmul(self.mat(images[v]), mono(rest))
            return memo[m]

        out = self.zero()
        for m, c in p.terms.items():
            out = self.F.reduce(out + c * mono(m))
        return out

    def element(self, spec) -> np.ndarray:
        """Coerce a polynomial string, Poly, scalar or coordinate vector."""
        if isinstance(spec, np.ndarray):
            if spec.shape != (self.dim,):
                raise AlgebraMismatch("coordinate vector of the wrong length")
            return self.F.reduce(spec.astype(self.F.dtype))
        if isinstance(spec, (list, tuple)):
            return self.element(self.F.array(list(spec)))
        if not isinstance(spec, Poly):
            spec = parse_poly(spec, self.F, self.var_names)
        return self.evaluate(spec, self.variables)

    def format(self, a) -> str:
        terms = [(self.basis[i], a[i]) for i in range(self.dim) if a[i]]
        terms.sort(key=lambda t: self.order.key(t[0]), reverse=True)
        return format_terms(self.F, terms, self.var_names)

    def random_element(self, rng, in_max: bool = False, min_degree: int = 0) -> np.ndarray:
        v = self.F.random_array(rng, (self.dim,))
        for i, m in enumerate(self.basis):
            if sum(m) < min_degree or (in_max and i == 0):
                v[i] = 0
        return v

    # -- ideals ---------------------------------------------------------------

    def ideal(self, gens) -> "Ideal":
        gens = [self.element(g) for g in gens]
        if not gens:
            return Ideal(self, self.F.zeros((0, self.dim)))
        rows = np.concatenate([self.mat(g).T for g in gens], axis=0)
        return Ideal(self, la.span(self.F, rows, self.dim))

    def maximal_ideal(self) -> "Ideal":
        if self._maximal is None:
            rows = self.F.zeros((self.dim - 1, self.dim))
            for i in range(1, self.dim):
                rows[i - 1, i] = 1
            self._maximal = Ideal(self, rows)
        return self._maximal

    def zero_ideal(self) -> "Ideal":
        return Ideal(self, self.F.zeros((0, self.dim)))

    def unit_ideal(self) -> "Ideal":
        return Ideal(self, self.F.eye(self.dim))

    def times_max(self, rows: np.ndarray) -> np.ndarray:
        """Canonical rows of ``m_A * span(rows)`` for an ideal-closed span."""
        if rows.shape[0] == 0 or not self.var_mats:
            return self.F.zeros((0, rows.shape[1] if rows.ndim == 2 else self.dim))
        parts = [self.F.matmul(rows, X.T) for X in self.var_mats]
        return la.span(self.F, np.concatenate(parts, axis=0), self.dim)

    def edim(self) -> int:
        if self._edim is None:
            m = self.maximal_ideal()
            self._edim = m.dim - (m * m).dim
        return self._edim

    def nilpotency(self) -> int:
        """Least ``N`` with ``m_A^N = 0``."""
        if self._nilpotency is None:
            rows = self.maximal_ideal().rows
            N = 1
            while rows.shape[0]:
                nxt = self.times_max(rows)
                if nxt.shape[0] == rows.shape[0]:
                    raise NotLocal("powers of the maximal ideal do not reach zero")
                rows = nxt
                N += 1
            self._nilpotency = N
        return self._nilpotency

    def quotient(self, I: "Ideal", name: str | None = None) -> tuple["LocalAlgebra", np.ndarray]:
        """``A/I`` for a proper ideal, with the projection matrix ``A -> A/I``."""
        if I.algebra is not self:
            raise AlgebraMismatch("ideal of another algebra")
        if not I.is_proper():
            raise NotLocal("quotient by the unit ideal")
        Q, keep = la.quotient_map(self.F, I.rows, self.dim)
        var_mats = [self.F.matmul(Q, X[:, keep]) for X in self.var_mats]
        variables = [self.F.matmul(Q, v) for v in self.variables]
        B = LocalAlgebra(self.F, self.var_names, [self.basis[k] for k in keep], var_mats,
                         variables, self.order, name=name)
        return B, Q

    def check_structure(self, max_exhaustive: int = 60, samples: int = 1000, rng=None) -> bool:
        """Associativity and commutativity of the structure constants.

        Exhaustive on basis pairs/triples up to ``max_exhaustive``, sampled above.
        """
        F = self.F
        for X in self.var_mats:
            for Y in self.var_mats:
                if not F.equal(F.matmul(X, Y), F.matmul(Y, X)):
                    return False
        if self.dim <= max_exhaustive:
            T = self.mult
            if not F.equal(T[:, :, 0].T, F.eye(self.dim)):
                return False
            # b_i b_j = b_j b_i  <=>  T[i][:, j] == T[j][:, i]
            if not F.equal(np.transpose(T, (2, 1, 0)), T):
                return False
            # (b_i b_j) b_k = b_i (b_j b_k)  <=>  mat(b_i b_j) == T[i] T[j]
            for i in range(self.dim):
                for j in range(i, self.dim):
                    if not F.equal(self.mat(T[i][:, j]), F.matmul(T[i], T[j])):
                        return False
            return True
        import random
        rng = rng or random.Random(0)
        for _ in range(samples):
            a, b, c = (self.random_element(rng) for _ in range(3))
            if not F.equal(self.mul(self.mul(a, b), c), self.mul(a, self.mul(b, c))):
                return False
            if not F.equal(self.mul(a, b), self.mul(b, a)):
                return False
        return True


class Ideal:
    """An ideal of a :class:`LocalAlgebra` as a canonical k-subspace."""

    def __init__(self, algebra: LocalAlgebra, rows: np.ndarray):
        self.algebra = algebra
        self.rows = rows
        self._mingens = None

    @property
    def dim(self) -> int:
        return self.rows.shape[0]

    def _same(self, other: "Ideal"):
        if other.algebra is not self.algebra:
            raise AlgebraMismatch("ideals of different algebras")

    def __eq__(self, other) -> bool:
        if not isinstance(other, Ideal):
            return NotImplemented
        self._same(other)
        return self.rows.shape == other.rows.shape and not np.any(self.rows != other.rows)

    def __hash__(self):
        return hash(self.rows.tobytes())

    def __repr__(self):
        gens = ", ".join(self.algebra.format(g) for g in self.minimal_generators())
        return f"<Ideal ({gens}) dim {self.dim}>"

    def contains(self, a) -> bool:
        return la.contains(self.algebra.F, self.rows, a)

    def issubset(self, other: "Ideal") -> bool:
        self._same(other)
        return la.is_subspace(self.algebra.F, self.rows, other.rows)

    __le__ = issubset

    def is_zero(self) -> bool:
        return self.dim == 0

    def is_proper(self) -> bool:
        return not self.contains(self.algebra.one())

    def __add__(self, other: "Ideal") -> "Ideal":
        self._same(other)
        return Ideal(self.algebra, la.add(self.algebra.F, self.rows, other.rows))

    def intersect(self, other: "Ideal") -> "Ideal":
        self._same(other)
        return Ideal(self.algebra, la.intersect(self.algebra.F, self.rows, other.rows))

    def __mul__(self, other: "Ideal") -> "Ideal":
        self._same(other)
        A = self.algebra
        if self.is_zero() or other.is_zero():
            return A.zero_ideal()
        if self is A.maximal_ideal() or other is A.maximal_ideal():
            target = other if self is A.maximal_ideal() else self
            return Ideal(A, A.times_max(target.rows))
        parts = [A.F.matmul(other.rows, A.mat(g).T) for g in self.minimal_generators()]
        return Ideal(A, la.span(A.F, np.concatenate(parts, axis=0), A.dim))

    def __pow__(self, n: int) -> "Ideal":
        out = self.algebra.unit_ideal()
        for _ in range(n):
            out = out * self
            if out.is_zero():
                break
        return out

    def colon(self, other: "Ideal") -> "Ideal":
        """``(self : other) = {a : a * other ⊆ self}``."""
        self._same(other)
        A = self.algebra
        out = A.unit_ideal().rows
        for g in other.minimal_generators():
            out = la.intersect(A.F, out, la.preimage(A.F, A.mat(g), self.rows))
        return Ideal(A, out)

    def minimal_generators(self) -> list[np.ndarray]:
        """Greedy lift of a basis of ``I / m_A I`` from the echelon rows."""
        if self._mingens is None:
            A = self.algebra
            S = A.times_max(self.rows) if self.dim else A.F.zeros((0, A.dim))
            gens = []
            for row in self.rows:
                if not la.contains(A.F, S, row):
                    gens.append(row.copy())
                    S = la.add(A.F, S, row.reshape(1, -1))
            self._mingens = gens
        return [g.copy() for g in self._mingens]

    def mu(self) -> int:
        return len(self.minimal_generators())

    def elements(self) -> list[np.ndarray]:
        return [r.copy() for r in self.rows]


IdealSpan = Ideal


def ideal_from(A: LocalAlgebra, gens) -> Ideal:
    return A.ideal(gens)


def edim(A: LocalAlgebra) -> int:
    return A.edim()


def minimal_generators(I: Ideal) -> list[np.ndarray]:
    return I.minimal_generators()


def colon_ideal(I: Ideal, J: Ideal) -> Ideal:
    return I.colon(J)


class AlgebraMorphism:
    """A local k-algebra map ``source -> target`` fixed by variable images.

    Construction verifies relation preservation and locality and caches the
    k-linear matrix of the map (``matrix[:, i]`` is the image of basis ``i``).
    """

    def __init__(self, source: LocalAlgebra, target: LocalAlgebra, images, name: str | None = None):
        if source.F != target.F:
            raise AlgebraMismatch("morphism between algebras over different fields")
        if len(images) != source.nvars:
            raise ValidationError(f"expected {source.nvars} variable images, got {len(images)}")
        self.source = source
        self.target = target
        self.images = [target.element(im) for im in images]
        self.name = name
        self.matrix = None
        check_local_morphism(self)

    def __call__(self, a) -> np.ndarray:
        return self.source.F.matmul(self.matrix, np.asarray(a))

    def __repr__(self):
        ims = ", ".join(f"{v}->{self.target.format(im)}" for v, im in zip(self.source.var_names, self.images))
        return f"<AlgebraMorphism {ims}>"

    def image_ideal(self, I: Ideal) -> Ideal:
        """The extended ideal ``I * target``."""
        return self.target.ideal([self(g) for g in I.minimal_generators()])

    @classmethod
    def identity(cls, A: LocalAlgebra) -> "AlgebraMorphism":
        return cls(A, A, [v.copy() for v in A.variables])


def check_local_morphism(phi: AlgebraMorphism) -> AlgebraMorphism:
    A, B, F = phi.source, phi.target, phi.source.F
    for v, im in zip(A.var_names, phi.images):
        if not B.in_maximal_ideal(im):
            raise NotLocal(f"image of {v} is a unit; morphism is not local")
    if A.presentation is not None:
        for rel in A.presentation.relations:
            if not B.is_zero(B.evaluate(rel, phi.images)):
                raise RelationViolated(f"relation {rel.format(A.var_names)} is not preserved", rel)
    cols = []
    memo = {(0,) * A.nvars: B.one()}

    def mono(m):
        if m not in memo:
            v = next(k for k, e in enumerate(m) if e)
            rest = tuple(e - (k == v) for k, e in enumerate(m))
            memo[m] = B.mul(phi.images[v], mono(rest))
        return memo[m]

    for m in A.basis:
        cols.append(mono(m))
    Mx = np.stack(cols, axis=1) if cols else F.zeros((B.dim, 0))
    # phi(x_v * b) == phi(x_v) * phi(b) for every variable and basis element
    for v, X in enumerate(A.var_mats):
        lhs = F.matmul(Mx, X)
        rhs = F.matmul(B.mat(phi.images[v]), Mx)
        if not F.equal(lhs, rhs):
            j = int(np.nonzero(np.any(F.reduce(lhs - rhs) != 0, axis=0))[0][0])
            from .poly import format_monomial
            mono_txt = format_monomial(A.basis[j], A.var_names) or "1"
            raise RelationViolated(
                f"images do not respect the relations of the source "
                f"(fails on {A.var_names[v]}*{mono_txt})",
                (A.var_names[v], A.basis[j]))
    phi.matrix = Mx
    return phi


def complete_intersection_data(B0: LocalAlgebra) -> dict:
    """Minimal presentation data: ``edim`` and the number of defining relations.

    ``B0`` is re-presented over ``e = edim`` variables sent to minimal
    generators of its maximal ideal; the defining ideal is the kernel of the
    evaluation map on polynomials truncated above degree ``N + 1``.
    """
    e = B0.edim()
    N = B0.nilpotency()
    gens = B0.maximal_ideal().minimal_generators()
    names = [f"y{i + 1}" for i in range(e)]
    T = build_algebra(AlgebraPresentation(B0.F, names, [], N + 2), max_dim=10**6, name="T")
    phi = AlgebraMorphism(T, B0, gens)
    J = Ideal(T, la.span(B0.F, la.kernel(B0.F, phi.matrix), T.dim))
    return {"edim": e, "nilpotency": N, "relations": J.mu(), "defining_ideal_dim": J.dim}


def is_complete_intersection(B0: LocalAlgebra) -> bool:
    d = complete_intersection_data(B0)
    return d["relations"] == d["edim"]
