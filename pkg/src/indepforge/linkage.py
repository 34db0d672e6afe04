"""Transition matrices ``x = uW``, their determinants, and the linkage checks.

:func:`verify_liaison` recomputes every colon, annihilator and Fitting
identity relating ``J_x``, ``J_u`` and ``Delta = det W`` on a concrete
instance and records a verdict (with a witness on failure) for each.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from itertools import combinations
from math import comb
from typing import Sequence

import numpy as np

from . import linalg as la
from .algebra import Ideal, LocalAlgebra
from .algmatrix import DEFAULT_MAX_DET, determinant
from .errors import CapExceeded, NotContained, PreconditionFailed, ValidationError
from .independence import is_independent
from .module import (FpModule, Submodule, algebra_as_module, annihilator_of_quotient,
                     annihilator_of_subquotient, colon_submodule, free_module)

MAX_FITTING_SUBSETS = 5000


@dataclass
class TransitionMatrix:
    A: LocalAlgebra
    xs: list[np.ndarray]
    us: list[np.ndarray]
    W: list[list[np.ndarray]]
    delta: np.ndarray

    @property
    def n(self) -> int:
        return len(self.xs)

    def check(self) -> bool:
        """``x_j = sum_i u_i W_ij`` for every ``j``."""
        A = self.A
        for j in range(self.n):
            acc = A.zero()
            for i in range(self.n):
                acc = A.add(acc, A.mul(self.us[i], self.W[i][j]))
            if not A.F.equal(acc, self.xs[j]):
                return False
        return True

    def comatrix_holds(self) -> bool:
        """``Delta * J_u ⊆ J_x``."""
        Jx = self.A.ideal(self.xs) if self.xs else self.A.zero_ideal()
        return all(Jx.contains(self.A.mul(self.delta, u)) for u in self.us)

    def format(self) -> list[list[str]]:
        return [[self.A.format(e) for e in row] for row in self.W]


def _transition_system(A: LocalAlgebra, us: Sequence[np.ndarray]) -> np.ndarray:
    return np.concatenate([A.mat(u) for u in us], axis=1) if us else A.F.zeros((A.dim, 0))


def solve_transition(A: LocalAlgebra, xs: Sequence, us: Sequence,
                     max_det: int = DEFAULT_MAX_DET) -> TransitionMatrix:
    """Echelon-first ``W`` with ``x = uW`` column by column, and ``Delta = det W``."""
    xs = [A.element(x) for x in xs]
    us = [A.element(u) for u in us]
    n = len(us)
    if len(xs) != n:
        raise ValidationError("x and u must have the same length")
    S = _transition_system(A, us)
    D = A.dim
    cols = []
    for j, x in enumerate(xs):
        sol = la.solve(A.F, S, x) if n else None
        if sol is None:
            raise NotContained(f"x_{j + 1} = {A.format(x)} is not in the ideal generated by u")
        cols.append([sol[i * D:(i + 1) * D] for i in range(n)])
    W = [[cols[j][i] for j in range(n)] for i in range(n)]
    T = TransitionMatrix(A, xs, us, W, determinant(A, W, max_det) if n else A.one())
    if not T.check():
        raise AssertionError("transition solve produced x != uW")
    return T


def alternative_transition(T: TransitionMatrix, rng, max_det: int = DEFAULT_MAX_DET) -> TransitionMatrix | None:
    """Another admissible ``W`` (adds a random syzygy of ``u`` to each column), or None."""
    A, n, D = T.A, T.n, T.A.dim
    K = la.kernel(A.F, _transition_system(A, T.us))
    if K.shape[0] == 0:
        return None
    cols = []
    for j in range(n):
        coeffs = A.F.random_array(rng, (K.shape[0],))
        delta = A.F.matmul(coeffs, K)
        cols.append([A.add(T.W[i][j], delta[i * D:(i + 1) * D]) for i in range(n)])
    W = [[cols[j][i] for j in range(n)] for i in range(n)]
    out = TransitionMatrix(A, T.xs, T.us, W, determinant(A, W, max_det))
    if not out.check():
        raise AssertionError("alternative W does not satisfy x = uW")
    return out


# -- Fitting ideal ---------------------------------------------------------

def fitting_ideal(A: LocalAlgebra, xs: Sequence, us: Sequence,
                  max_subsets: int = MAX_FITTING_SUBSETS) -> tuple[LocalAlgebra, Ideal, np.ndarray]:
    """``Fit_0`` of ``J_u/J_x`` over ``A/J_x`` from maximal minors of the syzygies of ``ū``.

    Returns the quotient algebra, the Fitting ideal and the projection ``A -> A/J_x``.
    """
    xs = [A.element(x) for x in xs]
    us = [A.element(u) for u in us]
    Jx = A.ideal(xs) if xs else A.zero_ideal()
    Ju = A.ideal(us) if us else A.zero_ideal()
    if not Jx.issubset(Ju):
        raise NotContained("J_x is not contained in J_u")
    Abar, Q = A.quotient(Jx)
    ubar = [A.F.matmul(Q, u) for u in us]
    n, Db = len(ubar), Abar.dim
    if n == 0:
        return Abar, Abar.unit_ideal(), Q
    Fr = free_module(Abar, n)
    pi = np.concatenate([Abar.mat(u) for u in ubar], axis=1)
    Ksub = Submodule(Fr, la.span(Abar.F, la.kernel(Abar.F, pi), Fr.dim))
    syz = Ksub.minimal_generators()
    g = len(syz)
    if g < n:
        return Abar, Abar.zero_ideal(), Q
    if comb(g, n) > max_subsets:
        raise CapExceeded(f"C({g}, {n}) column subsets exceed cap {max_subsets}")
    # relation matrix: row i, column c is the i-th component of syzygy c
    R = [[s[i * Db:(i + 1) * Db] for s in syz] for i in range(n)]
    dets = []
    for cols in combinations(range(g), n):
        sub = [[R[i][c] for c in cols] for i in range(n)]
        dets.append(determinant(Abar, sub, max_n=max(n, DEFAULT_MAX_DET)))
    return Abar, Abar.ideal(dets), Q


# -- liaison ---------------------------------------------------------------

@dataclass
class Check:
    name: str
    holds: bool
    detail: dict = field(default_factory=dict)


@dataclass
class LinkageReport:
    transition: TransitionMatrix
    checks: list[Check]
    part3_applicable: bool
    part4_applicable: bool
    part4_route: str | None

    @property
    def all_hold(self) -> bool:
        return all(c.holds for c in self.checks)

    def failures(self) -> list[Check]:
        return [c for c in self.checks if not c.holds]

    def by_name(self) -> dict[str, bool]:
        return {c.name: c.holds for c in self.checks}


def _compare_sub(name: str, L: Submodule, R: Submodule) -> Check:
    ok = L == R
    detail = {"lhs_dim": L.dim, "rhs_dim": R.dim}
    if not ok:
        M = L.module
        for row in L.rows:
            if not R.contains(row):
                detail["witness"] = M.format(row)
                detail["side"] = "lhs"
                break
        else:
            for row in R.rows:
                if not L.contains(row):
                    detail["witness"] = M.format(row)
                    detail["side"] = "rhs"
                    break
    return Check(name, ok, detail)


def _compare_ideal(name: str, L: Ideal, R: Ideal) -> Check:
    ok = L == R
    detail = {"lhs_dim": L.dim, "rhs_dim": R.dim}
    if not ok:
        A = L.algebra
        for row in L.rows:
            if not R.contains(row):
                detail["witness"] = A.format(row)
                detail["side"] = "lhs"
                break
        else:
            for row in R.rows:
                if not L.contains(row):
                    detail["witness"] = A.format(row)
                    detail["side"] = "rhs"
                    break
    return Check(name, ok, detail)


def verify_liaison(A: LocalAlgebra, M: FpModule, xs: Sequence, us: Sequence,
                   W: TransitionMatrix | None = None, max_det: int = DEFAULT_MAX_DET) -> LinkageReport:
    xs = [A.element(x) for x in xs]
    us = [A.element(u) for u in us]
    n = len(xs)
    if len(us) != n:
        raise ValidationError("x and u must have the same length")
    Jx = A.ideal(xs) if n else A.zero_ideal()
    Ju = A.ideal(us) if n else A.zero_ideal()
    if not Jx.issubset(Ju):
        raise PreconditionFailed("J_x is not contained in J_u")
    if not is_independent(xs, M).verdict:
        raise PreconditionFailed("x is not M-independent")
    T = W if W is not None else solve_transition(A, xs, us, max_det)
    if not T.check():
        raise PreconditionFailed("supplied W does not satisfy x = uW")
    delta = T.delta
    JxD = Jx + A.ideal([delta])
    checks = [Check("transition x = uW", True), Check("Delta J_u ⊆ J_x", T.comatrix_holds())]

    # (1)
    rep_u = is_independent(us, M)
    checks.append(Check("(1) u is M-independent", rep_u.verdict,
                        {"witness": [M.format(m) for m in rep_u.witness]} if rep_u.witness else {}))

    # (2)
    JxM, JuM, JxDM = M.ideal_times(Jx), M.ideal_times(Ju), M.ideal_times(JxD)
    checks.append(_compare_sub("(2) (J_xM : J_u) = (J_x + (Delta))M", colon_submodule(JxM, Ju), JxDM))
    checks.append(_compare_sub("(2) (J_xM : J_x + (Delta)) = J_uM", colon_submodule(JxM, JxD), JuM))
    checks.append(_compare_ideal("(2) Ann(J_uM/J_xM) = Ann(M/(J_x + (Delta))M)",
                                 annihilator_of_subquotient(JuM, JxM), annihilator_of_quotient(M, JxDM)))
    checks.append(_compare_ideal("(2) Ann((J_x + (Delta))M/J_xM) = Ann(M/J_uM)",
                                 annihilator_of_subquotient(JxDM, JxM), annihilator_of_quotient(M, JuM)))

    # (3)
    part3 = annihilator_of_quotient(M, JxM) == Jx
    if part3:
        AA = algebra_as_module(A)
        checks.append(Check("(3) x is A-independent", is_independent(xs, AA).verdict))
        checks.append(Check("(3) u is A-independent", is_independent(us, AA).verdict))
        checks.append(_compare_ideal("(3) (J_x : J_u) = J_x + (Delta)", Jx.colon(Ju), JxD))
        checks.append(_compare_ideal("(3) J_x + (Delta) = Ann(M/(J_x + (Delta))M)",
                                     JxD, annihilator_of_quotient(M, JxDM)))
        checks.append(_compare_ideal("(3) (J_x : J_x + (Delta)) = J_u", Jx.colon(JxD), Ju))
        checks.append(_compare_ideal("(3) J_u = Ann(M/J_uM)", Ju, annihilator_of_quotient(M, JuM)))
        Abar, fit, Q = fitting_ideal(A, xs, us)
        checks.append(_compare_ideal("(3) Fit(J_u/J_x) = (Delta bar)", fit, Abar.ideal([A.F.matmul(Q, delta)])))

    # (4): in a finite-dimensional local algebra a proper J_u lies in m_A,
    # which is nilpotent and the Jacobson radical, so cases (a) and (b) coincide.
    m = A.maximal_ideal()
    part4 = M.dim > 0 and Ju.issubset(m)
    route = None
    if part4:
        route = "J_u ⊆ m_A (nilpotent radical)"
        checks.append(Check("(4) Delta not in J_x", not Jx.contains(delta), {"delta": A.format(delta)}))
        checks.append(Check("(4) mu(J_u) = n", Ju.mu() == n, {"mu": Ju.mu(), "n": n}))
        checks.append(Check("(4) mu(J_x) = n", Jx.mu() == n, {"mu": Jx.mu(), "n": n}))
    elif M.dim > 0 and part3 and Ju.is_proper():
        route = "Ann(M/J_xM) = J_x and J_u proper"
        part4 = True
        checks.append(Check("(4) Delta not in J_x", not Jx.contains(delta), {"delta": A.format(delta)}))
        checks.append(Check("(4) mu(J_u) = n", Ju.mu() == n))
        checks.append(Check("(4) mu(J_x) = n", Jx.mu() == n))
    return LinkageReport(T, checks, part3, part4, route)


def search_part3_counterexample(instances) -> list[dict]:
    """Faithful ``M`` where the ideal equalities of part (3) fail (exploratory).

    ``instances`` yields ``(A, M, xs, us)``; nothing is asserted about the outcome.
    """
    found = []
    for A, M, xs, us in instances:
        if not annihilator_of_quotient(M, M.zero_submodule()).is_zero():
            continue
        try:
            T = solve_transition(A, xs, us)
        except (NotContained, CapExceeded):
            continue
        if not is_independent(xs, M).verdict:
            continue
        Jx, Ju = A.ideal(xs), A.ideal(us)
        JxD = Jx + A.ideal([T.delta])
        eq1 = Jx.colon(Ju) == JxD
        eq2 = Jx.colon(JxD) == Ju
        if not (eq1 and eq2):
            found.append({"xs": [A.format(x) for x in xs], "us": [A.format(u) for u in us],
                          "colon_equality": eq1, "reverse_colon_equality": eq2})
    return found
