"""Freeness certificates for modules over finite local algebras.

Each certificate lists the hypotheses it checked and the conclusions it
draws.  Every conclusion is recomputed by an independent oracle (the
dimension test, the complete-intersection test, direct torsion ratios).
A disagreement means a theorem failed on a concrete instance and raises
:class:`TheoremFalsified`.
"""

from __future__ import annotations

import itertools
import random
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Sequence

import numpy as np

from . import linalg as la
from .algebra import AlgebraMorphism, Ideal, LocalAlgebra, is_complete_intersection
from .errors import (Disagreement, HypothesisFailed, NotMinimalGenerators, NotSquareZero,
                     PreconditionFailed, TheoremFalsified)
from .independence import is_independent, is_strongly_independent
from .module import (FpModule, algebra_as_module, base_change, freeness_oracle,
                     minimal_presentation, restrict_scalars, torsion_ratio)


@dataclass
class Item:
    name: str
    holds: bool
    detail: dict = field(default_factory=dict)

    def to_dict(self) -> dict:
        out = {"name": self.name, "holds": self.holds}
        if self.detail:
            out["detail"] = self.detail
        return out


@dataclass
class FreenessCertificate:
    route: str
    hypotheses: list[Item] = field(default_factory=list)
    conclusions: list[Item] = field(default_factory=list)
    witnesses: dict = field(default_factory=dict)
    free: bool | None = None
    experimental: bool = False

    def hypotheses_hold(self) -> bool:
        return all(h.holds for h in self.hypotheses)

    def to_dict(self) -> dict:
        return {"route": self.route, "free": self.free, "experimental": self.experimental,
                "hypotheses": [h.to_dict() for h in self.hypotheses],
                "conclusions": [c.to_dict() for c in self.conclusions],
                "witnesses": self.witnesses}


def _conclude(cert: FreenessCertificate, name: str, oracle_value: bool, detail=None) -> None:
    """Record a theorem-side conclusion; the oracle must confirm it."""
    item = Item(name, bool(oracle_value), dict(detail or {}))
    cert.conclusions.append(item)
    if not oracle_value:
        raise TheoremFalsified(f"[{cert.route}] conclusion '{name}' refuted by the oracle")


def _hypothesis(cert: FreenessCertificate, name: str, holds: bool, detail=None) -> bool:
    cert.hypotheses.append(Item(name, bool(holds), dict(detail or {})))
    return bool(holds)


def _fail(cert: FreenessCertificate, name: str):
    raise HypothesisFailed(f"[{cert.route}] hypothesis failed: {name}", cert)


def frac_str(q) -> str:
    q = Fraction(q)
    return str(q.numerator) if q.denominator == 1 else f"{q.numerator}/{q.denominator}"


# -- presentation decomposition -------------------------------------------

@dataclass
class PresentationDecomposition:
    rank: int
    relations: int
    D: list[list[np.ndarray]]          # r x t matrix of algebra elements
    parts: list[list[list[np.ndarray]]]  # D_i, each r x t
    residues: list[np.ndarray]          # residue matrices, each r x t over k
    xs: list[np.ndarray]

    def stacked(self, delta: int) -> np.ndarray:
        """``(D̄_1; ...; D̄_delta) : k^t -> k^{r delta}``."""
        if delta == 0:
            return self.residues[0][:0] if self.residues else np.zeros((0, self.relations), dtype=np.int64)
        return np.concatenate(self.residues[:delta], axis=0)


def check_minimal_generators(A: LocalAlgebra, xs: Sequence[np.ndarray]) -> None:
    m = A.maximal_ideal()
    if len(xs) != A.edim():
        raise NotMinimalGenerators(f"{len(xs)} elements given but edim is {A.edim()}")
    if any(not A.in_maximal_ideal(x) for x in xs):
        raise NotMinimalGenerators("a generator lies outside the maximal ideal")
    if xs and A.ideal(xs) != m:
        raise NotMinimalGenerators("the elements do not generate the maximal ideal")


def decompose_presentation(M: FpModule, xs: Sequence) -> PresentationDecomposition:
    """``D = sum x_i D_i`` entrywise, with the echelon-first coefficient choice."""
    A, F = M.A, M.F
    xs = [A.element(x) for x in xs]
    check_minimal_generators(A, xs)
    P = minimal_presentation(M)
    D = P.matrix()
    r, t = P.rank, len(P.kernel_generators())
    n, Dm = len(xs), A.dim
    S = np.concatenate([A.mat(x) for x in xs], axis=1) if xs else F.zeros((Dm, 0))
    parts = [[[A.zero() for _ in range(t)] for _ in range(r)] for _ in range(n)]
    residues = [F.zeros((r, t)) for _ in range(n)]
    for k in range(r):
        for c in range(t):
            e = D[k][c]
            if A.is_zero(e):
                continue
            sol = la.solve(F, S, e)
            if sol is None:
                raise AssertionError("presentation entry outside the maximal ideal")
            for i in range(n):
                parts[i][k][c] = sol[i * Dm:(i + 1) * Dm]
                residues[i][k, c] = sol[i * Dm]
    # reconstruction identity
    for k in range(r):
        for c in range(t):
            acc = A.zero()
            for i in range(n):
                acc = A.add(acc, A.mul(xs[i], parts[i][k][c]))
            if not F.equal(acc, D[k][c]):
                raise AssertionError("D != sum x_i D_i")
    return PresentationDecomposition(r, t, D, parts, residues, xs)


def check_generation_shift(M: FpModule, xs: Sequence, delta: int,
                           decomposition: PresentationDecomposition | None = None) -> bool:
    """``m_A M = (x_{delta+1}..x_n) M`` iff the stacked residue map is onto; both are computed."""
    A = M.A
    xs = [A.element(x) for x in xs]
    n = len(xs)
    if not 0 <= delta <= n:
        raise PreconditionFailed(f"delta={delta} outside 0..{n}")
    dec = decomposition or decompose_presentation(M, xs)
    direct = M.max_times() == M.sequence_times(xs[delta:])
    stacked = dec.stacked(delta)
    onto = la.rank(M.F, stacked) == dec.rank * delta if stacked.size else dec.rank * delta == 0
    if direct != onto:
        raise Disagreement(f"generation shift: module side {direct}, residue side {onto} (delta={delta})")
    return direct


# -- strong independence route ---------------------------------------------

def certify_max_independent(M: FpModule, I: Ideal, route: str = "max-indep-square") -> FreenessCertificate:
    """An M-independent ideal with ``mu(I) >= edim(A)``: CI quotient and freeness mod ``I^2``."""
    A = M.A
    cert = FreenessCertificate(route)
    if not _hypothesis(cert, "I ⊆ m_A", I.issubset(A.maximal_ideal())):
        _fail(cert, "I ⊆ m_A")
    if M.dim == 0:
        _hypothesis(cert, "M != 0", False)
        _fail(cert, "M != 0")
    muI, e = I.mu(), A.edim()
    if not _hypothesis(cert, "mu(I) >= edim(A)", muI >= e, {"mu": muI, "edim": e}):
        _fail(cert, "mu(I) >= edim(A)")
    rep = is_independent(I.minimal_generators(), M)
    if not _hypothesis(cert, "I is M-independent", rep.verdict):
        if rep.witness:
            cert.witnesses["relation"] = [M.format(m) for m in rep.witness]
        _fail(cert, "I is M-independent")
    cert.witnesses["generators"] = [A.format(g) for g in I.minimal_generators()]
    _conclude(cert, "mu(I) = edim(A)", muI == e, {"mu": muI, "edim": e})
    Abar, _ = A.quotient(I)
    _conclude(cert, "A/I is a complete intersection of dimension 0", is_complete_intersection(Abar))
    _, M2 = base_change(M, I * I)
    _conclude(cert, "M/I^2M is free over A/I^2", freeness_oracle(M2))
    return cert


def certify_strong_independence_freeness(M: FpModule, I: Ideal) -> FreenessCertificate:
    A = M.A
    if M.dim == 0:
        cert = FreenessCertificate("strong-indep")
        if not _hypothesis(cert, "I ⊆ m_A", I.issubset(A.maximal_ideal())):
            _fail(cert, "I ⊆ m_A")
        _conclude(cert, "M = 0 is free of rank 0", freeness_oracle(M))
        cert.free = True
        return cert
    cert = certify_max_independent(M, I, route="strong-indep")
    strong = is_strongly_independent(I, M)
    if not _hypothesis(cert, "I is strongly M-independent", strong.verdict,
                       {"failing_power": strong.failing_power} if not strong.verdict else {}):
        _fail(cert, "I is strongly M-independent")
    _conclude(cert, "M is free over A", freeness_oracle(M))
    cert.free = True
    return cert


# -- balanced route ----------------------------------------------------------

def _max_ideal_image(phi: AlgebraMorphism) -> Ideal:
    A, B = phi.source, phi.target
    gens = [phi(g) for g in A.maximal_ideal().minimal_generators()]
    return B.ideal(gens) if gens else B.zero_ideal()


def certify_balanced(phi: AlgebraMorphism, M: FpModule, delta: int, order: Sequence) -> FreenessCertificate:
    """The torsion-ratio criterion for ``t_A(M) <= delta <= edim(A) - edim(B)``."""
    A, B = phi.source, phi.target
    xs = [A.element(x) for x in order]
    cert = FreenessCertificate("balanced")
    check_minimal_generators(A, xs)
    n = len(xs)
    cert.witnesses["delta"] = delta
    cert.witnesses["order"] = [A.format(x) for x in xs]
    MA = restrict_scalars(phi, M)
    t = torsion_ratio(MA).value
    gap = A.edim() - B.edim()
    if not _hypothesis(cert, "t_A(M) <= delta", t <= delta, {"t_A(M)": frac_str(t), "delta": delta}):
        _fail(cert, "t_A(M) <= delta")
    if not _hypothesis(cert, "delta <= edim(A) - edim(B)", delta <= gap,
                       {"delta": delta, "edim(A)": A.edim(), "edim(B)": B.edim()}):
        _fail(cert, "delta <= edim(A) - edim(B)")
    if not 0 <= delta <= n:
        _hypothesis(cert, "0 <= delta <= n", False)
        _fail(cert, "0 <= delta <= n")
    shift = check_generation_shift(MA, xs, delta) if MA.dim else True
    if not _hypothesis(cert, "m_A M = (x_{delta+1}..x_n) M", shift):
        _fail(cert, "m_A M = (x_{delta+1}..x_n) M")
    _conclude(cert, "M is free over B", freeness_oracle(M))
    cert.free = True
    if M.dim == 0:
        return cert
    mAB = _max_ideal_image(phi)
    B0, _ = B.quotient(mAB)
    _conclude(cert, "B/m_A B is a complete intersection of dimension 0", is_complete_intersection(B0))
    tB = torsion_ratio(restrict_scalars(phi, algebra_as_module(B))).value
    chain = {"t_A(M)": frac_str(t), "delta": delta, "edim(A)-edim(B)": gap, "t_A(B)": frac_str(tB)}
    _conclude(cert, "t_A(M) = delta", t == delta, chain)
    _conclude(cert, "delta = edim(A) - edim(B)", delta == gap, chain)
    _conclude(cert, "edim(A) - edim(B) = t_A(B)", gap == tB, chain)
    _conclude(cert, "mu_B(m_A B) = n - delta", mAB.mu() == n - delta, {"mu": mAB.mu(), "n - delta": n - delta})
    _conclude(cert, "(x_{delta+1}..x_n) is M-independent", is_independent(xs[delta:], MA).verdict)
    cert.witnesses["equality_chain"] = chain
    return cert


def balanced_search(phi: AlgebraMorphism, M: FpModule, seed: int = 0, random_orders: int = 20,
                    max_orders: int = 5000) -> FreenessCertificate:
    """Try every delta with head subsets of the fixed minimal generators, then random systems.

    The first success in (delta, subset rank) order wins.  If nothing works the
    HypothesisFailed of the last attempt is re-raised with all attempts attached.
    """
    A, B = phi.source, phi.target
    gens = A.maximal_ideal().minimal_generators()
    n = len(gens)
    gap = A.edim() - B.edim()
    attempts = []
    tried = 0
    last = None
    systems = []
    for delta in range(0, max(gap, 0) + 1):
        for head in itertools.combinations(range(n), delta):
            order = [gens[i] for i in head] + [gens[i] for i in range(n) if i not in head]
            systems.append((delta, order))
    rng = random.Random(seed)
    for _ in range(random_orders):
        # a random invertible change of the fixed generators, kept unit-triangular mod m_A^2
        Pm = [[A.F.random_scalar(rng) if i != j else 1 for j in range(n)] for i in range(n)]
        order = []
        for j in range(n):
            acc = A.zero()
            for i in range(n):
                acc = A.add(acc, A.scale(Pm[i][j] if i <= j else 0, gens[i]))
            order.append(acc)
        for delta in range(0, max(gap, 0) + 1):
            systems.append((delta, order))
    for delta, order in systems:
        tried += 1
        if tried > max_orders:
            break
        try:
            cert = certify_balanced(phi, M, delta, order)
            cert.witnesses["search_attempts"] = tried
            return cert
        except HypothesisFailed as exc:
            last = exc
            attempts.append({"delta": delta, "order": [A.format(x) for x in order], "reason": str(exc)})
    cert = last.certificate if last is not None else FreenessCertificate("balanced")
    cert.witnesses["attempts"] = attempts[:50]
    raise HypothesisFailed("no (delta, generator order) satisfies the balanced hypotheses", cert)


# -- special fibre route -----------------------------------------------------

def certify_special_fiber(phi: AlgebraMorphism, M: FpModule, variant: str = "square-zero",
                          delta: int | None = None, order: Sequence | None = None) -> FreenessCertificate:
    """``t_A(M) <= t_A(B)`` and ``M/m_A M`` free over ``B/m_A B`` give freeness when ``m_A^2 = 0``.

    ``variant="kernel-intersection"`` replaces ``m_A^2 = 0`` by the trivial
    intersection of the kernels of the first ``delta`` residue matrices; it is
    experimental and a mismatch with the oracle is recorded, not raised.
    """
    A, B = phi.source, phi.target
    cert = FreenessCertificate("special-fiber")
    m = A.maximal_ideal()
    MA = restrict_scalars(phi, M)
    if variant == "square-zero":
        if not (m * m).is_zero():
            raise NotSquareZero("the special-fibre criterion needs m_A^2 = 0")
        _hypothesis(cert, "m_A^2 = 0", True)
    elif variant == "kernel-intersection":
        cert.experimental = True
        if delta is None or order is None:
            raise PreconditionFailed("kernel-intersection variant needs delta and order")
        dec = decompose_presentation(MA, order)
        stacked = dec.stacked(delta)
        trivial = la.kernel(A.F, stacked).shape[0] == 0 if stacked.shape[0] else dec.relations == 0
        if not _hypothesis(cert, "intersection of Ker D̄_i (i <= delta) is 0", trivial):
            _fail(cert, "intersection of Ker D̄_i (i <= delta) is 0")
    else:
        raise PreconditionFailed(f"unknown special-fibre variant {variant!r}")
    tM = torsion_ratio(MA).value
    tB = torsion_ratio(restrict_scalars(phi, algebra_as_module(B))).value
    if not _hypothesis(cert, "t_A(M) <= t_A(B)", tM <= tB, {"t_A(M)": frac_str(tM), "t_A(B)": frac_str(tB)}):
        _fail(cert, "t_A(M) <= t_A(B)")
    mAB = _max_ideal_image(phi)
    _, M0 = base_change(M, mAB)
    if not _hypothesis(cert, "M/m_A M is free over B/m_A B", freeness_oracle(M0)):
        _fail(cert, "M/m_A M is free over B/m_A B")
    verdict = freeness_oracle(M)
    if cert.experimental:
        cert.conclusions.append(Item("M is free over B", verdict, {"oracle_agrees": verdict}))
        cert.free = verdict
        return cert
    _conclude(cert, "M is free over B", verdict)
    cert.free = True
    return cert


# -- flat route -----------------------------------------------------------------

def certify_desmit(phi: AlgebraMorphism, M: FpModule) -> FreenessCertificate:
    A, B = phi.source, phi.target
    cert = FreenessCertificate("desmit")
    BA = restrict_scalars(phi, algebra_as_module(B))
    if not _hypothesis(cert, "B is free over A", freeness_oracle(BA), {"rank": BA.mu()}):
        _fail(cert, "B is free over A")
    if not _hypothesis(cert, "edim(A) >= edim(B)", A.edim() >= B.edim(),
                       {"edim(A)": A.edim(), "edim(B)": B.edim()}):
        _fail(cert, "edim(A) >= edim(B)")
    MA = restrict_scalars(phi, M)
    if not _hypothesis(cert, "M is free over A", freeness_oracle(MA)):
        _fail(cert, "M is free over A")
    xs = A.maximal_ideal().minimal_generators()
    cert.witnesses["sequence"] = [A.format(x) for x in xs]
    # proof pipeline, each step checked
    s1 = is_strongly_independent(A.maximal_ideal(), MA).verdict
    _conclude(cert, "m_A is strongly M-independent over A", s1)
    mAB = _max_ideal_image(phi)
    _conclude(cert, "phi(x) is a minimal generating set of m_A B", mAB.mu() == len(xs),
              {"mu": mAB.mu(), "n": len(xs)})
    s2 = is_strongly_independent(mAB, M).verdict if M.dim else True
    _conclude(cert, "phi(x) is strongly M-independent over B", s2)
    cert.witnesses["image_sequence"] = [B.format(phi(x)) for x in xs]
    if M.dim:
        inner = certify_strong_independence_freeness(M, mAB)
        cert.witnesses["inner_certificate"] = inner.to_dict()
    _conclude(cert, "M is free over B", freeness_oracle(M))
    _conclude(cert, "edim(A) = edim(B)", A.edim() == B.edim() or M.dim == 0,
              {"edim(A)": A.edim(), "edim(B)": B.edim()})
    cert.free = True
    return cert


# -- inequalities ---------------------------------------------------------------

def lower_bound_check(phi: AlgebraMorphism, M: FpModule) -> dict:
    """``t_A(M) >= edim(A) - mu_B(m_A B)``, plus the edim form when ``B/m_A B`` is CI."""
    A, B = phi.source, phi.target
    if M.dim == 0:
        raise PreconditionFailed("the lower bound needs M != 0")
    t = torsion_ratio(restrict_scalars(phi, M)).value
    mAB = _max_ideal_image(phi)
    bound = A.edim() - mAB.mu()
    if t < bound:
        raise TheoremFalsified(f"t_A(M) = {frac_str(t)} < edim(A) - mu_B(m_A B) = {bound}")
    B0, _ = B.quotient(mAB)
    ci = is_complete_intersection(B0)
    out = {"t_A(M)": frac_str(t), "edim(A)": A.edim(), "mu_B(m_A B)": mAB.mu(), "bound": bound,
           "holds": True, "fiber_complete_intersection": ci}
    if ci:
        b2 = A.edim() - B.edim()
        if t < b2:
            raise TheoremFalsified(f"t_A(M) = {frac_str(t)} < edim(A) - edim(B) = {b2} with CI fibre")
        out["edim_bound"] = b2
    return out
