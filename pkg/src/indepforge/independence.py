"""Relation submodules, M-independence, strong M-independence and the census search."""

from __future__ import annotations

import random
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from . import linalg as la
from .algebra import Ideal, LocalAlgebra
from .errors import CapExceeded, NotInMaximalIdeal, ValidationError
from .module import FpModule, Submodule


@dataclass
class IndependenceReport:
    verdict: bool
    relations: Submodule
    image: Submodule  # I M, or J_x M for a sequence
    witness: list[np.ndarray] | None = None
    failing_power: int | None = None
    checked_powers: list[int] = field(default_factory=list)

    def witness_holds(self, xs, M: FpModule) -> bool:
        """The witness satisfies ``sum x_i m_i = 0`` with some ``m_i`` outside the image."""
        if self.witness is None:
            return True
        F = M.F
        tot = M.zero()
        for x, m in zip(xs, self.witness):
            tot = F.reduce(tot + M.act(x, m))
        return F.is_zero(tot) and any(not self.image.contains(m) for m in self.witness)


def relation_kernel(xs: Sequence[np.ndarray], M: FpModule) -> np.ndarray:
    """Rows spanning ``{(m_i) in M^n : sum x_i m_i = 0}``."""
    if not xs:
        return M.F.zeros((0, 0))
    big = np.concatenate([M.act_mat(x) for x in xs], axis=1)
    return la.kernel(M.F, big)


def _projections(K: np.ndarray, n: int, d: int) -> np.ndarray:
    return np.concatenate([K[:, i * d:(i + 1) * d] for i in range(n)], axis=0)


def relation_submodule(I: Ideal, M: FpModule) -> Submodule:
    """``R_I(M)``: all coordinates of relations on the minimal generators of ``I``."""
    if I.algebra is not M.A:
        raise ValidationError("ideal and module over different algebras")
    xs = I.minimal_generators()
    return sequence_relation_submodule(xs, M)


def sequence_relation_submodule(xs: Sequence[np.ndarray], M: FpModule) -> Submodule:
    n, d = len(xs), M.dim
    if n == 0 or d == 0:
        return M.zero_submodule()
    K = relation_kernel(xs, M)
    if K.shape[0] == 0:
        return M.zero_submodule()
    return Submodule(M, la.span(M.F, _projections(K, n, d), d))


def is_independent(xs: Sequence, M: FpModule) -> IndependenceReport:
    """The sequence as given: every relation ``sum x_i m_i = 0`` has all ``m_i`` in ``J_x M``."""
    A = M.A
    xs = [A.element(x) for x in xs]
    n, d = len(xs), M.dim
    JM = M.sequence_times(xs)
    if n == 0 or d == 0:
        return IndependenceReport(True, M.zero_submodule(), JM)
    K = relation_kernel(xs, M)
    R = Submodule(M, la.span(M.F, _projections(K, n, d), d)) if K.shape[0] else M.zero_submodule()
    for row in K:
        comps = [row[i * d:(i + 1) * d] for i in range(n)]
        if any(not JM.contains(c) for c in comps):
            return IndependenceReport(False, R, JM, witness=comps)
    return IndependenceReport(True, R, JM)


def is_strongly_independent(I: Ideal, M: FpModule) -> IndependenceReport:
    """``R_{I^i}(M) ⊆ I M`` for ``i = 1, 2, ...`` until ``I^i = 0``."""
    A = M.A
    if I.algebra is not A:
        raise ValidationError("ideal and module over different algebras")
    if not I.issubset(A.maximal_ideal()):
        raise NotInMaximalIdeal("strong independence needs I inside the maximal ideal")
    IM = M.ideal_times(I)
    P = I
    i = 1
    checked = []
    first_R = None
    while not P.is_zero():
        R = relation_submodule(P, M)
        if first_R is None:
            first_R = R
        checked.append(i)
        if not R.issubset(IM):
            wit = _witness_outside(P.minimal_generators(), M, IM)
            return IndependenceReport(False, R, IM, witness=wit, failing_power=i, checked_powers=checked)
        P = P * I
        i += 1
    return IndependenceReport(True, first_R if first_R is not None else M.zero_submodule(), IM,
                              checked_powers=checked)


def _witness_outside(xs, M: FpModule, target: Submodule):
    n, d = len(xs), M.dim
    for row in relation_kernel(xs, M):
        comps = [row[i * d:(i + 1) * d] for i in range(n)]
        if any(not target.contains(c) for c in comps):
            return comps
    return None


def is_ideal_independent(I: Ideal, M: FpModule) -> bool:
    """Independence of a minimal generating set of ``I`` (``R_I(M) ⊆ I M``)."""
    return relation_submodule(I, M).issubset(M.ideal_times(I))


# -- census ----------------------------------------------------------------

@dataclass
class CensusRow:
    length: int
    ideals: int
    independent: int
    strongly_independent: int
    witness: list | None
    strong_witness: list | None
    h1_range: tuple[int, int] | None


@dataclass
class CensusResult:
    mode: str
    max_independent: int
    max_strong: int
    rows: list[CensusRow]
    exhaustive: bool


def _candidates(A: LocalAlgebra, max_candidates: int) -> list[np.ndarray]:
    F = A.F
    if F.p is None:
        raise ValidationError("exhaustive census needs a finite field")
    m = A.dim - 1
    if F.p ** m - 1 > max_candidates:
        raise CapExceeded(f"{F.p}^{m} candidate elements exceed cap {max_candidates}")
    out = []
    for k in range(1, F.p ** m):
        v = A.zero()
        c = k
        for pos in range(1, A.dim):
            v[pos] = c % F.p
            c //= F.p
        out.append(v)
    return out


def census(A: LocalAlgebra, M: FpModule, length_bound: int, mode: str = "exhaustive",
           seed: int = 0, max_ideals: int = 20000, max_candidates: int = 5000,
           greedy_restarts: int = 20, greedy_tries: int = 60) -> CensusResult:
    """Longest M-independent (and strongly independent) sequences found.

    Exhaustive mode walks every ideal with ``mu = length`` generated by
    prime-subfield elements of ``m_A``; greedy mode extends random sequences.
    Data only: nothing here is asserted about the open questions.
    """
    from .koszul import build_koszul

    if M.dim == 0:
        return CensusResult(mode, length_bound, length_bound, [], mode == "exhaustive")
    if mode == "greedy":
        return _greedy(A, M, length_bound, seed, greedy_restarts, greedy_tries)
    if mode != "exhaustive":
        raise ValidationError(f"unknown census mode {mode!r}")
    if A.dim > 12:
        raise CapExceeded("exhaustive census is limited to algebras of dimension at most 12")
    cands = _candidates(A, max_candidates)
    level: dict[bytes, tuple[Ideal, list]] = {b"": (A.zero_ideal(), [])}
    rows = []
    best = best_strong = 0
    for length in range(1, length_bound + 1):
        nxt: dict[bytes, tuple[Ideal, list]] = {}
        for I, seq in level.values():
            for c in cands:
                if I.contains(c):
                    continue
                J = I + A.ideal([c])
                if J.mu() != length:
                    continue
                key = J.rows.tobytes()
                if key not in nxt:
                    nxt[key] = (J, seq + [c])
                    if len(nxt) > max_ideals:
                        raise CapExceeded(f"more than {max_ideals} ideals at length {length}")
        if not nxt:
            break
        n_ind = n_strong = 0
        wit = swit = None
        h1 = []
        for key in sorted(nxt):
            J, seq = nxt[key]
            if not is_independent(seq, M).verdict:
                continue
            n_ind += 1
            wit = wit or [A.format(s) for s in seq]
            KM = build_koszul(A, seq).with_coefficients(M)
            h1.append(KM.homology_dims()[1])
            if is_strongly_independent(J, M).verdict:
                n_strong += 1
                swit = swit or [A.format(s) for s in seq]
        rows.append(CensusRow(length, len(nxt), n_ind, n_strong, wit, swit,
                              (min(h1), max(h1)) if h1 else None))
        if n_ind:
            best = length
        if n_strong:
            best_strong = length
        level = nxt
    return CensusResult("exhaustive", best, best_strong, rows, True)


def _greedy(A, M, length_bound, seed, restarts, tries) -> CensusResult:
    rng = random.Random(seed)
    best: list = []
    best_strong: list = []
    for _ in range(restarts):
        seq: list = []
        for _ in range(tries):
            if len(seq) >= length_bound:
                break
            c = A.random_element(rng, in_max=True)
            if A.is_zero(c):
                continue
            trial = seq + [c]
            if A.ideal(trial).mu() != len(trial):
                continue
            # independence is not inherited by prefixes, so keep extending regardless
            seq = trial
            if len(seq) > len(best) and is_independent(seq, M).verdict:
                best = list(seq)
                if is_strongly_independent(A.ideal(seq), M).verdict:
                    best_strong = list(seq)
            elif len(seq) > len(best_strong) and is_independent(seq, M).verdict \
                    and is_strongly_independent(A.ideal(seq), M).verdict:
                best_strong = list(seq)
    rows = [CensusRow(len(best), 0, 1 if best else 0, 1 if best_strong else 0,
                      [A.format(s) for s in best] or None,
                      [A.format(s) for s in best_strong] or None, None)]
    return CensusResult("greedy", len(best), len(best_strong), rows, False)
