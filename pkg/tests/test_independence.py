from __future__ import annotations

import itertools
import random

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from helpers import random_local_algebra, random_module
from indepforge import (algebra_as_module, census, free_module, is_independent, is_strongly_independent,
                        quotient_ideal_module, relation_submodule, restrict_scalars, ring)
from indepforge import linalg as la
from indepforge.independence import sequence_relation_submodule
from indepforge.module import quotient_module
from indepforge.testkit import instance_stream


def brute_annihilator(A, a):
    """All elements killing ``a``, by enumeration over a small prime field."""
    hits = [np.array(c) for c in itertools.product(range(A.F.p), repeat=A.dim)
            if A.is_zero(A.mul(np.array(c), a))]
    return la.span(A.F, np.array(hits), A.dim)


def test_relation_submodule_examples():
    A = ring("GF(2)", ["t"], [], 8)
    M = algebra_as_module(A)
    assert relation_submodule(A.zero_ideal(), M).is_zero()
    R = relation_submodule(A.ideal(["t^6"]), M)
    assert R == M.span([A.element("t^2")])
    assert np.array_equal(R.rows, brute_annihilator(A, A.element("t^6")))


def test_relation_submodule_independent_of_generators():
    rng = random.Random(4)
    for _ in range(20):
        A = random_local_algebra(rng, max_vars=3)
        M = random_module(rng, A)
        I = A.ideal([A.random_element(rng, in_max=True) for _ in range(2)])
        gens = I.minimal_generators()
        n = len(gens)
        # random change of generators: lower unitriangular over A, plus m_A I noise
        new = []
        for j in range(n):
            g = gens[j]
            for i in range(j):
                g = A.add(g, A.mul(A.random_element(rng), gens[i]))
            new.append(g)
        assert A.ideal(new) == I
        assert sequence_relation_submodule(new, M) == relation_submodule(I, M)


def test_is_independent_examples():
    A = ring("GF(2)", ["t"], [], 4)
    M = quotient_ideal_module(A, A.ideal(["t^2"]))
    t = A.element("t")
    assert is_independent([t], M).verdict
    # brute force: every m with t*m = 0 lies in tM
    tM = M.sequence_times([t])
    for c in itertools.product(range(2), repeat=M.dim):
        m = np.array(c)
        if not M.act(t, m).any():
            assert tM.contains(m)
    A8 = ring("GF(101)", ["t"], [], 8)
    M8 = algebra_as_module(A8)
    assert is_independent(["t^3"], M8).verdict
    rep = is_independent(["t^7"], M8)
    assert not rep.verdict and rep.witness_holds([A8.element("t^7")], M8)
    assert is_independent([], M8).verdict
    assert is_independent(["t"], quotient_ideal_module(A8, A8.unit_ideal())).verdict
    B = ring("GF(101)", ["x", "y", "z"], ["x^2 - y*z"], 3)
    assert is_independent(B.maximal_ideal().minimal_generators(), algebra_as_module(B)).verdict


def test_strong_independence_examples():
    A = ring("GF(101)", ["x"], [], 8)
    M = algebra_as_module(A)
    assert is_strongly_independent(A.ideal(["x^4"]), M).verdict
    rep = is_strongly_independent(A.ideal(["x^3"]), M)
    assert not rep.verdict and rep.failing_power == 2
    assert is_independent(["x^3"], M).verdict
    B = ring("GF(101)", ["x", "y"], ["x*y"], 4)
    assert is_strongly_independent(B.maximal_ideal(), free_module(B, 2)).verdict


@settings(max_examples=30, deadline=None)
@given(st.integers(0, 10**6))
def test_square_zero_ideal_strong_equals_plain(seed):
    rng = random.Random(seed)
    A = random_local_algebra(rng, max_vars=3)
    M = random_module(rng, A)
    N = A.nilpotency()
    I = A.ideal([A.random_element(rng, min_degree=(N + 1) // 2) for _ in range(2)])
    if I.is_zero() or not (I * I).is_zero():
        return
    plain = relation_submodule(I, M).issubset(M.ideal_times(I))
    assert is_strongly_independent(I, M).verdict == plain


def test_census_examples():
    A = ring("GF(2)", ["x", "y", "z"], [], 2)
    res = census(A, algebra_as_module(A), 3)
    assert res.max_independent == 3 == A.edim()
    zero = quotient_ideal_module(A, A.unit_ideal())
    assert census(A, zero, 4).max_independent == 4
    T = ring("GF(2)", ["t"], [], 8)
    res = census(T, algebra_as_module(T), 2)
    assert res.max_strong == 1
    (w,) = res.rows[0].strong_witness
    assert T.ideal([T.element(w)]) == T.ideal(["t^4"])
    g = census(T, algebra_as_module(T), 2, mode="greedy", seed=1)
    assert g.max_independent == 1


def test_free_module_relations_in_maximal_times():
    rng = random.Random(8)
    for _ in range(100):
        A = random_local_algebra(rng, max_vars=3)
        M = free_module(A, rng.randint(1, 2))
        I = A.ideal([A.random_element(rng, in_max=True) for _ in range(rng.randint(1, 3))])
        assert relation_submodule(I, M).issubset(M.max_times())


@settings(max_examples=40, deadline=None)
@given(st.integers(0, 10**6))
def test_independent_sequences_are_minimal(seed):
    rng = random.Random(seed)
    A = random_local_algebra(rng, max_vars=3)
    M = random_module(rng, A)
    xs = [A.random_element(rng, in_max=True) for _ in range(rng.randint(1, 3))]
    if M.dim and is_independent(xs, M).verdict:
        assert A.ideal(xs).mu() == len(xs)


@settings(max_examples=40, deadline=None)
@given(st.integers(0, 10**6))
def test_concatenation(seed):
    rng = random.Random(seed)
    A = random_local_algebra(rng, max_vars=3)
    M = random_module(rng, A)
    gens = A.maximal_ideal().minimal_generators()
    pool = gens + [A.random_element(rng, in_max=True)]
    xs = rng.sample(pool, rng.randint(1, 2))
    ys = rng.sample(pool, rng.randint(1, 2))
    whole = is_independent(xs + ys, M).verdict
    left = is_independent(xs, quotient_module(M, M.sequence_times(ys))).verdict
    right = is_independent(ys, quotient_module(M, M.sequence_times(xs))).verdict
    assert whole == (left and right)


def test_permanence_under_restriction():
    checked = 0
    for kind in ("balanced", "square-zero"):
        for seed, doc, inst in instance_stream(kind, range(40)):
            phi, M = inst.morphisms["phi"], inst.modules["M"]
            A = phi.source
            rng = random.Random(seed)
            MA = restrict_scalars(phi, M)
            for _ in range(3):
                xs = [A.random_element(rng, in_max=True) for _ in range(rng.randint(1, 2))]
                assert is_independent(xs, MA).verdict == is_independent([phi(x) for x in xs], M).verdict
                checked += 1
    assert checked == 240


def test_strong_permanence_for_free_extensions():
    for seed, doc, inst in instance_stream("flat-finite-morphism", range(15)):
        phi, M = inst.morphisms["phi"], inst.modules["M"]
        A = phi.source
        rng = random.Random(seed)
        MA = restrict_scalars(phi, M)
        I = A.ideal([A.random_element(rng, in_max=True)])
        if I.is_zero():
            continue
        assert is_strongly_independent(I, MA).verdict == \
            is_strongly_independent(phi.image_ideal(I), M).verdict
