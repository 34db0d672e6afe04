from __future__ import annotations

import itertools
import random

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from indepforge import (AlgebraMorphism, AlgebraPresentation, build_algebra, check_local_morphism,
                        complete_intersection_data, is_complete_intersection, ring)
from indepforge import linalg as la
from indepforge.errors import CapExceeded, NotLocal, RelationViolated, ValidationError
from indepforge.testkit import GeneratorConfig, instance_stream


@pytest.mark.parametrize("vars_, trunc, dim, edim, nil", [
    (["x"], 8, 8, 1, 8),
    (["x", "y", "z"], 2, 4, 3, 2),
    ([], 1, 1, 0, 1),
])
def test_basic_invariants(vars_, trunc, dim, edim, nil):
    A = ring("GF(101)", vars_, [], trunc)
    assert (A.dim, A.edim(), A.nilpotency()) == (dim, edim, nil)
    assert A.check_structure()


@pytest.mark.parametrize("vars_, trunc, expected", [(["x", "y"], 3, 2), (["u", "v"], 4, 2), ([], 1, 0)])
def test_edim(vars_, trunc, expected):
    assert ring("GF(101)", vars_, [], trunc).edim() == expected


def test_relations_reduce_dimension():
    A = ring("GF(101)", ["x", "y"], ["x^2 - y^3", "x*y"], 6)
    # basis 1, x, y, y^2, y^3 (x^2 = y^3, y^4 = x^2 y = 0)
    assert A.dim == 5 and A.edim() == 2 and A.nilpotency() == 4
    assert A.check_structure()


def test_caps_and_validation():
    with pytest.raises(CapExceeded):
        ring("GF(101)", ["x", "y", "z"], [], 10, max_dim=50)
    with pytest.raises(ValidationError):
        ring("GF(101)", ["x", "x"], [], 3)
    with pytest.raises(NotLocal):
        ring("GF(101)", ["x"], ["x - 1"], 3)


def test_minimal_generators():
    A = ring("GF(101)", ["x", "y"], [], 3)
    gens = A.maximal_ideal().minimal_generators()
    assert len(gens) == 2
    assert A.ideal(gens) == A.maximal_ideal()
    T = ring("GF(101)", ["t"], [], 8)
    assert T.ideal(["t^3"]).mu() == 1
    assert T.ideal(["t^3", "t^4 + t^5"]).mu() == 1


def test_mu_against_generation_brute_force():
    A = ring("GF(5)", ["x", "y", "z"], [], 3)
    rng = random.Random(3)
    F = A.F
    mI = A.maximal_ideal()
    I = A.ideal(["y*x + z^2", "z", "x*x"]) * mI + A.ideal(["y + x^2"])
    mu = I.mu()
    gens = I.minimal_generators()
    mIrows = A.times_max(I.rows)
    for _ in range(100):
        # mu random lifts of a basis of I/mI generate I
        lifted = [F.reduce(g + sum((F.random_scalar(rng) * r for r in mIrows), F.zeros(A.dim)))
                  for g in gens]
        assert A.ideal(lifted) == I
        # mu - 1 random elements of I never do
        few = [sum((F.random_scalar(rng) * r for r in I.rows), F.zeros(A.dim)) for _ in range(mu - 1)]
        assert A.ideal([F.reduce(f) for f in few]) != I


def _brute_colon(A, I, J):
    out = []
    for coords in itertools.product(range(A.F.p), repeat=A.dim):
        a = A.F.array(list(coords))
        if all(I.contains(A.mul(a, g)) for g in J.rows):
            out.append(a)
    return la.span(A.F, np.array(out), A.dim)


def test_colon_against_brute_force():
    A = ring("GF(2)", ["t"], [], 8)
    I, J = A.ideal(["t^3"]), A.ideal(["t"])
    C = I.colon(J)
    assert C == A.ideal(["t^2"])
    assert np.array_equal(C.rows, _brute_colon(A, I, J))
    assert I.colon(A.unit_ideal()) == I
    m = A.maximal_ideal()
    assert (m ** A.nilpotency()).is_zero()
    assert not (m ** (A.nilpotency() - 1)).is_zero()


def test_complete_intersection():
    assert not is_complete_intersection(ring("GF(101)", ["u", "v"], [], 4))
    assert complete_intersection_data(ring("GF(101)", ["u", "v"], [], 4))["relations"] == 5
    assert is_complete_intersection(ring("GF(101)", ["u"], [], 2))
    assert is_complete_intersection(ring("GF(101)", ["x", "y"], ["x^2", "y^3"], 6))
    assert is_complete_intersection(ring("GF(101)", [], [], 1))


def test_morphisms(quadric_pair):
    A, B, phi = quadric_pair
    assert phi.matrix.shape == (B.dim, A.dim)
    ident = AlgebraMorphism.identity(B)
    assert np.array_equal(ident.matrix, B.F.eye(B.dim))
    with pytest.raises(NotLocal):
        AlgebraMorphism(A, B, ["1", "u", "v"])
    with pytest.raises(RelationViolated):
        # x -> u is not compatible with x^2 = 0 in A
        AlgebraMorphism(A, B, ["u", "u*v", "v^2"])


def test_quotient_algebra():
    A = ring("GF(101)", ["t"], [], 8)
    Q, proj = A.quotient(A.ideal(["t^3"]))
    assert Q.dim == 3 and Q.nilpotency() == 3 and Q.check_structure()
    with pytest.raises(NotLocal):
        A.quotient(A.unit_ideal())


@settings(max_examples=30, deadline=None)
@given(st.integers(0, 10**6))
def test_random_algebra_properties(seed):
    _, _, inst = next(instance_stream("random-algebra", [seed]))
    A = inst.rings["A"]
    assert A.check_structure()
    rng = random.Random(seed)
    gens = [A.random_element(rng, in_max=True) for _ in range(3)]
    shuffled = gens[::-1]
    assert np.array_equal(A.ideal(gens).rows, A.ideal(shuffled).rows)
    I = A.ideal(gens[:2])
    J = A.ideal(gens[2:])
    C = I.colon(J)
    assert I.issubset(C)
    assert (C * J).issubset(I)
    N = A.nilpotency()
    m = A.maximal_ideal()
    assert (m ** N).is_zero()
    assert N == 1 or not (m ** (N - 1)).is_zero()
