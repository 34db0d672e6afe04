"""Random objects shared by the property tests."""

from __future__ import annotations

import random

from indepforge import module_from_cokernel, ring


def random_local_algebra(rng: random.Random, field="GF(101)", max_vars=2, max_trunc=4, square_zero=False):
    n = rng.randint(1, max_vars)
    names = ["x", "y", "z"][:n]
    t = 2 if square_zero else rng.randint(2, max_trunc)
    rels = []
    if not square_zero and n > 1 and rng.random() < 0.5:
        rels.append(f"{names[0]}*{names[1]} - {rng.randint(0, 4)}*{names[1]}^2")
    return ring(field, names, rels, t)


def random_module(rng: random.Random, A, max_rank=2, max_cols=3, in_max=True):
    r = rng.randint(1, max_rank)
    cols = [[A.random_element(rng, in_max=in_max) for _ in range(r)] for _ in range(rng.randint(0, max_cols))]
    return module_from_cokernel(A, r, cols)


def random_submodule_elements(rng: random.Random, N, count=2):
    F = N.module.F
    out = []
    for _ in range(count):
        v = N.module.zero()
        for row in N.rows:
            v = F.reduce(v + F.random_scalar(rng) * row)
        out.append(v)
    return out
