from __future__ import annotations

import pytest

from indepforge import algebra_as_module, ring


@pytest.fixture
def trunc_line():
    """k[t]/(t^8) over GF(101)."""
    return ring("GF(101)", ["t"], [], 8)


@pytest.fixture
def quadric_pair():
    """A = k[x,y,z]/(x,y,z)^2, B = k[u,v]/(u,v)^4 and phi = (u^2, uv, v^2)."""
    from indepforge import AlgebraMorphism, check_local_morphism
    A = ring("GF(101)", ["x", "y", "z"], [], 2)
    B = ring("GF(101)", ["u", "v"], [], 4)
    phi = check_local_morphism(AlgebraMorphism(A, B, [B.element(s) for s in ("u^2", "u*v", "v^2")]))
    return A, B, phi


def module_of(A):
    return algebra_as_module(A)
