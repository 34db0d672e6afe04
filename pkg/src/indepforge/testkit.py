"""Seeded random instance generators.

Every generator takes a :class:`GeneratorConfig` and returns an instance
document; the same seed always yields the same document.  Kinds with a
construction guarantee (independent pairs, flat finite morphisms) build
the guarantee in rather than filtering for it.
"""

from __future__ import annotations

import random
from dataclasses import dataclass, replace
from math import comb

from .algebra import AlgebraPresentation, build_algebra
from .errors import CapExceeded, NotLocal
from .instance import SCHEMA_VERSION, Instance, parse_instance

KINDS = ("random-algebra", "random-module", "independent-pair", "flat-finite-morphism",
         "square-zero", "balanced", "liaison")
VAR_NAMES = ("x", "y", "z", "w")


@dataclass(frozen=True)
class GeneratorConfig:
    seed: int = 0
    field: str = "GF(101)"
    max_dim: int = 40
    min_vars: int = 1
    max_vars: int = 3
    min_truncation: int = 2
    max_truncation: int = 5
    max_extra_relations: int = 2
    max_rank: int = 2
    max_columns: int = 3
    max_tries: int = 50


def _monomial(names, exps) -> str:
    parts = [n if e == 1 else f"{n}^{e}" for n, e in zip(names, exps) if e]
    return "*".join(parts) if parts else "1"


def _exponents(n: int, deg: int):
    if n == 1:
        yield (deg,)
        return
    for a in range(deg, -1, -1):
        for rest in _exponents(n - 1, deg - a):
            yield (a,) + rest


def random_poly(rng: random.Random, names, min_deg: int, max_deg: int, terms: int = 2,
                coeff: int = 5) -> str:
    """A polynomial string with ``terms`` distinct monomials of degree in ``[min_deg, max_deg]``."""
    monos = [e for d in range(min_deg, max_deg + 1) for e in _exponents(len(names), d)]
    if not monos:
        return "0"
    chosen = rng.sample(monos, min(terms, len(monos)))
    out = ""
    for e in chosen:
        c = rng.choice([c for c in range(-coeff, coeff + 1) if c])
        mono = _monomial(names, e)
        body = str(abs(c)) if mono == "1" else (mono if abs(c) == 1 else f"{abs(c)}*{mono}")
        if not out:
            out = ("-" if c < 0 else "") + body
        else:
            out += (" - " if c < 0 else " + ") + body
    return out


def _dim_bound(n: int, t: int) -> int:
    return comb(n + t - 1, n)


def _ring_spec(rng: random.Random, cfg: GeneratorConfig, names=None, truncation=None):
    """Random ring whose relations lie in the square of the maximal ideal (so edim = #vars)."""
    for _ in range(cfg.max_tries):
        n = len(names) if names else rng.randint(cfg.min_vars, cfg.max_vars)
        vs = list(names) if names else list(VAR_NAMES[:n])
        t = truncation or rng.randint(cfg.min_truncation, cfg.max_truncation)
        while _dim_bound(n, t) > 4 * cfg.max_dim and t > 2:
            t -= 1
        rels = []
        if t > 2:
            for _ in range(rng.randint(0, cfg.max_extra_relations)):
                rels.append(random_poly(rng, vs, 2, t - 1, terms=rng.randint(1, 2)))
        spec = {"vars": vs, "relations": rels, "truncation": t}
        try:
            A = _build(cfg, spec)
        except CapExceeded:
            continue
        if A.dim <= cfg.max_dim:
            return spec, A
    raise CapExceeded("no ring within the dimension cap after max_tries draws")


def _build(cfg: GeneratorConfig, spec: dict):
    pres = AlgebraPresentation.from_strings(cfg.field, spec["vars"], spec["relations"], spec["truncation"])
    return build_algebra(pres, max_dim=cfg.max_dim)


def _doc(cfg: GeneratorConfig, kind: str, **parts) -> dict:
    doc = {"schema": SCHEMA_VERSION, "field": cfg.field,
           "description": f"generated: kind={kind} seed={cfg.seed}"}
    for key in ("rings", "morphisms", "modules", "command"):
        if key in parts:
            doc[key] = parts[key]
    return doc


def _columns(rng: random.Random, names, rank: int, count: int, min_deg: int, max_deg: int):
    cols = []
    for _ in range(count):
        col = []
        for _ in range(rank):
            col.append(random_poly(rng, names, min_deg, max_deg, terms=rng.randint(1, 2))
                       if rng.random() < 0.7 else "0")
        cols.append(col)
    return cols


def gen_random_algebra(cfg: GeneratorConfig) -> dict:
    rng = random.Random(cfg.seed)
    spec, _ = _ring_spec(rng, cfg)
    return _doc(cfg, "random-algebra", rings={"A": spec}, command={"name": "edim", "ring": "A"})


def gen_random_module(cfg: GeneratorConfig) -> dict:
    rng = random.Random(cfg.seed)
    spec, A = _ring_spec(rng, cfg)
    r = rng.randint(1, cfg.max_rank)
    while r * A.dim > 2 * cfg.max_dim and r > 1:
        r -= 1
    cols = _columns(rng, spec["vars"], r, rng.randint(0, cfg.max_columns), 1, spec["truncation"] - 1)
    return _doc(cfg, "random-module", rings={"A": spec},
                modules={"M": {"ring": "A", "kind": "cokernel", "rank": r, "columns": cols}},
                command={"name": "torsion-ratio", "module": "M"})


def gen_independent_pair(cfg: GeneratorConfig) -> dict:
    """x = the variables, M = A^r / N with N inside m_A^2 A^r, so M/m^2 M is free over A/m^2."""
    rng = random.Random(cfg.seed)
    spec, A = _ring_spec(rng, replace(cfg, min_truncation=max(cfg.min_truncation, 3)))
    r = rng.randint(1, cfg.max_rank)
    while r * A.dim > 2 * cfg.max_dim and r > 1:
        r -= 1
    t = spec["truncation"]
    cols = _columns(rng, spec["vars"], r, rng.randint(0, cfg.max_columns), 2, max(2, t - 1))
    return _doc(cfg, "independent-pair", rings={"A": spec},
                modules={"M": {"ring": "A", "kind": "cokernel", "rank": r, "columns": cols}},
                command={"name": "indep", "module": "M", "sequence": list(spec["vars"])})


def gen_flat_finite(cfg: GeneratorConfig, linear_term: bool | None = None) -> dict:
    """B = A[s]/(s^e - f(s)) with the coefficients of f in m_A; B is free of rank e over A.

    With ``linear_term`` the constant coefficient of f is a variable of A, which keeps
    ``edim(B) = edim(A)``.
    """
    rng = random.Random(cfg.seed)
    small = replace(cfg, max_vars=min(cfg.max_vars, 2), max_truncation=min(cfg.max_truncation, 4),
                    max_dim=max(4, cfg.max_dim // 3))
    for _ in range(cfg.max_tries):
        aspec, A = _ring_spec(rng, small)
        e = rng.randint(2, 3)
        if e * A.dim > cfg.max_dim:
            continue
        vs = aspec["vars"]
        s = "s"
        lin = rng.random() < 0.5 if linear_term is None else linear_term
        coeffs = []
        for j in range(e):
            if j == 0 and lin:
                c = rng.choice(vs)
                extra = random_poly(rng, vs, 2, max(2, aspec["truncation"] - 1), terms=1) if rng.random() < 0.5 else ""
                coeffs.append(c + (f" + {extra}" if extra else ""))
            elif rng.random() < 0.4:
                coeffs.append(random_poly(rng, vs, 1, max(1, aspec["truncation"] - 1), terms=1))
            else:
                coeffs.append("")
        fpart = " ".join(f"- ({c})*{s}^{j}" if j else f"- ({c})" for j, c in enumerate(coeffs) if c)
        nil = A.nilpotency()
        # A's own truncation becomes explicit relations so that B can be truncated generously
        trunc_rels = [_monomial(vs, ex) for ex in _exponents(len(vs), aspec["truncation"])]
        bspec = {"vars": vs + [s], "relations": list(aspec["relations"]) + trunc_rels + [f"{s}^{e} {fpart}".strip()],
                 "truncation": e * nil + nil}
        try:
            B = _build(cfg, bspec)
        except (CapExceeded, NotLocal):
            continue
        if B.dim != e * A.dim:
            continue
        rank = rng.randint(1, cfg.max_rank)
        while rank * B.dim > 2 * cfg.max_dim and rank > 1:
            rank -= 1
        return _doc(cfg, "flat-finite-morphism", rings={"A": aspec, "B": bspec},
                    morphisms={"phi": {"source": "A", "target": "B", "images": list(vs)}},
                    modules={"M": {"ring": "B", "kind": "free", "rank": rank},
                             "BA": {"ring": "B", "kind": "algebra", "restrict": "phi"}},
                    command={"name": "certify", "route": "desmit", "morphism": "phi", "module": "M"})
    raise CapExceeded("no flat finite instance within the caps")


def gen_square_zero(cfg: GeneratorConfig) -> dict:
    """A with m_A^2 = 0, B a truncated polynomial ring, images deep enough to square to zero."""
    rng = random.Random(cfg.seed)
    n = rng.randint(1, 3)
    aspec = {"vars": list(VAR_NAMES[:n]), "relations": [], "truncation": 2}
    m = rng.randint(1, 2)
    bnames = ["u", "v"][:m]
    for _ in range(cfg.max_tries):
        tb = rng.randint(2, 6 if m == 1 else 4)
        bspec = {"vars": bnames, "relations": [], "truncation": tb}
        half = (tb + 1) // 2
        images = []
        for _ in range(n):
            images.append(random_poly(rng, bnames, half, tb - 1, terms=rng.randint(1, 2))
                          if half <= tb - 1 and rng.random() < 0.85 else "0")
        B = _build(cfg, bspec)
        rank = rng.randint(1, cfg.max_rank)
        if rank * B.dim > 2 * cfg.max_dim:
            rank = 1
        mod = {"ring": "B", "kind": "free", "rank": rank}
        if rng.random() < 0.5:
            # perturb a free module by a few relations
            mod = {"ring": "B", "kind": "cokernel", "rank": rank,
                   "columns": _columns(rng, bnames, rank, rng.randint(1, 2), 1, tb - 1)}
        return _doc(cfg, "square-zero", rings={"A": aspec, "B": bspec},
                    morphisms={"phi": {"source": "A", "target": "B", "images": images}},
                    modules={"M": mod},
                    command={"name": "certify", "route": "special-fiber", "morphism": "phi", "module": "M"})
    raise CapExceeded("no square-zero instance within the caps")


def gen_balanced(cfg: GeneratorConfig) -> dict:
    """A = k[x_1..x_n]/m^2 into a one- or two-variable truncated ring B.

    Half of the draws embed the variables into distinct powers of a single
    variable, the shape for which the balanced criterion can succeed.
    """
    rng = random.Random(cfg.seed)
    n = rng.randint(2, 3)
    avars = list(VAR_NAMES[:n])
    aspec = {"vars": avars, "relations": [], "truncation": 2}
    if rng.random() < 0.5:
        tb = rng.randint(2 * n - 1, 2 * n + 1)
        lo = (tb + 1) // 2
        powers = list(range(lo, tb))
        while len(powers) < n:
            powers.append(tb)  # maps to zero
        rng.shuffle(powers)
        bspec = {"vars": ["u"], "relations": [], "truncation": tb}
        images = [f"u^{p}" if p < tb else "0" for p in powers[:n]]
        bn = ["u"]
    else:
        tb = rng.randint(3, 4)
        bn = ["u", "v"]
        bspec = {"vars": bn, "relations": [], "truncation": tb}
        lo = (tb + 1) // 2
        images = [random_poly(rng, bn, lo, tb - 1, terms=rng.randint(1, 2)) for _ in range(n)]
    mod = {"ring": "B", "kind": "algebra"}
    r = rng.random()
    if r < 0.3:
        mod = {"ring": "B", "kind": "free", "rank": 2}
    elif r < 0.5:
        mod = {"ring": "B", "kind": "cokernel", "rank": 1,
               "columns": [[random_poly(rng, bn, 1, tb - 1, terms=1)]]}
    return _doc(cfg, "balanced", rings={"A": aspec, "B": bspec},
                morphisms={"phi": {"source": "A", "target": "B", "images": images}},
                modules={"M": mod},
                command={"name": "certify", "route": "balanced", "morphism": "phi", "module": "M"})


def _entry(rng: random.Random, vs, t: int, unit: bool) -> str:
    """A matrix entry: a unit plus higher terms, or a random element of the maximal ideal."""
    if rng.random() < 0.2 and not unit:
        return "0"
    body = random_poly(rng, vs, 1, max(1, t - 2), terms=rng.randint(1, 2))
    if unit:
        c = rng.randint(1, 5)
        return f"{c} + {body}" if rng.random() < 0.6 else str(c)
    return body


def gen_liaison(cfg: GeneratorConfig, unit_prob: float = 0.7) -> dict:
    """u = the variables (so J_u = m_A) and x = uW for a random square W over A.

    x is kept only when it is M-independent; the check is the library's own
    independence test, so the liaison suite is conditioned on it.
    """
    from .independence import is_independent
    rng = random.Random(cfg.seed)
    small = replace(cfg, max_vars=min(cfg.max_vars, 2), max_dim=min(cfg.max_dim, 24),
                    min_truncation=3, max_truncation=8)
    for _ in range(cfg.max_tries):
        n = rng.randint(1, small.max_vars)
        t = rng.randint(3, 8 if n == 1 else 5)
        spec, A = _ring_spec(rng, small, names=VAR_NAMES[:n], truncation=t)
        vs = spec["vars"]
        t = spec["truncation"]
        W = [[_entry(rng, vs, t, unit=(i == j and rng.random() < unit_prob)) for j in range(n)]
             for i in range(n)]
        xs = []
        for j in range(n):
            xs.append(" + ".join(f"({vs[i]})*({W[i][j]})" for i in range(n) if W[i][j] != "0") or "0")
        roll = rng.random()
        if roll < 0.45:
            mod = {"ring": "A", "kind": "algebra"}
        elif roll < 0.6:
            mod = {"ring": "A", "kind": "free", "rank": 2}
        elif roll < 0.75:
            # A/(v^k): Ann(M/J_xM) is usually larger than J_x here
            mod = {"ring": "A", "kind": "quotient-ideal", "ideal": [f"{rng.choice(vs)}^{rng.randint(2, t - 1)}"]}
        else:
            # non-free: relations deep in the maximal ideal so that x can stay independent
            r = rng.randint(1, 2)
            mod = {"ring": "A", "kind": "cokernel", "rank": r,
                   "columns": _columns(rng, vs, r, rng.randint(1, 2), max(2, t - 2), t - 1)}
        doc = _doc(cfg, "liaison", rings={"A": spec}, modules={"M": mod},
                   command={"name": "liaison", "module": "M", "x": xs, "u": list(vs)})
        inst = parse_instance(doc, max_dim=cfg.max_dim)
        M = inst.modules["M"]
        xe = [A.element(s) for s in xs]
        if any(A.is_zero(x) for x in xe):
            continue
        if is_independent(xe, M).verdict:
            doc["command"]["x"] = [inst.rings["A"].format(x) for x in xe]
            doc["command"]["W"] = W
            return doc
    raise CapExceeded("no independent liaison pair within max_tries")


GENERATORS = {
    "random-algebra": gen_random_algebra,
    "random-module": gen_random_module,
    "independent-pair": gen_independent_pair,
    "flat-finite-morphism": gen_flat_finite,
    "square-zero": gen_square_zero,
    "balanced": gen_balanced,
    "liaison": gen_liaison,
}


def generate_instance(cfg: GeneratorConfig, kind: str) -> dict:
    if kind not in GENERATORS:
        raise ValueError(f"unknown generator kind {kind!r}; choose from {', '.join(KINDS)}")
    return GENERATORS[kind](cfg)


def instance_stream(kind: str, seeds, **knobs):
    """Parsed instances for a range of seeds (used by the property suites)."""
    for seed in seeds:
        cfg = GeneratorConfig(seed=seed, **knobs)
        doc = generate_instance(cfg, kind)
        yield seed, doc, parse_instance(doc, max_dim=4 * cfg.max_dim)


def homotopy_case(seed: int, attempts: int = 6, **knobs):
    """A liaison pair plus a degree-zero morphism ``K(x) -> M_•`` for the homotopy constructor.

    ``M_•`` is ``K(u, M)`` shifted down by one and the morphism is ``delta^mu ∘ ΛW``
    (or ``m·ΛW`` with ``det(W) m`` in ``J_x M``).  Draws whose morphism already
    lands in ``J_x M_•`` are skipped when another draw works, so most cases need
    a nonzero homotopy.  Returns ``(A, Kx, target, phi)``.
    """
    from . import linalg as la
    from .algmatrix import determinant
    from .independence import relation_kernel
    from .koszul import (as_degree_zero, build_koszul, construct_homotopy, delta_mu,
                         multiplication_morphism, wedge_morphism)
    cfg = GeneratorConfig(seed=seed, **knobs)
    doc = gen_liaison(cfg, unit_prob=0.25)
    inst = parse_instance(doc, max_dim=4 * cfg.max_dim)
    A, M = inst.rings["A"], inst.modules["M"]
    cmd = doc["command"]
    xs = [A.element(s) for s in cmd["x"]]
    us = [A.element(s) for s in cmd["u"]]
    W = [[A.element(s) for s in row] for row in cmd["W"]]
    rng = random.Random(seed + 7919)
    LW = wedge_morphism(A, W, xs, us)
    Kx = build_koszul(A, xs)
    n, d = len(us), M.dim
    K = relation_kernel(us, M)
    allowed = la.preimage(A.F, M.act_mat(determinant(A, W)), M.sequence_times(xs).rows)
    first = None
    for _ in range(attempts):
        if K.shape[0] and rng.random() < 0.6:
            comb_ = A.F.zeros((K.shape[1],))
            for row in K:
                comb_ = A.F.reduce(comb_ + A.F.random_scalar(rng) * row)
            mu = [comb_[i * d:(i + 1) * d] for i in range(n)]
            phi = as_degree_zero(delta_mu(A, us, mu, M).compose(LW), n)
        else:
            m = M.zero()
            for row in allowed:
                m = A.F.reduce(m + A.F.random_scalar(rng) * row)
            phi = multiplication_morphism(A, us, m, M).compose(LW)
        first = first or phi
        if not construct_homotopy(Kx, phi.target, phi).zero:
            return A, Kx, phi.target, phi
    return A, Kx, first.target, first


__all__ = ["GeneratorConfig", "KINDS", "generate_instance", "instance_stream", "homotopy_case",
           "random_poly", "Instance", "gen_random_algebra", "gen_random_module", "gen_independent_pair",
           "gen_flat_finite", "gen_square_zero", "gen_balanced", "gen_liaison"]
